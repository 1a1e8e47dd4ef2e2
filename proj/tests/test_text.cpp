#include <doctest.h>

#include "ndb/text.hpp"

using namespace ndb;

TEST_CASE("tokenize lowercases, splits on non-alphanumerics, keeps digits") {
  CHECK(tokenize("Teuvo was born in 1912 in Ruskala.") ==
        std::vector<std::string>{"teuvo", "was", "born", "in", "1912", "in", "ruskala"});
  CHECK(tokenize("Sheryl is Nicholas's spouse.") ==
        std::vector<std::string>{"sheryl", "is", "nicholas", "s", "spouse"});
  CHECK(tokenize("Washington D.C.") == std::vector<std::string>{"washington", "d", "c"});
  CHECK(tokenize("...").empty());
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize applies no stemming") {
  CHECK(tokenize("lives") == std::vector<std::string>{"lives"});
  CHECK(tokenize("living") == std::vector<std::string>{"living"});
}

TEST_CASE("normalize_answer trims and collapses whitespace, keeps case") {
  CHECK(normalize_answer("  Washington   D.C. ") == "Washington D.C.");
  CHECK(normalize_answer("TRUE") == "TRUE");
  CHECK(normalize_answer("a\t\nb") == "a b");
  CHECK(normalize_answer("   ") == "");
}

TEST_CASE("fnv1a64 matches the published reference constants") {
  // Reference vectors from the FNV specification.
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("splitmix64 matches the reference sequence") {
  // First two outputs of the splitmix64 reference implementation seeded with 0.
  CHECK(splitmix64(0) == 16294208416658607535ull);
  CHECK(splitmix64(0x9e3779b97f4a7c15ull) == 7960286522194355700ull);
}
