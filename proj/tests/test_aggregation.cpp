#include <doctest.h>

#include <vector>

#include "ndb/aggregation.hpp"
#include "ndb/errors.hpp"

using namespace ndb;
using IR = IntermediateResult;

TEST_CASE("classify_query covers the six labels") {
  CHECK(classify_query("Who is Sheryl's husband?") == AggregationFunction::NoAggregation);
  CHECK(classify_query("Does Nicholas live in Washington D.C.?") ==
        AggregationFunction::NoAggregation);
  CHECK(classify_query("How many people live in Madrid?") == AggregationFunction::Count);
  CHECK(classify_query("Who is the oldest person in the database?") ==
        AggregationFunction::ArgMin);
  CHECK(classify_query("Which person is the youngest?") == AggregationFunction::ArgMax);
  CHECK(classify_query("What is the earliest year of birth on record?") ==
        AggregationFunction::Min);
  CHECK(classify_query("What is the latest year of birth on record?") == AggregationFunction::Max);
  // "how many" outranks extremum keywords.
  CHECK(classify_query("How many people are older than the oldest resident?") ==
        AggregationFunction::Count);
}

TEST_CASE("aggregation labels round trip through their wire names") {
  for (const auto fn :
       {AggregationFunction::NoAggregation, AggregationFunction::Count, AggregationFunction::Min,
        AggregationFunction::Max, AggregationFunction::ArgMin, AggregationFunction::ArgMax}) {
    const auto parsed = aggregation_from_string(to_string(fn));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == fn);
  }
  CHECK_FALSE(aggregation_from_string("sum").has_value());
}

TEST_CASE("no_aggregation unions distinct answers and drops nulls") {
  const std::vector<IR> items = {IR::answer("Nicholas"), IR::null(), IR::answer("Nicholas"),
                                 IR::answer("Sheryl")};
  CHECK(aggregate(AggregationFunction::NoAggregation, items) ==
        AnswerSet::of({"Nicholas", "Sheryl"}));
}

TEST_CASE("no_aggregation renders booleans as TRUE/FALSE") {
  const std::vector<IR> items = {IR::boolean(true), IR::null()};
  CHECK(aggregate(AggregationFunction::NoAggregation, items) == AnswerSet::of({"TRUE"}));
  const std::vector<IR> falsy = {IR::boolean(false)};
  CHECK(aggregate(AggregationFunction::NoAggregation, falsy) == AnswerSet::of({"FALSE"}));
}

TEST_CASE("all-null or empty input aggregates to NULL except under count") {
  const std::vector<IR> nulls = {IR::null(), IR::null()};
  CHECK(aggregate(AggregationFunction::NoAggregation, nulls) == AnswerSet::null());
  CHECK(aggregate(AggregationFunction::Min, nulls) == AnswerSet::null());
  CHECK(aggregate(AggregationFunction::ArgMax, nulls) == AnswerSet::null());
  CHECK(aggregate(AggregationFunction::Count, nulls) == AnswerSet::of({"0"}));
  CHECK(aggregate(AggregationFunction::Count, std::vector<IR>{}) == AnswerSet::of({"0"}));
}

TEST_CASE("count is distinct cardinality") {
  const std::vector<IR> items = {IR::answer("Belgium"), IR::answer("France"),
                                 IR::answer("Belgium"), IR::null()};
  CHECK(aggregate(AggregationFunction::Count, items) == AnswerSet::of({"2"}));
}

TEST_CASE("min and max reduce numeric tuple values") {
  const std::vector<IR> items = {IR::tuple("Teuvo", "1912"), IR::tuple("Sheryl", "1978")};
  CHECK(aggregate(AggregationFunction::Min, items) == AnswerSet::of({"1912"}));
  CHECK(aggregate(AggregationFunction::Max, items) == AnswerSet::of({"1978"}));
}

TEST_CASE("argmin and argmax return keys, keeping ties") {
  const std::vector<IR> items = {IR::tuple("Teuvo", "1912"), IR::tuple("Sheryl", "1978"),
                                 IR::tuple("Anne", "1912")};
  CHECK(aggregate(AggregationFunction::ArgMin, items) == AnswerSet::of({"Anne", "Teuvo"}));
  CHECK(aggregate(AggregationFunction::ArgMax, items) == AnswerSet::of({"Sheryl"}));
}

TEST_CASE("mixed integer and double tuple values compare numerically") {
  const std::vector<IR> items = {IR::tuple("a", "2"), IR::tuple("b", "1.5"),
                                 IR::tuple("c", "3")};
  CHECK(aggregate(AggregationFunction::Min, items) == AnswerSet::of({"1.5"}));
  CHECK(aggregate(AggregationFunction::ArgMax, items) == AnswerSet::of({"c"}));
}

TEST_CASE("non-numeric tuple values raise TypeMismatch under numeric functions") {
  const std::vector<IR> items = {IR::tuple("a", "not-a-number")};
  CHECK_THROWS_AS(aggregate(AggregationFunction::Min, items), Error);
  try {
    aggregate(AggregationFunction::ArgMax, items);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TypeMismatch);
  }
  const std::vector<IR> answers = {IR::answer("1912")};
  CHECK_THROWS_AS(aggregate(AggregationFunction::Max, answers), Error);
}

TEST_CASE("aggregate is permutation and duplication invariant") {
  std::vector<IR> items = {IR::tuple("Teuvo", "1912"), IR::tuple("Sheryl", "1978"),
                           IR::tuple("Anne", "1912")};
  const auto before = aggregate(AggregationFunction::ArgMin, items);
  std::swap(items[0], items[2]);
  CHECK(aggregate(AggregationFunction::ArgMin, items) == before);
  items.push_back(items[1]);
  CHECK(aggregate(AggregationFunction::ArgMin, items) == before);
}

TEST_CASE("answer sets keep NULL exclusive") {
  CHECK(AnswerSet::of({}) == AnswerSet::null());
  CHECK(AnswerSet::null().is_null());
  CHECK_FALSE(AnswerSet::of({"Teuvo"}).is_null());
  CHECK_THROWS_AS(AnswerSet::of({"NULL", "Teuvo"}), Error);
  CHECK(AnswerSet::of({"Nicholas", "Sheryl"}).render() == "{\"Nicholas\", \"Sheryl\"}");
  CHECK(AnswerSet::null().render() == "{\"NULL\"}");
}

TEST_CASE("numeric parsing and rendering") {
  REQUIRE(parse_numeric("1912").has_value());
  CHECK(render_numeric(*parse_numeric("1912")) == "1912");
  CHECK(render_numeric(*parse_numeric("-7")) == "-7");
  CHECK(render_numeric(*parse_numeric("2.5")) == "2.5");
  CHECK_FALSE(parse_numeric("12ab").has_value());
  CHECK_FALSE(parse_numeric("").has_value());
  CHECK(compare_numeric(*parse_numeric("2"), *parse_numeric("2.0")) == 0);
}

TEST_CASE("intermediate results round trip through JSON") {
  const std::vector<IR> all = {IR::null(), IR::boolean(true), IR::boolean(false),
                               IR::answer("Belgium"), IR::tuple("Teuvo", "1912")};
  for (const auto& r : all) {
    CHECK(intermediate_from_json(intermediate_to_json(r)) == r);
  }
  CHECK(IR::tuple("Teuvo", "1912").render() == "(Teuvo, 1912)");
  CHECK_THROWS_AS(intermediate_from_json(nlohmann::json{{"kind", "mystery"}}), Error);
  CHECK_THROWS_AS(intermediate_from_json(nlohmann::json{{"kind", "bool"}}), Error);
}
