#include <doctest.h>

#include "ndb/errors.hpp"
#include "ndb/grammar.hpp"

using namespace ndb;

namespace {

const TemplateRegistry& reg() {
  static const TemplateRegistry r = TemplateRegistry::standard();
  return r;
}

const Gazetteer& gaz() {
  static const Gazetteer g = Gazetteer::standard();
  return g;
}

}  // namespace

TEST_CASE("fact rendering substitutes placeholders") {
  CHECK(reg().render_fact("spouseOf", "Sheryl", "Nicholas", 0) == "Sheryl is Nicholas's spouse.");
  CHECK(reg().render_fact("livesIn", "Ada", "Madrid", 0) == "Ada lives in Madrid.");
  CHECK(reg().render_fact("bornInPlace", "Mahesh", "Mumbai", 0) ==
        "Mahesh's mum gave birth to him in Mumbai");
  CHECK(reg().render_composite(0, "Nicholas", "Washington D.C.", "Sheryl") ==
        "Nicholas lives in Washington D.C. with Sheryl.");
  CHECK_THROWS_AS(reg().render_fact("ownsPet", "A", "B", 0), Error);
  CHECK_THROWS_AS(reg().render_fact("livesIn", "Ada", "Madrid", 99), Error);
  try {
    reg().render_fact("livesIn", "Ada", "Madrid", 99);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("atomic facts parse back into their triple") {
  const auto t = reg().parse_fact("Sheryl is Nicholas's spouse.", gaz());
  REQUIRE(t.has_value());
  REQUIRE(t->size() == 1);
  CHECK((*t)[0] == ProvenanceTriple{"spouseOf", "Sheryl", "Nicholas"});

  const auto born = reg().parse_fact("Mahesh's mum gave birth to him in Mumbai", gaz());
  REQUIRE(born.has_value());
  CHECK((*born)[0] == ProvenanceTriple{"bornInPlace", "Mahesh", "Mumbai"});

  const auto job = reg().parse_fact("Ada took a job as a nurse.", gaz());
  REQUIRE(job.has_value());
  CHECK((*job)[0] == ProvenanceTriple{"employedAs", "Ada", "nurse"});
}

TEST_CASE("composite facts parse into two triples") {
  const auto lives = reg().parse_fact("Nicholas lives in Washington D.C. with Sheryl.", gaz());
  REQUIRE(lives.has_value());
  REQUIRE(lives->size() == 2);
  CHECK((*lives)[0] == ProvenanceTriple{"livesIn", "Nicholas", "Washington D.C."});
  CHECK((*lives)[1] == ProvenanceTriple{"livesIn", "Sheryl", "Washington D.C."});

  const auto teuvo = reg().parse_fact("Teuvo was born in 1912 in Ruskala.", gaz());
  REQUIRE(teuvo.has_value());
  REQUIRE(teuvo->size() == 2);
  CHECK((*teuvo)[0] == ProvenanceTriple{"bornInYear", "Teuvo", "1912"});
  CHECK((*teuvo)[1] == ProvenanceTriple{"bornInPlace", "Teuvo", "Ruskala"});

  const auto sheryl =
      reg().parse_fact("In 1978, Sheryl's mother gave birth to her in Huntsville.", gaz());
  REQUIRE(sheryl.has_value());
  REQUIRE(sheryl->size() == 2);
  CHECK((*sheryl)[0] == ProvenanceTriple{"bornInYear", "Sheryl", "1978"});
  CHECK((*sheryl)[1] == ProvenanceTriple{"bornInPlace", "Sheryl", "Huntsville"});
}

TEST_CASE("every fact template round-trips through parse_fact") {
  for (const RelationSpec& spec : reg().relations()) {
    const std::string subject = "Nicholas";
    std::string object;
    switch (spec.object_class) {
      case EntityClass::Person: object = "Sheryl"; break;
      case EntityClass::City: object = "Madrid"; break;
      case EntityClass::Occupation: object = "nurse"; break;
      case EntityClass::Trait: object = "chess"; break;
      case EntityClass::Year: object = "1955"; break;
    }
    for (std::size_t i = 0; i < spec.fact_templates.size(); ++i) {
      const std::string text = reg().render_fact(spec.name, subject, object, i);
      const auto triples = reg().parse_fact(text, gaz());
      REQUIRE_MESSAGE(triples.has_value(), text);
      REQUIRE(triples->size() == 1);
      CHECK((*triples)[0] == (ProvenanceTriple{spec.name, subject, object}));
    }
  }
}

TEST_CASE("parse_fact rejects sentences outside the grammar") {
  CHECK_FALSE(reg().parse_fact("The weather is nice today.", gaz()).has_value());
  // Template shape with a class-invalid entity: 12 is not a city.
  CHECK_FALSE(reg().parse_fact("Ada lives in 12.", gaz()).has_value());
  CHECK_FALSE(reg().parse_fact("Ada lives in Atlantis.", gaz()).has_value());
}

TEST_CASE("lookup queries parse with subjects and objects") {
  const auto spouse = reg().parse_query("Who is Sheryl's husband?", gaz());
  REQUIRE(spouse.has_value());
  CHECK(spouse->kind == QueryKind::LookupExtract);
  CHECK(spouse->relation == "spouseOf");
  CHECK(spouse->subject == "Sheryl");
  CHECK(spouse->relation_symmetric);

  const auto mother = reg().parse_query("Who is Sheryl's mother?", gaz());
  REQUIRE(mother.has_value());
  CHECK(mother->relation == "motherOf");

  const auto boolean = reg().parse_query("Does Ada live in Madrid?", gaz());
  REQUIRE(boolean.has_value());
  CHECK(boolean->kind == QueryKind::LookupBool);
  CHECK(boolean->subject == "Ada");
  CHECK(boolean->object == "Madrid");
  CHECK_FALSE(boolean->implicit_region);
}

TEST_CASE("join queries parse with both hops") {
  const auto join = reg().parse_query("Does Nicholas's spouse live in Washington D.C.?", gaz());
  REQUIRE(join.has_value());
  CHECK(join->kind == QueryKind::JoinBool);
  CHECK(join->relation == "spouseOf");
  CHECK(join->relation2 == "livesIn");
  CHECK(join->subject == "Nicholas");
  CHECK(join->object == "Washington D.C.");

  const auto father = reg().parse_query("Does Mahesh's father work as a nurse?", gaz());
  REQUIRE(father.has_value());
  CHECK(father->kind == QueryKind::JoinBool);
  CHECK(father->relation == "fatherOf");
  CHECK(father->relation2 == "employedAs");

  const auto extract = reg().parse_query("What is Ada's father's job?", gaz());
  REQUIRE(extract.has_value());
  CHECK(extract->kind == QueryKind::JoinExtract);
  CHECK(extract->subject == "Ada");
}

TEST_CASE("set, count and extremum queries parse") {
  const auto set = reg().parse_query("Who lives in Madrid?", gaz());
  REQUIRE(set.has_value());
  CHECK(set->kind == QueryKind::Set);
  CHECK(set->ask_subject);
  CHECK(set->object == "Madrid");

  const auto likes = reg().parse_query("What does Tirok like?", gaz());
  REQUIRE(likes.has_value());
  CHECK(likes->kind == QueryKind::Set);
  CHECK_FALSE(likes->ask_subject);
  CHECK(likes->subject == "Tirok");

  const auto count = reg().parse_query("How many people work as a nurse?", gaz());
  REQUIRE(count.has_value());
  CHECK(count->kind == QueryKind::Count);
  CHECK(count->agg == AggregationFunction::Count);

  const auto oldest = reg().parse_query("Who is the oldest person in the database?", gaz());
  REQUIRE(oldest.has_value());
  CHECK(oldest->kind == QueryKind::MinMax);
  CHECK(oldest->relation == "bornInYear");
  CHECK(oldest->agg == AggregationFunction::ArgMin);

  const auto youngest = reg().parse_query("Which person is the youngest?", gaz());
  REQUIRE(youngest.has_value());
  CHECK(youngest->agg == AggregationFunction::ArgMax);

  const auto earliest = reg().parse_query("What is the earliest year of birth on record?", gaz());
  REQUIRE(earliest.has_value());
  CHECK(earliest->agg == AggregationFunction::Min);
}

TEST_CASE("implicit region objects flag containment questions") {
  const auto india = reg().parse_query("Was Mahesh born in India?", gaz());
  REQUIRE(india.has_value());
  CHECK(india->kind == QueryKind::LookupBool);
  CHECK(india->relation == "bornInPlace");
  CHECK(india->implicit_region);

  const auto mumbai = reg().parse_query("Was Mahesh born in Mumbai?", gaz());
  REQUIRE(mumbai.has_value());
  CHECK_FALSE(mumbai->implicit_region);

  const auto europe = reg().parse_query("Does Ada live in Europe?", gaz());
  REQUIRE(europe.has_value());
  CHECK(europe->relation == "livesIn");
  CHECK(europe->implicit_region);
}

TEST_CASE("unparseable queries yield nullopt") {
  CHECK_FALSE(reg().parse_query("Why is the sky blue?", gaz()).has_value());
  CHECK_FALSE(reg().parse_query("Who is x9's husband?", gaz()).has_value());
  CHECK_FALSE(reg().parse_query("Does Ada live in Atlantis?", gaz()).has_value());
}

TEST_CASE("parsed aggregation label agrees with surface-form classification") {
  const Gazetteer& g = gaz();
  auto check_query = [&](const std::string& text) {
    const auto parsed = reg().parse_query(text, g);
    REQUIRE_MESSAGE(parsed.has_value(), text);
    CHECK_MESSAGE(parsed->agg == classify_query(text), text);
  };
  for (const RelationSpec& spec : reg().relations()) {
    for (const QueryTemplate& qt : spec.query_templates) {
      std::string object;
      switch (spec.object_class) {
        case EntityClass::Person: object = "Sheryl"; break;
        case EntityClass::City: object = "Madrid"; break;
        case EntityClass::Occupation: object = "nurse"; break;
        case EntityClass::Trait: object = "chess"; break;
        case EntityClass::Year: object = "1955"; break;
      }
      std::map<char, std::string_view> slots;
      if (qt.pattern.find("$S") != std::string::npos) slots.emplace('S', "Nicholas");
      if (qt.pattern.find("$O") != std::string::npos) slots.emplace('O', object);
      check_query(render_pattern(qt.pattern, slots));
    }
  }
  for (const JoinTemplate& jt : reg().joins()) {
    std::map<char, std::string_view> slots{{'S', "Nicholas"}};
    std::string object;
    if (jt.kind == QueryKind::JoinBool) {
      const auto cls = reg().relation(jt.relation2).object_class;
      object = cls == EntityClass::City ? "Madrid" : (cls == EntityClass::Year ? "1955" : "nurse");
      slots.emplace('O', object);
    }
    check_query(render_pattern(jt.pattern, slots));
  }
  for (const MinMaxTemplate& mt : reg().minmax()) check_query(mt.pattern);
}

TEST_CASE("gazetteer containment and unknown places") {
  CHECK(gaz().region_contains("India", "Mumbai"));
  CHECK(gaz().region_contains("Asia", "Mumbai"));
  CHECK_FALSE(gaz().region_contains("Europe", "Mumbai"));
  CHECK(gaz().region_contains("North America", "Washington D.C."));
  CHECK_THROWS_AS(gaz().region_contains("Europe", "Atlantis"), Error);
  CHECK(gaz().is_region("Finland"));
  CHECK(gaz().is_region("South America"));
  CHECK_FALSE(gaz().is_region("Madrid"));
}

TEST_CASE("fictional likes-subjects stay out of the people pool") {
  for (const auto& name : gaz().fictional_people) {
    for (const auto& person : gaz().people) CHECK(name != person);
  }
}

TEST_CASE("registry validation rejects malformed additions") {
  TemplateRegistry r;
  CHECK_THROWS_AS(r.add_relation({.name = "broken",
                                  .fact_templates = {"no placeholders here"},
                                  .query_templates = {}}),
                  Error);
  r.add_relation({.name = "knows",
                  .subject_class = EntityClass::Person,
                  .object_class = EntityClass::Person,
                  .fact_templates = {"$S knows $O."},
                  .query_templates = {}});
  CHECK_THROWS_AS(r.add_relation({.name = "knows",
                                  .fact_templates = {"$S met $O."},
                                  .query_templates = {}}),
                  Error);
  r.add_relation({.name = "bornDuring",
                  .subject_class = EntityClass::Person,
                  .object_class = EntityClass::Year,
                  .fact_templates = {"$S appeared during $O."},
                  .query_templates = {}});
  // Year objects cannot chain into a Person-subject relation.
  try {
    r.add_join({"bornDuring", "knows", QueryKind::JoinExtract, "Whom does $S's cohort know?"});
    FAIL("expected NoJoinPath");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoJoinPath);
  }
  CHECK_THROWS_AS(r.relation("absent"), Error);
}
