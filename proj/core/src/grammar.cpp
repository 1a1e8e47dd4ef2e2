#include "ndb/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <mutex>
#include <regex>

#include "ndb/errors.hpp"

namespace ndb {

namespace {

struct CompiledPattern {
  std::regex re;
  std::vector<char> slots;  // capture group order: 'S', 'O', '1', '2'
};

CompiledPattern compile_pattern(std::string_view pattern) {
  std::string re;
  std::vector<char> slots;
  for (std::size_t i = 0; i < pattern.size();) {
    const char c = pattern[i];
    if (c == '$' && i + 1 < pattern.size()) {
      const char next = pattern[i + 1];
      if (next == 'S') {
        slots.push_back('S');
        re += "(.+?)";
        i += 2;
        continue;
      }
      if (next == 'O') {
        if (i + 2 < pattern.size() && (pattern[i + 2] == '1' || pattern[i + 2] == '2')) {
          slots.push_back(pattern[i + 2]);
          re += "(.+?)";
          i += 3;
          continue;
        }
        slots.push_back('O');
        re += "(.+?)";
        i += 2;
        continue;
      }
    }
    if (std::strchr("\\^$.|?*+()[]{}", c) != nullptr) re += '\\';
    re += c;
    ++i;
  }
  return {std::regex("^" + re + "$"), std::move(slots)};
}

// Compiled patterns are cached globally; parsing happens on SPJ worker
// threads, so the cache is mutex-guarded. Matching a const regex is safe.
const CompiledPattern& compiled(const std::string& pattern) {
  static std::mutex mu;
  static std::map<std::string, CompiledPattern> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(pattern);
  if (it == cache.end()) it = cache.emplace(pattern, compile_pattern(pattern)).first;
  return it->second;
}

std::optional<std::map<char, std::string>> match_pattern(const std::string& pattern,
                                                         std::string_view text) {
  const CompiledPattern& cp = compiled(pattern);
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, cp.re)) return std::nullopt;
  std::map<char, std::string> out;
  for (std::size_t g = 0; g < cp.slots.size(); ++g) out[cp.slots[g]] = m[g + 1].str();
  return out;
}

}  // namespace

std::string render_pattern(std::string_view pattern,
                           const std::map<char, std::string_view>& slots) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size();) {
    const char c = pattern[i];
    if (c == '$' && i + 1 < pattern.size()) {
      char slot = 0;
      std::size_t advance = 0;
      if (pattern[i + 1] == 'S') {
        slot = 'S';
        advance = 2;
      } else if (pattern[i + 1] == 'O') {
        if (i + 2 < pattern.size() && (pattern[i + 2] == '1' || pattern[i + 2] == '2')) {
          slot = pattern[i + 2];
          advance = 3;
        } else {
          slot = 'O';
          advance = 2;
        }
      }
      if (slot != 0) {
        const auto it = slots.find(slot);
        if (it == slots.end()) {
          raise(ErrorCode::InvalidArgument,
                std::string("pattern slot $") + slot + " has no value: " + std::string(pattern));
        }
        out += it->second;
        i += advance;
        continue;
      }
    }
    out += c;
    ++i;
  }
  return out;
}

const Gazetteer::Place* Gazetteer::find_city(std::string_view city) const {
  for (const Place& p : places) {
    if (p.city == city) return &p;
  }
  return nullptr;
}

bool Gazetteer::is_region(std::string_view name) const {
  for (const Place& p : places) {
    if (p.country == name || p.continent == name) return true;
  }
  return false;
}

bool Gazetteer::region_contains(std::string_view region, std::string_view city) const {
  const Place* p = find_city(city);
  if (p == nullptr) raise(ErrorCode::UnknownPlace, "unknown city " + std::string(city));
  return p->country == region || p->continent == region;
}

bool validate_entity(EntityClass cls, std::string_view text, const Gazetteer& gaz) {
  if (text.empty()) return false;
  switch (cls) {
    case EntityClass::Person: {
      if (!std::isupper(static_cast<unsigned char>(text.front()))) return false;
      return std::all_of(text.begin(), text.end(),
                         [](unsigned char c) { return std::isalpha(c) != 0; });
    }
    case EntityClass::City:
      return gaz.find_city(text) != nullptr;
    case EntityClass::Occupation:
      return std::find(gaz.occupations.begin(), gaz.occupations.end(), text) !=
             gaz.occupations.end();
    case EntityClass::Trait:
      return std::find(gaz.traits.begin(), gaz.traits.end(), text) != gaz.traits.end();
    case EntityClass::Year: {
      if (text.size() > 4) return false;
      return std::all_of(text.begin(), text.end(),
                         [](unsigned char c) { return std::isdigit(c) != 0; });
    }
  }
  return false;
}

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::LookupBool: return "lookup_bool";
    case QueryKind::LookupExtract: return "lookup_extract";
    case QueryKind::JoinBool: return "join_bool";
    case QueryKind::JoinExtract: return "join_extract";
    case QueryKind::Set: return "set";
    case QueryKind::Count: return "count";
    case QueryKind::MinMax: return "minmax";
  }
  return "lookup_extract";
}

std::optional<QueryKind> query_kind_from_string(std::string_view label) {
  for (const auto kind : {QueryKind::LookupBool, QueryKind::LookupExtract, QueryKind::JoinBool,
                          QueryKind::JoinExtract, QueryKind::Set, QueryKind::Count,
                          QueryKind::MinMax}) {
    if (to_string(kind) == label) return kind;
  }
  return std::nullopt;
}

Gazetteer Gazetteer::standard() {
  Gazetteer g;
  g.people = {
      "Nicholas", "Sheryl",  "Teuvo",   "Mahesh",  "Ada",     "Ben",     "Clara",  "David",
      "Elena",    "Felix",   "Grace",   "Henry",   "Irene",   "Jakob",   "Karin",  "Liam",
      "Maria",    "Noah",    "Olga",    "Peter",   "Quinn",   "Rosa",    "Samuel", "Tara",
      "Ulrich",   "Vera",    "Walter",  "Xenia",   "Yusuf",   "Zoe",     "Amara",  "Bruno",
      "Celia",    "Dmitri",  "Esther",  "Farid",   "Gerda",   "Hugo",    "Ines",   "Jonas",
      "Katya",    "Lucas",   "Mira",    "Nina",    "Oscar",   "Paula",   "Ravi",   "Sonia",
      "Tomas",    "Uma",     "Viktor",  "Wanda",   "Yara",    "Zane",    "Anneli", "Bjorn"};
  g.fictional_people = {"Elbon",  "Tirok",   "Vasla",   "Ormund", "Quibby",  "Drenth",  "Yalda",
                        "Fenwick", "Norbit",  "Galvin",  "Mirthal", "Sorrel", "Tavish",  "Ulmo",
                        "Vexley", "Wyndham", "Xandor",  "Yorick", "Zephan",  "Quilla"};
  g.occupations = {"nurse", "teacher", "baker",      "doctor", "pilot",  "farmer",   "lawyer",
                   "chef",  "plumber", "journalist", "barber", "tailor", "gardener", "mechanic",
                   "driver"};
  g.traits = {"coffee", "tea",      "chess",    "jazz",    "hiking",
              "poetry", "painting", "football", "cycling", "photography"};
  g.places = {
      {"Washington D.C.", "America", "North America"},
      {"Huntsville", "America", "North America"},
      {"Chicago", "America", "North America"},
      {"Boston", "America", "North America"},
      {"Denver", "America", "North America"},
      {"Toronto", "Canada", "North America"},
      {"Montreal", "Canada", "North America"},
      {"Vancouver", "Canada", "North America"},
      {"Ruskala", "Finland", "Europe"},
      {"Helsinki", "Finland", "Europe"},
      {"Tampere", "Finland", "Europe"},
      {"Madrid", "Spain", "Europe"},
      {"Seville", "Spain", "Europe"},
      {"Valencia", "Spain", "Europe"},
      {"Berlin", "Germany", "Europe"},
      {"Munich", "Germany", "Europe"},
      {"Hamburg", "Germany", "Europe"},
      {"Mumbai", "India", "Asia"},
      {"Delhi", "India", "Asia"},
      {"Pune", "India", "Asia"},
      {"Tokyo", "Japan", "Asia"},
      {"Osaka", "Japan", "Asia"},
      {"Kyoto", "Japan", "Asia"},
      {"Recife", "Brazil", "South America"},
      {"Curitiba", "Brazil", "South America"},
      {"Salvador", "Brazil", "South America"},
  };
  g.year_min = 1900;
  g.year_max = 1999;
  return g;
}

void TemplateRegistry::add_relation(RelationSpec spec) {
  if (by_name_.count(spec.name)) {
    raise(ErrorCode::InvalidArgument, "duplicate relation " + spec.name);
  }
  for (const auto& t : spec.fact_templates) {
    if (t.find("$S") == std::string::npos || t.find("$O") == std::string::npos) {
      raise(ErrorCode::InvalidArgument, "fact template needs $S and $O: " + t);
    }
  }
  by_name_.emplace(spec.name, relations_.size());
  relations_.push_back(std::move(spec));
}

void TemplateRegistry::add_composite(CompositeTemplate tmpl) {
  if (tmpl.triples.size() != 2) {
    raise(ErrorCode::InvalidArgument, "composite templates state exactly two triples");
  }
  for (const auto& t : tmpl.triples) {
    if (!has_relation(t.relation)) raise(ErrorCode::UnknownRelation, t.relation);
  }
  if (tmpl.pattern.find("$S") == std::string::npos ||
      tmpl.pattern.find("$O1") == std::string::npos ||
      tmpl.pattern.find("$O2") == std::string::npos) {
    raise(ErrorCode::InvalidArgument, "composite template needs $S, $O1, $O2: " + tmpl.pattern);
  }
  composites_.push_back(std::move(tmpl));
}

void TemplateRegistry::add_join(JoinTemplate tmpl) {
  const RelationSpec& r1 = relation(tmpl.relation1);
  const RelationSpec& r2 = relation(tmpl.relation2);
  if (r1.object_class != r2.subject_class) {
    raise(ErrorCode::NoJoinPath, tmpl.relation1 + " does not chain into " + tmpl.relation2);
  }
  if (tmpl.kind != QueryKind::JoinBool && tmpl.kind != QueryKind::JoinExtract) {
    raise(ErrorCode::InvalidArgument, "join templates are join_bool or join_extract");
  }
  joins_.push_back(std::move(tmpl));
}

void TemplateRegistry::add_minmax(MinMaxTemplate tmpl) {
  if (!has_relation(tmpl.relation)) raise(ErrorCode::UnknownRelation, tmpl.relation);
  minmax_.push_back(std::move(tmpl));
}

bool TemplateRegistry::has_relation(std::string_view name) const {
  return by_name_.find(name) != by_name_.end();
}

const RelationSpec& TemplateRegistry::relation(std::string_view name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) raise(ErrorCode::UnknownRelation, std::string(name));
  return relations_[it->second];
}

std::string TemplateRegistry::render_fact(std::string_view relation_name,
                                          std::string_view subject, std::string_view object,
                                          std::size_t template_index) const {
  const RelationSpec& spec = relation(relation_name);
  if (template_index >= spec.fact_templates.size()) {
    raise(ErrorCode::IndexOutOfRange,
          spec.name + " has no fact template " + std::to_string(template_index));
  }
  return render_pattern(spec.fact_templates[template_index], {{'S', subject}, {'O', object}});
}

std::string TemplateRegistry::render_composite(std::size_t composite_index,
                                               std::string_view subject, std::string_view o1,
                                               std::string_view o2) const {
  if (composite_index >= composites_.size()) {
    raise(ErrorCode::IndexOutOfRange, "no composite template " + std::to_string(composite_index));
  }
  return render_pattern(composites_[composite_index].pattern,
                        {{'S', subject}, {'1', o1}, {'2', o2}});
}

std::optional<std::vector<ProvenanceTriple>> TemplateRegistry::parse_fact(
    std::string_view text, const Gazetteer& gaz) const {
  for (const CompositeTemplate& tmpl : composites_) {
    const auto slots = match_pattern(tmpl.pattern, text);
    if (!slots) continue;
    std::vector<ProvenanceTriple> triples;
    bool valid = true;
    for (const auto& t : tmpl.triples) {
      const RelationSpec& spec = relation(t.relation);
      const std::string& subj = slots->at(t.subject_slot);
      const std::string& obj = slots->at(t.object_slot);
      if (!validate_entity(spec.subject_class, subj, gaz) ||
          !validate_entity(spec.object_class, obj, gaz)) {
        valid = false;
        break;
      }
      triples.push_back({t.relation, subj, obj});
    }
    if (valid) return triples;
  }

  for (const RelationSpec& spec : relations_) {
    for (const std::string& pattern : spec.fact_templates) {
      const auto slots = match_pattern(pattern, text);
      if (!slots) continue;
      const std::string& subj = slots->at('S');
      const std::string& obj = slots->at('O');
      if (!validate_entity(spec.subject_class, subj, gaz) ||
          !validate_entity(spec.object_class, obj, gaz)) {
        continue;
      }
      return std::vector<ProvenanceTriple>{{spec.name, subj, obj}};
    }
  }
  return std::nullopt;
}

std::optional<ParsedQuery> TemplateRegistry::parse_query(std::string_view text,
                                                         const Gazetteer& gaz) const {
  for (const MinMaxTemplate& tmpl : minmax_) {
    if (tmpl.pattern != text) continue;
    const RelationSpec& spec = relation(tmpl.relation);
    ParsedQuery q;
    q.kind = QueryKind::MinMax;
    q.agg = tmpl.agg;
    q.relation = tmpl.relation;
    q.relation_functional = spec.functional;
    q.relation_symmetric = spec.symmetric;
    return q;
  }

  for (const JoinTemplate& tmpl : joins_) {
    const auto slots = match_pattern(tmpl.pattern, text);
    if (!slots) continue;
    const RelationSpec& r1 = relation(tmpl.relation1);
    const RelationSpec& r2 = relation(tmpl.relation2);
    const std::string& subj = slots->at('S');
    if (!validate_entity(r1.subject_class, subj, gaz)) continue;
    ParsedQuery q;
    q.kind = tmpl.kind;
    q.agg = AggregationFunction::NoAggregation;
    q.relation = tmpl.relation1;
    q.relation2 = tmpl.relation2;
    q.relation_functional = r1.functional;
    q.relation_symmetric = r1.symmetric;
    q.relation2_functional = r2.functional;
    q.relation2_symmetric = r2.symmetric;
    q.subject = subj;
    if (tmpl.kind == QueryKind::JoinBool) {
      const std::string& obj = slots->at('O');
      if (!validate_entity(r2.object_class, obj, gaz)) continue;
      q.object = obj;
    }
    return q;
  }

  for (const RelationSpec& spec : relations_) {
    for (const QueryTemplate& tmpl : spec.query_templates) {
      const auto slots = match_pattern(tmpl.pattern, text);
      if (!slots) continue;
      ParsedQuery q;
      q.kind = tmpl.kind;
      q.relation = spec.name;
      q.relation_functional = spec.functional;
      q.relation_symmetric = spec.symmetric;
      q.agg = tmpl.kind == QueryKind::Count ? AggregationFunction::Count
                                            : AggregationFunction::NoAggregation;
      const auto subj_it = slots->find('S');
      const auto obj_it = slots->find('O');
      bool valid = true;
      if (subj_it != slots->end()) {
        if (validate_entity(spec.subject_class, subj_it->second, gaz)) {
          q.subject = subj_it->second;
        } else {
          valid = false;
        }
      }
      if (valid && obj_it != slots->end()) {
        if (validate_entity(spec.object_class, obj_it->second, gaz)) {
          q.object = obj_it->second;
        } else if (tmpl.kind == QueryKind::LookupBool && spec.object_class == EntityClass::City &&
                   gaz.is_region(obj_it->second)) {
          q.object = obj_it->second;
          q.implicit_region = true;
        } else {
          valid = false;
        }
      }
      if (!valid) continue;
      if (tmpl.kind == QueryKind::Set || tmpl.kind == QueryKind::Count) {
        q.ask_subject = tmpl.ask == QueryTemplate::Ask::Subject;
      }
      return q;
    }
  }
  return std::nullopt;
}

TemplateRegistry TemplateRegistry::standard() {
  TemplateRegistry reg;
  using QT = QueryTemplate;
  using Ask = QueryTemplate::Ask;

  reg.add_relation({
      .name = "spouseOf",
      .functional = true,
      .symmetric = true,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Person,
      .fact_templates = {"$S is $O's spouse.", "$S is married to $O.", "$S and $O are married.",
                         "$S tied the knot with $O.", "$O is the spouse of $S."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "Who is $S's spouse?", Ask::Object},
              {QueryKind::LookupExtract, "Who is $S's husband?", Ask::Object},
              {QueryKind::LookupExtract, "Who is $S's wife?", Ask::Object},
              {QueryKind::LookupExtract, "Whom did $S marry?", Ask::Object},
              {QueryKind::LookupBool, "Are $S and $O married?", Ask::Object},
              {QueryKind::LookupBool, "Is $S married to $O?", Ask::Object},
              {QueryKind::LookupBool, "Did $S marry $O?", Ask::Object},
          },
  });

  reg.add_relation({
      .name = "fatherOf",  // fatherOf(S, O): O is the father of S
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Person,
      .fact_templates = {"$O is $S's father.", "$S's father is $O.", "$S has $O for a father.",
                         "$O fathered $S.", "The father of $S is $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "Who is $S's father?", Ask::Object},
              {QueryKind::LookupExtract, "Who fathered $S?", Ask::Object},
              {QueryKind::LookupBool, "Is $O the father of $S?", Ask::Object},
              {QueryKind::LookupBool, "Does $S have $O for a father?", Ask::Object},
          },
  });

  reg.add_relation({
      .name = "motherOf",  // parse-only: registered so the question form exists
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Person,
      .fact_templates = {"$O is $S's mother.", "$S's mother is $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "Who is $S's mother?", Ask::Object},
          },
  });

  reg.add_relation({
      .name = "livesIn",
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::City,
      .fact_templates = {"$S lives in $O.", "$S resides in $O.", "$S's home is in $O.",
                         "$S has settled in $O.", "$S makes a home in $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "Where does $S live?", Ask::Object},
              {QueryKind::LookupExtract, "In which city does $S live?", Ask::Object},
              {QueryKind::LookupBool, "Does $S live in $O?", Ask::Object},
              {QueryKind::LookupBool, "Is $S settled in $O?", Ask::Object},
              {QueryKind::Set, "Who lives in $O?", Ask::Subject},
              {QueryKind::Set, "List all people living in $O", Ask::Subject},
              {QueryKind::Count, "How many people live in $O?", Ask::Subject},
          },
  });

  reg.add_relation({
      .name = "employedAs",
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Occupation,
      .fact_templates = {"$S works as a $O.", "$S is employed as a $O.",
                         "$S earns a living as a $O.", "$S's job is $O.",
                         "$S took a job as a $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "What is $S's job?", Ask::Object},
              {QueryKind::LookupExtract, "What does $S do for a living?", Ask::Object},
              {QueryKind::LookupBool, "Does $S work as a $O?", Ask::Object},
              {QueryKind::LookupBool, "Is $S a $O?", Ask::Object},
              {QueryKind::Set, "Who works as a $O?", Ask::Subject},
              {QueryKind::Count, "How many people work as a $O?", Ask::Subject},
          },
  });

  // bornInYear fact templates share no token with the who/which extremum
  // questions below; that gap is what breaks bag-of-words retrieval there.
  reg.add_relation({
      .name = "bornInYear",
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Year,
      .fact_templates = {"$S was born during $O.", "$S's year of birth was $O.",
                         "$O saw $S's birth.", "$S has $O as a birth year.",
                         "$S came to this world during $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "When was $S born?", Ask::Object},
              {QueryKind::LookupExtract, "In which year was $S born?", Ask::Object},
              {QueryKind::LookupBool, "Was $S born during $O?", Ask::Object},
          },
  });

  reg.add_relation({
      .name = "bornInPlace",
      .functional = true,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::City,
      .fact_templates = {"$S's mum gave birth to him in $O", "$S was born in $O.",
                         "$S's birthplace is $O.", "$O is where $S was born.",
                         "$S first saw daylight in $O."},
      .query_templates =
          {
              {QueryKind::LookupExtract, "Where was $S born?", Ask::Object},
              {QueryKind::LookupBool, "Was $S born in $O?", Ask::Object},
          },
  });

  reg.add_relation({
      .name = "likes",
      .functional = false,
      .symmetric = false,
      .subject_class = EntityClass::Person,
      .object_class = EntityClass::Trait,
      .fact_templates = {"$S likes $O.", "$S is fond of $O.", "$S enjoys $O.",
                         "$S is keen on $O.", "$S appreciates $O."},
      .query_templates =
          {
              {QueryKind::LookupBool, "Does $S like $O?", Ask::Object},
              {QueryKind::Set, "What does $S like?", Ask::Object},
              {QueryKind::Set, "Who likes $O?", Ask::Subject},
              {QueryKind::Count, "How many people like $O?", Ask::Subject},
          },
  });

  reg.add_composite({.pattern = "$S lives in $O1 with $O2.",
                     .triples = {{"livesIn", 'S', '1'}, {"livesIn", '2', '1'}}});
  reg.add_composite({.pattern = "$S was born in $O1 in $O2.",
                     .triples = {{"bornInYear", 'S', '1'}, {"bornInPlace", 'S', '2'}}});
  reg.add_composite({.pattern = "In $O1, $S's mother gave birth to her in $O2.",
                     .triples = {{"bornInYear", 'S', '1'}, {"bornInPlace", 'S', '2'}}});
  reg.add_composite({.pattern = "$S works as a $O1 and lives in $O2.",
                     .triples = {{"employedAs", 'S', '1'}, {"livesIn", 'S', '2'}}});

  reg.add_join({"fatherOf", "employedAs", QueryKind::JoinBool,
                "Does $S's father work as a $O?"});
  reg.add_join({"fatherOf", "employedAs", QueryKind::JoinExtract, "What is $S's father's job?"});
  reg.add_join({"spouseOf", "livesIn", QueryKind::JoinBool, "Does $S's spouse live in $O?"});
  reg.add_join({"spouseOf", "livesIn", QueryKind::JoinExtract, "Where does $S's spouse live?"});
  reg.add_join({"spouseOf", "employedAs", QueryKind::JoinBool,
                "Does $S's spouse work as a $O?"});
  reg.add_join({"spouseOf", "employedAs", QueryKind::JoinExtract,
                "What is $S's spouse's job?"});
  reg.add_join({"fatherOf", "livesIn", QueryKind::JoinBool, "Does $S's father live in $O?"});
  reg.add_join({"fatherOf", "livesIn", QueryKind::JoinExtract, "Where does $S's father live?"});
  reg.add_join({"spouseOf", "bornInYear", QueryKind::JoinExtract,
                "In which year was $S's spouse born?"});

  reg.add_minmax({"bornInYear", "Who is the oldest person in the database?",
                  AggregationFunction::ArgMin});
  reg.add_minmax({"bornInYear", "Who is the youngest person in the database?",
                  AggregationFunction::ArgMax});
  reg.add_minmax({"bornInYear", "Which person is the oldest?", AggregationFunction::ArgMin});
  reg.add_minmax({"bornInYear", "Which person is the youngest?", AggregationFunction::ArgMax});
  reg.add_minmax({"bornInYear", "What is the earliest year of birth on record?",
                  AggregationFunction::Min});
  reg.add_minmax({"bornInYear", "What is the latest year of birth on record?",
                  AggregationFunction::Max});
  return reg;
}

}  // namespace ndb
