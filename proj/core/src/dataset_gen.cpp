#include "ndb/dataset_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <istream>

#include <nlohmann/json.hpp>

#include "ndb/errors.hpp"
#include "ndb/spj.hpp"
#include "ndb/text.hpp"

namespace ndb {
namespace {

using json = nlohmann::json;

// One relational statement scheduled for this database, before sentence
// rendering. Merged assignments are emitted inside a composite sentence.
struct Assignment {
  std::string relation;
  std::string subject;
  std::string object;
  bool merged = false;
};

struct Merge {
  std::size_t composite_index = 0;
  std::map<char, std::string> binding;
};

struct FactPlan {
  std::string text;
  std::vector<ProvenanceTriple> triples;
};

bool has_slot(std::string_view pattern, std::string_view token) {
  return pattern.find(token) != std::string_view::npos;
}

// Relative fact volume per relation; chosen so that a 50-fact database has
// enough spouse/father links for joins and enough shared cities, jobs and
// traits for non-trivial sets and counts.
std::size_t relation_weight(std::string_view name) {
  static const std::map<std::string, std::size_t, std::less<>> weights = {
      {"spouseOf", 5},   {"fatherOf", 6},    {"livesIn", 10}, {"employedAs", 8},
      {"bornInYear", 9}, {"bornInPlace", 6}, {"likes", 6},
  };
  auto it = weights.find(name);
  return it == weights.end() ? 6 : it->second;
}

// Largest-remainder apportionment of `total` facts over the relations, in
// pure integer arithmetic so results cannot drift across platforms.
std::vector<std::size_t> allocate_counts(const std::vector<std::string>& relations,
                                         std::size_t total) {
  std::size_t weight_sum = 0;
  for (const auto& r : relations) weight_sum += relation_weight(r);
  std::vector<std::size_t> counts(relations.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    std::size_t raw = relation_weight(relations[i]) * total;
    counts[i] = raw / weight_sum;
    assigned += counts[i];
    remainders.emplace_back(raw % weight_sum, i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
    counts[remainders[k % remainders.size()].second] += 1;
  }
  return counts;
}

template <typename T>
std::vector<T> shuffled_copy(std::vector<T> items, std::mt19937_64& rng) {
  deterministic_shuffle(items, rng);
  return items;
}

// Entity pools and bookkeeping for one database's world.
struct World {
  const TemplateRegistry& reg;
  const Gazetteer& gaz;
  std::mt19937_64& rng;

  std::vector<std::string> cast;
  std::vector<std::string> city_pool;
  std::vector<std::string> occ_pool;
  std::vector<std::string> trait_pool;
  std::vector<std::string> fictional;
  std::vector<int> year_pool;
  std::size_t year_next = 0;

  // relation -> subjects already assigned (functional relations).
  std::map<std::string, std::set<std::string>> used_subjects;
  // people already inside a symmetric pair, per relation.
  std::map<std::string, std::set<std::string>> paired;
  // (relation, subject, object) already stated, for non-functional relations.
  std::set<std::tuple<std::string, std::string, std::string>> stated;
  // objects of person-to-person links; preferred subjects for attribute
  // relations so that two-hop chains actually exist.
  std::set<std::string> join_targets;

  const std::string& pick(const std::vector<std::string>& pool) {
    return pool[static_cast<std::size_t>(rng() % pool.size())];
  }

  std::optional<std::string> draw_object(const RelationSpec& spec, const std::string& subject) {
    switch (spec.object_class) {
      case EntityClass::Person: {
        std::vector<std::string> others;
        for (const auto& p : cast) {
          if (p != subject) others.push_back(p);
        }
        if (others.empty()) return std::nullopt;
        return pick(others);
      }
      case EntityClass::City:
        if (city_pool.empty()) return std::nullopt;
        return pick(city_pool);
      case EntityClass::Occupation:
        if (occ_pool.empty()) return std::nullopt;
        return pick(occ_pool);
      case EntityClass::Trait:
        if (trait_pool.empty()) return std::nullopt;
        return pick(trait_pool);
      case EntityClass::Year:
        if (year_next >= year_pool.size()) return std::nullopt;
        return std::to_string(year_pool[year_next++]);
    }
    return std::nullopt;
  }

  std::optional<Assignment> make_assignment(const RelationSpec& spec) {
    if (spec.symmetric) {
      std::vector<std::string> avail;
      for (const auto& p : cast) {
        if (!paired[spec.name].contains(p)) avail.push_back(p);
      }
      if (avail.size() < 2) return std::nullopt;
      std::size_t ai = static_cast<std::size_t>(rng() % avail.size());
      std::string a = avail[ai];
      avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(ai));
      std::string b = pick(avail);
      paired[spec.name].insert(a);
      paired[spec.name].insert(b);
      join_targets.insert(a);
      join_targets.insert(b);
      return Assignment{spec.name, a, b};
    }
    if (!spec.functional) {
      // Subjects come from the fictional cast: these names never collide
      // with the gazetteer people, which keeps taste facts out of joins.
      for (std::size_t attempt = 0; attempt < 64; ++attempt) {
        if (fictional.empty() || trait_pool.empty()) break;
        std::string s = pick(fictional);
        auto obj = draw_object(spec, s);
        if (!obj) return std::nullopt;
        if (stated.emplace(spec.name, s, *obj).second) return Assignment{spec.name, s, *obj};
      }
      for (const auto& s : fictional) {
        auto objs = spec.object_class == EntityClass::Trait ? trait_pool : fictional;
        for (const auto& o : objs) {
          if (stated.emplace(spec.name, s, o).second) return Assignment{spec.name, s, o};
        }
      }
      return std::nullopt;
    }
    std::vector<std::string> fresh;
    for (const auto& p : cast) {
      if (!used_subjects[spec.name].contains(p)) fresh.push_back(p);
    }
    if (fresh.empty()) return std::nullopt;
    std::vector<std::string> preferred;
    if (spec.object_class != EntityClass::Person) {
      for (const auto& p : fresh) {
        if (join_targets.contains(p)) preferred.push_back(p);
      }
    }
    std::string subject = pick(preferred.empty() ? fresh : preferred);
    auto object = draw_object(spec, subject);
    if (!object) return std::nullopt;
    used_subjects[spec.name].insert(subject);
    if (spec.object_class == EntityClass::Person) join_targets.insert(*object);
    return Assignment{spec.name, subject, *object};
  }
};

std::optional<std::map<char, std::string>> unify_composite(const CompositeTemplate& ct,
                                                           const Assignment& first,
                                                           const Assignment& second) {
  if (ct.triples.size() != 2) return std::nullopt;
  if (first.relation != ct.triples[0].relation || second.relation != ct.triples[1].relation) {
    return std::nullopt;
  }
  std::map<char, std::string> binding;
  auto bind = [&](char slot, const std::string& value) {
    auto [it, inserted] = binding.emplace(slot, value);
    return inserted || it->second == value;
  };
  if (!bind(ct.triples[0].subject_slot, first.subject)) return std::nullopt;
  if (!bind(ct.triples[0].object_slot, first.object)) return std::nullopt;
  if (!bind(ct.triples[1].subject_slot, second.subject)) return std::nullopt;
  if (!bind(ct.triples[1].object_slot, second.object)) return std::nullopt;
  if (!binding.contains('S') || !binding.contains('1') || !binding.contains('2')) {
    return std::nullopt;
  }
  return binding;
}

// First country/continent (continents preferred, each sorted) that does not
// contain `city`; the false branch of an implicit-location question pair.
std::optional<std::string> noncontaining_region(const Gazetteer& gaz, std::string_view city) {
  std::set<std::string> continents;
  std::set<std::string> countries;
  for (const auto& place : gaz.places) {
    continents.insert(place.continent);
    countries.insert(place.country);
  }
  for (const auto& region : continents) {
    if (!gaz.region_contains(region, city)) return region;
  }
  for (const auto& region : countries) {
    if (!gaz.region_contains(region, city)) return region;
  }
  return std::nullopt;
}

struct Candidate {
  std::string text;
  Timestamp timestamp = 0;
};

// Candidate queries for one kind; dedups on text, preserves insertion order.
class Bucket {
 public:
  bool add(std::string text, Timestamp ts) {
    if (!seen_.insert(text).second) return false;
    items_.push_back({std::move(text), ts});
    return true;
  }
  std::vector<Candidate>& items() { return items_; }

 private:
  std::set<std::string> seen_;
  std::vector<Candidate> items_;
};

// One instantiated triple with the fact stating it.
struct Inst {
  ProvenanceTriple triple;
  FactId fact = 0;
};

struct QueryMaterial {
  std::map<std::string, std::vector<Inst>> by_relation;
  Timestamp now = 0;
};

// Calls fn(subject, object, fact) for every instance of `relation`, adding
// the reversed orientation for symmetric relations.
template <typename Fn>
void for_oriented(const QueryMaterial& qm, const RelationSpec& spec, Fn&& fn) {
  auto it = qm.by_relation.find(spec.name);
  if (it == qm.by_relation.end()) return;
  for (const Inst& inst : it->second) {
    fn(inst.triple.subject, inst.triple.object, inst.fact);
    if (spec.symmetric) fn(inst.triple.object, inst.triple.subject, inst.fact);
  }
}

std::vector<std::string> sorted_distinct_objects(const QueryMaterial& qm,
                                                 const std::string& relation) {
  std::set<std::string> objects;
  auto it = qm.by_relation.find(relation);
  if (it != qm.by_relation.end()) {
    for (const Inst& inst : it->second) objects.insert(inst.triple.object);
  }
  return {objects.begin(), objects.end()};
}

// Successor of `object` in the sorted distinct-object cycle: a same-class
// value that a functional relation pins to be wrong.
std::optional<std::string> rotate_object(const std::vector<std::string>& objects,
                                         const std::string& object) {
  if (objects.size() < 2) return std::nullopt;
  auto it = std::upper_bound(objects.begin(), objects.end(), object);
  if (it == objects.end()) it = objects.begin();
  if (*it == object) return std::nullopt;
  return *it;
}

std::string render_query(std::string_view pattern, std::string_view s, std::string_view o) {
  std::map<char, std::string_view> slots;
  if (has_slot(pattern, "$S")) slots.emplace('S', s);
  if (has_slot(pattern, "$O")) slots.emplace('O', o);
  return render_pattern(pattern, slots);
}

const std::vector<std::string>& class_pool(const Gazetteer& gaz, EntityClass cls,
                                           std::vector<std::string>& scratch) {
  switch (cls) {
    case EntityClass::Occupation: return gaz.occupations;
    case EntityClass::Trait: return gaz.traits;
    case EntityClass::City:
      scratch.clear();
      for (const auto& place : gaz.places) scratch.push_back(place.city);
      return scratch;
    default: return scratch;  // scratch left empty: no zero-count probe
  }
}

}  // namespace

std::vector<std::string> GenConfig::default_relations() {
  return {"spouseOf", "fatherOf",    "livesIn", "employedAs",
          "bornInYear", "bornInPlace", "likes"};
}

QueryCase annotate_intermediates(QueryCase c, const Database& db, const ProvenanceMap& prov,
                                 const TemplateRegistry& registry, const Gazetteer& gaz) {
  auto parsed = registry.parse_query(c.text, gaz);
  if (!parsed) raise(ErrorCode::UnparsedQuery, "cannot annotate: " + c.text);
  c.kind = parsed->kind;
  c.agg = parsed->agg;

  const std::vector<Fact> visible = db.visible_facts(c.timestamp);
  ProvenanceMap vis;
  for (const Fact& fact : visible) {
    auto it = prov.find(fact.id);
    if (it != prov.end()) {
      vis.emplace(fact.id, it->second);
    } else if (auto triples = registry.parse_fact(fact.text, gaz)) {
      vis.emplace(fact.id, std::move(*triples));
    }
    // Sentences outside the grammar state no triples and derive nothing.
  }

  const std::vector<Derivation> derivations = enumerate_derivations(*parsed, vis, gaz);
  c.support_sets.clear();
  c.intermediates.clear();
  for (const Derivation& d : derivations) {
    c.support_sets.push_back(d.facts);
    c.intermediates.push_back(d.result);
  }

  const AnswerSet recomputed = aggregate(c.agg, c.intermediates);
  const AnswerSet direct = whole_db_answer(c.text, visible, vis, registry, gaz);
  if (recomputed != direct) {
    raise(ErrorCode::InconsistentCase,
          "aggregated intermediates disagree with direct evaluation for: " + c.text);
  }
  if (!c.answer.values.empty() && c.answer != recomputed) {
    raise(ErrorCode::InconsistentCase, "recorded answer disagrees for: " + c.text);
  }
  c.answer = recomputed;

  for (const auto& support : c.support_sets) {
    const bool lookup = c.kind == QueryKind::LookupBool || c.kind == QueryKind::LookupExtract;
    const bool join = c.kind == QueryKind::JoinBool || c.kind == QueryKind::JoinExtract;
    if ((lookup && support.size() != 1) || (join && support.size() < 2) || support.empty()) {
      raise(ErrorCode::InconsistentCase, "support-set arity violated for: " + c.text);
    }
  }
  return c;
}

QueryCase derive_join_query(std::string_view relation1, std::string_view relation2,
                            std::string_view subject, const Database& db,
                            const ProvenanceMap& prov, const TemplateRegistry& registry,
                            const Gazetteer& gaz) {
  const JoinTemplate* chosen = nullptr;
  for (const JoinTemplate& jt : registry.joins()) {
    if (jt.relation1 != relation1 || jt.relation2 != relation2) continue;
    if (jt.kind == QueryKind::JoinBool) {
      chosen = &jt;
      break;
    }
    if (chosen == nullptr) chosen = &jt;
  }
  if (chosen == nullptr) {
    raise(ErrorCode::NoJoinPath, std::string("no join template for ") + std::string(relation1) +
                                     " -> " + std::string(relation2));
  }
  const RelationSpec& r1 = registry.relation(relation1);
  const RelationSpec& r2 = registry.relation(relation2);

  auto oriented = [&](const RelationSpec& spec, auto&& fn) {
    for (const auto& [id, triples] : prov) {
      for (const ProvenanceTriple& t : triples) {
        if (t.relation != spec.name) continue;
        fn(t.subject, t.object);
        if (spec.symmetric) fn(t.object, t.subject);
      }
    }
  };

  std::optional<std::string> answer_object;
  oriented(r1, [&](const std::string& s, const std::string& bridge) {
    if (answer_object || s != subject) return;
    oriented(r2, [&](const std::string& s2, const std::string& o2) {
      if (!answer_object && s2 == bridge) answer_object = o2;
    });
  });
  if (!answer_object) {
    raise(ErrorCode::NoJoinPath, "no realized chain from subject " + std::string(subject));
  }

  QueryCase c;
  c.text = render_query(chosen->pattern, subject, *answer_object);
  c.timestamp = db.max_timestamp();
  return annotate_intermediates(std::move(c), db, prov, registry, gaz);
}

std::pair<QueryCase, QueryCase> derive_implicit_location_query(const Fact& fact,
                                                               const Database& db,
                                                               const ProvenanceMap& prov,
                                                               const TemplateRegistry& registry,
                                                               const Gazetteer& gaz) {
  std::vector<ProvenanceTriple> triples;
  if (auto it = prov.find(fact.id); it != prov.end()) {
    triples = it->second;
  } else if (auto parsed = registry.parse_fact(fact.text, gaz)) {
    triples = std::move(*parsed);
  } else {
    raise(ErrorCode::MissingProvenance, "fact has no triples: " + fact.text);
  }

  const ProvenanceTriple* place_triple = nullptr;
  const QueryTemplate* bool_template = nullptr;
  for (const ProvenanceTriple& t : triples) {
    if (!registry.has_relation(t.relation)) continue;
    const RelationSpec& spec = registry.relation(t.relation);
    if (spec.object_class != EntityClass::City) continue;
    for (const QueryTemplate& qt : spec.query_templates) {
      if (qt.kind == QueryKind::LookupBool && has_slot(qt.pattern, "$S") &&
          has_slot(qt.pattern, "$O")) {
        place_triple = &t;
        bool_template = &qt;
        break;
      }
    }
    if (place_triple != nullptr) break;
  }
  if (place_triple == nullptr) {
    raise(ErrorCode::InvalidArgument, "fact states no place relation: " + fact.text);
  }
  const Gazetteer::Place* place = gaz.find_city(place_triple->object);
  if (place == nullptr) {
    raise(ErrorCode::UnknownPlace, "city not in gazetteer: " + place_triple->object);
  }
  auto negative_region = noncontaining_region(gaz, place->city);
  if (!negative_region) {
    raise(ErrorCode::UnknownPlace, "no region excludes city: " + place->city);
  }

  QueryCase positive;
  positive.text = render_query(bool_template->pattern, place_triple->subject, place->country);
  positive.timestamp = db.max_timestamp();
  QueryCase negative;
  negative.text = render_query(bool_template->pattern, place_triple->subject, *negative_region);
  negative.timestamp = db.max_timestamp();
  return {annotate_intermediates(std::move(positive), db, prov, registry, gaz),
          annotate_intermediates(std::move(negative), db, prov, registry, gaz)};
}

namespace {

GeneratedDatabase generate_database(const GenConfig& config, const TemplateRegistry& registry,
                                    const Gazetteer& gaz, std::uint64_t db_seed) {
  std::mt19937_64 rng(db_seed);

  // --- World pools -------------------------------------------------------
  World world{registry, gaz, rng};
  const std::vector<std::size_t> counts = allocate_counts(config.relations, config.facts_per_db);

  std::size_t min_cast = 2;
  for (std::size_t i = 0; i < config.relations.size(); ++i) {
    const RelationSpec& spec = registry.relation(config.relations[i]);
    if (spec.symmetric) {
      min_cast = std::max(min_cast, 2 * counts[i]);
    } else if (spec.functional) {
      min_cast = std::max(min_cast, counts[i] + (spec.object_class == EntityClass::Person));
    }
  }
  if (min_cast > gaz.people.size()) {
    raise(ErrorCode::InsufficientEntities,
          "world needs " + std::to_string(min_cast) + " people, gazetteer has " +
              std::to_string(gaz.people.size()));
  }
  const std::size_t scale = std::max<std::size_t>(6, config.facts_per_db * 16 / 50);
  const std::size_t cast_size = std::min(gaz.people.size(), std::max(min_cast, scale));

  world.cast = shuffled_copy(gaz.people, rng);
  world.cast.resize(cast_size);
  {
    std::vector<std::string> cities;
    for (const auto& place : gaz.places) cities.push_back(place.city);
    world.city_pool = shuffled_copy(std::move(cities), rng);
    world.city_pool.resize(std::min<std::size_t>(5, world.city_pool.size()));
  }
  world.occ_pool = shuffled_copy(gaz.occupations, rng);
  world.occ_pool.resize(std::min<std::size_t>(5, world.occ_pool.size()));
  world.trait_pool = shuffled_copy(gaz.traits, rng);
  world.trait_pool.resize(std::min<std::size_t>(4, world.trait_pool.size()));
  world.fictional = shuffled_copy(gaz.fictional_people, rng);
  {
    std::vector<int> years;
    for (int y = gaz.year_min; y <= gaz.year_max; ++y) years.push_back(y);
    world.year_pool = shuffled_copy(std::move(years), rng);
  }

  // --- Relational content ------------------------------------------------
  // Person-to-person links first so attribute subjects can be biased toward
  // join targets.
  std::vector<std::size_t> order;
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t i = 0; i < config.relations.size(); ++i) {
      const RelationSpec& spec = registry.relation(config.relations[i]);
      const int group = spec.symmetric ? 0 : (spec.object_class == EntityClass::Person ? 1 : 2);
      if (group == pass) order.push_back(i);
    }
  }
  std::vector<Assignment> assignments;
  for (std::size_t i : order) {
    const RelationSpec& spec = registry.relation(config.relations[i]);
    for (std::size_t k = 0; k < counts[i]; ++k) {
      auto a = world.make_assignment(spec);
      if (!a) {
        raise(ErrorCode::InsufficientEntities,
              "entity pool exhausted while assigning " + spec.name);
      }
      assignments.push_back(std::move(*a));
    }
  }

  // --- Composite merging --------------------------------------------------
  std::vector<Merge> merges;
  if (config.composite_ratio > 0.0) {
    for (std::size_t ci = 0; ci < registry.composites().size(); ++ci) {
      const CompositeTemplate& ct = registry.composites()[ci];
      for (std::size_t i = 0; i < assignments.size(); ++i) {
        for (std::size_t j = 0; j < assignments.size(); ++j) {
          if (i == j || assignments[i].merged || assignments[j].merged) continue;
          auto binding = unify_composite(ct, assignments[i], assignments[j]);
          if (!binding) continue;
          if (deterministic_unit(rng) < config.composite_ratio) {
            assignments[i].merged = true;
            assignments[j].merged = true;
            merges.push_back({ci, std::move(*binding)});
          }
        }
      }
    }
  }
  // Each merge folds two sentences into one; top back up to facts_per_db.
  for (std::size_t k = 0; k < merges.size(); ++k) {
    std::optional<Assignment> filler;
    for (const auto& name : config.relations) {
      const RelationSpec& spec = registry.relation(name);
      if (spec.functional) continue;  // prefer unbounded taste facts
      filler = world.make_assignment(spec);
      if (filler) break;
    }
    if (!filler) {
      for (const auto& name : config.relations) {
        filler = world.make_assignment(registry.relation(name));
        if (filler) break;
      }
    }
    if (!filler) {
      raise(ErrorCode::InsufficientEntities, "cannot refill facts consumed by composites");
    }
    assignments.push_back(std::move(*filler));
  }

  // --- Sentences ----------------------------------------------------------
  std::vector<FactPlan> plans;
  for (const Assignment& a : assignments) {
    if (a.merged) continue;
    const RelationSpec& spec = registry.relation(a.relation);
    const std::size_t tmpl = static_cast<std::size_t>(rng() % spec.fact_templates.size());
    plans.push_back(
        {registry.render_fact(a.relation, a.subject, a.object, tmpl), {{a.relation, a.subject, a.object}}});
  }
  for (const Merge& m : merges) {
    const CompositeTemplate& ct = registry.composites()[m.composite_index];
    FactPlan plan;
    plan.text = registry.render_composite(m.composite_index, m.binding.at('S'),
                                          m.binding.at('1'), m.binding.at('2'));
    for (const auto& t : ct.triples) {
      plan.triples.push_back(
          {t.relation, m.binding.at(t.subject_slot), m.binding.at(t.object_slot)});
    }
    plans.push_back(std::move(plan));
  }
  deterministic_shuffle(plans, rng);

  GeneratedDatabase out;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const FactId id = out.db.append_fact(plans[k].text, static_cast<Timestamp>(k + 1));
    out.provenance.emplace(id, plans[k].triples);
  }

  // --- Query candidates ---------------------------------------------------
  QueryMaterial qm;
  qm.now = out.db.max_timestamp();
  for (const auto& [id, triples] : out.provenance) {
    for (const ProvenanceTriple& t : triples) qm.by_relation[t.relation].push_back({t, id});
  }

  Bucket lookup_extract, lookup_bool, join_extract, join_bool, set_bucket, count_bucket,
      minmax_bucket;

  for (const RelationSpec& spec : registry.relations()) {
    if (!qm.by_relation.contains(spec.name)) continue;
    const std::vector<std::string> objects = sorted_distinct_objects(qm, spec.name);
    for (const QueryTemplate& qt : spec.query_templates) {
      const bool wants_subject = has_slot(qt.pattern, "$S");
      const bool wants_object = has_slot(qt.pattern, "$O");
      switch (qt.kind) {
        case QueryKind::LookupExtract:
          if (!wants_subject || wants_object) break;
          for_oriented(qm, spec, [&](const std::string& s, const std::string&, FactId) {
            lookup_extract.add(render_query(qt.pattern, s, {}), qm.now);
          });
          break;
        case QueryKind::LookupBool: {
          if (!wants_subject || !wants_object) break;
          for_oriented(qm, spec, [&](const std::string& s, const std::string& o, FactId) {
            lookup_bool.add(render_query(qt.pattern, s, o), qm.now);
            if (spec.functional) {
              if (auto wrong = rotate_object(objects, o); wrong && *wrong != s) {
                lookup_bool.add(render_query(qt.pattern, s, *wrong), qm.now);
              }
            }
            if (spec.object_class == EntityClass::City) {
              if (const Gazetteer::Place* place = gaz.find_city(o)) {
                lookup_bool.add(render_query(qt.pattern, s, place->country), qm.now);
                if (auto region = noncontaining_region(gaz, o)) {
                  lookup_bool.add(render_query(qt.pattern, s, *region), qm.now);
                }
              }
            }
          });
          break;
        }
        case QueryKind::Set: {
          if (qt.ask == QueryTemplate::Ask::Subject && wants_object && !wants_subject) {
            for (const auto& o : objects) set_bucket.add(render_query(qt.pattern, {}, o), qm.now);
          } else if (qt.ask == QueryTemplate::Ask::Object && wants_subject && !wants_object) {
            std::set<std::string> subjects;
            for (const Inst& inst : qm.by_relation.at(spec.name)) {
              subjects.insert(inst.triple.subject);
            }
            for (const auto& s : subjects) set_bucket.add(render_query(qt.pattern, s, {}), qm.now);
          }
          break;
        }
        case QueryKind::Count: {
          if (qt.ask != QueryTemplate::Ask::Subject || !wants_object || wants_subject) break;
          for (const auto& o : objects) count_bucket.add(render_query(qt.pattern, {}, o), qm.now);
          std::vector<std::string> scratch;
          for (const auto& value : class_pool(gaz, spec.object_class, scratch)) {
            if (std::find(objects.begin(), objects.end(), value) == objects.end()) {
              count_bucket.add(render_query(qt.pattern, {}, value), qm.now);
              break;  // one zero-count probe per template
            }
          }
          break;
        }
        default: break;
      }
    }
  }

  for (const JoinTemplate& jt : registry.joins()) {
    if (!registry.has_relation(jt.relation1) || !registry.has_relation(jt.relation2)) continue;
    const RelationSpec& r1 = registry.relation(jt.relation1);
    const RelationSpec& r2 = registry.relation(jt.relation2);
    const std::vector<std::string> objects2 = sorted_distinct_objects(qm, jt.relation2);
    for_oriented(qm, r1, [&](const std::string& s, const std::string& bridge, FactId) {
      for_oriented(qm, r2, [&](const std::string& s2, const std::string& o2, FactId) {
        if (s2 != bridge) return;
        if (jt.kind == QueryKind::JoinExtract) {
          join_extract.add(render_query(jt.pattern, s, {}), qm.now);
        } else {
          join_bool.add(render_query(jt.pattern, s, o2), qm.now);
          if (r2.functional) {
            if (auto wrong = rotate_object(objects2, o2)) {
              join_bool.add(render_query(jt.pattern, s, *wrong), qm.now);
            }
          }
        }
      });
    });
  }

  for (const MinMaxTemplate& mm : registry.minmax()) {
    if (qm.by_relation.contains(mm.relation)) minmax_bucket.add(mm.pattern, qm.now);
  }

  // Early probes: ask before the supporting fact exists; the reference
  // answer must be NULL. Functional relations only, so no other fact can
  // answer in its place (and a count would legitimately be "0", not NULL).
  std::vector<Candidate> early;
  for (const auto& [id, triples] : out.provenance) {
    if (early.size() >= 2 || config.queries_per_db == 0) break;
    for (const ProvenanceTriple& t : triples) {
      if (!registry.has_relation(t.relation)) continue;
      const RelationSpec& spec = registry.relation(t.relation);
      if (!spec.functional) continue;
      for (const QueryTemplate& qt : spec.query_templates) {
        if (qt.kind != QueryKind::LookupExtract || !has_slot(qt.pattern, "$S") ||
            has_slot(qt.pattern, "$O")) {
          continue;
        }
        early.push_back({render_query(qt.pattern, t.subject, {}),
                         out.db.fact(id).timestamp - 1});
        break;
      }
      if (early.size() >= 2) break;
    }
  }

  // --- Quotas -------------------------------------------------------------
  struct Take {
    Bucket* bucket;
    std::size_t quota = 0;
    std::size_t taken = 0;
  };
  const std::size_t fixed = std::min(config.queries_per_db,
                                     minmax_bucket.items().size() + early.size());
  const std::size_t budget = config.queries_per_db - fixed;
  std::array<Take, 6> takes = {{{&lookup_extract, budget * 30 / 100},
                                {&lookup_bool, budget * 22 / 100},
                                {&set_bucket, budget * 12 / 100},
                                {&count_bucket, budget * 12 / 100},
                                {&join_extract, budget * 12 / 100},
                                {&join_bool, budget * 12 / 100}}};
  {
    std::size_t planned = 0;
    for (const Take& t : takes) planned += t.quota;
    takes[0].quota += budget - planned;
  }
  for (Take& t : takes) {
    deterministic_shuffle(t.bucket->items(), rng);
    t.taken = std::min(t.quota, t.bucket->items().size());
  }
  std::size_t taken_sum = 0;
  for (const Take& t : takes) taken_sum += t.taken;
  for (Take& t : takes) {
    while (taken_sum < budget && t.taken < t.bucket->items().size()) {
      ++t.taken;
      ++taken_sum;
    }
  }

  std::vector<Candidate> chosen;
  for (std::size_t k = 0; k < std::min(minmax_bucket.items().size(),
                                       config.queries_per_db); ++k) {
    chosen.push_back(minmax_bucket.items()[k]);
  }
  for (const Candidate& c : early) {
    if (chosen.size() < config.queries_per_db) chosen.push_back(c);
  }
  for (const Take& t : takes) {
    for (std::size_t k = 0; k < t.taken; ++k) chosen.push_back(t.bucket->items()[k]);
  }
  deterministic_shuffle(chosen, rng);

  std::set<std::pair<std::string, Timestamp>> early_keys;
  for (const Candidate& c : early) early_keys.emplace(c.text, c.timestamp);

  for (const Candidate& cand : chosen) {
    QueryCase c;
    c.text = cand.text;
    c.timestamp = cand.timestamp;
    c = annotate_intermediates(std::move(c), out.db, out.provenance, registry, gaz);
    if (early_keys.contains({cand.text, cand.timestamp}) && !c.answer.is_null()) {
      raise(ErrorCode::InconsistentCase, "early probe did not come out NULL: " + c.text);
    }
    out.queries.push_back(std::move(c));
  }
  return out;
}

}  // namespace

GeneratedDataset generate_dataset(const GenConfig& config, const TemplateRegistry& registry,
                                  const Gazetteer& gaz) {
  if (config.facts_per_db == 0) {
    raise(ErrorCode::InvalidArgument, "facts_per_db must be at least 1");
  }
  if (config.composite_ratio < 0.0 || config.composite_ratio > 1.0) {
    raise(ErrorCode::InvalidArgument, "composite_ratio must lie in [0, 1]");
  }
  if (config.relations.empty()) {
    raise(ErrorCode::InvalidArgument, "at least one relation is required");
  }
  for (const auto& name : config.relations) {
    if (!registry.has_relation(name)) {
      raise(ErrorCode::UnknownRelation, "not a registered relation: " + name);
    }
  }
  GeneratedDataset ds;
  ds.config = config;
  for (std::size_t d = 0; d < config.num_databases; ++d) {
    const std::uint64_t db_seed =
        splitmix64(config.seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(d) + 1)));
    ds.databases.push_back(generate_database(config, registry, gaz, db_seed));
  }
  return ds;
}

std::string serialize_dataset(const GeneratedDataset& dataset) {
  std::string out;
  json meta;
  meta["kind"] = "meta";
  meta["version"] = 1;
  meta["seed"] = dataset.config.seed;
  meta["num_databases"] = dataset.config.num_databases;
  meta["facts_per_db"] = dataset.config.facts_per_db;
  meta["queries_per_db"] = dataset.config.queries_per_db;
  meta["composite_ratio"] = dataset.config.composite_ratio;
  meta["relations"] = dataset.config.relations;
  out += meta.dump();
  out += '\n';

  for (std::size_t d = 0; d < dataset.databases.size(); ++d) {
    const GeneratedDatabase& gd = dataset.databases[d];
    for (const Fact& fact : gd.db.all_facts()) {
      json rec;
      rec["kind"] = "db_fact";
      rec["db"] = d;
      rec["id"] = fact.id;
      rec["timestamp"] = fact.timestamp;
      rec["text"] = fact.text;
      rec["invalidated"] = fact.invalidated;
      json triples = json::array();
      if (auto it = gd.provenance.find(fact.id); it != gd.provenance.end()) {
        for (const ProvenanceTriple& t : it->second) {
          triples.push_back(json::array({t.relation, t.subject, t.object}));
        }
      }
      rec["triples"] = std::move(triples);
      out += rec.dump();
      out += '\n';
    }
    for (const QueryCase& q : gd.queries) {
      json rec;
      rec["kind"] = "query_case";
      rec["db"] = d;
      rec["text"] = q.text;
      rec["timestamp"] = q.timestamp;
      rec["query_kind"] = std::string(to_string(q.kind));
      rec["agg"] = std::string(to_string(q.agg));
      rec["answer"] = q.answer.values;
      json supports = json::array();
      for (const auto& s : q.support_sets) supports.push_back(s);
      rec["support_sets"] = std::move(supports);
      json inters = json::array();
      for (const auto& r : q.intermediates) inters.push_back(intermediate_to_json(r));
      rec["intermediates"] = std::move(inters);
      json distant = json::array();
      for (const auto& s : q.distant_support_sets) distant.push_back(s);
      rec["distant_support_sets"] = std::move(distant);
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

void save_dataset(const GeneratedDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::InvalidArgument, "cannot open for writing: " + path);
  out << serialize_dataset(dataset);
}

namespace {

void expect_keys(const json& j, std::initializer_list<const char*> keys) {
  if (!j.is_object() || j.size() != keys.size()) {
    raise(ErrorCode::MalformedRecord, "unexpected field set: " + j.dump());
  }
  for (const char* key : keys) {
    if (!j.contains(key)) {
      raise(ErrorCode::MalformedRecord, std::string("missing field ") + key + ": " + j.dump());
    }
  }
}

}  // namespace

GeneratedDataset parse_dataset(std::istream& in) {
  GeneratedDataset ds;
  bool have_meta = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      raise(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + " is not JSON");
    }
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
      raise(ErrorCode::MalformedRecord, "record without kind at line " + std::to_string(line_no));
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "meta") {
      if (have_meta) raise(ErrorCode::MalformedRecord, "duplicate meta record");
      expect_keys(j, {"kind", "version", "seed", "num_databases", "facts_per_db",
                      "queries_per_db", "composite_ratio", "relations"});
      if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) {
        raise(ErrorCode::MalformedRecord, "unsupported dataset version");
      }
      ds.config.seed = j["seed"].get<std::uint64_t>();
      ds.config.num_databases = j["num_databases"].get<std::size_t>();
      ds.config.facts_per_db = j["facts_per_db"].get<std::size_t>();
      ds.config.queries_per_db = j["queries_per_db"].get<std::size_t>();
      ds.config.composite_ratio = j["composite_ratio"].get<double>();
      ds.config.relations = j["relations"].get<std::vector<std::string>>();
      have_meta = true;
      continue;
    }
    if (!have_meta) raise(ErrorCode::MalformedRecord, "first record must be meta");
    if (!j.contains("db") || !j["db"].is_number_unsigned()) {
      raise(ErrorCode::MalformedRecord, "record without db index");
    }
    const std::size_t db_index = j["db"].get<std::size_t>();
    if (kind == "db_fact") {
      if (db_index == ds.databases.size()) {
        ds.databases.emplace_back();
      } else if (db_index + 1 != ds.databases.size()) {
        raise(ErrorCode::MalformedRecord, "database records out of order");
      }
      expect_keys(j, {"kind", "db", "id", "timestamp", "text", "invalidated", "triples"});
      GeneratedDatabase& gd = ds.databases.back();
      const FactId id = gd.db.append_fact(j["text"].get<std::string>(),
                                          j["timestamp"].get<Timestamp>());
      if (id != j["id"].get<FactId>()) {
        raise(ErrorCode::MalformedRecord, "fact ids must be dense and in order");
      }
      if (!j["invalidated"].is_boolean()) {
        raise(ErrorCode::MalformedRecord, "invalidated must be boolean");
      }
      if (j["invalidated"].get<bool>()) gd.db.invalidate_fact(id);
      std::vector<ProvenanceTriple> triples;
      for (const json& t : j["triples"]) {
        if (!t.is_array() || t.size() != 3) {
          raise(ErrorCode::MalformedRecord, "triples must be [relation, subject, object]");
        }
        triples.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                           t[2].get<std::string>()});
      }
      if (!triples.empty()) gd.provenance.emplace(id, std::move(triples));
    } else if (kind == "query_case") {
      if (db_index >= ds.databases.size()) {
        raise(ErrorCode::MalformedRecord, "query_case before its database");
      }
      expect_keys(j, {"kind", "db", "text", "timestamp", "query_kind", "agg", "answer",
                      "support_sets", "intermediates", "distant_support_sets"});
      QueryCase q;
      q.text = j["text"].get<std::string>();
      q.timestamp = j["timestamp"].get<Timestamp>();
      auto qk = query_kind_from_string(j["query_kind"].get<std::string>());
      if (!qk) raise(ErrorCode::MalformedRecord, "unknown query_kind");
      q.kind = *qk;
      auto agg = aggregation_from_string(j["agg"].get<std::string>());
      if (!agg) raise(ErrorCode::MalformedRecord, "unknown agg");
      q.agg = *agg;
      for (const json& v : j["answer"]) q.answer.values.insert(v.get<std::string>());
      if (q.answer.values.empty()) raise(ErrorCode::MalformedRecord, "empty answer set");
      for (const json& s : j["support_sets"]) {
        q.support_sets.push_back(s.get<std::vector<FactId>>());
      }
      for (const json& r : j["intermediates"]) {
        q.intermediates.push_back(intermediate_from_json(r));
      }
      for (const json& s : j["distant_support_sets"]) {
        q.distant_support_sets.push_back(s.get<std::vector<FactId>>());
      }
      ds.databases[db_index].queries.push_back(std::move(q));
    } else {
      raise(ErrorCode::MalformedRecord, "unknown record kind: " + kind);
    }
  }
  if (!have_meta) raise(ErrorCode::MalformedRecord, "dataset has no meta record");
  if (ds.databases.size() != ds.config.num_databases) {
    raise(ErrorCode::MalformedRecord, "meta num_databases disagrees with records");
  }
  return ds;
}

GeneratedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::InvalidArgument, "cannot open for reading: " + path);
  return parse_dataset(in);
}

DatasetSplit split_dataset(std::size_t num_databases, double train_frac, double valid_frac) {
  if (train_frac < 0.0 || valid_frac < 0.0 || train_frac + valid_frac > 1.0) {
    raise(ErrorCode::InvalidArgument, "split fractions must be non-negative and sum to <= 1");
  }
  const auto n = static_cast<double>(num_databases);
  std::size_t train = std::min(num_databases,
                               static_cast<std::size_t>(std::ceil(train_frac * n)));
  std::size_t valid = std::min(num_databases - train,
                               static_cast<std::size_t>(std::ceil(valid_frac * n)));
  DatasetSplit split;
  for (std::size_t i = 0; i < train; ++i) split.train.push_back(i);
  for (std::size_t i = train; i < train + valid; ++i) split.valid.push_back(i);
  for (std::size_t i = train + valid; i < num_databases; ++i) split.test.push_back(i);
  return split;
}

}  // namespace ndb
