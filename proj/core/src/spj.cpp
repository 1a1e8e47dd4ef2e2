#include "ndb/spj.hpp"

#include <algorithm>

#include "ndb/errors.hpp"

namespace ndb {

namespace {

struct Edge {
  FactId fact;
  const std::string* subject;
  const std::string* object;
};

std::vector<FactId> sorted_facts(std::initializer_list<FactId> ids) {
  std::vector<FactId> out(ids);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const std::string& require(const std::optional<std::string>& slot, const char* what) {
  if (!slot) raise(ErrorCode::InvalidArgument, std::string("parsed query lacks a ") + what);
  return *slot;
}

}  // namespace

std::vector<Derivation> enumerate_derivations(const ParsedQuery& query,
                                              const ProvenanceMap& triples,
                                              const Gazetteer& gaz) {
  std::map<std::string, std::vector<Edge>, std::less<>> edges;
  for (const auto& [fact, list] : triples) {
    for (const ProvenanceTriple& t : list) {
      edges[t.relation].push_back({fact, &t.subject, &t.object});
    }
  }
  auto edges_of = [&](const std::string& rel) -> const std::vector<Edge>& {
    static const std::vector<Edge> empty;
    const auto it = edges.find(rel);
    return it == edges.end() ? empty : it->second;
  };
  auto for_each_oriented = [&](const std::string& rel, bool symmetric, auto&& fn) {
    for (const Edge& e : edges_of(rel)) {
      fn(e.fact, *e.subject, *e.object);
      if (symmetric) fn(e.fact, *e.object, *e.subject);
    }
  };

  std::vector<Derivation> out;
  auto push = [&](std::vector<FactId> facts, IntermediateResult result) {
    out.push_back({std::move(facts), std::move(result)});
  };

  switch (query.kind) {
    case QueryKind::LookupExtract: {
      const std::string& subject = require(query.subject, "subject");
      for_each_oriented(query.relation, query.relation_symmetric,
                        [&](FactId f, const std::string& s, const std::string& o) {
                          if (s == subject) push({f}, IntermediateResult::answer(o));
                        });
      break;
    }
    case QueryKind::LookupBool: {
      const std::string& subject = require(query.subject, "subject");
      const std::string& want = require(query.object, "object");
      for_each_oriented(query.relation, query.relation_symmetric,
                        [&](FactId f, const std::string& s, const std::string& o) {
                          if (s != subject) return;
                          if (query.implicit_region) {
                            push({f}, IntermediateResult::boolean(gaz.region_contains(want, o)));
                            return;
                          }
                          if (o == want) {
                            push({f}, IntermediateResult::boolean(true));
                          } else if (query.relation_functional) {
                            push({f}, IntermediateResult::boolean(false));
                          }
                        });
      break;
    }
    case QueryKind::JoinExtract:
    case QueryKind::JoinBool: {
      const std::string& subject = require(query.subject, "subject");
      for_each_oriented(
          query.relation, query.relation_symmetric,
          [&](FactId f1, const std::string& s1, const std::string& bridge) {
            if (s1 != subject) return;
            for_each_oriented(
                query.relation2, query.relation2_symmetric,
                [&](FactId f2, const std::string& s2, const std::string& o2) {
                  if (s2 != bridge) return;
                  if (query.kind == QueryKind::JoinExtract) {
                    push(sorted_facts({f1, f2}), IntermediateResult::answer(o2));
                  } else if (o2 == require(query.object, "object")) {
                    push(sorted_facts({f1, f2}), IntermediateResult::boolean(true));
                  } else if (query.relation2_functional) {
                    push(sorted_facts({f1, f2}), IntermediateResult::boolean(false));
                  }
                });
          });
      break;
    }
    case QueryKind::Set:
    case QueryKind::Count: {
      if (query.ask_subject) {
        const std::string& object = require(query.object, "object");
        for_each_oriented(query.relation, query.relation_symmetric,
                          [&](FactId f, const std::string& s, const std::string& o) {
                            if (o == object) push({f}, IntermediateResult::answer(s));
                          });
      } else {
        const std::string& subject = require(query.subject, "subject");
        for_each_oriented(query.relation, query.relation_symmetric,
                          [&](FactId f, const std::string& s, const std::string& o) {
                            if (s == subject) push({f}, IntermediateResult::answer(o));
                          });
      }
      break;
    }
    case QueryKind::MinMax: {
      for (const Edge& e : edges_of(query.relation)) {
        push({e.fact}, IntermediateResult::tuple(*e.subject, *e.object));
      }
      break;
    }
  }

  std::sort(out.begin(), out.end(), [](const Derivation& a, const Derivation& b) {
    if (a.facts != b.facts) return a.facts < b.facts;
    return a.result.render() < b.result.render();
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void OracleSpj::register_provenance(FactId id, std::vector<ProvenanceTriple> triples) {
  provenance_[id] = std::move(triples);
}

void OracleSpj::register_provenance(const ProvenanceMap& map) {
  for (const auto& [id, triples] : map) provenance_[id] = triples;
}

SpjOutput OracleSpj::apply(std::string_view query, std::span<const Fact> support) const {
  const auto parsed = registry_->parse_query(query, *gazetteer_);
  if (!parsed) raise(ErrorCode::UnparsedQuery, std::string(query));

  ProvenanceMap triples;
  for (const Fact& f : support) {
    const auto it = provenance_.find(f.id);
    if (it != provenance_.end()) {
      triples[f.id] = it->second;
      continue;
    }
    const auto derived = registry_->parse_fact(f.text, *gazetteer_);
    if (!derived) {
      raise(ErrorCode::MissingProvenance,
            "fact " + std::to_string(f.id) + " matches no template: " + f.text);
    }
    triples[f.id] = *derived;
  }

  const auto derivations = enumerate_derivations(*parsed, triples, *gazetteer_);
  SpjOutput outp;
  outp.agg = parsed->agg;
  outp.result = derivations.empty() ? IntermediateResult::null() : derivations.front().result;
  return outp;
}

AnswerSet whole_db_answer(std::string_view query, std::span<const Fact> facts,
                          const ProvenanceMap& triples, const TemplateRegistry& registry,
                          const Gazetteer& gaz) {
  const auto parsed = registry.parse_query(query, gaz);
  if (!parsed) raise(ErrorCode::UnparsedQuery, std::string(query));

  ProvenanceMap visible;
  for (const Fact& f : facts) {
    const auto it = triples.find(f.id);
    if (it != triples.end()) visible.emplace(f.id, it->second);
  }

  const auto derivations = enumerate_derivations(*parsed, visible, gaz);
  std::vector<IntermediateResult> results;
  results.reserve(derivations.size());
  for (const auto& d : derivations) results.push_back(d.result);
  return aggregate(parsed->agg, results);
}

}  // namespace ndb
