#include "ndb/supervision.hpp"

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

#include "ndb/errors.hpp"
#include "ndb/parallel.hpp"
#include "ndb/spj.hpp"
#include "ndb/text.hpp"

namespace ndb {

WholeDbOracle whole_db_probe(const Database& db, const ProvenanceMap& prov,
                             const TemplateRegistry& registry, const Gazetteer& gaz) {
  auto complete = std::make_shared<ProvenanceMap>();
  for (const Fact& fact : db.all_facts()) {
    if (auto it = prov.find(fact.id); it != prov.end()) {
      complete->emplace(fact.id, it->second);
    } else if (auto triples = registry.parse_fact(fact.text, gaz)) {
      complete->emplace(fact.id, std::move(*triples));
    }
    // Sentences outside the grammar state no triples and derive nothing.
  }
  return [complete, &registry, &gaz](std::string_view query, std::span<const Fact> facts) {
    return whole_db_answer(query, facts, *complete, registry, gaz);
  };
}

namespace {

void check_db_bound(const Database& db, std::size_t max_db_facts) {
  if (db.size() > max_db_facts) {
    raise(ErrorCode::OracleFailure,
          "whole-database erasure over " + std::to_string(db.size()) +
              " facts exceeds the bound of " + std::to_string(max_db_facts));
  }
}

ErasureTrace erasure_walk(std::vector<Fact> working, std::string_view query,
                          const WholeDbOracle& oracle, std::uint64_t seed,
                          std::size_t max_iters) {
  ErasureTrace trace;
  trace.query = std::string(query);
  trace.reference = oracle(query, working);
  if (trace.reference.is_null() || max_iters == 0) return trace;

  std::vector<FactId> order;
  order.reserve(working.size());
  for (const Fact& fact : working) order.push_back(fact.id);
  std::mt19937_64 rng(seed);
  deterministic_shuffle(order, rng);

  for (const FactId id : order) {
    if (trace.iterations >= max_iters) break;
    // Swap the candidate behind a shrunk span: the probe sees the working set
    // minus this one fact. Derivations read facts through an id-keyed map, so
    // the reordering is invisible to the oracle.
    const auto pos = std::find_if(working.begin(), working.end(),
                                  [id](const Fact& f) { return f.id == id; });
    std::iter_swap(pos, std::prev(working.end()));
    const AnswerSet predicted =
        oracle(query, std::span<const Fact>(working.data(), working.size() - 1));
    if (predicted == trace.reference) {
      working.pop_back();  // redundant given what else remains: erased for good
    } else {
      trace.discovered.insert(id);  // removal moved the answer: keep the fact
      ++trace.iterations;
    }
  }
  return trace;
}

}  // namespace

ErasureTrace predict_support_facts(const Database& db, std::string_view query, Timestamp as_of,
                                   const WholeDbOracle& oracle, std::uint64_t seed,
                                   std::size_t max_iters, std::size_t max_db_facts) {
  check_db_bound(db, max_db_facts);
  return erasure_walk(db.visible_facts(as_of), query, oracle, seed, max_iters);
}

ErasureTrace predict_support_facts(const Database& db, std::string_view query,
                                   const WholeDbOracle& oracle, std::uint64_t seed,
                                   std::size_t max_iters, std::size_t max_db_facts) {
  return predict_support_facts(db, query, db.max_timestamp(), oracle, seed, max_iters,
                               max_db_facts);
}

OracleFactory standard_probe_factory(const TemplateRegistry& registry, const Gazetteer& gaz) {
  return [&registry, &gaz](const GeneratedDatabase& gd) {
    return whole_db_probe(gd.db, gd.provenance, registry, gaz);
  };
}

GeneratedDataset label_dataset(GeneratedDataset dataset, const OracleFactory& oracle,
                               std::uint64_t seed, std::size_t max_db_facts) {
  for (std::size_t d = 0; d < dataset.databases.size(); ++d) {
    GeneratedDatabase& gd = dataset.databases[d];
    check_db_bound(gd.db, max_db_facts);
    const WholeDbOracle probe = oracle(gd);
    parallel_for_index(gd.queries.size(), [&, d](std::size_t q) {
      QueryCase& c = gd.queries[q];
      const std::uint64_t case_seed =
          splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(d) << 32) | q));
      const ErasureTrace trace = predict_support_facts(
          gd.db, c.text, c.timestamp, probe, case_seed, kUnlimitedErasures, max_db_facts);
      c.distant_support_sets.clear();
      if (!trace.discovered.empty()) {
        c.distant_support_sets.emplace_back(trace.discovered.begin(), trace.discovered.end());
      }
    });
  }
  return dataset;
}

}  // namespace ndb
