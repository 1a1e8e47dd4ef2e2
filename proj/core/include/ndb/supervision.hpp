#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "ndb/aggregation.hpp"
#include "ndb/dataset_gen.hpp"
#include "ndb/fact_store.hpp"
#include "ndb/grammar.hpp"

namespace ndb {

// Answers a query over exactly the given facts. The erasure walk probes it
// repeatedly with one-fact-smaller databases and watches the answer move.
using WholeDbOracle =
    std::function<AnswerSet(std::string_view query, std::span<const Fact> facts)>;

// Whole-database evaluation over `db`'s sentences: provenance comes from the
// sidecar map, with inverse template matching filling any gaps. The registry
// and gazetteer must outlive the returned callable; the span passed per call
// selects which facts the probe may use.
WholeDbOracle whole_db_probe(const Database& db, const ProvenanceMap& prov,
                             const TemplateRegistry& registry, const Gazetteer& gaz);

// Walking a database of n facts costs up to n oracle calls, each evaluating
// the query over nearly the whole database. Databases past this bound are
// refused unless the caller raises it explicitly.
inline constexpr std::size_t kErasureDbBound = 50;
inline constexpr std::size_t kUnlimitedErasures = std::numeric_limits<std::size_t>::max();

// One erasure walk: the query, the whole-database answer the walk preserves,
// and the facts whose removal changed that answer.
struct ErasureTrace {
  std::string query;
  AnswerSet reference;
  std::set<FactId> discovered;
  // Erasures that changed the answer; equals discovered.size(), <= max_iters.
  std::size_t iterations = 0;

  bool operator==(const ErasureTrace&) const = default;
};

// Discovers a support set by erasure. The facts visible at `as_of` are
// shuffled once (seeded) and probed in turn with the answer of the working
// set minus that fact: a fact whose removal leaves the answer unchanged is
// erased for good, one whose removal changes the answer is discovered and
// stays. oracle(working set) == reference holds throughout, so after an
// uncapped full pass the discovered facts alone still yield the reference
// answer. Discovery stops after `max_iters` hits. A NULL reference
// short-circuits to an empty trace: removing facts can only remove
// derivations, so no erasure moves a NULL answer. Raises OracleFailure when
// the database holds more than `max_db_facts` facts.
ErasureTrace predict_support_facts(const Database& db, std::string_view query, Timestamp as_of,
                                   const WholeDbOracle& oracle, std::uint64_t seed,
                                   std::size_t max_iters = kUnlimitedErasures,
                                   std::size_t max_db_facts = kErasureDbBound);

// As above, over every fact currently visible.
ErasureTrace predict_support_facts(const Database& db, std::string_view query,
                                   const WholeDbOracle& oracle, std::uint64_t seed,
                                   std::size_t max_iters = kUnlimitedErasures,
                                   std::size_t max_db_facts = kErasureDbBound);

// Supplies the probe for each database of a dataset.
using OracleFactory = std::function<WholeDbOracle(const GeneratedDatabase&)>;

// The standard factory: whole_db_probe over each database's own provenance.
// registry and gazetteer must outlive the returned factory and its probes.
OracleFactory standard_probe_factory(const TemplateRegistry& registry, const Gazetteer& gaz);

// Runs an uncapped erasure walk for every query case and stores each
// discovered set in distant_support_sets: one merged set per case, none for
// NULL answers or empty walks. Reference labels are never touched. Walks are
// seeded per (database, query) position from `seed`, so the output is
// deterministic and independent of scheduling; distinct queries run
// concurrently. Raises OracleFailure when any database exceeds
// `max_db_facts`.
GeneratedDataset label_dataset(GeneratedDataset dataset, const OracleFactory& oracle,
                               std::uint64_t seed,
                               std::size_t max_db_facts = kErasureDbBound);

}  // namespace ndb
