#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ndb/aggregation.hpp"
#include "ndb/fact_store.hpp"
#include "ndb/grammar.hpp"
#include "ndb/intermediate.hpp"

namespace ndb {

// Fisher-Yates with a plain modulo draw. std::shuffle and the standard
// distributions are implementation-defined, which would break byte-identical
// regeneration across toolchains.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

// Uniform draw in [0, 1) from the top 53 bits; portable across libstdc++/libc++.
inline double deterministic_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

struct GenConfig {
  std::size_t num_databases = 1;
  std::size_t facts_per_db = 50;
  std::size_t queries_per_db = 120;
  double composite_ratio = 0.15;
  // Relations facts are generated from; every name must be registered.
  std::vector<std::string> relations = default_relations();
  std::uint64_t seed = 42;

  static std::vector<std::string> default_relations();
};

// One question over one database, with everything a grader or trainer needs:
// the reference answer, the fact sets that warrant it, and the per-set
// intermediate results whose aggregation reproduces the answer.
struct QueryCase {
  std::string text;
  Timestamp timestamp = 0;
  QueryKind kind = QueryKind::LookupExtract;
  AggregationFunction agg = AggregationFunction::NoAggregation;
  AnswerSet answer;
  std::vector<std::vector<FactId>> support_sets;
  std::vector<IntermediateResult> intermediates;
  // Labels recovered by the erasure walk (empty until label_dataset runs).
  // Kept apart from the reference labels above, which are never rewritten.
  std::vector<std::vector<FactId>> distant_support_sets;

  bool operator==(const QueryCase&) const = default;
};

struct GeneratedDatabase {
  Database db;
  // Sidecar: the exact triples each sentence states. Only the rule-based
  // operator reads it; retrieval and ranking see just the text.
  ProvenanceMap provenance;
  std::vector<QueryCase> queries;
};

struct GeneratedDataset {
  GenConfig config;
  std::vector<GeneratedDatabase> databases;
};

// Builds `config.num_databases` worlds and a query mix covering every kind
// the configured relations support. Each database gets `facts_per_db`
// sentences with timestamps 1..N and queries asked at time N, plus two
// early-timestamp probes whose supporting fact does not exist yet (answer
// NULL). Deterministic in (config, seed): regeneration is byte-identical.
GeneratedDataset generate_dataset(const GenConfig& config, const TemplateRegistry& registry,
                                  const Gazetteer& gaz);

// Parses `c.text`, enumerates its derivations over the facts visible at
// `c.timestamp`, and fills kind/agg/support_sets/intermediates. The answer is
// recomputed by aggregating the intermediates and cross-checked against the
// whole-database evaluation; a mismatch (or a pre-set `c.answer` that
// disagrees) raises InconsistentCase.
QueryCase annotate_intermediates(QueryCase c, const Database& db, const ProvenanceMap& prov,
                                 const TemplateRegistry& registry, const Gazetteer& gaz);

// Builds the boolean two-hop question for `subject` from the first
// (relation1, relation2) join template, using the chain realized in the
// database. Raises NoJoinPath when no template or no chain exists.
QueryCase derive_join_query(std::string_view relation1, std::string_view relation2,
                            std::string_view subject, const Database& db,
                            const ProvenanceMap& prov, const TemplateRegistry& registry,
                            const Gazetteer& gaz);

// From one place-of-birth fact, builds the (true, false) pair of region
// questions: the city's own country, and the first region that does not
// contain the city. Raises UnknownPlace when the city is not in the
// gazetteer.
std::pair<QueryCase, QueryCase> derive_implicit_location_query(const Fact& fact,
                                                               const Database& db,
                                                               const ProvenanceMap& prov,
                                                               const TemplateRegistry& registry,
                                                               const Gazetteer& gaz);

// JSON Lines: one "meta" record, then per database its "db_fact" records in
// id order followed by its "query_case" records. See docs/dataset-format.md.
std::string serialize_dataset(const GeneratedDataset& dataset);
void save_dataset(const GeneratedDataset& dataset, const std::string& path);
GeneratedDataset parse_dataset(std::istream& in);
GeneratedDataset load_dataset(const std::string& path);

// Database-level split indices: first ceil(train_frac*n), next
// ceil(valid_frac*n), remainder test.
struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};
DatasetSplit split_dataset(std::size_t num_databases, double train_frac = 0.6,
                           double valid_frac = 0.2);

}  // namespace ndb
