#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ndb/aggregation.hpp"
#include "ndb/fact_store.hpp"
#include "ndb/intermediate.hpp"
#include "ndb/spj.hpp"
#include "ndb/ssg.hpp"

namespace ndb {

// How support sets are produced for a query.
// TrainedSsg runs the incremental search under a trained action classifier.
// PerfectSsg injects the caller's reference sets: the evaluation upper bound.
// TfidfTopK hands the top-k retrieved facts to one operator as a single set,
// the classical baseline whose failure modes the comparisons reproduce.
struct TrainedSsg {
  const ActionClassifierModel* model = nullptr;
};
struct PerfectSsg {
  const std::vector<std::vector<FactId>>* sets = nullptr;
};
struct TfidfTopK {
  std::size_t k = 5;
};
using SsgMode = std::variant<TrainedSsg, PerfectSsg, TfidfTopK>;

struct PipelineConfig {
  SsgConfig ssg;            // drives the TrainedSsg search
  std::size_t workers = 0;  // operator fan-out width; 0 = one per core
};

// One operator's contribution: the facts it was handed and what it made of
// them. Entries with a NULL result are dropped before this list is built.
struct ProvenanceEntry {
  std::vector<FactId> support;
  IntermediateResult result;

  bool operator==(const ProvenanceEntry&) const = default;
};

// Wall-clock seconds per stage.
struct StageTimings {
  double support_gen = 0.0;
  double operators = 0.0;
  double aggregation = 0.0;
};

struct QueryResult {
  AnswerSet answers;
  AggregationFunction agg_used = AggregationFunction::NoAggregation;
  // Sorted by (support ids, rendered result), exact duplicates removed.
  // Re-aggregating the results under agg_used reproduces `answers`.
  std::vector<ProvenanceEntry> provenance;
  StageTimings timings;
  // The query fell outside the grammar: answers forced to {NULL}.
  bool unparsed = false;
};

// End-to-end orchestration: snapshot the facts visible at `as_of`, produce
// support sets per `mode`, apply the operator to each set concurrently, then
// reduce the surviving results under the keyword-routed aggregation function.
// No support or no surviving result yields {NULL} ({"0"} for counts). An
// operator raising UnparsedQuery turns into a {NULL} answer with the
// `unparsed` flag set; every other operator error propagates.
QueryResult answer_query(const Database& db, std::string_view query, Timestamp as_of,
                         const SsgMode& mode, const SpjOperator& spj,
                         const PipelineConfig& cfg = {});

// Surface-form dispatch: updates append (returning the new FactId), queries
// answer at their own timestamp.
using IngestOutcome = std::variant<FactId, QueryResult>;
IngestOutcome ingest(Database& db, std::string text, Timestamp timestamp, const SsgMode& mode,
                     const SpjOperator& spj, const PipelineConfig& cfg = {});

}  // namespace ndb
