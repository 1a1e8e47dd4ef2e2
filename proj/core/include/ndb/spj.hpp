#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "ndb/aggregation.hpp"
#include "ndb/fact_store.hpp"
#include "ndb/grammar.hpp"
#include "ndb/intermediate.hpp"

namespace ndb {

// One way of answering a query from specific facts: the fact ids used
// (sorted ascending) and what they contribute.
struct Derivation {
  std::vector<FactId> facts;
  IntermediateResult result;

  bool operator==(const Derivation&) const = default;
};

// All complete derivations of `query` over the given triples, deduplicated
// and ordered by (fact ids, rendered result). Boolean queries derive TRUE on
// a direct match and FALSE when a functional relation pins a different
// object; everything else contributes no derivation.
std::vector<Derivation> enumerate_derivations(const ParsedQuery& query,
                                              const ProvenanceMap& triples,
                                              const Gazetteer& gaz);

struct SpjOutput {
  IntermediateResult result;
  AggregationFunction agg = AggregationFunction::NoAggregation;
};

// A select-project-join operator: maps (query, one support set) to the
// intermediate result that support set warrants, plus the aggregation label
// the operator predicts for the query.
class SpjOperator {
 public:
  virtual ~SpjOperator() = default;
  virtual SpjOutput apply(std::string_view query, std::span<const Fact> support) const = 0;
};

// Deterministic rule-based operator. Provenance for a support fact comes from
// the registered map when present, otherwise from inverse template matching;
// facts with neither raise MissingProvenance. Unparseable queries raise
// UnparsedQuery. Of several complete derivations inside one support set the
// lexicographically smallest wins.
class OracleSpj : public SpjOperator {
 public:
  OracleSpj(const TemplateRegistry* registry, const Gazetteer* gazetteer)
      : registry_(registry), gazetteer_(gazetteer) {}

  void register_provenance(FactId id, std::vector<ProvenanceTriple> triples);
  void register_provenance(const ProvenanceMap& map);

  SpjOutput apply(std::string_view query, std::span<const Fact> support) const override;

 private:
  const TemplateRegistry* registry_;
  const Gazetteer* gazetteer_;
  ProvenanceMap provenance_;
};

// Evaluates `query` against every visible fact at once: enumerate all
// derivations, aggregate their results under the parsed label. The reference
// answer for dataset generation and the erasure probe for distant labels.
AnswerSet whole_db_answer(std::string_view query, std::span<const Fact> facts,
                          const ProvenanceMap& triples, const TemplateRegistry& registry,
                          const Gazetteer& gaz);

}  // namespace ndb
