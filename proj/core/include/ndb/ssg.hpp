#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ndb/dataset_gen.hpp"
#include "ndb/fact_store.hpp"
#include "ndb/retrieval.hpp"

namespace ndb {

using SupportSet = std::vector<FactId>;  // ascending ids = timestamp order

// One node of the incremental search: the query plus the facts already
// committed to the set under construction.
struct SsgState {
  std::string query;
  std::vector<FactId> partial;  // sorted ascending

  std::size_t depth() const { return partial.size(); }
  bool operator==(const SsgState&) const = default;
};

struct SsgConfig {
  double tau = 0.0;            // actions must score strictly above this
  std::size_t max_depth = 3;   // facts per support set
  std::size_t max_open = 64;   // frontier width
  std::size_t expand_cap = 16; // candidate actions per expansion
};

struct LabeledCase;

// Both hashed views of one state text. The state-role view feeds the
// interaction features and the STOP logit; the fact-role view lives in the
// same coordinate space as fact encodings and carries the token-overlap
// feature (names introduced by committed facts transfer to unseen contexts
// through it, where per-pair weights cannot).
struct StateEncoding {
  std::vector<SparseEntry> state_role;
  std::vector<SparseEntry> fact_role;
};

// Linear action classifier over two feature groups: hashed
// (state-gram x fact-gram) interaction features and one shared weight on
// state/fact token overlap. Scoring factorizes into an inner product so
// candidate scoring runs through MipsIndex; see SsgSearch for the
// probe/action-row layout that also carries STOP.
class ActionClassifierModel {
 public:
  static constexpr std::size_t kBuckets = std::size_t{1} << 22;

  ActionClassifierModel() : stop_weights_(kHashDim, 0.0f) {}

  // Score of taking `fact` as the next action from this state:
  // interactions + overlap.
  double score_pair(const StateEncoding& state, std::span<const SparseEntry> fact) const;
  double stop_logit(const StateEncoding& state) const;

  // Interaction-feature projection: probe of dimension kHashDim whose inner
  // product with a fact encoding gives interactions + overlap (the fact-role
  // view scaled by the overlap weight is folded in).
  std::vector<float> project_state(const StateEncoding& state) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static ActionClassifierModel load(std::istream& in);
  static ActionClassifierModel load_file(const std::string& path);

  bool operator==(const ActionClassifierModel&) const = default;

 private:
  friend ActionClassifierModel train_action_classifier(std::span<const LabeledCase>,
                                                       std::size_t, std::uint64_t);
  // Lazily grown to kBuckets on first update; an untrained model stays tiny.
  std::vector<float> weights_;
  std::vector<float> stop_weights_;
  float stop_bias_ = 0.0f;
  float overlap_weight_ = 0.0f;
};

// Canonical state text: the query, then the committed facts' sentences in
// lexicographic order, joined with " | ". Sentence order keeps the encoding
// invariant under reinsertion of the same facts in a different order.
std::string render_state_text(const SsgState& state, std::span<const Fact> snapshot);

// Both hashed views of the canonical state text.
StateEncoding encode_state(const SsgState& state, std::span<const Fact> snapshot);

// Full MIPS probe: [projection (kHashDim) | stop_logit]. Action rows in the
// index are [fact_vec | 0]; the STOP row is [0.. | 1], so one search scores
// every fact action and STOP at once.
std::vector<float> state_probe(const SsgState& state, std::span<const Fact> snapshot,
                               const ActionClassifierModel& model);

struct SsgStats {
  std::size_t scored_expansions = 0;  // expansions that consulted the index
  std::size_t forced_closures = 0;    // states closed by the depth bound
};

// Action index over one snapshot: every fact plus the STOP sentinel.
class SsgSearch {
 public:
  SsgSearch(std::span<const Fact> snapshot, const ActionClassifierModel& model);

  // One step of the search. Children extend the state by one fact each
  // (actions scoring strictly above tau, never a duplicate fact); `close` is
  // true when STOP clears tau or the state sits at max_depth (which skips
  // scoring entirely). No child and no close marks a dead end.
  std::pair<std::vector<SsgState>, bool> expand(const SsgState& state,
                                                const SsgConfig& cfg) const;

  // Breadth-first over the open frontier: expand every state, collect closed
  // sets, deduplicate the next frontier, trim it to max_open. Returns the
  // closed sets sorted lexicographically, at most max_open of them.
  std::vector<SupportSet> generate(std::string_view query, const SsgConfig& cfg,
                                   SsgStats* stats = nullptr) const;

  const std::vector<Fact>& snapshot() const { return facts_; }

 private:
  std::vector<Fact> facts_;
  std::vector<std::vector<SparseEntry>> fact_encodings_;
  MipsIndex index_;
  const ActionClassifierModel* model_;
};

std::vector<SupportSet> generate_support_sets(std::string_view query,
                                              std::span<const Fact> snapshot,
                                              const ActionClassifierModel& model,
                                              const SsgConfig& cfg);

// One training query bound to the database whose snapshot it was asked over.
struct LabeledCase {
  const Database* db = nullptr;
  const QueryCase* query = nullptr;
};

// Margin perceptron over unrolled decision steps, weight-averaged across
// updates. Every reference support set contributes one step per partial state
// (every subset for sets of up to three facts — the search may reach a set in
// any order — timestamp-order prefixes beyond that): remaining facts of the
// set are positive actions, STOP is positive exactly at completion and
// negative before it, and 8 seed-sampled visible facts belonging to none of
// the query's support sets are negative. Margin 1 calibrates scores against
// the search default tau = 0. Deterministic in (cases, epochs, seed).
ActionClassifierModel train_action_classifier(std::span<const LabeledCase> cases,
                                              std::size_t epochs, std::uint64_t seed);
ActionClassifierModel train_action_classifier(std::span<const QueryCase> cases,
                                              const Database& db, std::size_t epochs,
                                              std::uint64_t seed);

}  // namespace ndb
