#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <utility>

#include "ndb/errors.hpp"
#include "ndb/ssg.hpp"
#include "ndb/text.hpp"

namespace ndb {

namespace {

constexpr char kModelMagic[7] = {'N', 'D', 'B', 'S', 'S', 'G', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void write_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(out, bits);
}

std::uint32_t read_u32(std::istream& in) {
  char b[4];
  if (!in.read(b, 4)) raise(ErrorCode::MalformedRecord, "truncated model");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  char b[8];
  if (!in.read(b, 8)) raise(ErrorCode::MalformedRecord, "truncated model");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

float read_f32(std::istream& in) {
  const std::uint32_t bits = read_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

// Bucket of the interaction feature between state coordinate i and fact
// coordinate j.
std::size_t interaction_bucket(std::uint32_t i, std::uint32_t j) {
  const std::uint64_t mixed = splitmix64((static_cast<std::uint64_t>(i) << 32) | j);
  return static_cast<std::size_t>(mixed & (ActionClassifierModel::kBuckets - 1));
}

// Inner product of two sparse encodings sorted by index.
double sparse_dot(std::span<const SparseEntry> a, std::span<const SparseEntry> b) {
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index < b[j].index) {
      ++i;
    } else if (b[j].index < a[i].index) {
      ++j;
    } else {
      total += static_cast<double>(a[i].value) * b[j].value;
      ++i;
      ++j;
    }
  }
  return total;
}

}  // namespace

double ActionClassifierModel::score_pair(const StateEncoding& state,
                                         std::span<const SparseEntry> fact) const {
  double total = static_cast<double>(overlap_weight_) * sparse_dot(state.fact_role, fact);
  if (weights_.empty()) return total;
  for (const SparseEntry& s : state.state_role) {
    for (const SparseEntry& f : fact) {
      total += static_cast<double>(weights_[interaction_bucket(s.index, f.index)]) * s.value * f.value;
    }
  }
  return total;
}

double ActionClassifierModel::stop_logit(const StateEncoding& state) const {
  double total = stop_bias_;
  for (const SparseEntry& s : state.state_role) {
    total += static_cast<double>(stop_weights_[s.index]) * s.value;
  }
  return total;
}

std::vector<float> ActionClassifierModel::project_state(const StateEncoding& state) const {
  std::vector<float> probe(kHashDim, 0.0f);
  for (const SparseEntry& e : state.fact_role) probe[e.index] = overlap_weight_ * e.value;
  if (weights_.empty()) return probe;
  for (const SparseEntry& s : state.state_role) {
    const std::uint64_t high = static_cast<std::uint64_t>(s.index) << 32;
    for (std::uint32_t j = 0; j < kHashDim; ++j) {
      const std::size_t bucket =
          static_cast<std::size_t>(splitmix64(high | j) & (kBuckets - 1));
      probe[j] += weights_[bucket] * s.value;
    }
  }
  return probe;
}

void ActionClassifierModel::save(std::ostream& out) const {
  out.write(kModelMagic, sizeof(kModelMagic));
  write_u32(out, static_cast<std::uint32_t>(kHashDim));
  write_u64(out, weights_.size());
  for (float w : weights_) write_f32(out, w);
  for (float w : stop_weights_) write_f32(out, w);
  write_f32(out, stop_bias_);
  write_f32(out, overlap_weight_);
}

void ActionClassifierModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::InvalidArgument, "cannot open model file for writing: " + path);
  save(out);
  if (!out) raise(ErrorCode::InvalidArgument, "failed writing model file: " + path);
}

ActionClassifierModel ActionClassifierModel::load(std::istream& in) {
  char magic[sizeof(kModelMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0) {
    raise(ErrorCode::MalformedRecord, "bad model magic");
  }
  if (read_u32(in) != kHashDim) raise(ErrorCode::DimensionMismatch, "model hash dimension mismatch");
  const std::uint64_t buckets = read_u64(in);
  if (buckets != 0 && buckets != kBuckets) raise(ErrorCode::MalformedRecord, "bad model bucket count");
  ActionClassifierModel model;
  model.weights_.resize(static_cast<std::size_t>(buckets));
  for (float& w : model.weights_) w = read_f32(in);
  for (float& w : model.stop_weights_) w = read_f32(in);
  model.stop_bias_ = read_f32(in);
  model.overlap_weight_ = read_f32(in);
  return model;
}

ActionClassifierModel ActionClassifierModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::InvalidArgument, "cannot open model file for reading: " + path);
  return load(in);
}

std::string render_state_text(const SsgState& state, std::span<const Fact> snapshot) {
  std::vector<std::string_view> sentences;
  sentences.reserve(state.partial.size());
  for (FactId id : state.partial) {
    const auto it = std::lower_bound(snapshot.begin(), snapshot.end(), id,
                                     [](const Fact& f, FactId v) { return f.id < v; });
    if (it == snapshot.end() || it->id != id) {
      raise(ErrorCode::UnknownFactId, "state references a fact outside the snapshot");
    }
    sentences.push_back(it->text);
  }
  // Sentence order, not id order: the encoding must not change when the same
  // facts are stored in a different insertion order.
  std::sort(sentences.begin(), sentences.end());
  std::string text = state.query;
  for (const std::string_view s : sentences) {
    text += " | ";
    text += s;
  }
  return text;
}

StateEncoding encode_state(const SsgState& state, std::span<const Fact> snapshot) {
  const std::string text = render_state_text(state, snapshot);
  return StateEncoding{hash_encode_sparse(text, EncodeRole::State),
                       hash_encode_sparse(text, EncodeRole::Fact)};
}

std::vector<float> state_probe(const SsgState& state, std::span<const Fact> snapshot,
                               const ActionClassifierModel& model) {
  const StateEncoding state_enc = encode_state(state, snapshot);
  std::vector<float> probe = model.project_state(state_enc);
  probe.push_back(static_cast<float>(model.stop_logit(state_enc)));
  return probe;
}

SsgSearch::SsgSearch(std::span<const Fact> snapshot, const ActionClassifierModel& model)
    : facts_(snapshot.begin(), snapshot.end()), model_(&model) {
  std::vector<FactId> ids;
  ids.reserve(facts_.size() + 1);
  std::vector<float> rows;
  constexpr std::size_t kRowDim = kHashDim + 1;  // fact vector | stop flag
  rows.reserve((facts_.size() + 1) * kRowDim);
  fact_encodings_.reserve(facts_.size());
  for (const Fact& fact : facts_) {
    fact_encodings_.push_back(hash_encode_sparse(fact.text, EncodeRole::Fact));
    std::vector<float> dense(kRowDim, 0.0f);
    for (const SparseEntry& e : fact_encodings_.back()) dense[e.index] = e.value;
    ids.push_back(fact.id);
    rows.insert(rows.end(), dense.begin(), dense.end());
  }
  ids.push_back(kStopActionId);
  std::vector<float> stop_row(kRowDim, 0.0f);
  stop_row.back() = 1.0f;
  rows.insert(rows.end(), stop_row.begin(), stop_row.end());
  index_ = MipsIndex::build(std::move(ids), std::move(rows), kRowDim, MipsIndex::Mode::Exact);
}

std::pair<std::vector<SsgState>, bool> SsgSearch::expand(const SsgState& state,
                                                         const SsgConfig& cfg) const {
  if (state.depth() >= cfg.max_depth) return {{}, true};  // depth bound: close without scoring
  const StateEncoding state_enc = encode_state(state, facts_);
  std::vector<float> probe = model_->project_state(state_enc);
  probe.push_back(static_cast<float>(model_->stop_logit(state_enc)));
  const auto hits = index_.search(probe, cfg.tau, cfg.expand_cap);
  std::vector<SsgState> children;
  bool close = false;
  for (const ScoredHit& hit : hits) {
    if (hit.id == kStopActionId) {
      close = true;
      continue;
    }
    if (std::binary_search(state.partial.begin(), state.partial.end(), hit.id)) continue;
    SsgState child{state.query, state.partial};
    child.partial.insert(std::upper_bound(child.partial.begin(), child.partial.end(), hit.id),
                         hit.id);
    children.push_back(std::move(child));
  }
  return {std::move(children), close};
}

std::vector<SupportSet> SsgSearch::generate(std::string_view query, const SsgConfig& cfg,
                                            SsgStats* stats) const {
  if (cfg.max_depth < 1) raise(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  if (cfg.max_open < 1) raise(ErrorCode::InvalidArgument, "max_open must be at least 1");
  if (cfg.expand_cap < 1) raise(ErrorCode::InvalidArgument, "expand_cap must be at least 1");
  if (facts_.empty()) return {};

  std::vector<SsgState> open;
  open.push_back(SsgState{std::string(query), {}});
  std::set<SupportSet> closed;
  while (!open.empty()) {
    std::vector<SsgState> next;
    std::set<std::vector<FactId>> seen;
    for (const SsgState& state : open) {
      if (stats) {
        if (state.depth() >= cfg.max_depth) {
          ++stats->forced_closures;
        } else {
          ++stats->scored_expansions;
        }
      }
      auto [children, close] = expand(state, cfg);
      // A support set holds at least one fact; closing the root is a no-op.
      if (close && !state.partial.empty()) closed.insert(state.partial);
      for (SsgState& child : children) {
        if (seen.insert(child.partial).second) next.push_back(std::move(child));
      }
    }
    if (next.size() > cfg.max_open) next.resize(cfg.max_open);
    open = std::move(next);
  }
  std::vector<SupportSet> out(closed.begin(), closed.end());
  if (out.size() > cfg.max_open) out.resize(cfg.max_open);
  return out;
}

std::vector<SupportSet> generate_support_sets(std::string_view query,
                                              std::span<const Fact> snapshot,
                                              const ActionClassifierModel& model,
                                              const SsgConfig& cfg) {
  return SsgSearch(snapshot, model).generate(query, cfg);
}

namespace {

// One unrolled decision state: encodings are fixed up front (the state text
// never depends on the weights), so epochs only replay score-and-update.
struct TrainStep {
  StateEncoding state_enc;
  std::vector<const std::vector<SparseEntry>*> positives;
  std::vector<const std::vector<SparseEntry>*> negatives;
  bool stop_positive = false;
};

constexpr std::size_t kNegativesPerStep = 8;
constexpr double kMargin = 1.0;
constexpr double kLearningRate = 0.5;

}  // namespace

ActionClassifierModel train_action_classifier(std::span<const LabeledCase> cases,
                                              std::size_t epochs, std::uint64_t seed) {
  if (cases.empty()) raise(ErrorCode::EmptyTrainingSet, "no labeled cases");

  std::mt19937_64 rng(seed);
  // Fact encodings are shared across steps; map nodes give stable addresses.
  std::map<std::pair<const Database*, FactId>, std::vector<SparseEntry>> fact_cache;
  std::vector<TrainStep> steps;

  for (const LabeledCase& labeled : cases) {
    if (labeled.db == nullptr || labeled.query == nullptr) {
      raise(ErrorCode::InvalidArgument, "labeled case missing database or query");
    }
    const QueryCase& query = *labeled.query;
    const std::vector<Fact> visible = labeled.db->visible_facts(query.timestamp);
    for (const Fact& fact : visible) {
      const auto key = std::make_pair(labeled.db, fact.id);
      if (fact_cache.find(key) == fact_cache.end()) {
        fact_cache.emplace(key, hash_encode_sparse(fact.text, EncodeRole::Fact));
      }
    }
    // Facts in any reference set of this query are never sampled as negatives:
    // alternative sets share states (the root above all), and a fact that is a
    // positive action there must not be pushed down from a sibling unroll.
    std::vector<FactId> relevant;
    for (const auto& ref : query.support_sets) relevant.insert(relevant.end(), ref.begin(), ref.end());
    std::sort(relevant.begin(), relevant.end());
    relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
    for (const std::vector<FactId>& raw_ref : query.support_sets) {
      if (raw_ref.empty()) continue;  // a case with no derivation contributes no steps
      SupportSet ref = raw_ref;
      std::sort(ref.begin(), ref.end());
      std::vector<const std::vector<SparseEntry>*> ref_encodings;
      ref_encodings.reserve(ref.size());
      for (FactId id : ref) {
        const auto it = fact_cache.find(std::make_pair(labeled.db, id));
        if (it == fact_cache.end()) {
          raise(ErrorCode::UnknownFactId, "reference support fact is not visible at query time");
        }
        ref_encodings.push_back(&it->second);
      }
      // The search can assemble a set in any order, so every subset of the
      // reference set is a reachable partial state; supervise them all (the
      // sets are small). Positives are the facts still missing, STOP once
      // complete.
      const std::size_t n = ref.size();
      std::vector<SupportSet> partials;
      if (n <= 3) {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
          SupportSet partial;
          for (std::size_t b = 0; b < n; ++b) {
            if (mask & (1u << b)) partial.push_back(ref[b]);
          }
          partials.push_back(std::move(partial));
        }
      } else {
        for (std::size_t k = 0; k <= n; ++k) partials.emplace_back(ref.begin(), ref.begin() + k);
      }
      for (const SupportSet& partial : partials) {
        TrainStep step;
        const SsgState state{query.text, partial};
        step.state_enc = encode_state(state, visible);
        if (partial.size() == n) {
          step.stop_positive = true;
        } else {
          for (std::size_t r = 0; r < n; ++r) {
            if (!std::binary_search(partial.begin(), partial.end(), ref[r])) {
              step.positives.push_back(ref_encodings[r]);
            }
          }
        }
        std::vector<FactId> pool;
        pool.reserve(visible.size());
        for (const Fact& fact : visible) {
          if (!std::binary_search(relevant.begin(), relevant.end(), fact.id)) pool.push_back(fact.id);
        }
        deterministic_shuffle(pool, rng);
        const std::size_t take = std::min(kNegativesPerStep, pool.size());
        for (std::size_t i = 0; i < take; ++i) {
          step.negatives.push_back(&fact_cache.at(std::make_pair(labeled.db, pool[i])));
        }
        steps.push_back(std::move(step));
      }
    }
  }

  ActionClassifierModel model;
  if (epochs == 0 || steps.empty()) return model;

  // Master weights in double; the averaged weights come from the lagged
  // accumulator: avg = w - acc / T where acc collects delta * (step - 1).
  std::vector<double> w(ActionClassifierModel::kBuckets, 0.0);
  std::vector<double> w_acc(ActionClassifierModel::kBuckets, 0.0);
  std::vector<double> stop_w(kHashDim, 0.0);
  std::vector<double> stop_acc(kHashDim, 0.0);
  double bias = 0.0;
  double bias_acc = 0.0;
  double overlap = 0.0;
  double overlap_acc = 0.0;
  std::uint64_t t = 0;  // completed steps

  const auto score = [&](const StateEncoding& state, const std::vector<SparseEntry>& fact) {
    double total = overlap * sparse_dot(state.fact_role, fact);
    for (const SparseEntry& s : state.state_role) {
      for (const SparseEntry& f : fact) {
        total += w[interaction_bucket(s.index, f.index)] * s.value * f.value;
      }
    }
    return total;
  };
  const auto update_pair = [&](const StateEncoding& state, const std::vector<SparseEntry>& fact,
                               double sign) {
    for (const SparseEntry& s : state.state_role) {
      for (const SparseEntry& f : fact) {
        const std::size_t bucket = interaction_bucket(s.index, f.index);
        const double delta = sign * kLearningRate * s.value * f.value;
        w[bucket] += delta;
        w_acc[bucket] += delta * static_cast<double>(t);
      }
    }
    const double delta = sign * kLearningRate * sparse_dot(state.fact_role, fact);
    overlap += delta;
    overlap_acc += delta * static_cast<double>(t);
  };
  const auto stop_score = [&](const StateEncoding& state) {
    double total = bias;
    for (const SparseEntry& s : state.state_role) total += stop_w[s.index] * s.value;
    return total;
  };
  const auto update_stop = [&](const StateEncoding& state, double sign) {
    for (const SparseEntry& s : state.state_role) {
      const double delta = sign * kLearningRate * s.value;
      stop_w[s.index] += delta;
      stop_acc[s.index] += delta * static_cast<double>(t);
    }
    const double delta = sign * kLearningRate;
    bias += delta;
    bias_acc += delta * static_cast<double>(t);
  };

  std::vector<std::size_t> order(steps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    deterministic_shuffle(order, rng);
    for (std::size_t idx : order) {
      const TrainStep& step = steps[idx];
      for (const auto* pos : step.positives) {
        if (score(step.state_enc, *pos) < kMargin) update_pair(step.state_enc, *pos, +1.0);
      }
      for (const auto* neg : step.negatives) {
        if (score(step.state_enc, *neg) > -kMargin) update_pair(step.state_enc, *neg, -1.0);
      }
      if (step.stop_positive) {
        if (stop_score(step.state_enc) < kMargin) update_stop(step.state_enc, +1.0);
      } else {
        if (stop_score(step.state_enc) > -kMargin) update_stop(step.state_enc, -1.0);
      }
      ++t;
    }
  }

  const double total_steps = static_cast<double>(t);
  model.weights_.resize(ActionClassifierModel::kBuckets);
  for (std::size_t b = 0; b < ActionClassifierModel::kBuckets; ++b) {
    model.weights_[b] = static_cast<float>(w[b] - w_acc[b] / total_steps);
  }
  for (std::size_t j = 0; j < kHashDim; ++j) {
    model.stop_weights_[j] = static_cast<float>(stop_w[j] - stop_acc[j] / total_steps);
  }
  model.stop_bias_ = static_cast<float>(bias - bias_acc / total_steps);
  model.overlap_weight_ = static_cast<float>(overlap - overlap_acc / total_steps);
  return model;
}

ActionClassifierModel train_action_classifier(std::span<const QueryCase> cases,
                                              const Database& db, std::size_t epochs,
                                              std::uint64_t seed) {
  std::vector<LabeledCase> labeled;
  labeled.reserve(cases.size());
  for (const QueryCase& query : cases) labeled.push_back(LabeledCase{&db, &query});
  return train_action_classifier(std::span<const LabeledCase>(labeled), epochs, seed);
}

}  // namespace ndb
