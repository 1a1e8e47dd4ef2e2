#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ndb/fact_store.hpp"
#include "ndb/text.hpp"

namespace ndb {

struct ScoredHit {
  FactId id = 0;
  double score = 0.0;
};

// Sentinel id for the STOP action inside support-set search; never a fact id.
inline constexpr FactId kStopActionId = ~FactId{0};

// Cosine similarity over tf-idf vectors with idf = ln((N+1)/(df+1)) + 1.
// Returns the top k of the whole corpus ordered by (score desc, id asc);
// zero-score documents still fill k.
std::vector<ScoredHit> tfidf_rank(std::string_view query, std::span<const Fact> corpus,
                                  std::size_t k);

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

// Okapi BM25 with the non-negative idf variant ln(1 + (N - df + 0.5)/(df + 0.5)).
// Unique query terms are scored once each. Ordering matches tfidf_rank.
std::vector<ScoredHit> bm25_rank(std::string_view query, std::span<const Fact> corpus,
                                 std::size_t k);

inline constexpr std::size_t kHashDim = 4096;

// Hashed encodings are role-salted so that identical text maps to different
// coordinates depending on whether it plays the fact or the state role.
enum class EncodeRole { Fact, State };

struct SparseEntry {
  std::uint32_t index = 0;
  float value = 0.0f;
};

// Signed feature hashing of token unigrams and adjacent bigrams into `dim`
// buckets, L2-normalized. Texts without tokens map to the zero vector.
// Entries are sorted by index and exclude cancelled (zero) buckets.
std::vector<SparseEntry> hash_encode_sparse(std::string_view text, EncodeRole role,
                                            std::size_t dim = kHashDim);
std::vector<float> hash_encode(std::string_view text, EncodeRole role,
                               std::size_t dim = kHashDim);

double dot(std::span<const float> a, std::span<const float> b);

// Flat inner-product index. Exact mode scans everything; approximate mode
// clusters into ceil(sqrt(n)) centroids (seeded k-means) and probes the 4
// nearest buckets. search() returns entries with score strictly above tau,
// ordered by (score desc, id asc), truncated to cap.
class MipsIndex {
 public:
  enum class Mode : std::uint8_t { Exact = 0, Approx = 1 };

  static constexpr std::size_t kProbeCentroids = 4;
  static constexpr int kKMeansIterations = 20;

  MipsIndex() = default;

  // `vectors` is row-major, ids.size() * dim floats.
  static MipsIndex build(std::vector<FactId> ids, std::vector<float> vectors, std::size_t dim,
                         Mode mode, std::uint64_t seed = 17);

  std::vector<ScoredHit> search(std::span<const float> probe, double tau, std::size_t cap) const;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  Mode mode() const { return mode_; }

  void save(std::ostream& out) const;
  static MipsIndex load(std::istream& in);

 private:
  std::size_t dim_ = 0;
  Mode mode_ = Mode::Exact;
  std::vector<FactId> ids_;
  std::vector<float> data_;
  std::vector<float> centroids_;
  std::vector<std::vector<std::uint32_t>> buckets_;

  void assign_buckets();
};

}  // namespace ndb
