#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "ndb/errors.hpp"
#include "ndb/retrieval.hpp"

namespace ndb {

namespace {

constexpr char kIndexMagic[7] = {'N', 'D', 'B', 'I', 'D', 'X', '1'};

void write_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

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

std::uint8_t read_u8(std::istream& in) {
  int c = in.get();
  if (c == std::char_traits<char>::eof()) raise(ErrorCode::MalformedRecord, "truncated index");
  return static_cast<std::uint8_t>(c);
}

std::uint32_t read_u32(std::istream& in) {
  char b[4];
  if (!in.read(b, 4)) raise(ErrorCode::MalformedRecord, "truncated index");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  char b[8];
  if (!in.read(b, 8)) raise(ErrorCode::MalformedRecord, "truncated index");
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

double squared_l2(const float* a, const float* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

double row_dot(const float* a, const float* b, std::size_t dim) {
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

}  // namespace

void MipsIndex::assign_buckets() {
  const std::size_t k = centroids_.size() / (dim_ == 0 ? 1 : dim_);
  buckets_.assign(k, {});
  if (k == 0) return;
  for (std::size_t row = 0; row < ids_.size(); ++row) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = squared_l2(&data_[row * dim_], &centroids_[c * dim_], dim_);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    buckets_[best].push_back(static_cast<std::uint32_t>(row));
  }
}

MipsIndex MipsIndex::build(std::vector<FactId> ids, std::vector<float> vectors, std::size_t dim,
                           Mode mode, std::uint64_t seed) {
  if (dim == 0) raise(ErrorCode::DimensionMismatch, "index dimension must be positive");
  if (vectors.size() != ids.size() * dim) {
    raise(ErrorCode::DimensionMismatch, "vector payload does not match ids * dim");
  }
  MipsIndex index;
  index.dim_ = dim;
  index.mode_ = mode;
  index.ids_ = std::move(ids);
  index.data_ = std::move(vectors);

  if (mode == Mode::Approx && !index.ids_.empty()) {
    const std::size_t n = index.ids_.size();
    const std::size_t k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));

    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);

    index.centroids_.assign(k * dim, 0.0f);
    for (std::size_t c = 0; c < k; ++c) {
      std::copy_n(&index.data_[rows[c] * dim], dim, &index.centroids_[c * dim]);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> sums(k * dim);
    std::vector<std::size_t> counts(k);
    for (int iter = 0; iter < kKMeansIterations; ++iter) {
      for (std::size_t row = 0; row < n; ++row) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
          const double d = squared_l2(&index.data_[row * dim], &index.centroids_[c * dim], dim);
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        assign[row] = best;
      }
      std::fill(sums.begin(), sums.end(), 0.0);
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t row = 0; row < n; ++row) {
        counts[assign[row]] += 1;
        for (std::size_t d = 0; d < dim; ++d) {
          sums[assign[row] * dim + d] += index.data_[row * dim + d];
        }
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;  // empty cluster keeps its previous centroid
        for (std::size_t d = 0; d < dim; ++d) {
          index.centroids_[c * dim + d] = static_cast<float>(sums[c * dim + d] / counts[c]);
        }
      }
    }
    index.assign_buckets();
  }
  return index;
}

std::vector<ScoredHit> MipsIndex::search(std::span<const float> probe, double tau,
                                         std::size_t cap) const {
  if (ids_.empty() || cap == 0) return {};
  if (probe.size() != dim_) raise(ErrorCode::DimensionMismatch, "probe dimension mismatch");

  std::vector<ScoredHit> hits;
  auto score_row = [&](std::size_t row) {
    const double s = row_dot(&data_[row * dim_], probe.data(), dim_);
    if (s > tau) hits.push_back({ids_[row], s});
  };

  if (mode_ == Mode::Exact || buckets_.empty()) {
    for (std::size_t row = 0; row < ids_.size(); ++row) score_row(row);
  } else {
    const std::size_t k = buckets_.size();
    std::vector<std::pair<double, std::size_t>> ranked(k);
    for (std::size_t c = 0; c < k; ++c) {
      ranked[c] = {row_dot(&centroids_[c * dim_], probe.data(), dim_), c};
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t probes = std::min(kProbeCentroids, k);
    for (std::size_t p = 0; p < probes; ++p) {
      for (std::uint32_t row : buckets_[ranked[p].second]) score_row(row);
    }
  }

  std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  if (hits.size() > cap) hits.resize(cap);
  return hits;
}

void MipsIndex::save(std::ostream& out) const {
  out.write(kIndexMagic, sizeof(kIndexMagic));
  write_u8(out, static_cast<std::uint8_t>(mode_));
  write_u32(out, static_cast<std::uint32_t>(dim_));
  write_u64(out, ids_.size());
  for (std::size_t row = 0; row < ids_.size(); ++row) {
    write_u64(out, ids_[row]);
    for (std::size_t d = 0; d < dim_; ++d) write_f32(out, data_[row * dim_ + d]);
  }
  const std::size_t k = dim_ == 0 ? 0 : centroids_.size() / dim_;
  write_u32(out, static_cast<std::uint32_t>(k));
  for (float v : centroids_) write_f32(out, v);
}

MipsIndex MipsIndex::load(std::istream& in) {
  char magic[sizeof(kIndexMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
    raise(ErrorCode::MalformedRecord, "bad index magic");
  }
  MipsIndex index;
  const std::uint8_t mode = read_u8(in);
  if (mode > 1) raise(ErrorCode::MalformedRecord, "bad index mode");
  index.mode_ = static_cast<Mode>(mode);
  index.dim_ = read_u32(in);
  if (index.dim_ == 0) raise(ErrorCode::MalformedRecord, "bad index dimension");
  const std::uint64_t count = read_u64(in);
  index.ids_.resize(count);
  index.data_.resize(count * index.dim_);
  for (std::uint64_t row = 0; row < count; ++row) {
    index.ids_[row] = read_u64(in);
    for (std::size_t d = 0; d < index.dim_; ++d) index.data_[row * index.dim_ + d] = read_f32(in);
  }
  const std::uint32_t k = read_u32(in);
  index.centroids_.resize(static_cast<std::size_t>(k) * index.dim_);
  for (float& v : index.centroids_) v = read_f32(in);
  if (k > 0) index.assign_buckets();
  return index;
}

}  // namespace ndb
