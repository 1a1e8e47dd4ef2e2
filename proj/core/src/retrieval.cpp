#include "ndb/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ndb/errors.hpp"

namespace ndb {

namespace {

// Ranking must be reproducible across corpus permutations: score descending,
// then fact id ascending.
void sort_hits(std::vector<ScoredHit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
}

std::vector<std::vector<std::string>> tokenize_corpus(std::span<const Fact> corpus) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const Fact& f : corpus) docs.push_back(tokenize(f.text));
  return docs;
}

std::map<std::string, std::size_t> document_frequencies(
    const std::vector<std::vector<std::string>>& docs) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::map<std::string, bool> seen;
    for (const auto& t : doc) {
      if (!seen.emplace(t, true).second) continue;
      ++df[t];
    }
  }
  return df;
}

}  // namespace

std::vector<ScoredHit> tfidf_rank(std::string_view query, std::span<const Fact> corpus,
                                  std::size_t k) {
  if (corpus.empty()) raise(ErrorCode::EmptyCorpus, "tfidf_rank needs a non-empty corpus");
  std::vector<std::string> qtok = tokenize(query);
  if (qtok.empty()) raise(ErrorCode::EmptyText, "tfidf_rank needs a tokenizable query");

  const auto docs = tokenize_corpus(corpus);
  const auto df = document_frequencies(docs);
  const double n = static_cast<double>(docs.size());
  auto idf = [&](const std::string& term) {
    auto it = df.find(term);
    const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((n + 1.0) / (d + 1.0)) + 1.0;
  };

  std::map<std::string, double> qvec;
  for (const auto& t : qtok) qvec[t] += idf(t);
  double qnorm = 0.0;
  for (const auto& [t, w] : qvec) qnorm += w * w;
  qnorm = std::sqrt(qnorm);

  std::vector<ScoredHit> hits;
  hits.reserve(corpus.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::map<std::string, double> dvec;
    for (const auto& t : docs[i]) dvec[t] += idf(t);
    double dnorm = 0.0, num = 0.0;
    for (const auto& [t, w] : dvec) {
      dnorm += w * w;
      auto it = qvec.find(t);
      if (it != qvec.end()) num += w * it->second;
    }
    dnorm = std::sqrt(dnorm);
    const double denom = qnorm * dnorm;
    hits.push_back({corpus[i].id, denom > 0.0 ? num / denom : 0.0});
  }
  sort_hits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<ScoredHit> bm25_rank(std::string_view query, std::span<const Fact> corpus,
                                 std::size_t k) {
  if (corpus.empty()) raise(ErrorCode::EmptyCorpus, "bm25_rank needs a non-empty corpus");
  std::vector<std::string> qtok = tokenize(query);
  if (qtok.empty()) raise(ErrorCode::EmptyText, "bm25_rank needs a tokenizable query");

  const auto docs = tokenize_corpus(corpus);
  const auto df = document_frequencies(docs);
  const double n = static_cast<double>(docs.size());
  double avgdl = 0.0;
  for (const auto& d : docs) avgdl += static_cast<double>(d.size());
  avgdl /= n;

  std::map<std::string, bool> qterms;
  for (const auto& t : qtok) qterms.emplace(t, true);

  std::vector<ScoredHit> hits;
  hits.reserve(corpus.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0.0;
    for (const auto& [term, unused] : qterms) {
      auto dfit = df.find(term);
      if (dfit == df.end()) continue;
      const double dfv = static_cast<double>(dfit->second);
      const double idf = std::log(1.0 + (n - dfv + 0.5) / (dfv + 0.5));
      double tf = 0.0;
      for (const auto& t : docs[i]) tf += t == term ? 1.0 : 0.0;
      if (tf == 0.0) continue;
      const double dl = static_cast<double>(docs[i].size());
      score += idf * tf * (kBm25K1 + 1.0) / (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avgdl));
    }
    hits.push_back({corpus[i].id, score});
  }
  sort_hits(hits);
  if (hits.size() > k) hits.resize(k);
  return hits;
}

namespace {

constexpr std::string_view kFactSalt = "F|";
constexpr std::string_view kStateSalt = "S|";

void accumulate_gram(std::map<std::uint32_t, double>& acc, std::string_view salt,
                     const std::string& gram, std::size_t dim) {
  std::string key;
  key.reserve(salt.size() + gram.size());
  key.append(salt);
  key.append(gram);
  const std::uint64_t mixed = splitmix64(fnv1a64(key));
  const auto bucket = static_cast<std::uint32_t>(mixed % dim);
  const double sign = (mixed >> 63) ? 1.0 : -1.0;
  acc[bucket] += sign;
}

}  // namespace

std::vector<SparseEntry> hash_encode_sparse(std::string_view text, EncodeRole role,
                                            std::size_t dim) {
  if (dim == 0) raise(ErrorCode::DimensionMismatch, "hash dimension must be positive");
  const std::string_view salt = role == EncodeRole::Fact ? kFactSalt : kStateSalt;
  const std::vector<std::string> tokens = tokenize(text);

  std::map<std::uint32_t, double> acc;
  for (const auto& t : tokens) accumulate_gram(acc, salt, t, dim);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    accumulate_gram(acc, salt, tokens[i] + " " + tokens[i + 1], dim);
  }

  double norm = 0.0;
  for (const auto& [bucket, value] : acc) norm += value * value;
  norm = std::sqrt(norm);

  std::vector<SparseEntry> out;
  out.reserve(acc.size());
  for (const auto& [bucket, value] : acc) {
    if (value == 0.0) continue;
    out.push_back({bucket, static_cast<float>(value / norm)});
  }
  return out;
}

std::vector<float> hash_encode(std::string_view text, EncodeRole role, std::size_t dim) {
  std::vector<float> dense(dim, 0.0f);
  for (const SparseEntry& e : hash_encode_sparse(text, role, dim)) dense[e.index] = e.value;
  return dense;
}

double dot(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) raise(ErrorCode::DimensionMismatch, "dot over mismatched sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

}  // namespace ndb
