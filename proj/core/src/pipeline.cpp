#include "ndb/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <utility>

#include "ndb/errors.hpp"
#include "ndb/parallel.hpp"
#include "ndb/retrieval.hpp"

namespace ndb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Facts for one support set, resolved against the id-ascending snapshot.
std::vector<Fact> resolve_support(const std::vector<FactId>& ids,
                                  const std::vector<Fact>& visible) {
  std::vector<Fact> out;
  out.reserve(ids.size());
  for (const FactId id : ids) {
    const auto it = std::lower_bound(visible.begin(), visible.end(), id,
                                     [](const Fact& f, FactId v) { return f.id < v; });
    if (it == visible.end() || it->id != id) {
      raise(ErrorCode::UnknownFactId,
            "support set references fact " + std::to_string(id) + " outside the snapshot");
    }
    out.push_back(*it);
  }
  return out;
}

std::vector<std::vector<FactId>> make_support_sets(const SsgMode& mode, std::string_view query,
                                                   const std::vector<Fact>& visible,
                                                   const PipelineConfig& cfg) {
  if (const auto* trained = std::get_if<TrainedSsg>(&mode)) {
    if (trained->model == nullptr) {
      raise(ErrorCode::InvalidArgument, "trained support generation needs a model");
    }
    const SsgSearch search(visible, *trained->model);
    return search.generate(query, cfg.ssg);
  }
  if (const auto* perfect = std::get_if<PerfectSsg>(&mode)) {
    if (perfect->sets == nullptr) {
      raise(ErrorCode::InvalidArgument, "perfect support generation needs reference sets");
    }
    return *perfect->sets;
  }
  const auto& baseline = std::get<TfidfTopK>(mode);
  if (baseline.k == 0) raise(ErrorCode::InvalidArgument, "top-k retrieval needs k >= 1");
  std::vector<std::vector<FactId>> sets;
  if (!visible.empty()) {
    std::vector<FactId> ids;
    for (const ScoredHit& hit : tfidf_rank(query, visible, baseline.k)) ids.push_back(hit.id);
    std::sort(ids.begin(), ids.end());
    sets.push_back(std::move(ids));
  }
  return sets;
}

}  // namespace

QueryResult answer_query(const Database& db, std::string_view query, Timestamp as_of,
                         const SsgMode& mode, const SpjOperator& spj,
                         const PipelineConfig& cfg) {
  QueryResult out;
  out.agg_used = classify_query(query);
  const Snapshot snap = db.snapshot(as_of);

  auto start = Clock::now();
  const std::vector<std::vector<FactId>> sets = make_support_sets(mode, query, *snap, cfg);
  out.timings.support_gen = seconds_since(start);

  start = Clock::now();
  std::vector<SpjOutput> produced(sets.size());
  try {
    parallel_for_index(
        sets.size(),
        [&](std::size_t i) { produced[i] = spj.apply(query, resolve_support(sets[i], *snap)); },
        cfg.workers);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnparsedQuery) throw;
    out.answers = AnswerSet::null();
    out.unparsed = true;
    out.timings.operators = seconds_since(start);
    return out;
  }
  out.timings.operators = seconds_since(start);

  start = Clock::now();
  std::vector<IntermediateResult> results;
  results.reserve(produced.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    results.push_back(produced[i].result);
    if (!produced[i].result.is_null()) {
      out.provenance.push_back({sets[i], std::move(produced[i].result)});
    }
  }
  out.answers = aggregate(out.agg_used, results);
  std::sort(out.provenance.begin(), out.provenance.end(),
            [](const ProvenanceEntry& a, const ProvenanceEntry& b) {
              if (a.support != b.support) return a.support < b.support;
              return a.result.render() < b.result.render();
            });
  out.provenance.erase(std::unique(out.provenance.begin(), out.provenance.end()),
                       out.provenance.end());
  out.timings.aggregation = seconds_since(start);
  return out;
}

IngestOutcome ingest(Database& db, std::string text, Timestamp timestamp, const SsgMode& mode,
                     const SpjOperator& spj, const PipelineConfig& cfg) {
  if (classify_input(text) == InputKind::Update) {
    return db.append_fact(std::move(text), timestamp);
  }
  return answer_query(db, text, timestamp, mode, spj, cfg);
}

}  // namespace ndb
