#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ndb/dataset_gen.hpp"
#include "ndb/errors.hpp"
#include "ndb/ssg.hpp"

using namespace ndb;

namespace {

// Shared fixture: a two-database world and a classifier trained to
// memorization on all of its cases. Built once; training is deterministic.
struct TrainedFixture {
  GeneratedDataset dataset;
  ActionClassifierModel model;
};

const TrainedFixture& fixture() {
  static const TrainedFixture f = [] {
    GenConfig config;
    config.num_databases = 2;
    config.facts_per_db = 50;
    config.queries_per_db = 120;
    config.seed = 42;
    TrainedFixture out{generate_dataset(config, TemplateRegistry::standard(),
                                        Gazetteer::standard()),
                       {}};
    std::vector<LabeledCase> cases;
    for (const auto& gdb : out.dataset.databases) {
      for (const auto& query : gdb.queries) cases.push_back({&gdb.db, &query});
    }
    out.model = train_action_classifier(cases, 15, 7);
    return out;
  }();
  return f;
}

std::vector<FactId> sorted_copy(std::vector<FactId> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Fact> tiny_snapshot() {
  return {
      {0, "Sheryl is Nicholas's spouse.", 1, false},
      {1, "Nicholas lives in Washington D.C.", 2, false},
      {2, "Teuvo was born in 1912.", 3, false},
  };
}

}  // namespace

TEST_CASE("render_state_text joins query and committed facts in id order") {
  const auto snapshot = tiny_snapshot();
  SsgState state{"Who is Nicholas's spouse?", {0, 2}};
  CHECK(render_state_text(state, snapshot) ==
        "Who is Nicholas's spouse? | Sheryl is Nicholas's spouse. | Teuvo was born in 1912.");
  SsgState root{"Who is Nicholas's spouse?", {}};
  CHECK(render_state_text(root, snapshot) == "Who is Nicholas's spouse?");
}

TEST_CASE("render_state_text rejects fact ids outside the snapshot") {
  const auto snapshot = tiny_snapshot();
  SsgState state{"q?", {99}};
  try {
    static_cast<void>(render_state_text(state, snapshot));
    FAIL("expected an unknown-fact error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownFactId);
  }
}

TEST_CASE("state_probe rows reproduce score_pair and stop_logit") {
  const auto& fx = fixture();
  const auto snapshot = fx.dataset.databases[0].db.visible_facts(1000);
  SsgState state{fx.dataset.databases[0].queries.front().text, {snapshot[3].id}};
  const auto probe = state_probe(state, snapshot, fx.model);
  REQUIRE(probe.size() == kHashDim + 1);

  const StateEncoding enc = encode_state(state, snapshot);
  // A fact action row is the fact encoding with a trailing 0; STOP is the
  // opposite one-hot. Their inner products with the probe must agree with the
  // direct scoring entry points (float path, so a small tolerance).
  const auto fact_enc = hash_encode_sparse(snapshot[7].text, EncodeRole::Fact);
  std::vector<float> fact_row(kHashDim + 1, 0.0f);
  for (const SparseEntry& e : fact_enc) fact_row[e.index] = e.value;
  CHECK(dot(probe, fact_row) ==
        doctest::Approx(fx.model.score_pair(enc, fact_enc)).epsilon(1e-4));

  std::vector<float> stop_row(kHashDim + 1, 0.0f);
  stop_row.back() = 1.0f;
  CHECK(dot(probe, stop_row) ==
        doctest::Approx(fx.model.stop_logit(enc)).epsilon(1e-4));
}

TEST_CASE("expand equals a brute-force threshold scan over the same rows") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  const auto snapshot = gdb.db.visible_facts(1000);
  SsgSearch search(snapshot, fx.model);
  SsgConfig cfg;  // defaults: tau 0, depth 3, open 64, cap 16

  for (std::size_t qi : {0, 5, 11}) {
    const SsgState root{gdb.queries[qi].text, {}};
    for (const SsgState& state : {root, SsgState{root.query, {snapshot[2].id}}}) {
      const auto probe = state_probe(state, snapshot, fx.model);
      // Brute force: score every fact row and STOP against the probe.
      std::vector<std::pair<double, FactId>> scored;
      for (const Fact& fact : snapshot) {
        const auto enc = hash_encode_sparse(fact.text, EncodeRole::Fact);
        std::vector<float> row(kHashDim + 1, 0.0f);
        for (const SparseEntry& e : enc) row[e.index] = e.value;
        scored.emplace_back(dot(probe, row), fact.id);
      }
      // STOP competes with the fact actions for the expansion cap, so rank
      // them together exactly as the index search does: score descending,
      // id ascending on ties, strict threshold, then truncate.
      std::vector<FactId> expected;
      std::vector<std::pair<double, bool>> merged;  // (score, is_stop); ids parallel
      std::vector<FactId> merged_ids;
      for (const auto& [score, id] : scored) {
        merged.emplace_back(score, false);
        merged_ids.push_back(id);
      }
      merged.emplace_back(probe.back(), true);
      merged_ids.push_back(~FactId{0});
      std::vector<std::size_t> order(merged.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (merged[a].first != merged[b].first) return merged[a].first > merged[b].first;
        return merged_ids[a] < merged_ids[b];
      });
      bool expect_close = false;
      std::size_t taken = 0;
      for (std::size_t i : order) {
        if (taken == cfg.expand_cap || merged[i].first <= cfg.tau) break;
        ++taken;
        if (merged[i].second) {
          expect_close = true;
        } else if (!std::binary_search(state.partial.begin(), state.partial.end(),
                                       merged_ids[i])) {
          expected.push_back(merged_ids[i]);
        }
      }

      const auto [children, close] = search.expand(state, cfg);
      CHECK(close == expect_close);
      REQUIRE(children.size() == expected.size());
      for (std::size_t i = 0; i < children.size(); ++i) {
        auto want = state.partial;
        want.insert(std::upper_bound(want.begin(), want.end(), expected[i]), expected[i]);
        CHECK(children[i].partial == want);
        CHECK(children[i].query == state.query);
      }
    }
  }
}

TEST_CASE("trained model memorizes its training databases") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  SsgConfig cfg;

  std::size_t refs = 0, exact = 0, soft = 0;
  for (const auto& query : gdb.queries) {
    if (query.support_sets.empty() || query.support_sets.front().empty()) continue;
    const auto snapshot = gdb.db.visible_facts(query.timestamp);
    SsgSearch search(snapshot, fx.model);
    const auto predicted = search.generate(query.text, cfg);
    const std::set<SupportSet> pred(predicted.begin(), predicted.end());
    for (const auto& raw : query.support_sets) {
      const auto ref = sorted_copy(raw);
      ++refs;
      if (pred.count(ref)) ++exact;
      for (const auto& p : pred) {
        if (std::includes(p.begin(), p.end(), ref.begin(), ref.end())) {
          ++soft;
          break;
        }
      }
    }
  }
  REQUIRE(refs > 150);
  // Frozen from the committed configuration (2 dbs, 15 epochs, seed 7,
  // default decode): measured 0.9487 exact / 0.9949 soft.
  CHECK(double(exact) / double(refs) >= 0.90);
  CHECK(double(soft) / double(refs) >= 0.97);
}

TEST_CASE("lookup queries resolve as one fact action then STOP") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  SsgConfig cfg;

  bool exercised = false;
  for (const auto& query : gdb.queries) {
    if (query.kind != QueryKind::LookupExtract && query.kind != QueryKind::LookupBool) continue;
    if (query.support_sets.size() != 1 || query.support_sets.front().size() != 1) continue;
    const auto ref = sorted_copy(query.support_sets.front());
    const auto snapshot = gdb.db.visible_facts(query.timestamp);
    SsgSearch search(snapshot, fx.model);
    const auto predicted = search.generate(query.text, cfg);
    if (!std::count(predicted.begin(), predicted.end(), ref)) continue;  // rare trained miss

    // The emitted singleton implies the two-step mechanics: the reference
    // fact is a root action, and the completed set selects STOP.
    const auto [children, root_close] = search.expand(SsgState{query.text, {}}, cfg);
    const bool has_ref_child =
        std::any_of(children.begin(), children.end(),
                    [&](const SsgState& c) { return c.partial == ref; });
    CHECK(has_ref_child);
    const auto [_, done_close] = search.expand(SsgState{query.text, ref}, cfg);
    CHECK(done_close);
    exercised = true;
    if (exercised) break;
  }
  CHECK(exercised);
}

TEST_CASE("aggregation query yields one singleton per member fact") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  SsgConfig cfg;

  bool exercised = false;
  for (const auto& query : gdb.queries) {
    if (query.kind != QueryKind::Count) continue;
    if (query.support_sets.size() < 2) continue;
    const auto snapshot = gdb.db.visible_facts(query.timestamp);
    SsgSearch search(snapshot, fx.model);
    const auto predicted = search.generate(query.text, cfg);
    const std::set<SupportSet> pred(predicted.begin(), predicted.end());
    for (const auto& raw : query.support_sets) {
      REQUIRE(raw.size() == 1);
      CHECK(pred.count(sorted_copy(raw)) == 1);
    }
    exercised = true;
    break;
  }
  CHECK(exercised);
}

TEST_CASE("generated sets satisfy the output invariants") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  SsgConfig cfg;

  for (std::size_t qi = 0; qi < 12; ++qi) {
    const auto& query = gdb.queries[qi];
    const auto snapshot = gdb.db.visible_facts(query.timestamp);
    std::set<FactId> visible;
    for (const Fact& fact : snapshot) visible.insert(fact.id);
    SsgSearch search(snapshot, fx.model);
    const auto predicted = search.generate(query.text, cfg);
    CHECK(predicted.size() <= cfg.max_open);
    std::set<SupportSet> distinct(predicted.begin(), predicted.end());
    CHECK(distinct.size() == predicted.size());
    for (const auto& set : predicted) {
      CHECK(!set.empty());
      CHECK(set.size() <= cfg.max_depth);
      CHECK(std::is_sorted(set.begin(), set.end()));
      for (FactId id : set) CHECK(visible.count(id) == 1);
    }
  }
}

TEST_CASE("search statistics respect the frontier bounds") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  SsgConfig cfg;
  cfg.tau = -1.0;  // wide decode stresses the bounds

  const auto snapshot = gdb.db.visible_facts(1000);
  SsgSearch search(snapshot, fx.model);
  SsgStats stats;
  const auto sets = search.generate(gdb.queries[0].text, cfg, &stats);
  CHECK(sets.size() <= cfg.max_open);
  // Levels 0..max_depth-1 consult the index for at most max_open states each;
  // the final level closes without scoring.
  CHECK(stats.scored_expansions <= cfg.max_open * cfg.max_depth);
  CHECK(stats.forced_closures <= cfg.max_open);
}

TEST_CASE("tau is monotone: raising it only removes closed sets") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];

  SsgConfig generous;
  generous.max_open = 256;
  generous.expand_cap = 128;

  for (std::size_t qi = 0; qi < 8; ++qi) {
    const auto& query = gdb.queries[qi];
    const auto snapshot = gdb.db.visible_facts(query.timestamp);
    SsgSearch search(snapshot, fx.model);

    SsgConfig high = generous;
    high.tau = 0.0;
    SsgConfig low = generous;
    low.tau = -0.5;

    const auto at_high = search.generate(query.text, high);
    const auto at_low = search.generate(query.text, low);
    const std::set<SupportSet> low_sets(at_low.begin(), at_low.end());
    for (const auto& set : at_high) CHECK(low_sets.count(set) == 1);
  }
}

TEST_CASE("untrained model dead-ends at the default threshold") {
  const ActionClassifierModel zero;
  const auto& gdb = fixture().dataset.databases[0];
  const auto snapshot = gdb.db.visible_facts(1000);
  SsgSearch search(snapshot, zero);

  SsgConfig cfg;  // tau = 0: every score is exactly 0, nothing clears it
  CHECK(search.generate(gdb.queries[0].text, cfg).empty());

  // Below zero everything floods, but the empty root is never emitted.
  cfg.tau = -1.0;
  const auto sets = search.generate(gdb.queries[0].text, cfg);
  CHECK(!sets.empty());
  for (const auto& set : sets) CHECK(!set.empty());
}

TEST_CASE("generate validates its configuration and handles empty snapshots") {
  const auto& fx = fixture();
  const auto snapshot = fx.dataset.databases[0].db.visible_facts(1000);
  SsgSearch search(snapshot, fx.model);

  SsgConfig bad;
  bad.max_depth = 0;
  CHECK_THROWS_AS(static_cast<void>(search.generate("q?", bad)), Error);
  bad = SsgConfig{};
  bad.max_open = 0;
  CHECK_THROWS_AS(static_cast<void>(search.generate("q?", bad)), Error);
  bad = SsgConfig{};
  bad.expand_cap = 0;
  CHECK_THROWS_AS(static_cast<void>(search.generate("q?", bad)), Error);

  SsgSearch empty_search(std::span<const Fact>{}, fx.model);
  CHECK(empty_search.generate("Who is anyone?", SsgConfig{}).empty());
}

TEST_CASE("training is deterministic in its seed") {
  const auto& fx = fixture();
  std::vector<LabeledCase> cases;
  const auto& gdb = fx.dataset.databases[0];
  for (std::size_t qi = 0; qi < 20; ++qi) cases.push_back({&gdb.db, &gdb.queries[qi]});

  const auto a = train_action_classifier(cases, 3, 11);
  const auto b = train_action_classifier(cases, 3, 11);
  std::ostringstream bytes_a, bytes_b;
  a.save(bytes_a);
  b.save(bytes_b);
  CHECK(bytes_a.str() == bytes_b.str());
  CHECK(a == b);

  const auto c = train_action_classifier(cases, 3, 12);
  CHECK_FALSE(a == c);
}

TEST_CASE("training rejects an empty case list and skips label-free cases") {
  CHECK_THROWS_AS(static_cast<void>(
                      train_action_classifier(std::span<const LabeledCase>{}, 3, 1)),
                  Error);
  try {
    static_cast<void>(train_action_classifier(std::span<const LabeledCase>{}, 3, 1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyTrainingSet);
  }

  // Cases whose support sets are all empty (early-timestamp NULL probes)
  // contribute no decision steps: the result is the zero model.
  const auto& gdb = fixture().dataset.databases[0];
  std::vector<LabeledCase> null_only;
  for (const auto& query : gdb.queries) {
    if (query.support_sets.empty() ||
        (query.support_sets.size() == 1 && query.support_sets.front().empty()))
      null_only.push_back({&gdb.db, &query});
  }
  REQUIRE(!null_only.empty());
  CHECK(train_action_classifier(null_only, 3, 1) == ActionClassifierModel{});

  // Zero epochs likewise trains nothing.
  std::vector<LabeledCase> cases{{&gdb.db, &gdb.queries[0]}};
  CHECK(train_action_classifier(cases, 0, 1) == ActionClassifierModel{});
}

TEST_CASE("model persistence round-trips and rejects corrupt input") {
  const auto& fx = fixture();
  std::ostringstream out;
  fx.model.save(out);
  const std::string bytes = out.str();

  std::istringstream in(bytes);
  CHECK(ActionClassifierModel::load(in) == fx.model);

  // Corrupt magic.
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream bad_in(bad);
  try {
    static_cast<void>(ActionClassifierModel::load(bad_in));
    FAIL("expected a malformed-record error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRecord);
  }

  // Truncation.
  std::istringstream short_in(bytes.substr(0, bytes.size() / 2));
  try {
    static_cast<void>(ActionClassifierModel::load(short_in));
    FAIL("expected a truncated-model error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRecord);
  }

  // Missing file.
  try {
    static_cast<void>(ActionClassifierModel::load_file("/nonexistent/model.bin"));
    FAIL("expected an open failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }

  // The untrained model stays tiny on disk (weights are lazily allocated).
  std::ostringstream zero_out;
  ActionClassifierModel{}.save(zero_out);
  CHECK(zero_out.str().size() < bytes.size());
  std::istringstream zero_in(zero_out.str());
  CHECK(ActionClassifierModel::load(zero_in) == ActionClassifierModel{});
}

TEST_CASE("generate_support_sets matches a manual search over the snapshot") {
  const auto& fx = fixture();
  const auto& gdb = fx.dataset.databases[0];
  const auto& query = gdb.queries[0];
  const auto snapshot = gdb.db.visible_facts(query.timestamp);
  SsgConfig cfg;
  const auto direct = generate_support_sets(query.text, snapshot, fx.model, cfg);
  SsgSearch search(snapshot, fx.model);
  CHECK(direct == search.generate(query.text, cfg));
}
