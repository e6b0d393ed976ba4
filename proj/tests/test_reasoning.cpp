#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hake/graph.hpp"
#include "hake/net/train.hpp"
#include "hake/reasoning/graph_reason.hpp"
#include "hake/reasoning/metrics.hpp"
#include "hake/reasoning/psr.hpp"
#include "hake/rng.hpp"

using namespace hake;
using namespace hake::reasoning;

namespace {

/// Random bipartite graph with dense-matrix bookkeeping for the oracle.
struct GraphWithMatrix {
  KnowledgeGraph graph;
  std::vector<std::vector<double>> weight;  // [activity][state]
};

GraphWithMatrix random_graph(Rng& rng, int n_activities, int n_states) {
  GraphWithMatrix out;
  for (int a = 0; a < n_activities; ++a)
    out.graph.activities.push_back({"verb" + std::to_string(a), "obj"});
  const auto parts = all_body_parts();
  for (int s = 0; s < n_states; ++s)
    out.graph.states.push_back({parts[static_cast<std::size_t>(s) % 10],
                                "sverb" + std::to_string(s), "NONE"});
  std::sort(out.graph.activities.begin(), out.graph.activities.end());
  std::sort(out.graph.states.begin(), out.graph.states.end());
  out.weight.assign(static_cast<std::size_t>(n_activities),
                    std::vector<double>(static_cast<std::size_t>(n_states), 0.0));
  for (int a = 0; a < n_activities; ++a)
    for (int s = 0; s < n_states; ++s)
      if (rng.below(3) != 0) {
        const double w = rng.uniform(-1, 1);
        out.graph.cross_edges.push_back({a, s, w});
        out.weight[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)] = w;
      }
  return out;
}

PartStateProbs evidence_from_vector(const KnowledgeGraph& graph, const std::vector<double>& p) {
  PartStateProbs probs;
  for (std::size_t s = 0; s < graph.states.size(); ++s) {
    const auto& state = graph.states[s];
    auto& e = probs.parts[state.part];
    e.states.push_back(state);
    e.probs.push_back(p[s]);
  }
  return probs;
}

EvalRecord record(const std::string& activity,
                  const std::vector<std::pair<double, int>>& scored) {
  EvalRecord r;
  r.activity = activity;
  int id = 0;
  for (const auto& [score, rel] : scored)
    r.items.push_back({"inst" + std::to_string(id++), score, rel == 1});
  return r;
}

/// Brute-force AP oracle: sort a copy, walk ranks, average precision at hits.
double ap_oracle(const EvalRecord& r) {
  std::vector<EvalRecord::Item> items = r.items;
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.instance_id < b.instance_id;
  });
  double sum = 0;
  int hits = 0;
  for (std::size_t k = 0; k < items.size(); ++k)
    if (items[k].relevant) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  return sum / hits;
}

}  // namespace

TEST_CASE("graph_reason") {
  Rng rng(41);
  SUBCASE("one-hot evidence returns that state's edge-weight column") {
    const auto [graph, weight] = random_graph(rng, 5, 7);
    for (int s = 0; s < 7; ++s) {
      std::vector<double> p(7, 0.0);
      p[static_cast<std::size_t>(s)] = 1.0;
      const ActivityScores scores = graph_reason(evidence_from_vector(graph, p), graph);
      for (int a = 0; a < 5; ++a)
        CHECK(scores[static_cast<std::size_t>(a)] ==
              weight[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)]);
    }
  }
  SUBCASE("zero evidence gives zero scores") {
    const auto [graph, weight] = random_graph(rng, 4, 6);
    const ActivityScores scores =
        graph_reason(evidence_from_vector(graph, std::vector<double>(6, 0.0)), graph);
    for (double v : scores) CHECK(v == 0.0);
  }
  SUBCASE("random evidence matches the dense matrix-vector oracle to 1e-9") {
    for (int trial = 0; trial < 50; ++trial) {
      const auto [graph, weight] = random_graph(rng, 3 + static_cast<int>(rng.below(6)),
                                                3 + static_cast<int>(rng.below(10)));
      std::vector<double> p(graph.states.size());
      for (auto& x : p) x = rng.uniform();
      const ActivityScores scores = graph_reason(evidence_from_vector(graph, p), graph);
      for (std::size_t a = 0; a < graph.activities.size(); ++a) {
        double expect = 0;
        for (std::size_t s = 0; s < graph.states.size(); ++s) expect += weight[a][s] * p[s];
        CHECK(std::abs(scores[a] - expect) < 1e-9);
      }
    }
  }
  SUBCASE("superposition holds to machine precision") {
    const auto [graph, weight] = random_graph(rng, 6, 9);
    std::vector<double> p(9), q(9), sum(9);
    for (std::size_t i = 0; i < 9; ++i) {
      p[i] = rng.uniform() * 0.5;
      q[i] = rng.uniform() * 0.5;
      sum[i] = p[i] + q[i];
    }
    const auto sp = graph_reason(evidence_from_vector(graph, p), graph);
    const auto sq = graph_reason(evidence_from_vector(graph, q), graph);
    const auto ss = graph_reason(evidence_from_vector(graph, sum), graph);
    for (std::size_t a = 0; a < sp.size(); ++a) CHECK(std::abs(ss[a] - (sp[a] + sq[a])) < 1e-9);
  }
  SUBCASE("an evidence state outside the graph is an error") {
    const auto [graph, weight] = random_graph(rng, 3, 3);
    PartStateProbs probs;
    probs.parts[BodyPart::head] = {{{BodyPart::head, "unknown_verb", "NONE"}}, {0.5}, 1.0};
    CHECK_THROWS_WITH_AS(graph_reason(probs, graph), doctest::Contains("not covered"), Error);
  }
}

TEST_CASE("late_fuse") {
  const ActivityScores instance = {0.2, 0.9, 0.4};
  const ActivityScores part = {0.8, 0.1, 0.4};
  SUBCASE("w = 1 returns the instance scores exactly") {
    CHECK(late_fuse(instance, part, 1.0) == instance);
  }
  SUBCASE("w = 0 returns the part scores exactly") {
    CHECK(late_fuse(instance, part, 0.0) == part);
  }
  SUBCASE("w = 0.5 averages 0.2 and 0.8 to 0.5") {
    const auto fused = late_fuse({0.2}, {0.8}, 0.5);
    CHECK(fused[0] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("argmax agreement is preserved") {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
      ActivityScores a(5), b(5);
      for (std::size_t i = 0; i < 5; ++i) {
        a[i] = rng.uniform();
        b[i] = rng.uniform();
      }
      const std::size_t best = static_cast<std::size_t>(rng.below(5));
      a[best] = 1.5;  // same argmax in both inputs
      b[best] = 1.4;
      const auto fused = late_fuse(a, b, rng.uniform());
      const auto arg =
          static_cast<std::size_t>(std::max_element(fused.begin(), fused.end()) - fused.begin());
      CHECK(arg == best);
    }
  }
  SUBCASE("length mismatch and bad weight are errors") {
    CHECK_THROWS_AS(late_fuse({0.1}, {0.1, 0.2}, 0.5), Error);
    CHECK_THROWS_AS(late_fuse({0.1}, {0.2}, 1.5), Error);
  }
  SUBCASE("sigmoid maps logits into (0,1)") {
    const auto s = sigmoid({-100, 0, 100});
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s[1] == doctest::Approx(0.5));
    CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("average_precision") {
  SUBCASE("all relevant items ranked first gives AP = 1") {
    CHECK(average_precision(record("a", {{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.1, 0}})) == 1.0);
  }
  SUBCASE("relevance pattern [1,0,1] gives (1 + 2/3) / 2") {
    const double ap = average_precision(record("a", {{0.9, 1}, {0.5, 0}, {0.2, 1}}));
    CHECK(ap == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
    CHECK(ap == doctest::Approx(0.83333333).epsilon(1e-6));
  }
  SUBCASE("a single relevant item ranked last of n gives 1/n") {
    for (int n : {2, 5, 17}) {
      std::vector<std::pair<double, int>> scored;
      for (int i = 0; i < n - 1; ++i) scored.emplace_back(1.0 - 0.01 * i, 0);
      scored.emplace_back(0.0, 1);
      CHECK(average_precision(record("a", scored)) == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
  }
  SUBCASE("no relevant item is an error at the single-record level") {
    CHECK_THROWS_WITH_AS(average_precision(record("a", {{0.5, 0}})),
                         doctest::Contains("no relevant items"), Error);
  }
  SUBCASE("rank-only dependence: monotone score transforms do not change AP") {
    Rng rng(61);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::pair<double, int>> scored;
      const int n = 2 + static_cast<int>(rng.below(20));
      bool any = false;
      for (int i = 0; i < n; ++i) {
        const int rel = rng.below(3) == 0 ? 1 : 0;
        any = any || rel;
        scored.emplace_back(rng.uniform(), rel);
      }
      if (!any) scored.emplace_back(rng.uniform(), 1);
      const EvalRecord base = record("a", scored);
      EvalRecord transformed = base;
      for (auto& item : transformed.items) item.score = std::exp(3 * item.score) - 0.5;
      CHECK(average_precision(base) == doctest::Approx(average_precision(transformed)).epsilon(1e-12));
    }
  }
  SUBCASE("ties break deterministically by instance id") {
    EvalRecord r;
    r.activity = "a";
    r.items = {{"b", 0.5, false}, {"a", 0.5, true}};
    // "a" sorts before "b", so the relevant item ranks first.
    CHECK(average_precision(r) == 1.0);
  }
  SUBCASE("matches the brute-force oracle on random records") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::pair<double, int>> scored;
      const int n = 1 + static_cast<int>(rng.below(50));
      for (int i = 0; i < n; ++i)
        scored.emplace_back(rng.below(8) * 0.125, rng.below(4) == 0 ? 1 : 0);
      scored.emplace_back(rng.uniform(), 1);
      const EvalRecord r = record("a", scored);
      CHECK(average_precision(r) == ap_oracle(r));
    }
  }
}

TEST_CASE("mean_ap flags zero-relevance activities instead of erroring") {
  const std::vector<EvalRecord> records = {
      record("good", {{0.9, 1}, {0.1, 0}}),
      record("empty", {{0.9, 0}, {0.1, 0}}),
      record("half", {{0.9, 1}, {0.5, 0}, {0.2, 1}}),
  };
  const MapReport report = mean_ap(records);
  CHECK(report.per_activity.size() == 2);
  CHECK(report.skipped == std::vector<std::string>{"empty"});
  const double expect = (1.0 + (1.0 + 2.0 / 3.0) / 2.0) / 2.0;
  CHECK(report.mean_ap == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mean_ap of identical per-activity APs equals that value") {
  const std::vector<EvalRecord> records = {
      record("a", {{0.9, 1}, {0.1, 0}}),
      record("b", {{0.8, 1}, {0.2, 0}}),
      record("c", {{0.7, 1}, {0.3, 0}}),
  };
  CHECK(mean_ap(records).mean_ap == 1.0);
}

TEST_CASE("few_shot_split") {
  const std::map<std::string, int> counts = {{"a", 0}, {"b", 4}, {"c", 10}};
  SUBCASE("strict thresholds from the worked example") {
    CHECK(few_shot_split(counts, 1) == std::set<std::string>{"a"});
    CHECK(few_shot_split(counts, 5) == std::set<std::string>{"a", "b"});
    // 10 < 10 is false, so c stays out.
    CHECK(few_shot_split(counts, 10) == std::set<std::string>{"a", "b"});
    CHECK(few_shot_split(counts, 11) == std::set<std::string>{"a", "b", "c"});
  }
  SUBCASE("threshold 1 selects exactly the zero-training-sample categories") {
    const auto one_shot = few_shot_split(counts, 1);
    for (const auto& a : one_shot) CHECK(counts.at(a) == 0);
  }
  SUBCASE("empty subset is an error") {
    CHECK_THROWS_WITH_AS(few_shot_split({{"a", 5}}, 3),
                         doctest::Contains("no few-shot categories"), Error);
  }
  SUBCASE("random counts match the filter oracle and nest monotonically") {
    Rng rng(81);
    for (int trial = 0; trial < 100; ++trial) {
      std::map<std::string, int> random_counts;
      for (int a = 0; a < 20; ++a)
        random_counts["act" + std::to_string(a)] = static_cast<int>(rng.below(12));
      random_counts["zero"] = 0;
      const auto few1 = few_shot_split(random_counts, 1);
      const auto few5 = few_shot_split(random_counts, 5);
      const auto few10 = few_shot_split(random_counts, 10);
      for (const auto& [a, c] : random_counts) {
        CHECK(few1.contains(a) == (c < 1));
        CHECK(few5.contains(a) == (c < 5));
        CHECK(few10.contains(a) == (c < 10));
      }
      CHECK(std::includes(few5.begin(), few5.end(), few1.begin(), few1.end()));
      CHECK(std::includes(few10.begin(), few10.end(), few5.begin(), few5.end()));
    }
  }
}

TEST_CASE("psr") {
  SUBCASE("zero weights give all-zero scores with the right length") {
    auto reasoner = make_psr(16, 7, {8});
    for (auto& p : reasoner.parameters())
      for (auto& v : p.data) v = 0;
    a2v::ActivityEmbedding emb;
    emb.d_vis = 10;
    emb.d_lang = 6;
    emb.values.assign(16, 0.3);
    const ActivityScores scores = psr_forward(emb, reasoner);
    REQUIRE(scores.size() == 7);
    for (double v : scores) CHECK(v == 0.0);
  }
  SUBCASE("dimension mismatch is an error") {
    const auto reasoner = make_psr(16, 7);
    a2v::ActivityEmbedding emb;
    emb.values.assign(12, 0.0);
    CHECK_THROWS_WITH_AS(psr_forward(emb, reasoner), doctest::Contains("does not match"), Error);
  }
  SUBCASE("a separable two-activity synthetic set trains to 95%+ per-label accuracy") {
    // Activity 0 follows feature 0, activity 1 follows feature 1.
    Rng rng(91);
    const int n = 512, dim = 8;
    net::Tensor<float> x = net::Tensor<float>::zeros({n, dim});
    net::Tensor<float> targets = net::Tensor<float>::zeros({n, 2});
    for (int i = 0; i < n; ++i) {
      const bool a0 = rng.below(2) == 0;
      const bool a1 = rng.below(2) == 0;
      x[static_cast<std::size_t>(i) * dim + 0] = a0 ? 1.0f : -1.0f;
      x[static_cast<std::size_t>(i) * dim + 1] = a1 ? 1.0f : -1.0f;
      for (int d = 2; d < dim; ++d)
        x[static_cast<std::size_t>(i) * dim + d] = static_cast<float>(rng.uniform(-0.3, 0.3));
      targets[static_cast<std::size_t>(i) * 2 + 0] = a0 ? 1.0f : 0.0f;
      targets[static_cast<std::size_t>(i) * 2 + 1] = a1 ? 1.0f : 0.0f;
    }
    auto reasoner = make_psr(dim, 2, {16});
    net::TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 30;
    cfg.batch_size = 32;
    cfg.seed = 7;
    cfg.loss = net::LossKind::sigmoid_ce_multilabel;
    net::fit(reasoner, n, cfg, [&](const std::vector<std::int64_t>& idx) {
      net::Tensor<float> xb = net::Tensor<float>::zeros({static_cast<int>(idx.size()), dim});
      net::Tensor<float> tb = net::Tensor<float>::zeros({static_cast<int>(idx.size()), 2});
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (int d = 0; d < dim; ++d)
          xb[r * dim + static_cast<std::size_t>(d)] =
              x[static_cast<std::size_t>(idx[r]) * dim + static_cast<std::size_t>(d)];
        for (int c = 0; c < 2; ++c)
          tb[r * 2 + static_cast<std::size_t>(c)] =
              targets[static_cast<std::size_t>(idx[r]) * 2 + static_cast<std::size_t>(c)];
      }
      return std::make_pair(std::move(xb), net::SigmoidCrossEntropy<float>{std::move(tb)});
    });
    const net::Tensor<float> logits = reasoner.forward(x);
    int correct = 0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) {
        const bool predicted = logits[static_cast<std::size_t>(i) * 2 + c] > 0;
        const bool truth = targets[static_cast<std::size_t>(i) * 2 + c] > 0.5f;
        correct += predicted == truth;
      }
    CHECK(static_cast<double>(correct) / (2 * n) >= 0.95);
  }
}

TEST_CASE("eval record and counts file loaders") {
  {
    std::ofstream os("eval_test.jsonl");
    os << R"({"instance":"i1","activity":"ride:bike","score":0.9,"relevant":1})" << "\n";
    os << R"({"instance":"i2","activity":"ride:bike","score":0.4,"relevant":0})" << "\n";
    os << R"({"instance":"i1","activity":"walk:NONE","score":0.2,"relevant":1})" << "\n";
  }
  const auto records = load_eval_jsonl("eval_test.jsonl");
  REQUIRE(records.size() == 2);
  CHECK(records[0].activity == "ride:bike");
  CHECK(records[0].items.size() == 2);
  std::remove("eval_test.jsonl");

  {
    std::ofstream os("counts_test.csv");
    os << "activity,count\nride:bike,3\nwalk:NONE,0\n";
  }
  const auto counts = load_train_counts_csv("counts_test.csv");
  CHECK(counts.at("ride:bike") == 3);
  CHECK(counts.at("walk:NONE") == 0);
  std::remove("counts_test.csv");

  {
    std::ofstream os("bad_eval.jsonl");
    os << R"({"instance":"i1","activity":"a","score":0.9,"relevant":2})" << "\n";
  }
  CHECK_THROWS_AS(load_eval_jsonl("bad_eval.jsonl"), DataError);
  std::remove("bad_eval.jsonl");
}
