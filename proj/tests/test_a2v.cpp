#include <doctest.h>

#include <cmath>
#include <fstream>
#include <cstdio>

#include "hake/a2v/activity2vec.hpp"
#include "hake/rng.hpp"

using namespace hake;
using namespace hake::a2v;

namespace {

EmbeddingTable random_table(int dim, Rng& rng, const std::vector<std::string>& extra_tokens = {}) {
  EmbeddingTable table(dim);
  std::vector<std::string> tokens = {"hold", "wheel", "inspect", "rearview", "NONE", "eat",
                                     "apple"};
  for (BodyPart p : all_body_parts()) tokens.push_back(to_string(p));
  tokens.insert(tokens.end(), extra_tokens.begin(), extra_tokens.end());
  for (const auto& t : tokens) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = rng.uniform(-1, 1);
    table.insert(t, std::move(v));
  }
  return table;
}

PartStateProbs::PartEntry entry(BodyPart part, std::vector<std::string> verbs,
                                std::vector<double> probs, double interactiveness = 1.0) {
  PartStateProbs::PartEntry e;
  for (const auto& v : verbs) e.states.push_back({part, v, "NONE"});
  e.probs = std::move(probs);
  e.interactiveness = interactiveness;
  return e;
}

}  // namespace

TEST_CASE("part_state_embedding concatenates part, verb, object vectors") {
  Rng rng(1);
  SUBCASE("dimension is 3 x d_tok; 768 gives 2304") {
    const auto table = random_table(768, rng);
    const auto v = part_state_embedding({BodyPart::right_hand, "hold", "wheel"}, table);
    CHECK(v.size() == 2304);
  }
  SUBCASE("all-zero table vectors give a zero embedding") {
    EmbeddingTable table(4);
    table.insert("right_hand", {0, 0, 0, 0});
    table.insert("hold", {0, 0, 0, 0});
    table.insert("wheel", {0, 0, 0, 0});
    const auto v = part_state_embedding({BodyPart::right_hand, "hold", "wheel"}, table);
    for (double x : v) CHECK(x == 0.0);
  }
  SUBCASE("random table equals the concatenation oracle elementwise") {
    const auto table = random_table(16, rng);
    const PartStateTriple triple{BodyPart::head, "inspect", "rearview"};
    const auto v = part_state_embedding(triple, table);
    const auto& p = table.lookup("head");
    const auto& verb = table.lookup("inspect");
    const auto& obj = table.lookup("rearview");
    REQUIRE(v.size() == 48);
    for (int i = 0; i < 16; ++i) {
      CHECK(v[static_cast<std::size_t>(i)] == p[static_cast<std::size_t>(i)]);
      CHECK(v[static_cast<std::size_t>(16 + i)] == verb[static_cast<std::size_t>(i)]);
      CHECK(v[static_cast<std::size_t>(32 + i)] == obj[static_cast<std::size_t>(i)]);
    }
  }
  SUBCASE("a missing token is named in the error") {
    const auto table = random_table(8, rng);
    CHECK_THROWS_WITH_AS(part_state_embedding({BodyPart::head, "juggle", "NONE"}, table),
                         doctest::Contains("juggle"), Error);
  }
}

TEST_CASE("attend_linguistic") {
  Rng rng(2);
  const auto table = random_table(8, rng);
  SUBCASE("one-hot probabilities select exactly that state's embedding") {
    PartStateProbs probs;
    probs.parts[BodyPart::head] = entry(BodyPart::head, {"inspect", "eat"}, {1.0, 0.0});
    const auto v = attend_linguistic(probs, table);
    const auto direct = part_state_embedding({BodyPart::head, "inspect", "NONE"}, table);
    REQUIRE(v.size() == direct.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      CHECK(v[i] == doctest::Approx(direct[i]).epsilon(1e-12));
  }
  SUBCASE("all-zero probabilities give the zero vector") {
    PartStateProbs probs;
    probs.parts[BodyPart::head] = entry(BodyPart::head, {"inspect"}, {0.0});
    probs.parts[BodyPart::right_hand] = entry(BodyPart::right_hand, {"hold"}, {0.0});
    for (double x : attend_linguistic(probs, table)) CHECK(x == 0.0);
  }
  SUBCASE("random probabilities match the double-loop oracle within 1e-6") {
    for (int trial = 0; trial < 30; ++trial) {
      PartStateProbs probs;
      const auto parts = all_body_parts();
      const int n_parts = 1 + static_cast<int>(rng.below(4));
      for (int p = 0; p < n_parts; ++p) {
        const BodyPart part = parts[rng.below(10)];
        probs.parts[part] = entry(part, {"hold", "inspect", "eat"},
                                  {rng.uniform(), rng.uniform(), rng.uniform()},
                                  rng.uniform());
      }
      const auto got = attend_linguistic(probs, table);
      // Oracle: explicit double loop over parts and states.
      std::vector<double> expect(3 * 8, 0.0);
      for (const auto& [part, e] : probs.parts)
        for (std::size_t s = 0; s < e.states.size(); ++s) {
          const auto emb = part_state_embedding(e.states[s], table);
          for (std::size_t i = 0; i < expect.size(); ++i) expect[i] += e.probs[s] * emb[i];
        }
      for (auto& x : expect) x /= static_cast<double>(probs.parts.size());
      for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(std::abs(got[i] - expect[i]) < 1e-6);
    }
  }
  SUBCASE("length mismatch is an error") {
    PartStateProbs probs;
    auto bad = entry(BodyPart::head, {"inspect", "eat"}, {0.5});
    probs.parts[BodyPart::head] = bad;
    CHECK_THROWS_AS(attend_linguistic(probs, table), DataError);
  }
  SUBCASE("linearity: homogeneity and additivity hold exactly") {
    PartStateProbs p1;
    p1.parts[BodyPart::head] = entry(BodyPart::head, {"inspect", "eat"}, {0.25, 0.5});
    const auto v1 = attend_linguistic(p1, table);
    PartStateProbs p2 = p1;
    for (auto& x : p2.parts[BodyPart::head].probs) x *= 2.0;
    const auto v2 = attend_linguistic(p2, table);
    for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v2[i] == 2.0 * v1[i]);

    PartStateProbs q = p1;
    q.parts[BodyPart::head].probs = {0.1, 0.3};
    const auto vq = attend_linguistic(q, table);
    PartStateProbs sum = p1;
    sum.parts[BodyPart::head].probs = {0.35, 0.8};
    const auto vs = attend_linguistic(sum, table);
    for (std::size_t i = 0; i < v1.size(); ++i)
      CHECK(vs[i] == doctest::Approx(v1[i] + vq[i]).epsilon(1e-12));
  }
}

TEST_CASE("interactiveness_attention") {
  Rng rng(3);
  auto random_visual = [&](const std::vector<BodyPart>& parts, int dim) {
    std::map<BodyPart, std::vector<double>> visual;
    for (BodyPart p : parts) {
      std::vector<double> v(static_cast<std::size_t>(dim));
      for (auto& x : v) x = rng.uniform(-1, 1);
      visual[p] = std::move(v);
    }
    return visual;
  };
  SUBCASE("all-ones weights reduce to the plain mean") {
    const auto visual = random_visual({BodyPart::head, BodyPart::hip, BodyPart::left_arm}, 6);
    std::map<BodyPart, double> ones = {{BodyPart::head, 1.0}, {BodyPart::hip, 1.0},
                                       {BodyPart::left_arm, 1.0}};
    const auto got = interactiveness_attention(visual, ones);
    for (int i = 0; i < 6; ++i) {
      double mean = 0;
      for (const auto& [_, v] : visual) mean += v[static_cast<std::size_t>(i)];
      mean /= 3;
      CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(mean).epsilon(1e-12));
    }
  }
  SUBCASE("a single active part contributes its vector over the part count") {
    const auto visual = random_visual({BodyPart::head, BodyPart::hip}, 4);
    std::map<BodyPart, double> w = {{BodyPart::head, 1.0}, {BodyPart::hip, 0.0}};
    const auto got = interactiveness_attention(visual, w);
    for (int i = 0; i < 4; ++i)
      CHECK(got[static_cast<std::size_t>(i)] ==
            doctest::Approx(visual.at(BodyPart::head)[static_cast<std::size_t>(i)] / 2.0));
  }
  SUBCASE("random inputs equal the scale-then-mean oracle") {
    for (int trial = 0; trial < 30; ++trial) {
      const auto visual =
          random_visual({BodyPart::head, BodyPart::left_hand, BodyPart::right_foot}, 9);
      std::map<BodyPart, double> w;
      for (const auto& [p, _] : visual) w[p] = rng.uniform();
      const auto got = interactiveness_attention(visual, w);
      for (int i = 0; i < 9; ++i) {
        double expect = 0;
        for (const auto& [p, v] : visual) expect += w[p] * v[static_cast<std::size_t>(i)];
        expect /= static_cast<double>(visual.size());
        CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
  SUBCASE("zero interactiveness makes the output invariant to that part's feature") {
    auto visual = random_visual({BodyPart::head, BodyPart::hip}, 5);
    std::map<BodyPart, double> w = {{BodyPart::head, 0.0}, {BodyPart::hip, 0.7}};
    const auto before = interactiveness_attention(visual, w);
    for (auto& x : visual[BodyPart::head]) x = rng.uniform(-9, 9);
    const auto after = interactiveness_attention(visual, w);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i] == after[i]);
  }
  SUBCASE("key mismatch is an error") {
    const auto visual = random_visual({BodyPart::head}, 3);
    std::map<BodyPart, double> w = {{BodyPart::hip, 1.0}};
    CHECK_THROWS_AS(interactiveness_attention(visual, w), Error);
  }
}

TEST_CASE("fuse") {
  Rng rng(4);
  SUBCASE("paper dimensions: 1280 + 2304 = 3584") {
    A2vConfig cfg;  // d_tok 768, d_vis 1280
    std::vector<double> visual(1280, 0.5), linguistic(2304, -0.25);
    const auto emb = fuse(cfg, visual, linguistic);
    CHECK(emb.dim() == 3584);
    CHECK(emb.d_vis == 1280);
    CHECK(emb.d_lang == 2304);
  }
  SUBCASE("zero inputs give a zero embedding") {
    A2vConfig cfg;
    cfg.d_tok = 4;
    cfg.d_vis = 6;
    const auto emb = fuse(cfg, std::vector<double>(6, 0.0), std::vector<double>(12, 0.0));
    for (double x : emb.values) CHECK(x == 0.0);
  }
  SUBCASE("random inputs equal the concatenation oracle") {
    A2vConfig cfg;
    cfg.d_tok = 5;
    cfg.d_vis = 7;
    std::vector<double> visual(7), linguistic(15);
    for (auto& x : visual) x = rng.uniform(-1, 1);
    for (auto& x : linguistic) x = rng.uniform(-1, 1);
    const auto emb = fuse(cfg, visual, linguistic);
    REQUIRE(emb.dim() == 22);
    for (int i = 0; i < 7; ++i) CHECK(emb.values[static_cast<std::size_t>(i)] == visual[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 15; ++i)
      CHECK(emb.values[static_cast<std::size_t>(7 + i)] == linguistic[static_cast<std::size_t>(i)]);
  }
  SUBCASE("output dimension is d_vis + d_lang across random configurations") {
    for (int trial = 0; trial < 40; ++trial) {
      A2vConfig cfg;
      cfg.d_tok = 1 + static_cast<int>(rng.below(64));
      cfg.d_vis = 1 + static_cast<int>(rng.below(256));
      const auto emb = fuse(cfg, std::vector<double>(static_cast<std::size_t>(cfg.d_vis), 1.0),
                            std::vector<double>(static_cast<std::size_t>(cfg.d_lang()), 1.0));
      CHECK(emb.dim() == cfg.d_vis + cfg.d_lang());
    }
  }
  SUBCASE("dimension mismatch is an error") {
    A2vConfig cfg;
    cfg.d_tok = 4;
    cfg.d_vis = 6;
    CHECK_THROWS_AS(fuse(cfg, std::vector<double>(5, 0.0), std::vector<double>(12, 0.0)), Error);
    CHECK_THROWS_AS(fuse(cfg, std::vector<double>(6, 0.0), std::vector<double>(11, 0.0)), Error);
  }
}

TEST_CASE("alignment triplet loss normalizes before the hinge") {
  // Colinear vectors of different magnitude are identical after
  // normalization, so anchor==positive-direction gives loss 0 at margin 0.
  const std::vector<double> a = {2, 0, 0};
  const std::vector<double> p = {5, 0, 0};
  const std::vector<double> n = {0, 1, 0};
  CHECK(alignment_triplet_loss(a, p, n, 0.0) == 0.0);
  // |a-p|^2 = 0, |a-n|^2 = 2 after normalization: margin below 2 is absorbed.
  CHECK(alignment_triplet_loss(a, p, n, 1.5) == 0.0);
  CHECK(alignment_triplet_loss(a, p, n, 2.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("alignment negatives come from disjoint-activity instances") {
  std::vector<std::set<ActivityLabel>> batch = {
      {{"eat", "apple"}},
      {{"eat", "apple"}, {"hold", "apple"}},
      {{"drive", "car"}},
      {{"ride", "bike"}},
  };
  const auto negatives = sample_alignment_negatives(batch, 77);
  REQUIRE(negatives.size() == 4);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    REQUIRE(negatives[i] >= 0);
    for (const auto& a : batch[i])
      CHECK(!batch[static_cast<std::size_t>(negatives[i])].contains(a));
  }
  // An instance with no disjoint partner gets -1.
  std::vector<std::set<ActivityLabel>> stuck = {{{"eat", "apple"}}, {{"eat", "apple"}}};
  const auto none = sample_alignment_negatives(stuck, 1);
  CHECK(none == std::vector<int>{-1, -1});
}

TEST_CASE("embedding table TSV round trip and errors") {
  Rng rng(5);
  const auto table = random_table(6, rng);
  table.save_tsv("table_test.tsv");
  const auto back = EmbeddingTable::load_tsv("table_test.tsv");
  CHECK(back.dim() == 6);
  CHECK(back.size() == table.size());
  const auto& v = back.lookup("hold");
  const auto& orig = table.lookup("hold");
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(orig[i]).epsilon(1e-15));
  std::remove("table_test.tsv");

  {
    std::ofstream os("bad_table.tsv");
    os << "6\nhold\t1 2 3\n";  // wrong arity
  }
  CHECK_THROWS_WITH_AS(EmbeddingTable::load_tsv("bad_table.tsv"), doctest::Contains("expected 6"),
                       DataError);
  std::remove("bad_table.tsv");
}
