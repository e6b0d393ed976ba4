#include <doctest.h>

#include <cmath>

#include "hake/net/checkpoint.hpp"
#include "hake/net/grad_check.hpp"
#include "hake/net/loss.hpp"
#include "hake/net/model.hpp"
#include "hake/net/train.hpp"
#include "hake/rng.hpp"

using namespace hake;
using namespace hake::net;

namespace {

/// Test-only squared loss against a fixed target; independent closed forms.
template <class T>
struct SquaredLoss {
  Tensor<T> target;
  double value(const Tensor<T>& y) const {
    double s = 0;
    for (std::int64_t i = 0; i < y.size(); ++i) {
      const double d = static_cast<double>(y[i]) - static_cast<double>(target[i]);
      s += d * d;
    }
    return s;
  }
  Tensor<T> grad(const Tensor<T>& y) const {
    Tensor<T> g = Tensor<T>::zeros(y.shape);
    for (std::int64_t i = 0; i < y.size(); ++i) g[i] = 2 * (y[i] - target[i]);
    return g;
  }
  template <class U>
  SquaredLoss<U> cast() const {
    return SquaredLoss<U>{target.template cast<U>()};
  }
};

Tensor<float> random_tensor(std::vector<int> shape, Rng& rng, double lo = -1, double hi = 1) {
  Tensor<float> t = Tensor<float>::zeros(std::move(shape));
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

struct NanLoss {
  template <class T>
  double value(const Tensor<T>&) const {
    return std::nan("");
  }
  template <class T>
  Tensor<T> grad(const Tensor<T>& y) const {
    return Tensor<T>::zeros(y.shape);
  }
  template <class U>
  NanLoss cast() const {
    return {};
  }
};

}  // namespace

TEST_CASE("dense layer with zero weights and bias gives zero output") {
  Model<float> m({3}, {LayerSpec::dense(2)}, 1);
  for (auto& p : m.parameters())
    for (auto& v : p.data) v = 0;
  Rng rng(2);
  const Tensor<float> y = m.forward(random_tensor({4, 3}, rng));
  for (std::int64_t i = 0; i < y.size(); ++i) CHECK(y[i] == 0.0f);
}

TEST_CASE("relu maps (-1, 2) to (0, 2)") {
  Model<float> m({2}, {LayerSpec::relu()}, 1);
  const Tensor<float> y = m.forward(Tensor<float>({1, 2}, {-1.0f, 2.0f}));
  CHECK(y[0] == 0.0f);
  CHECK(y[1] == 2.0f);
}

TEST_CASE("1x1 conv with identity kernel leaves the input unchanged") {
  Model<float> m({1, 4, 4}, {LayerSpec::conv2d(1, 1, 1)}, 1);
  m.parameters()[0][0] = 1.0f;  // kernel
  m.parameters()[1][0] = 0.0f;  // bias
  Rng rng(3);
  const Tensor<float> x = random_tensor({2, 1, 4, 4}, rng);
  const Tensor<float> y = m.forward(x);
  REQUIRE(y.shape == x.shape);
  for (std::int64_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("softmax head rows sum to one") {
  Model<float> m({6}, {LayerSpec::dense(8), LayerSpec::relu(), LayerSpec::dense(5)}, 7);
  Rng rng(8);
  const Tensor<float> p = m.predict_proba(random_tensor({9, 6}, rng, -3, 3));
  for (int i = 0; i < 9; ++i) {
    double s = 0;
    for (int j = 0; j < 5; ++j) s += p[static_cast<std::size_t>(i) * 5 + j];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("forward rejects input that does not match the declared shape") {
  Model<float> m({1, 8, 8}, {LayerSpec::conv2d(2, 3, 3)}, 1);
  CHECK_THROWS_WITH_AS(m.forward(Tensor<float>::zeros({1, 1, 7, 7})),
                       doctest::Contains("does not match model input"), Error);
}

TEST_CASE("shape errors name the offending layer") {
  CHECK_THROWS_WITH_AS(Model<float>({1, 8, 8}, {LayerSpec::dense(4)}, 1),
                       doctest::Contains("layer 0 (dense)"), Error);
  CHECK_THROWS_WITH_AS(Model<float>({16}, {LayerSpec::conv2d(2, 3, 3)}, 1),
                       doctest::Contains("layer 0 (conv2d)"), Error);
}

TEST_CASE("linear model with squared loss matches the closed-form gradient") {
  // y = w x + b in one dimension; dL/dw = 2 (w x + b - t) x.
  Model<float> m({1}, {LayerSpec::dense(1)}, 1);
  m.parameters()[0][0] = 0.7f;
  m.parameters()[1][0] = 0.1f;
  const float x = 1.3f, t = 2.0f;
  SquaredLoss<float> loss{Tensor<float>({1, 1}, {t})};
  const auto trace = m.forward_traced(Tensor<float>({1, 1}, {x}));
  const auto grads = m.backward(trace, loss.grad(trace.output));
  const float y = 0.7f * x + 0.1f;
  CHECK(grads[0][0] == doctest::Approx(2 * (y - t) * x).epsilon(1e-6));
  CHECK(grads[1][0] == doctest::Approx(2 * (y - t)).epsilon(1e-6));
}

TEST_CASE("all-zero grad_out yields all-zero parameter gradients") {
  Model<float> m({1, 6, 6},
                 {LayerSpec::conv2d(2, 3, 3), LayerSpec::relu(), LayerSpec::maxpool2d(2),
                  LayerSpec::flatten(), LayerSpec::dense(3)},
                 5);
  Rng rng(6);
  const auto trace = m.forward_traced(random_tensor({2, 1, 6, 6}, rng));
  const auto grads = m.backward(trace, Tensor<float>::zeros(trace.output.shape));
  for (const auto& g : grads)
    for (const auto v : g.data) CHECK(v == 0.0f);
}

TEST_CASE("backward before forward is an error") {
  Model<float> m({2}, {LayerSpec::dense(2)}, 1);
  ForwardTrace<float> empty;
  CHECK_THROWS_WITH_AS(m.backward(empty, Tensor<float>::zeros({1, 2})),
                       doctest::Contains("backward called before forward"), Error);
}

TEST_CASE("random two-layer net matches central finite differences") {
  Rng rng(11);
  Model<float> m({5}, {LayerSpec::dense(7), LayerSpec::relu(), LayerSpec::dense(3)}, 13);
  SoftmaxCrossEntropy<float> loss{{0, 2, 1, 0}};
  const double err = grad_check(m, loss, random_tensor({4, 5}, rng), 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("strided conv gradients match central finite differences") {
  Rng rng(12);
  Model<float> m({2, 9, 9},
                 {LayerSpec::conv2d(3, 3, 3, 2), LayerSpec::relu(), LayerSpec::flatten(),
                  LayerSpec::dense(4)},
                 21);
  SoftmaxCrossEntropy<float> loss{{1, 3}};
  const double err = grad_check(m, loss, random_tensor({2, 2, 9, 9}, rng), 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("triplet loss examples") {
  const Tensor<float> a({2}, {0.0f, 0.0f});
  SUBCASE("satisfied margin gives zero") {
    // a == p, |a-n|^2 = 4, margin 0.2
    const Tensor<float> n({2}, {2.0f, 0.0f});
    CHECK(triplet_loss(a, a, n, 0.2) == 0.0);
  }
  SUBCASE("equal distances leave exactly the margin") {
    const Tensor<float> p({2}, {1.0f, 0.0f});
    const Tensor<float> n({2}, {0.0f, 1.0f});
    CHECK(triplet_loss(a, p, n, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("zero margin with p == n gives zero") {
    const Tensor<float> p({2}, {0.4f, -0.3f});
    CHECK(triplet_loss(a, p, p, 0.0) == 0.0);
  }
  SUBCASE("shape mismatch is an error") {
    CHECK_THROWS_AS(triplet_loss(a, Tensor<float>::zeros({3}), a, 0.1), Error);
  }
  SUBCASE("negative margin is rejected") {
    CHECK_THROWS_AS(triplet_loss(a, a, a, -0.1), Error);
  }
}

TEST_CASE("sgd_step") {
  SUBCASE("learning rate zero leaves parameters unchanged") {
    std::vector<Tensor<float>> params = {Tensor<float>({2}, {1.0f, -2.0f})};
    const std::vector<Tensor<float>> grads = {Tensor<float>({2}, {5.0f, 3.0f})};
    sgd_step(params, grads, 0.0);
    CHECK(params[0][0] == 1.0f);
    CHECK(params[0][1] == -2.0f);
  }
  SUBCASE("p=1, g=2, lr=0.1 gives 0.8") {
    std::vector<Tensor<float>> params = {Tensor<float>({1}, {1.0f})};
    const std::vector<Tensor<float>> grads = {Tensor<float>({1}, {2.0f})};
    sgd_step(params, grads, 0.1);
    CHECK(params[0][0] == doctest::Approx(0.8f));
  }
  SUBCASE("random vectors match the elementwise oracle") {
    Rng rng(17);
    std::vector<Tensor<float>> params = {random_tensor({31}, rng)};
    const std::vector<Tensor<float>> grads = {random_tensor({31}, rng)};
    const Tensor<float> before = params[0];
    const double lr = 0.037;
    sgd_step(params, grads, lr);
    for (int i = 0; i < 31; ++i)
      CHECK(params[0][i] == static_cast<float>(before[i] - static_cast<float>(lr) * grads[0][i]));
  }
  SUBCASE("shape mismatch is an error") {
    std::vector<Tensor<float>> params = {Tensor<float>::zeros({2})};
    const std::vector<Tensor<float>> grads = {Tensor<float>::zeros({3})};
    CHECK_THROWS_AS(sgd_step(params, grads, 0.1), Error);
  }
}

TEST_CASE("grad_check on the linear toy model is tight in double precision") {
  Model<double> m({1}, {LayerSpec::dense(1)}, 3);
  SquaredLoss<double> loss{Tensor<double>({1, 1}, {0.5})};
  const double err = grad_check(m, loss, Tensor<double>({1, 1}, {1.25}), 1e-6);
  CHECK(err < 1e-6);
}

TEST_CASE("grad_check flags a gradient corrupted by a factor of two") {
  // With max(|analytic|, |numeric|) in the denominator, doubling the
  // analytic gradient gives |2g - g| / 2|g| = 1/2.
  Model<double> m({3}, {LayerSpec::dense(2)}, 9);
  SquaredLoss<double> loss{Tensor<double>({1, 2}, {0.3, -0.4})};
  const Tensor<double> x({1, 3}, {0.5, -1.0, 0.25});

  const auto trace = m.forward_traced(x);
  auto grads = m.backward(trace, loss.grad(trace.output));
  Model<double> probe = m;
  double max_rel = 0;
  auto& params = probe.parameters();
  const double eps = 1e-6;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::int64_t e = 0; e < params[t].size(); ++e) {
      const double p0 = params[t][e];
      params[t][e] = p0 + eps;
      const double lp = loss.value(probe.forward(x));
      params[t][e] = p0 - eps;
      const double lm = loss.value(probe.forward(x));
      params[t][e] = p0;
      const double numeric = (lp - lm) / (2 * eps);
      const double corrupted = 2.0 * grads[t][e];
      const double rel =
          std::abs(corrupted - numeric) / std::max({std::abs(corrupted), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  CHECK(max_rel == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("grad_check of a parameter-free model is vacuously zero") {
  Model<float> m({1, 4, 4}, {LayerSpec::relu(), LayerSpec::maxpool2d(2), LayerSpec::flatten()}, 1);
  Rng rng(19);
  SquaredLoss<float> loss{Tensor<float>::zeros({2, 4})};
  CHECK(grad_check(m, loss, random_tensor({2, 1, 4, 4}, rng), 1e-5) == 0.0);
}

TEST_CASE("grad_check rejects a non-finite loss") {
  Model<float> m({2}, {LayerSpec::dense(2)}, 1);
  CHECK_THROWS_WITH_AS(grad_check(m, NanLoss{}, Tensor<float>::zeros({1, 2}), 1e-5),
                       doctest::Contains("non-finite loss"), Error);
}

TEST_CASE("grad_check requires a positive epsilon") {
  Model<float> m({2}, {LayerSpec::dense(2)}, 1);
  SoftmaxCrossEntropy<float> loss{{0}};
  CHECK_THROWS_AS(grad_check(m, loss, Tensor<float>::zeros({1, 2}), 0.0), Error);
}

TEST_CASE("identical seeds give bitwise-identical trained parameters") {
  auto train_once = [] {
    Model<float> m({6}, {LayerSpec::dense(10), LayerSpec::relu(), LayerSpec::dense(4)}, 99);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.seed = 1234;
    Rng data_rng(555);
    Tensor<float> x = Tensor<float>::zeros({64, 6});
    std::vector<int> y(64);
    for (auto& v : x.data) v = static_cast<float>(data_rng.uniform(-1, 1));
    for (auto& v : y) v = static_cast<int>(data_rng.below(4));
    fit(m, 64, cfg, [&](const std::vector<std::int64_t>& idx) {
      Tensor<float> xb = Tensor<float>::zeros({static_cast<int>(idx.size()), 6});
      SoftmaxCrossEntropy<float> loss;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (int c = 0; c < 6; ++c) xb[r * 6 + c] = x[static_cast<std::size_t>(idx[r]) * 6 + c];
        loss.labels.push_back(y[static_cast<std::size_t>(idx[r])]);
      }
      return std::make_pair(std::move(xb), std::move(loss));
    });
    return m;
  };
  const Model<float> a = train_once();
  const Model<float> b = train_once();
  REQUIRE(a.parameters().size() == b.parameters().size());
  for (std::size_t t = 0; t < a.parameters().size(); ++t)
    for (std::int64_t e = 0; e < a.parameters()[t].size(); ++e)
      CHECK(a.parameters()[t][e] == b.parameters()[t][e]);
}

TEST_CASE("one small sgd step does not increase the loss (statistical)") {
  Rng rng(2024);
  int failures = 0;
  const int trials = 120;
  for (int trial = 0; trial < trials; ++trial) {
    const int in = 2 + static_cast<int>(rng.below(6));
    const int hidden = 2 + static_cast<int>(rng.below(8));
    const int classes = 2 + static_cast<int>(rng.below(5));
    Model<float> m({in}, {LayerSpec::dense(hidden), LayerSpec::relu(), LayerSpec::dense(classes)},
                   rng.next_u64());
    const Tensor<float> x = random_tensor({8, in}, rng, -2, 2);
    SoftmaxCrossEntropy<float> loss;
    for (int i = 0; i < 8; ++i) loss.labels.push_back(static_cast<int>(rng.below(classes)));

    auto trace = m.forward_traced(x);
    const double before = loss.value(trace.output);
    const auto grads = m.backward(trace, loss.grad(trace.output));
    sgd_step(m.parameters(), grads, 1e-5);
    const double after = loss.value(m.forward(x));
    if (after > before + 1e-9) ++failures;
  }
  CHECK(failures <= trials / 100);  // >= 99% of the trials must not increase
}

TEST_CASE("checkpoint round trip preserves structure and parameters") {
  Model<float> m({1, 8, 8},
                 {LayerSpec::conv2d(3, 3, 3), LayerSpec::relu(), LayerSpec::maxpool2d(2),
                  LayerSpec::flatten(), LayerSpec::dense(5)},
                 77);
  const std::string path = "checkpoint_roundtrip.tnet";
  save_model(m, path);
  const Model<float> loaded = load_model(path);
  REQUIRE(loaded.input_shape() == m.input_shape());
  REQUIRE(loaded.layers().size() == m.layers().size());
  REQUIRE(loaded.parameters().size() == m.parameters().size());
  for (std::size_t t = 0; t < m.parameters().size(); ++t)
    for (std::int64_t e = 0; e < m.parameters()[t].size(); ++e)
      CHECK(loaded.parameters()[t][e] == m.parameters()[t][e]);
  Rng rng(5);
  const Tensor<float> x = random_tensor({2, 1, 8, 8}, rng);
  const Tensor<float> ya = m.forward(x);
  const Tensor<float> yb = loaded.forward(x);
  for (std::int64_t i = 0; i < ya.size(); ++i) CHECK(ya[i] == yb[i]);
  std::remove(path.c_str());
}

TEST_CASE("checkpoint loader rejects garbage") {
  const std::string path = "checkpoint_garbage.tnet";
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTAMODEL";
  }
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("bad magic"), DataError);
  std::remove(path.c_str());
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.learning_rate = 0.1;
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.epochs = 1;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
