#include <benchmark/benchmark.h>

#include "hake/analogy/dataset.hpp"
#include "hake/net/gemm.hpp"
#include "hake/net/loss.hpp"
#include "hake/net/model.hpp"
#include "hake/net/train.hpp"
#include "hake/npmi.hpp"
#include "hake/reasoning/metrics.hpp"
#include "hake/rng.hpp"

using namespace hake;

namespace {

void BM_GemmConvShape(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const int n = static_cast<int>(state.range(2));
  std::vector<float> a(static_cast<std::size_t>(m) * k, 0.5f);
  std::vector<float> b(static_cast<std::size_t>(k) * n, 0.25f);
  std::vector<float> c(static_cast<std::size_t>(m) * n);
  for (auto _ : state) {
    net::gemm_nn(a.data(), b.data(), c.data(), m, k, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(m) * k * n);
}
BENCHMARK(BM_GemmConvShape)
    ->Args({16, 25, 15376})   // first conv of the scene model
    ->Args({32, 400, 729})    // second conv
    ->Args({64, 1152, 128});  // dense head

void BM_SceneForwardBackward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  auto arch = {net::LayerSpec::conv2d(16, 5, 5), net::LayerSpec::relu(),
               net::LayerSpec::maxpool2d(4),     net::LayerSpec::conv2d(32, 5, 5),
               net::LayerSpec::relu(),           net::LayerSpec::maxpool2d(4),
               net::LayerSpec::flatten(),        net::LayerSpec::dense(128),
               net::LayerSpec::relu(),           net::LayerSpec::dense(19)};
  net::Model<float> model({1, 128, 128}, arch, 1);
  net::Tensor<float> x = net::Tensor<float>::uninitialized({batch, 1, 128, 128});
  Rng rng(2);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  net::SoftmaxCrossEntropy<float> loss;
  for (int i = 0; i < batch; ++i) loss.labels.push_back(i % 19);
  net::tune_allocator_for_training();
  for (auto _ : state) {
    auto trace = model.forward_traced(x);
    auto grads = model.backward(trace, loss.grad(trace.output));
    benchmark::DoNotOptimize(grads.data());
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_SceneForwardBackward)->Arg(32)->Arg(64);

void BM_GenerateComposite(benchmark::State& state) {
  const analogy::DigitPool pool = analogy::DigitPool::synthetic(2048, 7);
  analogy::AnalogyConfig config;
  std::uint64_t index = 0;
  for (auto _ : state) {
    Rng rng = Rng::substream(42, index++);
    auto sample = analogy::generate_composite(rng, pool, config);
    benchmark::DoNotOptimize(sample.pixels.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GenerateComposite);

void BM_NpmiSelect(benchmark::State& state) {
  Rng rng(11);
  CooccurrenceTable table;
  for (int a = 0; a < 154; ++a) table.activity_counts["a" + std::to_string(a)] = 50;
  for (int s = 0; s < 200; ++s) table.state_counts["s" + std::to_string(s)] = 40;
  for (int a = 0; a < 154; ++a)
    for (int s = 0; s < 200; ++s)
      if (rng.below(4) == 0)
        table.joint_counts[{"a" + std::to_string(a), "s" + std::to_string(s)}] =
            static_cast<double>(1 + rng.below(30));
  table.total = 154 * 200 * 40.0;
  for (auto _ : state) {
    auto ranked = select_part_states(table, 92);
    benchmark::DoNotOptimize(ranked.data());
  }
}
BENCHMARK(BM_NpmiSelect);

void BM_AveragePrecision(benchmark::State& state) {
  Rng rng(13);
  reasoning::EvalRecord record;
  record.activity = "a";
  for (int i = 0; i < 10000; ++i)
    record.items.push_back({"i" + std::to_string(i), rng.uniform(), rng.below(5) == 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(reasoning::average_precision(record));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_AveragePrecision);

}  // namespace

BENCHMARK_MAIN();
