#include "hake/analogy/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hake::analogy {

namespace {

using net::LayerSpec;
using net::Model;
using net::Tensor;

constexpr std::uint64_t kTrainPoolSalt = 0x706F6F6C74726EULL;
constexpr std::uint64_t kTestPoolSalt = 0x706F6F6C747374ULL;
constexpr std::uint64_t kInstanceModelSalt = 0x696E7374ULL;
constexpr std::uint64_t kStage1ModelSalt = 0x73746731ULL;
constexpr std::uint64_t kStage2ModelSalt = 0x73746732ULL;

inline float pixel_to_input(std::uint8_t p) { return static_cast<float>(p) / 255.0f; }

void report(const ProgressFn& progress, const std::string& message) {
  if (progress) progress(message);
}

/// [B,1,128,128] scene batch from byte pixels.
Tensor<float> scene_batch(const AnalogyDataset& data, const std::vector<std::int64_t>& idx) {
  const int side = data.config.canvas;
  Tensor<float> x = Tensor<float>::zeros({static_cast<int>(idx.size()), 1, side, side});
  float* dst = x.ptr();
  for (std::int64_t i : idx) {
    const auto& pixels = data.samples[static_cast<std::size_t>(i)].pixels;
    for (std::size_t p = 0; p < pixels.size(); ++p) dst[p] = pixel_to_input(pixels[p]);
    dst += pixels.size();
  }
  return x;
}

/// 28x28 crop at a ground-truth placement.
void copy_crop(const AnalogySample& sample, int canvas, const Placement& pl, float* dst) {
  for (int gy = 0; gy < kGlyphSide; ++gy) {
    const std::uint8_t* src = sample.pixels.data() + static_cast<std::size_t>(pl.y + gy) * canvas + pl.x;
    for (int gx = 0; gx < kGlyphSide; ++gx) dst[gy * kGlyphSide + gx] = pixel_to_input(src[gx]);
  }
}

struct CropRef {
  std::int32_t sample = 0;
  std::int32_t slot = 0;
};

std::vector<CropRef> crop_index(const AnalogyDataset& data) {
  std::vector<CropRef> refs;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    for (std::size_t s = 0; s < data.samples[i].placements.size(); ++s)
      refs.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(s)});
  return refs;
}

std::vector<int> argmax_rows(const Tensor<float>& logits) {
  const int n = logits.shape[0], c = logits.shape[1];
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const float* row = logits.ptr() + static_cast<std::size_t>(i) * c;
    out[static_cast<std::size_t>(i)] =
        static_cast<int>(std::max_element(row, row + c) - row);
  }
  return out;
}

/// Stage-1 class probabilities for every crop of every sample, in order.
std::vector<std::vector<float>> predict_crop_probs(const Model<float>& stage1,
                                                   const AnalogyDataset& data, int batch_size) {
  const std::vector<CropRef> refs = crop_index(data);
  std::vector<std::vector<float>> probs(refs.size());
  for (std::size_t start = 0; start < refs.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(refs.size(), start + static_cast<std::size_t>(batch_size));
    Tensor<float> x =
        Tensor<float>::zeros({static_cast<int>(end - start), 1, kGlyphSide, kGlyphSide});
    for (std::size_t r = start; r < end; ++r) {
      const auto& sample = data.samples[static_cast<std::size_t>(refs[r].sample)];
      copy_crop(sample, data.config.canvas, sample.placements[static_cast<std::size_t>(refs[r].slot)],
                x.ptr() + (r - start) * kGlyphPixels);
    }
    Tensor<float> p = stage1.predict_proba(x);
    for (std::size_t r = start; r < end; ++r) {
      const float* row = p.ptr() + (r - start) * 10;
      probs[r].assign(row, row + 10);
    }
  }
  return probs;
}

/// Per-sample stage-2 features from per-crop probability rows.
std::vector<float> build_stage2_features(const AnalogyDataset& data,
                                         const std::vector<std::vector<float>>& crop_probs) {
  std::vector<float> features(data.samples.size() * kStage2FeatureDim, 0.0f);
  std::size_t next_crop = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    std::vector<std::vector<float>> slots;
    for (std::size_t s = 0; s < data.samples[i].placements.size(); ++s)
      slots.push_back(crop_probs[next_crop++]);
    pack_stage2_features(slots, features.data() + i * kStage2FeatureDim);
  }
  return features;
}

/// Ground-truth one-hot features for the upper-bound analog.
std::vector<float> build_gt_features(const AnalogyDataset& data) {
  std::vector<float> features(data.samples.size() * kStage2FeatureDim, 0.0f);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    std::vector<std::vector<float>> slots;
    for (const Placement& pl : data.samples[i].placements) {
      std::vector<float> onehot(10, 0.0f);
      onehot[pl.digit] = 1.0f;
      slots.push_back(std::move(onehot));
    }
    pack_stage2_features(slots, features.data() + i * kStage2FeatureDim);
  }
  return features;
}

Tensor<float> feature_batch(const std::vector<float>& features,
                            const std::vector<std::int64_t>& idx) {
  Tensor<float> x = Tensor<float>::zeros({static_cast<int>(idx.size()), kStage2FeatureDim});
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy_n(features.data() + static_cast<std::size_t>(idx[r]) * kStage2FeatureDim,
                kStage2FeatureDim, x.ptr() + r * kStage2FeatureDim);
  return x;
}

double feature_accuracy(const Model<float>& stage2, const std::vector<float>& features,
                        const AnalogyDataset& data, int batch_size) {
  std::int64_t hits = 0;
  const std::int64_t n = static_cast<std::int64_t>(data.samples.size());
  for (std::int64_t start = 0; start < n; start += batch_size) {
    const std::int64_t end = std::min(n, start + batch_size);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(end - start));
    std::iota(idx.begin(), idx.end(), start);
    const std::vector<int> pred = argmax_rows(stage2.forward(feature_batch(features, idx)));
    for (std::int64_t i = start; i < end; ++i)
      hits += pred[static_cast<std::size_t>(i - start)] ==
              data.samples[static_cast<std::size_t>(i)].label;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

/// Trains the stage-2 reasoner on precomputed features; returns the run.
std::pair<Model<float>, std::vector<net::CurvePoint>> fit_stage2(
    const std::vector<net::LayerSpec>& arch, const std::vector<float>& features,
    const AnalogyDataset& train, const net::TrainConfig& cfg) {
  Model<float> stage2({kStage2FeatureDim}, arch, cfg.seed ^ kStage2ModelSalt);
  auto curve = net::fit(
      stage2, static_cast<std::int64_t>(train.samples.size()), cfg,
      [&](const std::vector<std::int64_t>& idx) {
        net::SoftmaxCrossEntropy<float> loss;
        for (std::int64_t i : idx)
          loss.labels.push_back(train.samples[static_cast<std::size_t>(i)].label);
        return std::make_pair(feature_batch(features, idx), std::move(loss));
      });
  return {std::move(stage2), std::move(curve)};
}

}  // namespace

void pack_stage2_features(const std::vector<std::vector<float>>& slot_probs, float* out) {
  if (slot_probs.size() > kMaxDigitsPerImage)
    throw Error("stage-2 features: more than 5 digit slots");
  for (const auto& p : slot_probs)
    if (p.size() != 10)
      throw Error("stage-2 features: slot probability vector must have 10 entries");
  std::vector<int> slots(slot_probs.size());
  std::iota(slots.begin(), slots.end(), 0);
  auto key = [&](int s) {
    const auto& p = slot_probs[static_cast<std::size_t>(s)];
    const int digit = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    return std::make_pair(digit, p[static_cast<std::size_t>(digit)]);
  };
  std::stable_sort(slots.begin(), slots.end(), [&](int a, int b) {
    const auto ka = key(a), kb = key(b);
    if (ka.first != kb.first) return ka.first > kb.first;
    return ka.second > kb.second;
  });
  std::fill_n(out, kStage2FeatureDim, 0.0f);
  for (std::size_t r = 0; r < slots.size(); ++r)
    std::copy_n(slot_probs[static_cast<std::size_t>(slots[r])].data(), 10, out + r * 10);
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.train.learning_rate = 0.1;
  cfg.train.epochs = 2;
  cfg.train.batch_size = 64;
  cfg.train.seed = 1;
  cfg.train.loss = net::LossKind::softmax_ce;
  // The early pool stays at 2 so 28px digits keep ~14 cells of detail when
  // conv2 sees them; conv2 then strides by 2 to keep the compute flat. A 4x4
  // first pool starves the scene model below even label-prior accuracy.
  cfg.instance_arch = {LayerSpec::conv2d(16, 5, 5),    LayerSpec::relu(),
                       LayerSpec::maxpool2d(2),        LayerSpec::conv2d(32, 5, 5, 2),
                       LayerSpec::relu(),              LayerSpec::maxpool2d(2),
                       LayerSpec::flatten(),           LayerSpec::dense(128),
                       LayerSpec::relu(),              LayerSpec::dense(kNumClasses)};
  cfg.part_stage1_arch = {LayerSpec::conv2d(8, 5, 5), LayerSpec::relu(), LayerSpec::maxpool2d(4),
                          LayerSpec::flatten(),       LayerSpec::dense(64), LayerSpec::relu(),
                          LayerSpec::dense(10)};
  cfg.part_stage2_arch = {LayerSpec::dense(64), LayerSpec::relu(), LayerSpec::dense(kNumClasses)};
  return cfg;
}

void ExperimentConfig::validate() const {
  data.validate();
  train.validate();
  if (instance_arch.empty() || part_stage1_arch.empty() || part_stage2_arch.empty())
    throw Error("experiment config: architectures must be non-empty");
  if (pool_train_size <= 0 || pool_test_size <= 0)
    throw Error("experiment config: pool sizes must be positive");
  if (pool_difficulty < 0 || pool_difficulty > 1)
    throw Error("experiment config: pool_difficulty must be in [0,1]");
}

GeneratedData generate_experiment_data(const ExperimentConfig& config,
                                       const ProgressFn& progress) {
  config.validate();
  GeneratedData out;
  if (!config.mnist_dir.empty()) {
    report(progress, "loading digit pools from " + config.mnist_dir);
    out.train_pool = DigitPool::from_idx(config.mnist_dir + "/train-images-idx3-ubyte",
                                         config.mnist_dir + "/train-labels-idx1-ubyte");
    out.test_pool = DigitPool::from_idx(config.mnist_dir + "/t10k-images-idx3-ubyte",
                                        config.mnist_dir + "/t10k-labels-idx1-ubyte");
  } else {
    report(progress, "rendering synthetic digit pools");
    out.train_pool = DigitPool::synthetic(config.pool_train_size, config.data.seed ^ kTrainPoolSalt,
                                          config.pool_difficulty);
    out.test_pool = DigitPool::synthetic(config.pool_test_size, config.data.seed ^ kTestPoolSalt,
                                         config.pool_difficulty);
  }
  report(progress, "generating " + std::to_string(config.data.train_count) + " train scenes");
  out.train = generate_dataset(out.train_pool, config.data, config.data.train_count,
                               kTrainStreamSalt, config.threads);
  report(progress, "generating " + std::to_string(config.data.test_count) + " test scenes");
  out.test = generate_dataset(out.test_pool, config.data, config.data.test_count, kTestStreamSalt,
                              config.threads);
  return out;
}

ParadigmRun train_instance_paradigm(const AnalogyDataset& train, const AnalogyDataset& test,
                                    const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  const int side = train.config.canvas;
  ParadigmRun run;
  run.model = Model<float>({1, side, side}, config.instance_arch,
                           config.train.seed ^ kInstanceModelSalt);
  report(progress, "training instance-based model (" +
                       std::to_string(run.model.parameter_count()) + " parameters)");
  run.curve = net::fit(run.model, static_cast<std::int64_t>(train.samples.size()), config.train,
                       [&](const std::vector<std::int64_t>& idx) {
                         net::SoftmaxCrossEntropy<float> loss;
                         for (std::int64_t i : idx)
                           loss.labels.push_back(train.samples[static_cast<std::size_t>(i)].label);
                         return std::make_pair(scene_batch(train, idx), std::move(loss));
                       });
  run.test_accuracy = evaluate_instance(run.model, test);
  report(progress, "instance-based test accuracy " + std::to_string(run.test_accuracy));
  return run;
}

PartRun train_part_paradigm(const AnalogyDataset& train, const AnalogyDataset& test,
                            const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  PartRun run;

  const std::vector<CropRef> refs = crop_index(train);
  run.stage1 = Model<float>({1, kGlyphSide, kGlyphSide}, config.part_stage1_arch,
                            config.train.seed ^ kStage1ModelSalt);
  report(progress, "training part-based stage 1 on " + std::to_string(refs.size()) + " crops");
  run.stage1_curve = net::fit(
      run.stage1, static_cast<std::int64_t>(refs.size()), config.train,
      [&](const std::vector<std::int64_t>& idx) {
        Tensor<float> x =
            Tensor<float>::zeros({static_cast<int>(idx.size()), 1, kGlyphSide, kGlyphSide});
        net::SoftmaxCrossEntropy<float> loss;
        for (std::size_t r = 0; r < idx.size(); ++r) {
          const CropRef& ref = refs[static_cast<std::size_t>(idx[r])];
          const auto& sample = train.samples[static_cast<std::size_t>(ref.sample)];
          const Placement& pl = sample.placements[static_cast<std::size_t>(ref.slot)];
          copy_crop(sample, train.config.canvas, pl, x.ptr() + r * kGlyphPixels);
          loss.labels.push_back(pl.digit);
        }
        return std::make_pair(std::move(x), std::move(loss));
      });

  // Crop-level accuracy on the test set (diagnostic; also drives the
  // stage-2 features below).
  {
    const std::vector<CropRef> test_refs = crop_index(test);
    const std::vector<std::vector<float>> probs = predict_crop_probs(run.stage1, test, 256);
    std::int64_t hits = 0;
    for (std::size_t r = 0; r < test_refs.size(); ++r) {
      const auto& sample = test.samples[static_cast<std::size_t>(test_refs[r].sample)];
      const int truth = sample.placements[static_cast<std::size_t>(test_refs[r].slot)].digit;
      const auto& p = probs[r];
      const int pred = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
      hits += pred == truth;
    }
    run.stage1_crop_accuracy = static_cast<double>(hits) / static_cast<double>(test_refs.size());
    report(progress, "stage 1 crop accuracy " + std::to_string(run.stage1_crop_accuracy));
  }

  report(progress, "building stage 2 features");
  const std::vector<float> train_features =
      build_stage2_features(train, predict_crop_probs(run.stage1, train, 256));
  report(progress, "training part-based stage 2");
  auto [stage2, curve] = fit_stage2(config.part_stage2_arch, train_features, train, config.train);
  run.stage2 = std::move(stage2);
  run.stage2_curve = std::move(curve);

  const std::vector<float> test_features =
      build_stage2_features(test, predict_crop_probs(run.stage1, test, 256));
  run.test_accuracy = feature_accuracy(run.stage2, test_features, test, 256);
  report(progress, "part-based test accuracy " + std::to_string(run.test_accuracy));
  return run;
}

double stage2_ground_truth_accuracy(const AnalogyDataset& train, const AnalogyDataset& test,
                                    const ExperimentConfig& config,
                                    const net::TrainConfig& stage2_train,
                                    const ProgressFn& progress) {
  config.validate();
  report(progress, "training stage 2 on ground-truth one-hot features");
  const std::vector<float> train_features = build_gt_features(train);
  auto [stage2, curve] = fit_stage2(config.part_stage2_arch, train_features, train, stage2_train);
  (void)curve;
  const std::vector<float> test_features = build_gt_features(test);
  const double acc = feature_accuracy(stage2, test_features, test, 256);
  report(progress, "ground-truth upper-bound accuracy " + std::to_string(acc));
  return acc;
}

CompareReport compare_paradigms(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  GeneratedData data = generate_experiment_data(config, progress);

  CompareReport reportv;
  reportv.config = config;

  ParadigmRun instance = train_instance_paradigm(data.train, data.test, config, progress);
  reportv.instance_accuracy = instance.test_accuracy;
  reportv.instance_curve = std::move(instance.curve);

  PartRun part = train_part_paradigm(data.train, data.test, config, progress);
  reportv.part_accuracy = part.test_accuracy;
  reportv.part_stage1_crop_accuracy = part.stage1_crop_accuracy;
  reportv.stage1_curve = std::move(part.stage1_curve);
  reportv.stage2_curve = std::move(part.stage2_curve);

  reportv.relative_gain_percent = (reportv.part_accuracy - reportv.instance_accuracy) /
                                  std::max(reportv.instance_accuracy, 1e-12) * 100.0;
  return reportv;
}

double evaluate_instance(const net::Model<float>& model, const AnalogyDataset& dataset,
                         int batch_size) {
  std::int64_t hits = 0;
  const std::int64_t n = static_cast<std::int64_t>(dataset.samples.size());
  for (std::int64_t start = 0; start < n; start += batch_size) {
    const std::int64_t end = std::min(n, start + batch_size);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(end - start));
    std::iota(idx.begin(), idx.end(), start);
    const std::vector<int> pred = argmax_rows(model.forward(scene_batch(dataset, idx)));
    for (std::int64_t i = start; i < end; ++i)
      hits += pred[static_cast<std::size_t>(i - start)] ==
              dataset.samples[static_cast<std::size_t>(i)].label;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double evaluate_part(const net::Model<float>& stage1, const net::Model<float>& stage2,
                     const AnalogyDataset& dataset, int batch_size) {
  const std::vector<float> features =
      build_stage2_features(dataset, predict_crop_probs(stage1, dataset, batch_size));
  return feature_accuracy(stage2, features, dataset, batch_size);
}

}  // namespace hake::analogy
