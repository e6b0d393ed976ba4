#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hake/analogy/dataset.hpp"
#include "hake/net/layers.hpp"
#include "hake/net/model.hpp"
#include "hake/net/train.hpp"

namespace hake::analogy {

inline constexpr int kMaxDigitsPerImage = 5;
inline constexpr int kStage2FeatureDim = kMaxDigitsPerImage * 10;

/// Everything a paradigm-comparison run needs. Architectures are data, not
/// code; the defaults are shallow conv/dense stacks and both paradigms share
/// one TrainConfig.
struct ExperimentConfig {
  AnalogyConfig data;
  net::TrainConfig train;
  std::vector<net::LayerSpec> instance_arch;     // 128x128 scene -> 19 classes
  std::vector<net::LayerSpec> part_stage1_arch;  // 28x28 crop -> 10 digits
  std::vector<net::LayerSpec> part_stage2_arch;  // 50 features -> 19 classes
  int threads = 0;  // dataset generation only; 0 = hardware concurrency
  int pool_train_size = 60000;
  int pool_test_size = 10000;
  /// Procedural glyph jitter, 0 (near clean) to 1 (calibrated default).
  double pool_difficulty = 1.0;
  /// When set, digit glyphs come from the canonical IDX files in this
  /// directory instead of the procedural pool.
  std::string mnist_dir;

  static ExperimentConfig defaults();
  void validate() const;
};

using ProgressFn = std::function<void(const std::string&)>;

struct GeneratedData {
  DigitPool train_pool, test_pool;
  AnalogyDataset train, test;
};

GeneratedData generate_experiment_data(const ExperimentConfig& config,
                                       const ProgressFn& progress = {});

struct ParadigmRun {
  double test_accuracy = 0;
  std::vector<net::CurvePoint> curve;
  net::Model<float> model;
};

struct PartRun {
  double test_accuracy = 0;
  double stage1_crop_accuracy = 0;
  std::vector<net::CurvePoint> stage1_curve, stage2_curve;
  net::Model<float> stage1, stage2;
};

/// One-stage paradigm: a single network from the full scene to the 19-way
/// label.
ParadigmRun train_instance_paradigm(const AnalogyDataset& train, const AnalogyDataset& test,
                                    const ExperimentConfig& config,
                                    const ProgressFn& progress = {});

/// Two-stage paradigm: a shared digit classifier on ground-truth crops,
/// then a reasoner over the aggregated per-digit probability features.
PartRun train_part_paradigm(const AnalogyDataset& train, const AnalogyDataset& test,
                            const ExperimentConfig& config, const ProgressFn& progress = {});

/// Upper-bound analog: the stage-2 reasoner trained and evaluated on
/// ground-truth one-hot digit features instead of predicted probabilities.
double stage2_ground_truth_accuracy(const AnalogyDataset& train, const AnalogyDataset& test,
                                    const ExperimentConfig& config,
                                    const net::TrainConfig& stage2_train,
                                    const ProgressFn& progress = {});

struct CompareReport {
  ExperimentConfig config;
  double instance_accuracy = 0;
  double part_accuracy = 0;
  double relative_gain_percent = 0;
  double part_stage1_crop_accuracy = 0;
  std::vector<net::CurvePoint> instance_curve, stage1_curve, stage2_curve;
};

/// Generates the data, trains both paradigms under the shared TrainConfig,
/// and reports accuracies plus the relative gain.
CompareReport compare_paradigms(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Per-slot feature assembly for the stage-2 reasoner: slot probability
/// vectors sorted by (most probable digit value desc, that probability
/// desc), zero-padded to 5 slots. Exposed for tests.
void pack_stage2_features(const std::vector<std::vector<float>>& slot_probs, float* out);

/// Top-1 accuracy helpers.
double evaluate_instance(const net::Model<float>& model, const AnalogyDataset& dataset,
                         int batch_size = 256);
double evaluate_part(const net::Model<float>& stage1, const net::Model<float>& stage2,
                     const AnalogyDataset& dataset, int batch_size = 256);

}  // namespace hake::analogy
