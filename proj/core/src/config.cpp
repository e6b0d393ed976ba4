#include "hake/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hake {

namespace {

using analogy::ExperimentConfig;
using nlohmann::ordered_json;
using net::LayerKind;
using net::LayerSpec;

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> known,
                    const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw DataError(what + ": unknown key '" + key + "'");
  }
}

LayerSpec layer_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dense") {
    reject_unknown(j, {"kind", "units"}, "layer");
    return LayerSpec::dense(j.at("units").get<int>());
  }
  if (kind == "conv2d") {
    reject_unknown(j, {"kind", "out_channels", "kernel", "stride"}, "layer");
    return LayerSpec::conv2d(j.at("out_channels").get<int>(), j.at("kernel").get<int>(),
                             j.at("kernel").get<int>(), j.value("stride", 1));
  }
  if (kind == "relu") {
    reject_unknown(j, {"kind"}, "layer");
    return LayerSpec::relu();
  }
  if (kind == "maxpool2d") {
    reject_unknown(j, {"kind", "window", "stride"}, "layer");
    return LayerSpec::maxpool2d(j.at("window").get<int>(), j.value("stride", 0));
  }
  if (kind == "flatten") {
    reject_unknown(j, {"kind"}, "layer");
    return LayerSpec::flatten();
  }
  throw DataError("layer: unknown kind '" + kind + "'");
}

ordered_json layer_to_json(const LayerSpec& s) {
  ordered_json j;
  j["kind"] = layer_kind_name(s.kind);
  switch (s.kind) {
    case LayerKind::dense:
      j["units"] = s.units;
      break;
    case LayerKind::conv2d:
      j["out_channels"] = s.out_channels;
      j["kernel"] = s.kernel_h;
      j["stride"] = s.stride;
      break;
    case LayerKind::maxpool2d:
      j["window"] = s.pool_h;
      j["stride"] = s.pool_stride;
      break;
    default:
      break;
  }
  return j;
}

std::vector<LayerSpec> arch_from_json(const ordered_json& j) {
  std::vector<LayerSpec> arch;
  for (const auto& layer : j) arch.push_back(layer_from_json(layer));
  return arch;
}

ordered_json arch_to_json(const std::vector<LayerSpec>& arch) {
  ordered_json j = ordered_json::array();
  for (const auto& s : arch) j.push_back(layer_to_json(s));
  return j;
}

net::LossKind loss_from_name(const std::string& name) {
  if (name == "softmax_ce") return net::LossKind::softmax_ce;
  if (name == "sigmoid_ce_multilabel") return net::LossKind::sigmoid_ce_multilabel;
  if (name == "triplet") return net::LossKind::triplet;
  throw DataError("train config: unknown loss '" + name + "'");
}

}  // namespace

analogy::ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  reject_unknown(j,
                 {"data", "train", "instance_arch", "part_stage1_arch", "part_stage2_arch",
                  "threads", "pool_train_size", "pool_test_size", "pool_difficulty", "mnist_dir"},
                 "config");

  ExperimentConfig cfg = ExperimentConfig::defaults();
  try {
    if (j.contains("data")) {
      const auto& d = j.at("data");
      reject_unknown(d,
                     {"canvas", "digits_min", "digits_max", "noise_sigma", "train_count",
                      "test_count", "seed"},
                     "config.data");
      cfg.data.canvas = d.value("canvas", cfg.data.canvas);
      cfg.data.digits_min = d.value("digits_min", cfg.data.digits_min);
      cfg.data.digits_max = d.value("digits_max", cfg.data.digits_max);
      cfg.data.noise_sigma = d.value("noise_sigma", cfg.data.noise_sigma);
      cfg.data.train_count = d.value("train_count", cfg.data.train_count);
      cfg.data.test_count = d.value("test_count", cfg.data.test_count);
      cfg.data.seed = d.value("seed", cfg.data.seed);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      reject_unknown(t, {"learning_rate", "epochs", "batch_size", "seed", "loss"}, "config.train");
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.epochs = t.value("epochs", cfg.train.epochs);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
      cfg.train.seed = t.value("seed", cfg.train.seed);
      if (t.contains("loss")) cfg.train.loss = loss_from_name(t.at("loss").get<std::string>());
    }
    if (j.contains("instance_arch")) cfg.instance_arch = arch_from_json(j.at("instance_arch"));
    if (j.contains("part_stage1_arch"))
      cfg.part_stage1_arch = arch_from_json(j.at("part_stage1_arch"));
    if (j.contains("part_stage2_arch"))
      cfg.part_stage2_arch = arch_from_json(j.at("part_stage2_arch"));
    cfg.threads = j.value("threads", cfg.threads);
    cfg.pool_train_size = j.value("pool_train_size", cfg.pool_train_size);
    cfg.pool_test_size = j.value("pool_test_size", cfg.pool_test_size);
    cfg.pool_difficulty = j.value("pool_difficulty", cfg.pool_difficulty);
    cfg.mnist_dir = j.value("mnist_dir", cfg.mnist_dir);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

analogy::ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  return experiment_config_from_json_text(buffer.str());
}

std::string experiment_config_to_json_text(const analogy::ExperimentConfig& cfg) {
  ordered_json j;
  j["data"] = {{"canvas", cfg.data.canvas},
               {"digits_min", cfg.data.digits_min},
               {"digits_max", cfg.data.digits_max},
               {"noise_sigma", cfg.data.noise_sigma},
               {"train_count", cfg.data.train_count},
               {"test_count", cfg.data.test_count},
               {"seed", cfg.data.seed}};
  j["train"] = {{"learning_rate", cfg.train.learning_rate},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"seed", cfg.train.seed},
                {"loss", loss_kind_name(cfg.train.loss)}};
  j["instance_arch"] = arch_to_json(cfg.instance_arch);
  j["part_stage1_arch"] = arch_to_json(cfg.part_stage1_arch);
  j["part_stage2_arch"] = arch_to_json(cfg.part_stage2_arch);
  j["threads"] = cfg.threads;
  j["pool_train_size"] = cfg.pool_train_size;
  j["pool_test_size"] = cfg.pool_test_size;
  j["pool_difficulty"] = cfg.pool_difficulty;
  j["mnist_dir"] = cfg.mnist_dir;
  return j.dump(2) + "\n";
}

std::string compare_report_to_json_text(const analogy::CompareReport& report) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = ordered_json::parse(experiment_config_to_json_text(report.config));
  j["instance"] = {{"test_accuracy", report.instance_accuracy}};
  j["part"] = {{"test_accuracy", report.part_accuracy},
               {"stage1_crop_accuracy", report.part_stage1_crop_accuracy}};
  j["relative_gain_percent"] = report.relative_gain_percent;
  return j.dump(2) + "\n";
}

std::string compare_report_to_table(const analogy::CompareReport& report) {
  char buffer[256];
  std::string out;
  out += "paradigm          test accuracy\n";
  out += "----------------  -------------\n";
  std::snprintf(buffer, sizeof buffer, "instance-based    %6.2f%%\n",
                report.instance_accuracy * 100.0);
  out += buffer;
  std::snprintf(buffer, sizeof buffer, "part-based        %6.2f%%\n",
                report.part_accuracy * 100.0);
  out += buffer;
  std::snprintf(buffer, sizeof buffer, "relative gain     %6.1f%%\n",
                report.relative_gain_percent);
  out += buffer;
  return out;
}

void write_curve_csv(const std::vector<net::CurvePoint>& curve, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("curve: cannot open " + path + " for writing");
  os << "step,samples_seen,loss\n";
  os.precision(10);
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << i << "," << curve[i].samples_seen << "," << curve[i].loss << "\n";
}

}  // namespace hake
