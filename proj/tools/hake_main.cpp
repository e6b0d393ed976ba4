// hake: one binary for every pipeline in this project.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Set PSE_LOG=0|1|2 to
// control stderr verbosity; all file output stays under the --out target.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hake/a2v/activity2vec.hpp"
#include "hake/analogy/experiment.hpp"
#include "hake/annotation.hpp"
#include "hake/config_io.hpp"
#include "hake/graph.hpp"
#include "hake/jsonl.hpp"
#include "hake/net/checkpoint.hpp"
#include "hake/npmi.hpp"
#include "hake/reasoning/graph_reason.hpp"
#include "hake/reasoning/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("PSE_LOG");
    if (!env) return 1;
    try {
      return std::stoi(env);
    } catch (...) {
      return 1;
    }
  }();
  return level;
}

void info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "[hake] " << message << "\n";
}

hake::analogy::ProgressFn progress_logger() {
  if (log_level() >= 1) return [](const std::string& m) { std::cerr << "[hake] " << m << "\n"; };
  return {};
}

struct AnalogyArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

void add_analogy_flags(CLI::App* cmd, AnalogyArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config JSON");
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--seed", args.seed, "override the data seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--threads", args.threads, "generation threads (0 = hardware)");
}

hake::analogy::ExperimentConfig resolve_config(const AnalogyArgs& args) {
  hake::analogy::ExperimentConfig cfg = args.config_path.empty()
                                            ? hake::analogy::ExperimentConfig::defaults()
                                            : hake::load_experiment_config(args.config_path);
  // Flags win over the config file.
  if (args.seed_set) cfg.data.seed = args.seed;
  if (args.threads >= 0) cfg.threads = args.threads;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw hake::DataError("cannot open " + path.string() + " for writing");
  os << text;
}

fs::path prepare_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

int run_analogy_generate(const AnalogyArgs& args) {
  const auto cfg = resolve_config(args);
  const fs::path dir = prepare_out_dir(args.out_dir);
  auto data = hake::analogy::generate_experiment_data(cfg, progress_logger());
  hake::analogy::save_dataset(data.train, (dir / "train.anlg").string());
  hake::analogy::save_dataset(data.test, (dir / "test.anlg").string());
  write_text(dir / "config_echo.json", hake::experiment_config_to_json_text(cfg));
  info("wrote " + (dir / "train.anlg").string() + " and test.anlg");
  return 0;
}

int run_analogy_train(const AnalogyArgs& args, const std::string& paradigm) {
  const auto cfg = resolve_config(args);
  const fs::path dir = prepare_out_dir(args.out_dir);
  auto data = hake::analogy::generate_experiment_data(cfg, progress_logger());
  write_text(dir / "config_echo.json", hake::experiment_config_to_json_text(cfg));

  ordered_json report;
  report["schema_version"] = hake::kReportSchemaVersion;
  report["config"] = ordered_json::parse(hake::experiment_config_to_json_text(cfg));
  if (paradigm == "instance" || paradigm == "both") {
    auto run = hake::analogy::train_instance_paradigm(data.train, data.test, cfg,
                                                      progress_logger());
    hake::net::save_model(run.model, (dir / "instance.tnet").string());
    hake::write_curve_csv(run.curve, (dir / "curves_instance.csv").string());
    report["instance"] = {{"test_accuracy", run.test_accuracy}};
  }
  if (paradigm == "part" || paradigm == "both") {
    auto run = hake::analogy::train_part_paradigm(data.train, data.test, cfg, progress_logger());
    hake::net::save_model(run.stage1, (dir / "part_stage1.tnet").string());
    hake::net::save_model(run.stage2, (dir / "part_stage2.tnet").string());
    hake::write_curve_csv(run.stage1_curve, (dir / "curves_part_stage1.csv").string());
    hake::write_curve_csv(run.stage2_curve, (dir / "curves_part_stage2.csv").string());
    report["part"] = {{"test_accuracy", run.test_accuracy},
                      {"stage1_crop_accuracy", run.stage1_crop_accuracy}};
  }
  write_text(dir / "report.json", report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_analogy_compare(const AnalogyArgs& args) {
  const auto cfg = resolve_config(args);
  const fs::path dir = prepare_out_dir(args.out_dir);
  const auto report = hake::analogy::compare_paradigms(cfg, progress_logger());
  write_text(dir / "config_echo.json", hake::experiment_config_to_json_text(cfg));
  write_text(dir / "report.json", hake::compare_report_to_json_text(report));
  hake::write_curve_csv(report.instance_curve, (dir / "curves_instance.csv").string());
  hake::write_curve_csv(report.stage1_curve, (dir / "curves_part_stage1.csv").string());
  hake::write_curve_csv(report.stage2_curve, (dir / "curves_part_stage2.csv").string());
  std::cout << hake::compare_report_to_table(report);
  info("report written to " + (dir / "report.json").string());
  return 0;
}

int run_npmi_select(const std::string& counts, std::string marginals, int k,
                    const std::string& out) {
  if (marginals.empty()) marginals = counts + ".marginals";
  const auto table = hake::CooccurrenceTable::load_csv(counts, marginals);
  const auto ranked = hake::select_part_states(table, k);
  ordered_json j;
  j["schema_version"] = hake::kReportSchemaVersion;
  j["k"] = k;
  j["selected"] = ordered_json::array();
  for (const auto& [state, score] : ranked) {
    j["selected"].push_back({{"state", state}, {"npmi", score}});
    std::cout << state << "\t" << score << "\n";
  }
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  return 0;
}

int run_annotate_merge(const std::string& rounds_path, double min_support,
                       const std::string& out) {
  const auto rounds = hake::load_round_jsonl(rounds_path);
  // (instance, activity) -> that pair's annotation rounds
  std::map<std::pair<std::string, hake::ActivityLabel>, std::vector<hake::AnnotationRound>>
      grouped;
  for (const auto& r : rounds) grouped[{r.instance_id, r.activity}].push_back(r);

  std::map<std::string, std::map<hake::ActivityLabel, std::set<hake::PartStateTriple>>>
      per_instance;
  for (const auto& [key, group] : grouped)
    per_instance[key.first][key.second] = hake::agreement_filter(group, min_support);

  std::ofstream os(out);
  if (!os) throw hake::DataError("cannot open " + out + " for writing");
  for (const auto& [instance_id, per_activity] : per_instance) {
    const auto merged = hake::merge_rounds(per_activity);
    ordered_json j;
    j["instance_id"] = instance_id;
    ordered_json parts = ordered_json::object();
    for (const auto& [part, states] : merged) {
      ordered_json list = ordered_json::array();
      for (const auto& s : states)
        list.push_back({{"verb", s.verb}, {"object", s.object}});
      parts[hake::to_string(part)] = std::move(list);
    }
    j["per_part"] = std::move(parts);
    os << j.dump() << "\n";
  }
  info("merged " + std::to_string(per_instance.size()) + " instances into " + out);
  return 0;
}

hake::PartStateProbs probs_from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw hake::DataError("part state probs: cannot open " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw hake::DataError("part state probs: " + std::string(e.what()));
  }
  hake::PartStateProbs probs;
  for (const auto& [part_name, entry] : j.items()) {
    const hake::BodyPart part = hake::body_part_from_string(part_name);
    hake::PartStateProbs::PartEntry pe;
    pe.interactiveness = entry.value("interactiveness", 1.0);
    for (const auto& s : entry.at("states")) {
      pe.states.push_back({part, s.at("verb").get<std::string>(),
                           s.value("object", hake::kNoneToken)});
      pe.probs.push_back(s.at("p").get<double>());
    }
    probs.parts.emplace(part, std::move(pe));
  }
  probs.validate();
  return probs;
}

std::map<hake::BodyPart, std::vector<double>> visual_from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw hake::DataError("visual features: cannot open " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw hake::DataError("visual features: " + std::string(e.what()));
  }
  std::map<hake::BodyPart, std::vector<double>> visual;
  for (const auto& [part_name, vec] : j.items())
    visual[hake::body_part_from_string(part_name)] = vec.get<std::vector<double>>();
  return visual;
}

int run_a2v_embed(const std::string& table_path, const std::string& probs_path,
                  const std::string& visual_path, const std::string& out) {
  const auto table = hake::a2v::EmbeddingTable::load_tsv(table_path);
  const auto probs = probs_from_json_file(probs_path);
  const auto visual = visual_from_json_file(visual_path);

  std::map<hake::BodyPart, double> weights;
  for (const auto& [part, entry] : probs.parts) weights[part] = entry.interactiveness;

  const std::vector<double> attended = hake::a2v::interactiveness_attention(visual, weights);
  const std::vector<double> linguistic = hake::a2v::attend_linguistic(probs, table);
  hake::a2v::A2vConfig cfg;
  cfg.d_tok = table.dim();
  cfg.d_vis = static_cast<int>(attended.size());
  const auto embedding = hake::a2v::fuse(cfg, attended, linguistic);

  ordered_json j;
  j["schema_version"] = hake::kReportSchemaVersion;
  j["d_vis"] = embedding.d_vis;
  j["d_lang"] = embedding.d_lang;
  j["embedding"] = embedding.values;
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

int run_reason_eval(const std::string& scores_path, const std::string& counts_path,
                    const std::string& out) {
  const auto records = hake::reasoning::load_eval_jsonl(scores_path);
  const auto report = hake::reasoning::mean_ap(records);

  ordered_json j;
  j["schema_version"] = hake::kReportSchemaVersion;
  j["mAP"] = report.mean_ap;
  if (!counts_path.empty()) {
    const auto counts = hake::reasoning::load_train_counts_csv(counts_path);
    for (int i : {1, 5, 10}) {
      const std::string key = "few@" + std::to_string(i);
      try {
        const auto subset = hake::reasoning::few_shot_split(counts, i);
        j[key] = hake::reasoning::mean_ap_subset(records, subset).mean_ap;
      } catch (const hake::Error& e) {
        j[key] = nullptr;
        info(std::string("few@") + std::to_string(i) + ": " + e.what());
      }
    }
  }
  ordered_json per = ordered_json::object();
  for (const auto& [activity, ap] : report.per_activity) per[activity] = ap;
  j["per_activity"] = std::move(per);
  j["skipped"] = report.skipped;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) write_text(out, text);
  return 0;
}

int run_graph_build(const std::string& instances_path, const std::string& weighting,
                    const std::string& out) {
  const auto instances = hake::load_person_jsonl(instances_path);
  const hake::GraphWeighting w = weighting == "npmi" ? hake::GraphWeighting::npmi
                                                     : hake::GraphWeighting::frequency;
  const auto graph = hake::build_graph(instances, w);

  ordered_json j;
  j["schema_version"] = hake::kReportSchemaVersion;
  j["weighting"] = weighting;
  j["activities"] = ordered_json::array();
  for (const auto& a : graph.activities)
    j["activities"].push_back({{"verb", a.verb}, {"object", a.object}});
  j["states"] = ordered_json::array();
  for (const auto& s : graph.states)
    j["states"].push_back(
        {{"part", hake::to_string(s.part)}, {"verb", s.verb}, {"object", s.object}});
  auto edges = [](const auto& list, bool cross) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : list) {
      if constexpr (std::is_same_v<std::decay_t<decltype(e)>, hake::KnowledgeGraph::CrossEdge>)
        arr.push_back({e.activity, e.state, e.weight});
      else
        arr.push_back({e.u, e.v, e.weight});
    }
    (void)cross;
    return arr;
  };
  j["cross_edges"] = edges(graph.cross_edges, true);
  j["state_edges"] = edges(graph.state_edges, false);
  j["activity_edges"] = edges(graph.activity_edges, false);
  write_text(out, j.dump(2) + "\n");
  info("graph with " + std::to_string(graph.cross_edges.size()) + " cross edges written to " +
       out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"part-state activity understanding toolkit"};
  app.require_subcommand(1);

  // analogy
  CLI::App* analogy = app.add_subcommand("analogy", "composite-digit paradigm experiment");
  analogy->require_subcommand(1);
  AnalogyArgs gen_args, train_args, cmp_args;
  CLI::App* generate = analogy->add_subcommand("generate", "generate the composite dataset");
  add_analogy_flags(generate, gen_args);
  CLI::App* train = analogy->add_subcommand("train", "train one or both paradigms");
  std::string paradigm = "both";
  train->add_option("--paradigm", paradigm, "instance|part|both")
      ->check(CLI::IsMember({"instance", "part", "both"}));
  add_analogy_flags(train, train_args);
  CLI::App* compare = analogy->add_subcommand("compare", "train both paradigms and report");
  add_analogy_flags(compare, cmp_args);

  // npmi
  CLI::App* npmi_cmd = app.add_subcommand("npmi", "part-state vocabulary selection");
  CLI::App* select = npmi_cmd->add_subcommand("select", "rank candidates by NPMI");
  std::string counts, marginals, npmi_out;
  int k = 0;
  select->add_option("--counts", counts, "counts CSV (activity,state,joint_count)")->required();
  select->add_option("--marginals", marginals, "marginals CSV (default <counts>.marginals)");
  select->add_option("--k", k, "how many states to keep")->required();
  select->add_option("--out", npmi_out, "JSON report path");

  // annotate
  CLI::App* annotate = app.add_subcommand("annotate", "annotation consolidation");
  CLI::App* merge = annotate->add_subcommand("merge", "agreement-filter and merge rounds");
  std::string rounds_path, merge_out;
  double min_support = 0.5;
  merge->add_option("--rounds", rounds_path, "annotation rounds JSONL")->required();
  merge->add_option("--min-support", min_support, "agreement threshold (default 0.5)");
  merge->add_option("--out", merge_out, "merged JSONL path")->required();

  // a2v
  CLI::App* a2v_cmd = app.add_subcommand("a2v", "activity embedding assembly");
  CLI::App* embed = a2v_cmd->add_subcommand("embed", "assemble one activity embedding");
  std::string table_path, probs_path, visual_path, embed_out;
  embed->add_option("--table", table_path, "token embedding TSV")->required();
  embed->add_option("--probs", probs_path, "part state probabilities JSON")->required();
  embed->add_option("--visual", visual_path, "per-part visual features JSON")->required();
  embed->add_option("--out", embed_out, "output JSON (stdout when omitted)");

  // reason
  CLI::App* reason = app.add_subcommand("reason", "activity scoring and evaluation");
  CLI::App* eval = reason->add_subcommand("eval", "mAP / Few@i evaluation");
  std::string scores_path, counts_path, eval_out;
  eval->add_option("--scores", scores_path, "scored instances JSONL")->required();
  eval->add_option("--counts", counts_path, "per-activity train counts CSV");
  eval->add_option("--out", eval_out, "JSON report path");

  // graph
  CLI::App* graph_cmd = app.add_subcommand("graph", "knowledge graph construction");
  CLI::App* build = graph_cmd->add_subcommand("build", "build the activity/part-state graph");
  std::string instances_path, weighting = "frequency", graph_out;
  build->add_option("--instances", instances_path, "person instances JSONL")->required();
  build->add_option("--weighting", weighting, "frequency|npmi")
      ->check(CLI::IsMember({"frequency", "npmi"}));
  build->add_option("--out", graph_out, "graph JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return run_analogy_generate(gen_args);
    if (train->parsed()) return run_analogy_train(train_args, paradigm);
    if (compare->parsed()) return run_analogy_compare(cmp_args);
    if (select->parsed()) return run_npmi_select(counts, marginals, k, npmi_out);
    if (merge->parsed()) return run_annotate_merge(rounds_path, min_support, merge_out);
    if (embed->parsed()) return run_a2v_embed(table_path, probs_path, visual_path, embed_out);
    if (eval->parsed()) return run_reason_eval(scores_path, counts_path, eval_out);
    if (build->parsed()) return run_graph_build(instances_path, weighting, graph_out);
  } catch (const hake::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}
