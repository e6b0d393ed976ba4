#pragma once

#include <string>
#include <vector>

#include "hake/analogy/experiment.hpp"

namespace hake {

inline constexpr int kReportSchemaVersion = 1;

/// Strict JSON decoding of an experiment config: unknown keys are rejected,
/// absent keys fall back to defaults.
analogy::ExperimentConfig experiment_config_from_json_text(const std::string& text);
analogy::ExperimentConfig load_experiment_config(const std::string& path);

/// Stable, re-ingestable config echo.
std::string experiment_config_to_json_text(const analogy::ExperimentConfig& config);

/// Comparison report JSON (schema_version, config echo, accuracies, gain).
std::string compare_report_to_json_text(const analogy::CompareReport& report);

/// Plain-text comparison table.
std::string compare_report_to_table(const analogy::CompareReport& report);

/// step,samples_seen,loss rows.
void write_curve_csv(const std::vector<net::CurvePoint>& curve, const std::string& path);

}  // namespace hake
