#pragma once

// The assessment report: one flat document that renders to JSON (validated
// against schemas/report.schema.json) and to a plain-text report organised
// as clinical judgment, visual evidence and quantitative evidence.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curecheck/receus.hpp"

namespace curecheck {

struct ModelTableEntry {
  std::string family;
  bool cure = false;
  int k = 0;
  std::optional<double> log_likelihood;  // absent when the spec could not be fitted
  std::optional<double> aic;
  bool converged = false;
  bool selected = false;
  std::vector<std::string> parameter_names;
  std::vector<double> estimates;
  std::string diagnostic;

  friend bool operator==(const ModelTableEntry&, const ModelTableEntry&) = default;
};

struct ReportConfigEcho {
  std::vector<std::string> families;
  double cure_fraction_threshold = 0.025;
  double r_threshold = 0.05;
  double alpha_threshold = 0.05;
  std::optional<double> tau;
  std::optional<double> late_window;
  std::optional<double> restrict_at;
  double time_scale = 1.0;

  friend bool operator==(const ReportConfigEcho&, const ReportConfigEcho&) = default;
};

struct ReportDocument {
  std::string tool_version;
  std::string dataset;
  std::string time_unit;

  // Follow-up summary
  std::size_t n = 0;
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
  double median_followup = 0.0;
  double max_followup = 0.0;
  std::optional<double> max_event_time;
  double km_at_max = 1.0;

  // Visual evidence
  double plateau_length = 0.0;
  double late_window = 0.0;
  double late_event_rate = 0.0;
  double overall_event_rate = 0.0;
  bool plateau_observed = false;
  bool late_rate_below_overall = false;

  // Nonparametric cure evidence
  double p_hat = 1.0;
  double cure_fraction_hat = 0.0;

  // alpha_n sufficient-follow-up test
  double alpha_n = 1.0;
  std::size_t alpha_n_count = 0;
  double alpha_interval_lower = 0.0;
  double alpha_interval_upper = 0.0;
  double alpha_threshold = 0.05;
  bool alpha_sufficient_followup = false;

  // Model selection and ratio check
  std::vector<ModelTableEntry> model_table;
  std::string selected_model;
  bool cure_model_selected = false;
  bool selection_substituted = false;
  std::optional<std::string> cure_model;
  double tau = 0.0;
  double cure_fraction = 0.0;
  double s0_at_tau = 1.0;
  double s_at_tau = 1.0;
  double r_hat = 1.0;
  bool cure_fraction_pass = false;
  bool r_pass = false;
  std::string verdict;
  std::vector<std::string> notes;

  ReportConfigEcho config;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

ReportDocument make_report(const CureAssessment& assessment, const AssessmentConfig& config,
                           const std::string& dataset, const std::string& time_unit,
                           double time_scale = 1.0, std::optional<double> restrict_at = std::nullopt);

nlohmann::json report_to_json(const ReportDocument& doc);
ReportDocument report_from_json(const nlohmann::json& j);

std::string render_text_report(const ReportDocument& doc);

// Process exit status for an assessment: 0 appropriate, 2 not appropriate.
// Execution errors map to 1 at the call site.
int exit_code(Verdict verdict);

}  // namespace curecheck
