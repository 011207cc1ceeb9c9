#include "curecheck/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace curecheck {

using nlohmann::json;

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

std::optional<double> finite_or_absent(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("NA"); }

}  // namespace

ReportDocument make_report(const CureAssessment& a, const AssessmentConfig& config, const std::string& dataset,
                           const std::string& time_unit, double time_scale, std::optional<double> restrict_at) {
  ReportDocument d;
  d.tool_version = CURECHECK_VERSION;
  d.dataset = dataset;
  d.time_unit = time_unit;

  const auto& s = a.summary;
  d.n = s.n;
  d.n_events = s.n_events;
  d.n_censored = s.n - s.n_events;
  d.median_followup = s.median_followup;
  d.max_followup = s.max_followup;
  d.max_event_time = s.max_event_time;
  d.km_at_max = s.km_at_max;
  d.plateau_length = s.plateau_length;
  d.late_window = s.late_window;
  d.late_event_rate = s.late_event_rate;
  d.overall_event_rate = s.max_followup > 0.0 ? static_cast<double>(s.n_events) / s.max_followup : 0.0;
  d.plateau_observed = s.plateau_length > 0.0 && s.km_at_max > 0.0;
  d.late_rate_below_overall = d.late_event_rate < d.overall_event_rate;

  d.p_hat = a.nonparametric.p_hat;
  d.cure_fraction_hat = a.nonparametric.cure_fraction_hat;

  const auto& t = a.followup_test;
  d.alpha_n = t.alpha_n;
  d.alpha_n_count = t.n_n;
  d.alpha_interval_lower = t.interval_lower;
  d.alpha_interval_upper = t.interval_upper;
  d.alpha_threshold = t.threshold;
  d.alpha_sufficient_followup = t.sufficient_followup;

  for (std::size_t i = 0; i < a.selection.fits.size(); ++i) {
    const auto& f = a.selection.fits[i];
    ModelTableEntry e;
    e.family = std::string(family_name(f.spec.family));
    e.cure = f.spec.cure;
    e.k = f.k;
    e.log_likelihood = finite_or_absent(f.log_likelihood);
    e.aic = finite_or_absent(f.aic);
    e.converged = f.converged;
    e.selected = i == a.selection.selected;
    if (!f.params.latency.empty()) {
      e.parameter_names = parameter_names(f.spec);
      e.estimates = parameter_values(f.spec, f.params);
    }
    e.diagnostic = f.diagnostic;
    d.model_table.push_back(std::move(e));
  }
  d.selected_model = a.selection.best().spec.label();
  d.cure_model_selected = a.cure_model_selected;
  d.selection_substituted = a.selection.substituted;
  if (a.cure_fit) d.cure_model = a.cure_fit->spec.label();
  d.tau = a.tau;
  d.cure_fraction = a.cure_fraction;
  d.s0_at_tau = a.s0_at_tau;
  d.s_at_tau = a.s_at_tau;
  d.r_hat = a.r_hat;
  d.cure_fraction_pass = a.cure_fraction_pass;
  d.r_pass = a.r_pass;
  d.verdict = std::string(verdict_name(a.verdict));
  d.notes = a.notes;

  for (Family f : config.families) d.config.families.emplace_back(family_name(f));
  d.config.cure_fraction_threshold = config.cure_fraction_threshold;
  d.config.r_threshold = config.r_threshold;
  d.config.alpha_threshold = config.alpha_threshold;
  d.config.tau = config.tau;
  d.config.late_window = config.late_window;
  d.config.restrict_at = restrict_at;
  d.config.time_scale = time_scale;
  return d;
}

json report_to_json(const ReportDocument& d) {
  json table = json::array();
  for (const auto& e : d.model_table) {
    json params = json::array();
    for (std::size_t i = 0; i < e.parameter_names.size(); ++i) {
      params.push_back({{"name", e.parameter_names[i]}, {"estimate", e.estimates[i]}});
    }
    table.push_back({{"family", e.family},
                     {"cure", e.cure},
                     {"k", e.k},
                     {"log_likelihood", optional_json(e.log_likelihood)},
                     {"aic", optional_json(e.aic)},
                     {"converged", e.converged},
                     {"selected", e.selected},
                     {"parameters", params},
                     {"diagnostic", e.diagnostic}});
  }
  return {
      {"tool", {{"name", "curecheck"}, {"version", d.tool_version}}},
      {"dataset", d.dataset},
      {"time_unit", d.time_unit},
      {"followup",
       {{"n", d.n},
        {"n_events", d.n_events},
        {"n_censored", d.n_censored},
        {"median_followup", d.median_followup},
        {"max_followup", d.max_followup},
        {"max_event_time", optional_json(d.max_event_time)},
        {"km_at_max", d.km_at_max}}},
      {"visual_evidence",
       {{"plateau_length", d.plateau_length},
        {"late_window", d.late_window},
        {"late_event_rate", d.late_event_rate},
        {"overall_event_rate", d.overall_event_rate},
        {"plateau_observed", d.plateau_observed},
        {"late_rate_below_overall", d.late_rate_below_overall}}},
      {"nonparametric", {{"p_hat", d.p_hat}, {"cure_fraction_hat", d.cure_fraction_hat}}},
      {"alpha_n_test",
       {{"statistic", d.alpha_n},
        {"n_n", d.alpha_n_count},
        {"interval_lower", d.alpha_interval_lower},
        {"interval_upper", d.alpha_interval_upper},
        {"threshold", d.alpha_threshold},
        {"sufficient_followup", d.alpha_sufficient_followup}}},
      {"model_table", table},
      {"selection",
       {{"selected_model", d.selected_model},
        {"cure_model_selected", d.cure_model_selected},
        {"substituted", d.selection_substituted}}},
      {"receus",
       {{"cure_model", optional_json(d.cure_model)},
        {"tau", d.tau},
        {"cure_fraction", d.cure_fraction},
        {"s0_at_tau", d.s0_at_tau},
        {"s_at_tau", d.s_at_tau},
        {"r_hat", d.r_hat},
        {"cure_fraction_pass", d.cure_fraction_pass},
        {"r_pass", d.r_pass}}},
      {"verdict", d.verdict},
      {"notes", d.notes},
      {"config",
       {{"families", d.config.families},
        {"cure_fraction_threshold", d.config.cure_fraction_threshold},
        {"r_threshold", d.config.r_threshold},
        {"alpha_threshold", d.config.alpha_threshold},
        {"tau", optional_json(d.config.tau)},
        {"late_window", optional_json(d.config.late_window)},
        {"restrict", optional_json(d.config.restrict_at)},
        {"time_scale", d.config.time_scale}}},
  };
}

ReportDocument report_from_json(const json& j) {
  ReportDocument d;
  d.tool_version = j.at("tool").at("version").get<std::string>();
  d.dataset = j.at("dataset").get<std::string>();
  d.time_unit = j.at("time_unit").get<std::string>();

  const auto& f = j.at("followup");
  d.n = f.at("n").get<std::size_t>();
  d.n_events = f.at("n_events").get<std::size_t>();
  d.n_censored = f.at("n_censored").get<std::size_t>();
  d.median_followup = f.at("median_followup").get<double>();
  d.max_followup = f.at("max_followup").get<double>();
  d.max_event_time = optional_from<double>(f.at("max_event_time"));
  d.km_at_max = f.at("km_at_max").get<double>();

  const auto& v = j.at("visual_evidence");
  d.plateau_length = v.at("plateau_length").get<double>();
  d.late_window = v.at("late_window").get<double>();
  d.late_event_rate = v.at("late_event_rate").get<double>();
  d.overall_event_rate = v.at("overall_event_rate").get<double>();
  d.plateau_observed = v.at("plateau_observed").get<bool>();
  d.late_rate_below_overall = v.at("late_rate_below_overall").get<bool>();

  d.p_hat = j.at("nonparametric").at("p_hat").get<double>();
  d.cure_fraction_hat = j.at("nonparametric").at("cure_fraction_hat").get<double>();

  const auto& t = j.at("alpha_n_test");
  d.alpha_n = t.at("statistic").get<double>();
  d.alpha_n_count = t.at("n_n").get<std::size_t>();
  d.alpha_interval_lower = t.at("interval_lower").get<double>();
  d.alpha_interval_upper = t.at("interval_upper").get<double>();
  d.alpha_threshold = t.at("threshold").get<double>();
  d.alpha_sufficient_followup = t.at("sufficient_followup").get<bool>();

  for (const auto& row : j.at("model_table")) {
    ModelTableEntry e;
    e.family = row.at("family").get<std::string>();
    e.cure = row.at("cure").get<bool>();
    e.k = row.at("k").get<int>();
    e.log_likelihood = optional_from<double>(row.at("log_likelihood"));
    e.aic = optional_from<double>(row.at("aic"));
    e.converged = row.at("converged").get<bool>();
    e.selected = row.at("selected").get<bool>();
    for (const auto& p : row.at("parameters")) {
      e.parameter_names.push_back(p.at("name").get<std::string>());
      e.estimates.push_back(p.at("estimate").get<double>());
    }
    e.diagnostic = row.at("diagnostic").get<std::string>();
    d.model_table.push_back(std::move(e));
  }

  const auto& s = j.at("selection");
  d.selected_model = s.at("selected_model").get<std::string>();
  d.cure_model_selected = s.at("cure_model_selected").get<bool>();
  d.selection_substituted = s.at("substituted").get<bool>();

  const auto& r = j.at("receus");
  d.cure_model = optional_from<std::string>(r.at("cure_model"));
  d.tau = r.at("tau").get<double>();
  d.cure_fraction = r.at("cure_fraction").get<double>();
  d.s0_at_tau = r.at("s0_at_tau").get<double>();
  d.s_at_tau = r.at("s_at_tau").get<double>();
  d.r_hat = r.at("r_hat").get<double>();
  d.cure_fraction_pass = r.at("cure_fraction_pass").get<bool>();
  d.r_pass = r.at("r_pass").get<bool>();
  d.verdict = j.at("verdict").get<std::string>();
  d.notes = j.at("notes").get<std::vector<std::string>>();

  const auto& c = j.at("config");
  d.config.families = c.at("families").get<std::vector<std::string>>();
  d.config.cure_fraction_threshold = c.at("cure_fraction_threshold").get<double>();
  d.config.r_threshold = c.at("r_threshold").get<double>();
  d.config.alpha_threshold = c.at("alpha_threshold").get<double>();
  d.config.tau = optional_from<double>(c.at("tau"));
  d.config.late_window = optional_from<double>(c.at("late_window"));
  d.config.restrict_at = optional_from<double>(c.at("restrict"));
  d.config.time_scale = c.at("time_scale").get<double>();
  return d;
}

std::string render_text_report(const ReportDocument& d) {
  const std::string unit = d.time_unit.empty() ? "" : " " + d.time_unit;
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };

  line(fmt::format("Cure model appropriateness: {}", d.dataset));
  line(fmt::format("curecheck {}", d.tool_version));
  line("");
  line("Step 1: Clinical judgment");
  line("  Not computed. Confirm with clinical experts that a cured or long-term");
  line("  event-free subpopulation is plausible for this endpoint and population,");
  line("  and what late failures would look like, before relying on Steps 2-3.");
  line("");
  line("Step 2: Visual evidence");
  line(fmt::format("  n = {}, events = {}, censored = {}", d.n, d.n_events, d.n_censored));
  line(fmt::format("  median follow-up          {}{}", num(d.median_followup), unit));
  line(fmt::format("  maximum follow-up         {}{}", num(d.max_followup), unit));
  line(fmt::format("  last event time           {}{}", num(d.max_event_time), unit));
  line(fmt::format("  KM at maximum follow-up   {}", num(d.km_at_max)));
  line(fmt::format("  plateau length            {}{}{}", num(d.plateau_length), unit,
                   d.plateau_observed ? "" : "  (no plateau)"));
  line(fmt::format("  late event rate           {} per unit time over the last {}{} (overall {})",
                   num(d.late_event_rate), num(d.late_window), unit, num(d.overall_event_rate)));
  line("");
  line("Step 3: Quantitative evidence");
  line(fmt::format("  Nonparametric uncured probability p_hat = {} (cure fraction {})", num(d.p_hat),
                   num(d.cure_fraction_hat)));
  line(fmt::format("  alpha_n sufficient follow-up test: alpha_n = {}, N_n = {} in ({}, {}], threshold {} -> {}",
                   num(d.alpha_n), d.alpha_n_count, num(d.alpha_interval_lower), num(d.alpha_interval_upper),
                   num(d.alpha_threshold), d.alpha_sufficient_followup ? "sufficient" : "insufficient"));
  line("");
  line("  Model                      k   log-lik        AIC   converged");
  for (const auto& e : d.model_table) {
    const std::string label = fmt::format("{} {}", e.family, e.cure ? "cure" : "non-cure");
    line(fmt::format("  {:<24} {:>3} {:>9} {:>10}   {}{}", label, e.k, num(e.log_likelihood), num(e.aic),
                     e.converged ? "yes" : "no", e.selected ? "   <- lowest AIC" : ""));
  }
  line("");
  if (d.cure_model) {
    line(fmt::format("  Ratio check ({}{})", *d.cure_model, d.cure_model_selected ? "" : ", not selected"));
    line(fmt::format("    tau                     {}{}", num(d.tau), unit));
    line(fmt::format("    cure fraction           {}  (> {}: {})", num(d.cure_fraction),
                     num(d.config.cure_fraction_threshold), d.cure_fraction_pass ? "pass" : "fail"));
    line(fmt::format("    S0(tau)                 {}", num(d.s0_at_tau)));
    line(fmt::format("    S(tau)                  {}", num(d.s_at_tau)));
    line(fmt::format("    r_hat = S0/S            {}  (< {}: {})", num(d.r_hat), num(d.config.r_threshold),
                     d.r_pass ? "pass" : "fail"));
  } else {
    line("  Ratio check: no converged cure model");
  }
  line("");
  line(fmt::format("Verdict: {}", d.verdict));
  for (const auto& n : d.notes) line(fmt::format("  note: {}", n));
  return out;
}

int exit_code(Verdict verdict) { return verdict == Verdict::appropriate ? 0 : 2; }

}  // namespace curecheck
