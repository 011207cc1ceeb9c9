// curecheck: does a right-censored dataset support a mixture cure model?
//
//   curecheck assess data.csv --time-scale 365.25 --format json
//   curecheck fit data.csv --families weibull,gamma
//   curecheck km data.csv --plot svg --plot-out km.svg
//   curecheck simulate --n 500 --cure-fraction 0.4 --family weibull --params 0.8,0.8
//       --censoring composite:7.3,30 --seed 7 --output sim.csv --truth sim.json
//   curecheck restrict data.csv --restrict 1.0 --output cut.csv
//
// Exit status: 0 appropriate (or success for non-assessing commands),
// 2 not appropriate, 1 on any error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "curecheck/errors.hpp"
#include "curecheck/io.hpp"
#include "curecheck/receus.hpp"
#include "curecheck/report.hpp"
#include "curecheck/simulate.hpp"

using namespace curecheck;
using nlohmann::json;

namespace {

struct InputArgs {
  std::string path;
  std::string time_col = "time";
  std::string event_col = "event";
  double time_scale = 1.0;
  std::string time_unit;
  std::string label;
};

void add_input(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("input", in.path, "CSV file with one row per subject")->required()->check(CLI::ExistingFile);
  cmd->add_option("--time-col", in.time_col, "Name of the time column")->capture_default_str();
  cmd->add_option("--event-col", in.event_col, "Name of the event indicator column (1 event, 0 censored)")
      ->capture_default_str();
  cmd->add_option("--time-scale", in.time_scale, "Divide observed times by this (365.25 for days to years)")
      ->capture_default_str();
  cmd->add_option("--time-unit", in.time_unit, "Unit label for times after scaling");
  cmd->add_option("--label", in.label, "Dataset label for reports (defaults to the file name)");
}

SurvivalSample load(const InputArgs& in) {
  return read_csv(std::filesystem::path(in.path), {in.time_col, in.event_col, in.time_scale, in.time_unit});
}

std::vector<Family> parse_families(const std::string& list) {
  std::vector<Family> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_family(item));
  }
  if (out.empty()) throw ValidationError("--families is empty");
  return out;
}

std::vector<double> parse_numbers(const std::string& list, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("{}: cannot parse '{}' as a number", what, item));
    }
  }
  return out;
}

// administrative:T | uniform:MAX | exponential:RATE | composite:T,MAX
Censoring parse_censoring(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError(fmt::format("censoring '{}' should look like kind:value", text));
  }
  const auto kind = text.substr(0, colon);
  const auto v = parse_numbers(text.substr(colon + 1), "--censoring");
  const auto want = [&](std::size_t n) {
    if (v.size() != n) throw ValidationError(fmt::format("censoring '{}' expects {} value(s)", kind, n));
  };
  if (kind == "administrative" || kind == "admin") {
    want(1);
    return Censoring::administrative(v[0]);
  }
  if (kind == "uniform") {
    want(1);
    return Censoring::uniform(v[0]);
  }
  if (kind == "exponential" || kind == "exp") {
    want(1);
    return Censoring::exponential(v[0]);
  }
  if (kind == "composite") {
    want(2);
    return Censoring::composite(v[0], v[1]);
  }
  throw ValidationError(fmt::format("unknown censoring kind '{}'", kind));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
  out << text;
}

std::string dataset_label(const InputArgs& in) {
  return in.label.empty() ? std::filesystem::path(in.path).filename().string() : in.label;
}

json fit_to_json(const ModelFit& fit) {
  json params = json::array();
  const auto names = parameter_names(fit.spec);
  const auto values = fit.params.latency.empty() ? std::vector<double>{} : parameter_values(fit.spec, fit.params);
  const auto ci = wald_intervals(fit);
  for (std::size_t i = 0; i < values.size(); ++i) {
    json p = {{"name", names[i]}, {"estimate", values[i]}, {"lower", nullptr}, {"upper", nullptr}};
    if (ci) {
      p["lower"] = (*ci)[i].lower;
      p["upper"] = (*ci)[i].upper;
    }
    params.push_back(p);
  }
  const auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"model", fit.spec.label()},
          {"k", fit.k},
          {"log_likelihood", finite(fit.log_likelihood)},
          {"aic", finite(fit.aic)},
          {"converged", fit.converged},
          {"iterations", fit.iterations},
          {"parameters", params},
          {"diagnostic", fit.diagnostic}};
}

std::string fit_to_text(const ModelFit& fit, bool selected) {
  std::string s = fmt::format("{}{}\n  k = {}, log-likelihood = {:.6g}, AIC = {:.6g}, converged = {}\n",
                              fit.spec.label(), selected ? "  (lowest AIC)" : "", fit.k, fit.log_likelihood,
                              fit.aic, fit.converged ? "yes" : "no");
  if (fit.params.latency.empty()) return s + fmt::format("  not fitted: {}\n", fit.diagnostic);
  const auto names = parameter_names(fit.spec);
  const auto values = parameter_values(fit.spec, fit.params);
  const auto ci = wald_intervals(fit);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (ci) {
      s += fmt::format("  {:<14} {:>12.6g}   95% CI [{:.6g}, {:.6g}]\n", names[i], values[i], (*ci)[i].lower,
                       (*ci)[i].upper);
    } else {
      s += fmt::format("  {:<14} {:>12.6g}\n", names[i], values[i]);
    }
  }
  if (!fit.diagnostic.empty()) s += fmt::format("  note: {}\n", fit.diagnostic);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assess whether a right-censored survival dataset supports a mixture cure model"};
  app.set_version_flag("--version", std::string(CURECHECK_VERSION));
  app.require_subcommand(1);

  // assess
  InputArgs assess_in;
  std::string families = "exponential,weibull,gamma,loglogistic,lognormal";
  std::optional<double> tau, late_window, restrict_at;
  double cure_threshold = 0.025, r_threshold = 0.05, alpha_threshold = 0.05;
  std::string format = "text", plot, plot_out, output;

  auto* assess = app.add_subcommand("assess", "Run the full cure-model appropriateness assessment");
  add_input(assess, assess_in);
  assess->add_option("--families", families, "Comma-separated latency families to fit")->capture_default_str();
  assess->add_option("--tau", tau, "Time at which the ratio check is evaluated (default: maximum follow-up)");
  assess->add_option("--cure-threshold", cure_threshold, "Minimum cure fraction")->capture_default_str();
  assess->add_option("--r-threshold", r_threshold, "Maximum share of uncured among survivors at tau")
      ->capture_default_str();
  assess->add_option("--alpha-threshold", alpha_threshold, "Level for the alpha_n follow-up test")
      ->capture_default_str();
  assess->add_option("--late-window", late_window, "Window for the late event rate (default: 20% of follow-up)");
  assess->add_option("--restrict", restrict_at, "Censor all follow-up at this time before assessing");
  assess->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  assess->add_option("--plot", plot, "Also write the Kaplan-Meier curve")->check(CLI::IsMember({"svg", "csv"}));
  assess->add_option("--plot-out", plot_out, "Plot path (default: km.svg or km.csv)");
  assess->add_option("-o,--output", output, "Write the report here instead of stdout");

  // fit
  InputArgs fit_in;
  std::string fit_families = families, fit_format = "text";
  auto* fit = app.add_subcommand("fit", "Fit cure and non-cure models and print the AIC table");
  add_input(fit, fit_in);
  fit->add_option("--families", fit_families, "Comma-separated latency families to fit")->capture_default_str();
  fit->add_option("--format", fit_format, "Output format")->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // km
  InputArgs km_in;
  std::string km_plot = "csv", km_out;
  auto* km = app.add_subcommand("km", "Kaplan-Meier curve as step coordinates or an SVG plot");
  add_input(km, km_in);
  km->add_option("--plot", km_plot, "Output format")->check(CLI::IsMember({"svg", "csv"}))->capture_default_str();
  km->add_option("--plot-out,-o,--output", km_out, "Output path (default: stdout)");

  // simulate
  SimulationConfig sim;
  std::string sim_family = "weibull", sim_params = "1,1", sim_censoring = "administrative:1", sim_out, sim_truth;
  auto* simulate = app.add_subcommand("simulate", "Draw a mixture cure sample with known ground truth");
  simulate->add_option("--n", sim.n, "Number of subjects")->capture_default_str();
  simulate->add_option("--cure-fraction", sim.cure_fraction, "Probability of being cured")->capture_default_str();
  simulate->add_option("--family", sim_family, "Latency family")->capture_default_str();
  simulate->add_option("--params", sim_params, "Comma-separated latency parameters")->capture_default_str();
  simulate->add_option("--censoring", sim_censoring,
                       "administrative:T, uniform:MAX, exponential:RATE or composite:T,MAX")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--time-unit", sim.time_unit, "Unit label")->capture_default_str();
  simulate->add_option("-o,--output", sim_out, "CSV output path (default: stdout)");
  simulate->add_option("--truth", sim_truth, "Write the generating parameters and counts as JSON");

  // restrict
  InputArgs restrict_in;
  double cutoff = 0.0;
  std::string restrict_out;
  auto* restrict = app.add_subcommand("restrict", "Censor all follow-up at a cutoff time");
  add_input(restrict, restrict_in);
  restrict->add_option("--restrict,--cutoff", cutoff, "Cutoff time (after scaling)")->required();
  restrict->add_option("-o,--output", restrict_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*assess) {
      auto sample = load(assess_in);
      if (restrict_at) sample = restrict_followup(sample, *restrict_at);
      AssessmentConfig config;
      config.families = parse_families(families);
      config.cure_fraction_threshold = cure_threshold;
      config.r_threshold = r_threshold;
      config.alpha_threshold = alpha_threshold;
      config.tau = tau;
      config.late_window = late_window;
      const auto result = receus_assess(sample, config);
      const auto doc = make_report(result, config, dataset_label(assess_in), sample.time_unit(),
                                   assess_in.time_scale, restrict_at);
      write_text(output, format == "json" ? report_to_json(doc).dump(2) + "\n" : render_text_report(doc));
      if (!plot.empty()) {
        const auto fmt_ = parse_plot_format(plot);
        const auto path = plot_out.empty() ? "km." + plot : plot_out;
        emit_km_plot(kaplan_meier(sample), path, fmt_, censor_times(sample));
      }
      return exit_code(result.verdict);
    }
    if (*fit) {
      const auto sample = load(fit_in);
      const auto selection = select_model_by_aic(sample, parse_families(fit_families));
      if (fit_format == "json") {
        json rows = json::array();
        for (const auto& f : selection.fits) rows.push_back(fit_to_json(f));
        json out = {{"dataset", dataset_label(fit_in)},
                    {"selected_model", selection.best().spec.label()},
                    {"substituted", selection.substituted},
                    {"models", rows}};
        std::cout << out.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < selection.fits.size(); ++i) {
          std::cout << fit_to_text(selection.fits[i], i == selection.selected) << "\n";
        }
        if (!selection.note.empty()) std::cout << "note: " << selection.note << "\n";
      }
      return 0;
    }
    if (*km) {
      const auto sample = load(km_in);
      const auto curve = kaplan_meier(sample);
      const auto ticks = censor_times(sample);
      if (km_out.empty() || km_out == "-") {
        std::cout << (parse_plot_format(km_plot) == PlotFormat::svg ? render_km_svg(curve, ticks)
                                                                    : render_km_csv(curve));
      } else {
        emit_km_plot(curve, km_out, parse_plot_format(km_plot), ticks);
      }
      return 0;
    }
    if (*simulate) {
      sim.family = parse_family(sim_family);
      sim.latency = parse_numbers(sim_params, "--params");
      sim.censoring = parse_censoring(sim_censoring);
      const auto drawn = simulate_mixture(sim);
      std::ostringstream csv;
      write_csv(csv, drawn.sample);
      write_text(sim_out, csv.str());
      if (!sim_truth.empty()) write_text(sim_truth, truth_to_json(drawn.truth).dump(2) + "\n");
      return 0;
    }
    if (*restrict) {
      const auto cut = restrict_followup(load(restrict_in), cutoff);
      std::ostringstream csv;
      write_csv(csv, cut, restrict_in.time_col, restrict_in.event_col);
      write_text(restrict_out, csv.str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
