#pragma once

// CSV ingestion and export, Kaplan-Meier plot emission and ground-truth
// export for simulated samples.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "curecheck/simulate.hpp"
#include "curecheck/survival.hpp"

namespace curecheck {

struct CsvOptions {
  std::string time_col = "time";
  std::string event_col = "event";
  double time_scale = 1.0;  // observed times are divided by this
  std::string time_unit;
};

// Event cells accept 0/1/true/false (any case). Errors name the line and
// column of the offending cell.
SurvivalSample read_csv(std::istream& in, const CsvOptions& options = {});
SurvivalSample read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Times are written with 17 significant digits so they read back exactly.
void write_csv(std::ostream& out, const SurvivalSample& sample, const std::string& time_col = "time",
               const std::string& event_col = "event");
void write_csv(const std::filesystem::path& path, const SurvivalSample& sample,
               const std::string& time_col = "time", const std::string& event_col = "event");

enum class PlotFormat { svg, csv };
PlotFormat parse_plot_format(const std::string& name);

// One row per step plus a leading t = 0 row.
std::string render_km_csv(const KaplanMeierCurve& curve);
// Right-continuous step line with axes and a tick at every censoring time.
// Output depends only on the inputs.
std::string render_km_svg(const KaplanMeierCurve& curve, std::span<const double> censor_times = {},
                          const std::string& title = "Kaplan-Meier estimate");

void emit_km_plot(const KaplanMeierCurve& curve, const std::filesystem::path& path, PlotFormat format,
                  std::span<const double> censor_times = {});

std::vector<double> censor_times(const SurvivalSample& sample);

nlohmann::json truth_to_json(const SimulationTruth& truth);

}  // namespace curecheck
