#include "curecheck/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "curecheck/errors.hpp"

namespace curecheck {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_time(const std::string& cell, std::size_t line, const std::string& col) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError(fmt::format("line {}, column '{}': cannot parse time '{}'", line, col, cell));
  }
  return v;
}

bool parse_event(const std::string& cell, std::size_t line, const std::string& col) {
  const auto v = lower(cell);
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw ValidationError(
      fmt::format("line {}, column '{}': event value '{}' is not one of 0, 1, true, false", line, col, cell));
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError(fmt::format("missing column '{}'", name));
  return static_cast<std::size_t>(it - header.begin());
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

}  // namespace

SurvivalSample read_csv(std::istream& in, const CsvOptions& options) {
  if (!(options.time_scale > 0.0) || !std::isfinite(options.time_scale)) {
    throw ValidationError("time scale must be positive");
  }
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split(line);
  }
  if (header.empty()) throw ValidationError("empty file: no header row");
  const auto tcol = column_index(header, options.time_col);
  const auto ecol = column_index(header, options.event_col);

  std::vector<Observation> raw;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ValidationError(fmt::format("line {}: expected {} cells, found {}", line_no, header.size(),
                                        cells.size()));
    }
    const double t = parse_time(cells[tcol], line_no, options.time_col);
    const bool e = parse_event(cells[ecol], line_no, options.event_col);
    raw.push_back({t / options.time_scale, e});
  }
  if (raw.empty()) throw ValidationError("empty file: no data rows");
  return SurvivalSample::validate(std::move(raw), options.time_unit);
}

SurvivalSample read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const SurvivalSample& sample, const std::string& time_col,
               const std::string& event_col) {
  out << time_col << ',' << event_col << '\n';
  for (const auto& r : sample.records()) out << fmt::format("{:.17g},{}\n", r.time, r.event ? 1 : 0);
}

void write_csv(const std::filesystem::path& path, const SurvivalSample& sample, const std::string& time_col,
               const std::string& event_col) {
  auto out = open_out(path);
  write_csv(out, sample, time_col, event_col);
}

PlotFormat parse_plot_format(const std::string& name) {
  if (name == "svg") return PlotFormat::svg;
  if (name == "csv") return PlotFormat::csv;
  throw ValidationError(fmt::format("unknown plot format '{}' (expected svg or csv)", name));
}

std::string render_km_csv(const KaplanMeierCurve& curve) {
  std::string s = "time,survival,n_at_risk,n_events\n";
  s += fmt::format("0,1,{},0\n", curve.n_total);
  for (const auto& st : curve.steps) {
    s += fmt::format("{:.17g},{:.17g},{},{}\n", st.time, st.survival, st.n_at_risk, st.n_events);
  }
  return s;
}

std::string render_km_svg(const KaplanMeierCurve& curve, std::span<const double> censor_times,
                          const std::string& title) {
  constexpr double width = 640, height = 420;
  constexpr double left = 60, right = 610, top = 40, bottom = 370;

  double x_max = curve.steps.empty() ? 0.0 : curve.steps.back().time;
  for (double t : censor_times) x_max = std::max(x_max, t);
  if (!(x_max > 0.0)) x_max = 1.0;

  const auto px = [&](double t) { return left + t / x_max * (right - left); };
  const auto py = [&](double s) { return bottom - s * (bottom - top); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} "
      "{:.0f}\">\n",
      width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     0.5 * (left + right), title);

  // axes
  svg += fmt::format("<g stroke=\"black\" stroke-width=\"1\">\n<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" "
                     "y2=\"{1:.2f}\"/>\n<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{3:.2f}\"/>\n",
                     left, bottom, right, top);
  for (int i = 0; i <= 5; ++i) {
    const double x = px(x_max * i / 5.0);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", x, bottom,
                       bottom + 5);
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = py(i / 4.0);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", left - 5, y, left);
  }
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                       px(x_max * i / 5.0), bottom + 18, x_max * i / 5.0);
  }
  for (int i = 0; i <= 4; ++i) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 8,
                       py(i / 4.0) + 4, i / 4.0);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">time</text>\n", 0.5 * (left + right),
                     bottom + 40);
  svg += "</g>\n";

  std::string path = fmt::format("M{:.2f},{:.2f}", px(0.0), py(1.0));
  for (const auto& st : curve.steps) path += fmt::format(" H{:.2f} V{:.2f}", px(st.time), py(st.survival));
  path += fmt::format(" H{:.2f}", px(x_max));
  svg += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\"/>\n", path);

  if (!censor_times.empty()) {
    svg += "<g stroke=\"#1f4e79\" stroke-width=\"1\">\n";
    for (double t : censor_times) {
      const double y = py(km_survival_at(curve, t));
      svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", px(t), y - 4,
                         y + 4);
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_km_plot(const KaplanMeierCurve& curve, const std::filesystem::path& path, PlotFormat format,
                  std::span<const double> censor_times) {
  auto out = open_out(path);
  out << (format == PlotFormat::svg ? render_km_svg(curve, censor_times) : render_km_csv(curve));
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

std::vector<double> censor_times(const SurvivalSample& sample) {
  std::vector<double> out;
  for (const auto& r : sample.records()) {
    if (!r.event) out.push_back(r.time);
  }
  return out;
}

nlohmann::json truth_to_json(const SimulationTruth& truth) {
  const auto& c = truth.config;
  nlohmann::json censoring = {{"description", c.censoring.describe()}};
  switch (c.censoring.kind) {
    case Censoring::Kind::administrative:
      censoring["kind"] = "administrative";
      censoring["time"] = c.censoring.time;
      break;
    case Censoring::Kind::uniform:
      censoring["kind"] = "uniform";
      censoring["max"] = c.censoring.max;
      break;
    case Censoring::Kind::exponential:
      censoring["kind"] = "exponential";
      censoring["rate"] = c.censoring.rate;
      break;
    case Censoring::Kind::composite:
      censoring["kind"] = "composite";
      censoring["time"] = c.censoring.time;
      censoring["max"] = c.censoring.max;
      break;
  }
  nlohmann::json latency = nlohmann::json::object();
  const auto names = parameter_names({c.family, false});
  for (std::size_t i = 0; i < names.size(); ++i) latency[names[i]] = c.latency[i];
  return {
      {"n", c.n},
      {"cure_fraction", c.cure_fraction},
      {"family", std::string(family_name(c.family))},
      {"latency", latency},
      {"censoring", censoring},
      {"seed", c.seed},
      {"time_unit", c.time_unit},
      {"n_cured", truth.n_cured},
      {"n_events", truth.n_events},
      {"n_censored", truth.n_censored},
  };
}

}  // namespace curecheck
