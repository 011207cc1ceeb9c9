#include "curecheck/survival.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "curecheck/errors.hpp"

namespace curecheck {

namespace {

bool canonical_less(const Observation& a, const Observation& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.event && !b.event;
}

}  // namespace

SurvivalSample SurvivalSample::validate(std::vector<Observation> raw, std::string time_unit) {
  if (raw.empty()) throw ValidationError("empty sample: at least one record is required");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double t = raw[i].time;
    if (!std::isfinite(t)) throw ValidationError(fmt::format("non-finite time at row {}", i));
    if (t < 0.0) throw ValidationError(fmt::format("negative time at row {}", i));
  }
  std::stable_sort(raw.begin(), raw.end(), canonical_less);

  SurvivalSample s;
  s.n_events_ = static_cast<std::size_t>(
      std::count_if(raw.begin(), raw.end(), [](const Observation& o) { return o.event; }));
  s.records_ = std::move(raw);
  s.time_unit_ = std::move(time_unit);
  return s;
}

std::optional<double> SurvivalSample::max_event_time() const {
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->event) return it->time;
  }
  return std::nullopt;
}

SurvivalSample SurvivalSample::rescaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("rescale factor must be positive");
  SurvivalSample s = *this;
  for (auto& r : s.records_) r.time *= c;
  return s;
}

SurvivalSample validate_sample(std::vector<Observation> raw, std::string time_unit) {
  return SurvivalSample::validate(std::move(raw), std::move(time_unit));
}

KaplanMeierCurve kaplan_meier(const SurvivalSample& sample) {
  KaplanMeierCurve curve;
  const auto records = sample.records();
  curve.n_total = records.size();

  double survival = 1.0;
  std::size_t at_risk = records.size();
  std::size_t i = 0;
  while (i < records.size()) {
    const double t = records[i].time;
    std::size_t events = 0;
    std::size_t removed = 0;
    for (; i < records.size() && records[i].time == t; ++i) {
      if (records[i].event) ++events;
      ++removed;
    }
    if (events > 0) {
      survival *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
      curve.steps.push_back({t, at_risk, events, survival});
    }
    at_risk -= removed;
  }
  return curve;
}

double km_survival_at(const KaplanMeierCurve& curve, double t) {
  // First step strictly after t; the one before it (if any) is in effect.
  const auto it = std::upper_bound(curve.steps.begin(), curve.steps.end(), t,
                                   [](double v, const KmStep& s) { return v < s.time; });
  if (it == curve.steps.begin()) return 1.0;
  return std::prev(it)->survival;
}

FollowUpSummary followup_summary(const SurvivalSample& sample, std::optional<double> late_window) {
  FollowUpSummary out;
  const auto records = sample.records();
  out.n = records.size();
  out.n_events = sample.n_events();
  out.max_followup = sample.max_time();
  out.max_event_time = sample.max_event_time();

  const std::size_t mid = records.size() / 2;
  out.median_followup = records.size() % 2 == 1
                            ? records[mid].time
                            : 0.5 * (records[mid - 1].time + records[mid].time);

  out.km_at_max = km_survival_at(kaplan_meier(sample), out.max_followup);

  // With no events the curve is flat from time zero.
  if (records.back().event) {
    out.plateau_length = 0.0;
  } else {
    out.plateau_length = out.max_followup - out.max_event_time.value_or(0.0);
  }

  const double window = late_window.value_or(0.2 * out.max_followup);
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw ValidationError(fmt::format("late window must be positive (got {})", window));
  }
  out.late_window = window;
  const double lower = out.max_followup - window;
  std::size_t late_events = 0;
  for (const auto& r : records) {
    if (r.event && r.time > lower) ++late_events;
  }
  out.late_event_rate = static_cast<double>(late_events) / window;
  return out;
}

}  // namespace curecheck
