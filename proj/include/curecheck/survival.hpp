#pragma once

// Right-censored survival data, the Kaplan-Meier product-limit estimator and
// the follow-up summary statistics that every downstream module reads.
//
// All types are immutable after construction.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace curecheck {

struct Observation {
  double time = 0.0;
  bool event = false;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// A validated sample stored in canonical order: ascending time, events
// before censorings at tied times.
class SurvivalSample {
 public:
  // Throws ValidationError naming the first offending row.
  static SurvivalSample validate(std::vector<Observation> raw, std::string time_unit = "");

  std::span<const Observation> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t n_events() const { return n_events_; }
  std::size_t n_censored() const { return records_.size() - n_events_; }
  const std::string& time_unit() const { return time_unit_; }

  double max_time() const { return records_.back().time; }
  // Largest uncensored time, absent when there are no events.
  std::optional<double> max_event_time() const;

  // Copy with every time multiplied by c > 0.
  SurvivalSample rescaled(double c) const;

  friend bool operator==(const SurvivalSample&, const SurvivalSample&) = default;

 private:
  SurvivalSample() = default;

  std::vector<Observation> records_;
  std::size_t n_events_ = 0;
  std::string time_unit_;
};

SurvivalSample validate_sample(std::vector<Observation> raw, std::string time_unit = "");

struct KmStep {
  double time = 0.0;
  std::size_t n_at_risk = 0;
  std::size_t n_events = 0;
  double survival = 1.0;
};

struct KaplanMeierCurve {
  std::vector<KmStep> steps;  // one per distinct event time
  std::size_t n_total = 0;
};

KaplanMeierCurve kaplan_meier(const SurvivalSample& sample);

// Right-continuous evaluation; 1 before the first step, last value after the
// last step.
double km_survival_at(const KaplanMeierCurve& curve, double t);

struct FollowUpSummary {
  std::size_t n = 0;
  std::size_t n_events = 0;
  double median_followup = 0.0;  // pooled over events and censorings
  double max_followup = 0.0;
  std::optional<double> max_event_time;
  double km_at_max = 1.0;
  double plateau_length = 0.0;
  double late_window = 0.0;
  double late_event_rate = 0.0;  // events per unit time in (max - window, max]
};

// late_window defaults to 20% of the maximum follow-up.
FollowUpSummary followup_summary(const SurvivalSample& sample,
                                 std::optional<double> late_window = std::nullopt);

}  // namespace curecheck
