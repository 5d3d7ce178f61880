#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dosefind/beta.hpp"
#include "dosefind/isotonic.hpp"
#include "dosefind/monitoring.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

/// How the three interval masses are scored against each other. The
/// literal rule compares raw posterior mass; dividing each mass by its
/// interval length is the variant that reproduces the standard design's
/// monitoring table under the reference parameter set (see the equivalence
/// harness for the cell-level comparison of both).
enum class DecisionMetric { raw_mass, length_normalized };

/// Weights handed to the isotonic fit of the posterior means: the
/// posterior variance as written, or its inverse (the usual precision
/// weighting).
enum class WeightConvention { variance, inverse_variance };

/// Parameters of the toxicity-probability-interval design. Defaults are
/// the reference set under which the design's monitoring table coincides
/// with the standard 3+3 table.
struct TpiConfig {
  double p_target = 0.17;
  double k1 = 1.0;
  double k2 = 0.1;
  double xi = 0.7;
  BetaParams prior{0.005, 0.005};
  int cohort_size = 3;
  int max_patients = 30;
  DecisionMetric metric = DecisionMetric::length_normalized;
  WeightConvention weights = WeightConvention::variance;
  /// Replaces the fixed sample size with a data-driven rule: stop once the
  /// current dose shows at most 1 DLT in 6 or more patients and escalation
  /// has nowhere to go. This is the configuration under which the design
  /// assigns patients exactly like the standard design.
  bool data_driven_stopping = false;
};

inline void validate(const TpiConfig& config) {
  if (!(config.p_target > 0.0 && config.p_target < 1.0)) {
    throw std::invalid_argument("TpiConfig: p_target must lie in (0,1)");
  }
  if (config.k1 < 0.0 || config.k2 < 0.0) {
    throw std::invalid_argument("TpiConfig: k1 and k2 must be nonnegative");
  }
  if (!(config.xi > 0.0 && config.xi <= 1.0)) {
    throw std::invalid_argument("TpiConfig: xi must lie in (0,1]");
  }
  validate(config.prior);
  if (config.cohort_size < 1) throw std::invalid_argument("TpiConfig: bad cohort size");
  if (config.max_patients < 1) throw std::invalid_argument("TpiConfig: bad max_patients");
}

/// Scores of the three toxicity intervals
///   (0, pT - k1 s), [pT - k1 s, pT + k2 s], (pT + k2 s, 1)
/// under the given posterior, with endpoints clamped to [0,1]. With the
/// raw-mass metric these are posterior probabilities summing to 1; with
/// the length-normalized metric each mass is divided by its clamped
/// interval length, an empty interval scoring 0.
struct IntervalScores {
  double below = 0.0;   // toxicity likely under target: escalate
  double inside = 0.0;  // toxicity near target: stay
  double above = 0.0;   // toxicity likely over target: de-escalate
};

inline IntervalScores interval_masses(const BetaPosterior& post, const TpiConfig& config) {
  validate(config);
  const double lo = std::clamp(config.p_target - config.k1 * post.sd, 0.0, 1.0);
  const double hi = std::clamp(config.p_target + config.k2 * post.sd, 0.0, 1.0);
  const double cdf_lo = beta_cdf(lo, post.params);
  const double cdf_hi = std::max(beta_cdf(hi, post.params), cdf_lo);

  IntervalScores s;
  s.below = cdf_lo;
  s.inside = cdf_hi - cdf_lo;
  s.above = 1.0 - cdf_hi;
  if (config.metric == DecisionMetric::length_normalized) {
    s.below = lo > 0.0 ? s.below / lo : 0.0;
    s.inside = hi > lo ? s.inside / (hi - lo) : 0.0;
    s.above = hi < 1.0 ? s.above / (1.0 - hi) : 0.0;
  }
  return s;
}

/// True when the posterior probability of the DLT rate exceeding the
/// target is above xi, i.e. the dose (and every higher dose) should be
/// ruled out.
inline bool exclusion_check(int patients, int dlts, const TpiConfig& config) {
  validate(config);
  const BetaPosterior post = posterior(config.prior, patients, dlts);
  return 1.0 - beta_cdf(config.p_target, post.params) > config.xi;
}

/// Decision at a dose with the given pooled counts. The exclusion rule is
/// checked first; otherwise the interval with the top score decides, score
/// ties resolving toward the safer action. When the next dose is not
/// available (excluded, or the current dose is the top one), only the
/// first two intervals compete and either winner keeps the trial at the
/// current dose.
inline Action tpi_decision(int patients, int dlts, const TpiConfig& config,
                           bool next_dose_excluded) {
  validate(config);
  if (patients < 1 || dlts < 0 || dlts > patients) {
    throw std::invalid_argument("tpi_decision: DLT count must lie in [0, patients]");
  }
  if (exclusion_check(patients, dlts, config)) {
    return Action::deescalate_unacceptable();
  }
  if (next_dose_excluded) return Action::stay();
  const IntervalScores s = interval_masses(posterior(config.prior, patients, dlts), config);
  if (s.above >= s.inside && s.above >= s.below) return Action::deescalate();
  if (s.inside >= s.below) return Action::stay();
  return Action::escalate();
}

/// Decision table over the given dose-group sizes with escalation
/// available, t ranging over 0..n in each column.
inline MonitoringTable tpi_monitoring_table(const TpiConfig& config,
                                            const std::vector<int>& group_sizes) {
  validate(config);
  std::map<std::pair<int, int>, ActionKind> cells;
  for (int n : group_sizes) {
    if (n < config.cohort_size || n % config.cohort_size != 0) {
      throw std::invalid_argument("tpi_monitoring_table: group sizes must be whole cohorts");
    }
    for (int t = 0; t <= n; ++t) {
      cells[{n, t}] = tpi_decision(n, t, config, false).kind();
    }
  }
  return MonitoringTable(group_sizes, std::move(cells));
}

/// End-of-trial estimate: isotonic fit of the posterior means over the
/// treated, non-excluded doses, then the dose whose fitted rate is closest
/// to the target (ties resolved by mtd_closest). Doses never treated
/// contribute nothing. Returns nothing when every treated dose is
/// excluded.
inline std::optional<int> tpi_select_mtd(const std::vector<DoseGroupRecord>& groups,
                                         int first_excluded, const TpiConfig& config) {
  validate(config);
  std::vector<double> means;
  std::vector<double> weights;
  std::vector<int> doses;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const int dose = static_cast<int>(i) + 1;
    if (groups[i].patients == 0 || dose >= first_excluded) continue;
    const BetaPosterior post = posterior(config.prior, groups[i].patients, groups[i].dlts);
    means.push_back(post.mean);
    const double var = post.sd * post.sd;
    weights.push_back(config.weights == WeightConvention::variance ? var : 1.0 / var);
    doses.push_back(dose);
  }
  if (means.empty()) return std::nullopt;
  const IsotonicFit fit = pava(std::move(means), std::move(weights));
  return mtd_closest(fit, config.p_target, doses);
}

inline std::optional<int> tpi_select_mtd(const TrialState& state, const TpiConfig& config) {
  return tpi_select_mtd(state.groups(), state.first_excluded(), config);
}

/// Driver for the toxicity-probability-interval design. Stops when the
/// sample size cap is reached (default) or, under data-driven stopping,
/// when the current dose shows at most 1 DLT among 6 or more patients with
/// escalation unavailable; ruling out the lowest dose always closes the
/// study.
class TpiDesign {
 public:
  TpiDesign(TpiConfig config, int num_doses)
      : config_(std::move(config)), num_doses_(num_doses) {
    validate(config_);
    if (num_doses < 1) throw std::invalid_argument("TpiDesign: need at least one dose");
  }

  const TpiConfig& config() const noexcept { return config_; }
  int num_doses() const noexcept { return num_doses_; }

  std::optional<Action> before_cohort(const TrialState& state) const {
    if (auto stop = stop_rule(state)) return stop;
    return std::nullopt;
  }

  int next_cohort_size(const TrialState& state) const {
    if (config_.data_driven_stopping) return config_.cohort_size;
    // Never enroll past the sample size cap.
    return std::min(config_.cohort_size, config_.max_patients - state.total_patients());
  }

  Action after_cohort(const TrialState& state) const {
    if (auto stop = stop_rule(state)) return *stop;
    const int dose = state.current_dose();
    const auto& g = state.group(dose);
    const bool next_unavailable =
        dose == state.num_doses() || state.is_excluded(dose + 1);
    return tpi_decision(g.patients, g.dlts, config_, next_unavailable);
  }

 private:
  std::optional<Action> stop_rule(const TrialState& state) const {
    const int dose = state.current_dose();
    if (config_.data_driven_stopping) {
      const auto& g = state.group(dose);
      const bool next_unavailable =
          dose == state.num_doses() || state.is_excluded(dose + 1);
      if (next_unavailable && g.patients >= 6 && g.dlts <= 1) {
        return make_stop(state, /*at_boundary=*/dose == state.num_doses());
      }
      return std::nullopt;
    }
    if (state.total_patients() >= config_.max_patients) {
      return make_stop(state, /*at_boundary=*/false);
    }
    return std::nullopt;
  }

  Action make_stop(const TrialState& state, bool at_boundary) const {
    const std::optional<int> mtd = tpi_select_mtd(state, config_);
    return mtd ? Action::stop_with_mtd(*mtd, at_boundary) : Action::stop_no_mtd();
  }

  TpiConfig config_;
  int num_doses_;
};

/// One trial of the toxicity-probability-interval design against a truth
/// curve; deterministic given the seed behind `rng`.
inline TrialOutcome tpi_run(const TpiConfig& config, const DoseToxicityCurve& curve,
                            Rng& rng) {
  return run_trial(TpiDesign(config, curve.num_doses()), curve, rng);
}

}  // namespace dosefind
