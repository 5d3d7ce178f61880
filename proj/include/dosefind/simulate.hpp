#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dosefind/parallel.hpp"
#include "dosefind/rng.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

inline std::vector<double> default_rate_thresholds() {
  return {0.15, 0.20, 0.25, 0.30, 0.35};
}

/// Monte Carlo operating characteristics of a design against one curve.
struct SimulationSummary {
  long reps = 0;
  /// mtd_probability[0] is the no-MTD outcome; [i] is dose i.
  std::vector<double> mtd_probability;
  std::vector<double> mean_patients_per_dose;
  double mean_total_patients = 0.0;
  double mean_total_dlts = 0.0;
  /// (threshold v, P(true rate at the selected MTD >= v)); trials without
  /// an MTD never count toward these.
  std::vector<std::pair<double, double>> prob_mtd_rate_at_least;
};

template <TrialDesign D>
SimulationSummary simulate(const D& design, const DoseToxicityCurve& curve, long reps,
                           std::uint64_t seed,
                           std::vector<double> thresholds = default_rate_thresholds(),
                           int num_threads = 0) {
  if (reps < 1) throw std::invalid_argument("simulate: need at least one replication");
  if (design.num_doses() != curve.num_doses()) {
    throw std::invalid_argument("simulate: design and curve dose counts differ");
  }
  const std::size_t doses = static_cast<std::size_t>(curve.num_doses());
  const std::size_t cuts = thresholds.size();

  // Integer tallies keep the merged result identical for any worker count.
  struct Tally {
    std::vector<long> mtd_count;       // [0] = none, [dose] = that dose
    std::vector<long> patients;        // per dose
    long total_dlts = 0;
    std::vector<long> at_least;        // per threshold
    void init(std::size_t doses_, std::size_t cuts_) {
      if (mtd_count.empty()) {
        mtd_count.assign(doses_ + 1, 0);
        patients.assign(doses_, 0);
        at_least.assign(cuts_, 0);
      }
    }
    void merge(const Tally& other) {
      if (other.mtd_count.empty()) return;
      init(other.patients.size(), other.at_least.size());
      for (std::size_t i = 0; i < mtd_count.size(); ++i) mtd_count[i] += other.mtd_count[i];
      for (std::size_t i = 0; i < patients.size(); ++i) patients[i] += other.patients[i];
      for (std::size_t i = 0; i < at_least.size(); ++i) at_least[i] += other.at_least[i];
      total_dlts += other.total_dlts;
    }
  };

  const Tally tally = detail::parallel_tally<Tally>(
      reps, num_threads, [&](Tally& local, long rep) {
        local.init(doses, cuts);
        Rng rng = replication_rng(seed, static_cast<std::uint64_t>(rep));
        const TrialOutcome out = run_trial(design, curve, rng);
        local.mtd_count[static_cast<std::size_t>(out.mtd.value_or(0))] += 1;
        for (std::size_t i = 0; i < doses; ++i) local.patients[i] += out.groups[i].patients;
        local.total_dlts += out.total_dlts();
        if (out.mtd) {
          const double rate = curve.prob(*out.mtd);
          for (std::size_t i = 0; i < cuts; ++i) {
            if (rate >= thresholds[i]) local.at_least[i] += 1;
          }
        }
      });

  SimulationSummary summary;
  summary.reps = reps;
  const double n = static_cast<double>(reps);
  summary.mtd_probability.resize(doses + 1);
  for (std::size_t i = 0; i <= doses; ++i) {
    summary.mtd_probability[i] = static_cast<double>(tally.mtd_count[i]) / n;
  }
  summary.mean_patients_per_dose.resize(doses);
  long patients_total = 0;
  for (std::size_t i = 0; i < doses; ++i) {
    summary.mean_patients_per_dose[i] = static_cast<double>(tally.patients[i]) / n;
    patients_total += tally.patients[i];
  }
  summary.mean_total_patients = static_cast<double>(patients_total) / n;
  summary.mean_total_dlts = static_cast<double>(tally.total_dlts) / n;
  summary.prob_mtd_rate_at_least.reserve(cuts);
  for (std::size_t i = 0; i < cuts; ++i) {
    summary.prob_mtd_rate_at_least.emplace_back(
        thresholds[i], static_cast<double>(tally.at_least[i]) / n);
  }
  return summary;
}

struct EnumeratedPath {
  TrialOutcome outcome;
  double probability = 0.0;
};

struct PathEnumeration {
  std::vector<EnumeratedPath> paths;
  /// Probability mass of branches cut off at the cohort cap. The rule
  /// designs terminate naturally within 2 cohorts per dose, so this is 0
  /// for them whenever the cap allows that many.
  double truncated_probability = 0.0;

  double total_probability() const noexcept {
    double p = truncated_probability;
    for (const auto& path : paths) p += path.probability;
    return p;
  }
};

namespace detail {

inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf[static_cast<std::size_t>(n)] = 1.0;
    return pmf;
  }
  double coeff = 1.0;  // C(n, k), built incrementally
  for (int k = 0; k <= n; ++k) {
    pmf[static_cast<std::size_t>(k)] =
        coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
    coeff = coeff * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return pmf;
}

template <TrialDesign D>
void enumerate_rec(const D& design, const DoseToxicityCurve& curve, const TrialState& state,
                   double prob, int cohorts_left, PathEnumeration& out) {
  if (!state.active()) {
    out.paths.push_back(EnumeratedPath{trial_outcome(state), prob});
    return;
  }
  if (std::optional<Action> stop = design.before_cohort(state)) {
    enumerate_rec(design, curve, apply_action(state, *stop), prob, cohorts_left, out);
    return;
  }
  if (cohorts_left == 0) {
    out.truncated_probability += prob;
    return;
  }
  const int dose = state.current_dose();
  const int size = design.next_cohort_size(state);
  const std::vector<double> pmf = binomial_pmf(size, curve.prob(dose));
  for (int dlts = 0; dlts <= size; ++dlts) {
    const double p_branch = pmf[static_cast<std::size_t>(dlts)];
    if (p_branch == 0.0) continue;
    TrialState next = record_cohort(state, dose, size, dlts);
    next = apply_action(std::move(next), design.after_cohort(next));
    enumerate_rec(design, curve, next, prob * p_branch, cohorts_left - 1, out);
  }
}

}  // namespace detail

/// Exact distribution over complete trial paths: a depth-first walk of the
/// cohort-outcome tree with exact binomial branch probabilities. Bounded
/// to small ladders and short trials; the path probabilities sum to one
/// minus the reported truncated mass.
template <TrialDesign D>
PathEnumeration enumerate_paths(const D& design, const DoseToxicityCurve& curve,
                                int max_cohorts) {
  if (design.num_doses() != curve.num_doses()) {
    throw std::invalid_argument("enumerate_paths: design and curve dose counts differ");
  }
  if (curve.num_doses() > 4) {
    throw std::invalid_argument("enumerate_paths: at most 4 dose levels");
  }
  if (max_cohorts < 1 || max_cohorts > 12) {
    throw std::invalid_argument("enumerate_paths: max_cohorts must lie in [1, 12]");
  }
  PathEnumeration out;
  detail::enumerate_rec(design, curve, new_trial(curve.num_doses()), 1.0, max_cohorts, out);
  return out;
}

}  // namespace dosefind
