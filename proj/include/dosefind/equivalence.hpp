#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dosefind/isotonic.hpp"
#include "dosefind/monitoring.hpp"
#include "dosefind/rule_design.hpp"
#include "dosefind/simulate.hpp"
#include "dosefind/tpi.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

/// Cell-by-cell comparison of the interval design's decision table with
/// the standard design's table, over the standard table's reachable cells.
struct TableComparison {
  struct CellDiff {
    int patients = 0;
    int dlts = 0;
    ActionKind standard_action = ActionKind::stay;
    ActionKind tpi_action = ActionKind::stay;
  };
  int cells_compared = 0;
  std::vector<CellDiff> mismatches;

  bool matches() const noexcept { return mismatches.empty(); }
};

inline TableComparison compare_tpi_table_with_standard(const TpiConfig& config) {
  const MonitoringTable standard = monitoring_table(RuleDesignKind::three_plus_three);
  const MonitoringTable tpi = tpi_monitoring_table(config, standard.group_sizes());
  TableComparison cmp;
  for (const auto& [key, standard_action] : standard.cells()) {
    const auto tpi_action = tpi.cell(key.first, key.second);
    ++cmp.cells_compared;
    if (tpi_action != standard_action) {
      cmp.mismatches.push_back(
          TableComparison::CellDiff{key.first, key.second, standard_action, *tpi_action});
    }
  }
  return cmp;
}

/// Exhaustive lockstep comparison: both designs are driven through every
/// sequence of cohort outcomes simultaneously. On each path they must
/// enroll the same cohorts at the same doses, stop together, and (when
/// they stop with an MTD) pick the same dose. The interval design runs
/// with its data-driven stopping rule.
struct LockstepResult {
  long paths = 0;
  double probability = 0.0;     // mass over completed paths; 1 when exhaustive
  long divergences = 0;
  std::string first_divergence; // empty when the designs agree everywhere

  bool identical() const noexcept { return divergences == 0; }
};

namespace detail {

inline void lockstep_rec(const RuleDesign& standard, const TpiDesign& tpi,
                         const DoseToxicityCurve& curve, const TrialState& s_std,
                         const TrialState& s_tpi, double prob, int cohorts_left,
                         LockstepResult& out) {
  const auto diverge = [&](const std::string& what) {
    ++out.divergences;
    if (out.first_divergence.empty()) {
      std::ostringstream os;
      os << what << " (path probability " << prob << ")";
      out.first_divergence = os.str();
    }
  };

  TrialState a = s_std;
  TrialState b = s_tpi;
  if (auto stop = standard.before_cohort(a)) a = apply_action(std::move(a), *stop);
  if (auto stop = tpi.before_cohort(b)) b = apply_action(std::move(b), *stop);

  if (a.active() != b.active()) {
    diverge(a.active() ? "interval design stopped before the standard design"
                       : "standard design stopped before the interval design");
    return;
  }
  if (!a.active()) {
    ++out.paths;
    out.probability += prob;
    if (a.status() != b.status() || a.mtd() != b.mtd()) {
      std::ostringstream os;
      os << "final results differ: standard "
         << (a.mtd() ? "MTD dose " + std::to_string(*a.mtd()) : "no MTD")
         << " vs interval "
         << (b.mtd() ? "MTD dose " + std::to_string(*b.mtd()) : "no MTD");
      diverge(os.str());
    }
    return;
  }
  if (cohorts_left == 0) {
    diverge("path exceeded the cohort budget");
    return;
  }

  const int dose = a.current_dose();
  const int size = standard.next_cohort_size(a);
  if (dose != b.current_dose() || size != tpi.next_cohort_size(b)) {
    std::ostringstream os;
    os << "enrollment differs: standard treats " << size << " at dose " << dose
       << ", interval treats " << tpi.next_cohort_size(b) << " at dose "
       << b.current_dose();
    diverge(os.str());
    return;
  }

  const std::vector<double> pmf = binomial_pmf(size, curve.prob(dose));
  for (int dlts = 0; dlts <= size; ++dlts) {
    const double p_branch = pmf[static_cast<std::size_t>(dlts)];
    if (p_branch == 0.0) continue;
    TrialState next_a = record_cohort(a, dose, size, dlts);
    next_a = apply_action(std::move(next_a), standard.after_cohort(next_a));
    TrialState next_b = record_cohort(b, dose, size, dlts);
    next_b = apply_action(std::move(next_b), tpi.after_cohort(next_b));
    lockstep_rec(standard, tpi, curve, next_a, next_b, prob * p_branch, cohorts_left - 1,
                 out);
  }
}

}  // namespace detail

inline LockstepResult lockstep_enumerate(const TpiConfig& config,
                                         const DoseToxicityCurve& curve, int max_cohorts) {
  if (curve.num_doses() > 4) {
    throw std::invalid_argument("lockstep_enumerate: at most 4 dose levels");
  }
  if (max_cohorts < 1 || max_cohorts > 12) {
    throw std::invalid_argument("lockstep_enumerate: max_cohorts must lie in [1, 12]");
  }
  TpiConfig tpi_config = config;
  tpi_config.data_driven_stopping = true;
  const RuleDesign standard(RuleDesignKind::three_plus_three, curve.num_doses());
  const TpiDesign tpi(tpi_config, curve.num_doses());
  LockstepResult out;
  detail::lockstep_rec(standard, tpi, curve, new_trial(curve.num_doses()),
                       new_trial(curve.num_doses()), 1.0, max_cohorts, out);
  return out;
}

/// Exhaustive check that, over every completed standard-design path, the
/// isotonic fit of the observed rates picks the same MTD as the standard
/// heuristic for each target rate.
struct IsotonicEquivalenceResult {
  long paths = 0;
  double probability = 0.0;
  long failures = 0;
  std::string first_failure;

  bool equivalent() const noexcept { return failures == 0; }
};

inline IsotonicEquivalenceResult isotonic_mtd_equivalence(const DoseToxicityCurve& curve,
                                                          const std::vector<double>& targets,
                                                          int max_cohorts = 12) {
  const RuleDesign design(RuleDesignKind::three_plus_three, curve.num_doses());
  const PathEnumeration paths = enumerate_paths(design, curve, max_cohorts);
  IsotonicEquivalenceResult out;
  out.probability = paths.total_probability() - paths.truncated_probability;
  for (const EnumeratedPath& path : paths.paths) {
    ++out.paths;
    const std::optional<int> standard_mtd = select_mtd_standard(path.outcome.groups, 3);
    const EmpiricalRates rates = empirical_rates(path.outcome.groups);
    const IsotonicFit fit = pava(rates.values, rates.weights);
    for (double target : targets) {
      const std::optional<int> iso_mtd = mtd_largest_below(fit, target, rates.doses);
      if (iso_mtd != standard_mtd) {
        ++out.failures;
        if (out.first_failure.empty()) {
          std::ostringstream os;
          os << "target " << target << ": isotonic pick "
             << (iso_mtd ? std::to_string(*iso_mtd) : "none") << " vs standard "
             << (standard_mtd ? std::to_string(*standard_mtd) : "none")
             << " on a path with probability " << path.probability;
          out.first_failure = os.str();
        }
      }
    }
  }
  return out;
}

}  // namespace dosefind
