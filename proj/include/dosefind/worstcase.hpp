#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dosefind/parallel.hpp"
#include "dosefind/rng.hpp"
#include "dosefind/rule_design.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

namespace detail {

inline void check_worst_case_rate(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("worst case bound: v must lie in [0,1]");
  }
}

/// Per-dose path probabilities of the escalation walk on the worst-case
/// ladder, where every dose at or above the first toxic one has DLT rate v:
///   pass_clear      first cohort (or patient) fully clear, move up;
///   reject_fresh    a dose entered fresh ends up ruled out;
///   reject_revisit  a dose passed clear on the way up ends up ruled out
///                   when the trial falls back onto it.
struct WalkTerms {
  double pass_clear;
  double reject_fresh;
  double reject_revisit;
};

inline WalkTerms walk_terms(RuleDesignKind kind, double v) {
  const double q = 1.0 - v;
  switch (kind) {
    case RuleDesignKind::three_plus_three: {
      const double second = 3 * v * v * q + v * v * v;  // 2+ DLTs among 3
      return {q * q * q, 3 * v * q * q * (1 - q * q * q) + second, second};
    }
    case RuleDesignKind::two_plus_two: {
      return {q * q, 2 * v * q * (1 - q * q) + v * v, v * v};
    }
    case RuleDesignKind::four_plus_four: {
      const double q4 = q * q * q * q;
      const double second = 1 - q4 - 4 * v * q * q * q;  // 2+ DLTs among 4
      return {q4, 4 * v * q * q * q * (1 - q4) + second, second};
    }
    case RuleDesignKind::hybrid_1_2_3: {
      const double q5 = q * q * q * q * q;
      return {q, v * (1 - q5), 1 - q5 - 5 * v * q * q * q * q};
    }
  }
  throw std::logic_error("walk_terms: unknown design");
}

}  // namespace detail

/// Closed-form upper bound on the probability that the selected MTD has an
/// underlying DLT rate of at least v, attained on the worst-case ladder.
/// v = 0 returns 1 as the continuity limit (any selected dose has rate
/// >= 0); at v = 1 the first toxic dose is always ruled out and the bound
/// is 0.
inline double r_closed_form(RuleDesignKind kind, double v) {
  detail::check_worst_case_rate(v);
  if (v == 0.0) return 1.0;
  const double q = 1.0 - v;
  switch (kind) {
    case RuleDesignKind::three_plus_three: {
      const double num =
          3 * v * q * q * (1 - q * q * q) + (3 * v * v * q + v * v * v);
      const double den = 1 - q * q * q * (3 * v * v * q + v * v * v);
      return 1.0 - num / den;
    }
    case RuleDesignKind::two_plus_two: {
      const double num = 2 * v * q * (1 - q * q) + v * v;
      const double den = 1 - q * q * v * v;
      return 1.0 - num / den;
    }
    case RuleDesignKind::four_plus_four: {
      const double q4 = q * q * q * q;
      const double num =
          4 * v * q * q * q * (1 - q4) + (1 - q4 - 4 * v * q * q * q);
      const double den = 1 - q4 * (1 - q4 - 4 * v * q * q * q);
      return 1.0 - num / den;
    }
    case RuleDesignKind::hybrid_1_2_3: {
      const double q5 = q * q * q * q * q;
      const double num = v * (1 - q5);
      const double den = 1 - q * (1 - q5 - 5 * v * q * q * q * q);
      return 1.0 - num / den;
    }
  }
  throw std::logic_error("r_closed_form: unknown design");
}

/// The same bound as a truncated series over the number of doses the walk
/// passes before its highest rejection: term k is
///   pass_clear^k * reject_fresh * reject_revisit^k.
/// Summation stops once the next term drops below `tol`. Serves as the
/// independent check of r_closed_form.
inline double r_series(RuleDesignKind kind, double v, double tol) {
  detail::check_worst_case_rate(v);
  if (!(tol > 0.0)) throw std::invalid_argument("r_series: tol must be positive");
  const detail::WalkTerms w = detail::walk_terms(kind, v);
  const double ratio = w.pass_clear * w.reject_revisit;
  double term = w.reject_fresh;  // k = 0
  double sum = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    sum += term;
    term *= ratio;
    if (term < tol) break;
  }
  return 1.0 - sum;
}

/// The ladder that attains the bound: DLT rate 0 below `first_toxic_dose`
/// and v at that dose and above.
inline DoseToxicityCurve worst_case_curve(double v, int first_toxic_dose, int levels) {
  detail::check_worst_case_rate(v);
  if (levels < 1) throw std::invalid_argument("worst_case_curve: need at least one level");
  if (first_toxic_dose < 1 || first_toxic_dose > levels) {
    throw std::invalid_argument("worst_case_curve: first toxic dose outside the ladder");
  }
  std::vector<double> probs(static_cast<std::size_t>(levels), v);
  for (int i = 0; i < first_toxic_dose - 1; ++i) probs[static_cast<std::size_t>(i)] = 0.0;
  return DoseToxicityCurve(std::move(probs));
}

struct WorstCaseEstimate {
  double estimate = 0.0;            // fraction of runs whose MTD has true rate >= v
  double truncated_fraction = 0.0;  // runs that ran into the top of the ladder
};

/// Empirical check of the closed form: simulated trials on the worst-case
/// ladder. The analytic bound assumes the ladder is unbounded above, so
/// runs that hit the ceiling policy are reported separately rather than
/// silently mixed in; `levels` large (default 200 in the CLI) keeps that
/// fraction negligible. Use first_toxic_dose >= 2 so a study closed at the
/// floor matches the analytic event of settling below the toxic range.
inline WorstCaseEstimate r_monte_carlo(RuleDesignKind kind, double v, int first_toxic_dose,
                                       int levels, long reps, std::uint64_t seed,
                                       int num_threads = 0) {
  detail::check_worst_case_rate(v);
  if (reps < 1) throw std::invalid_argument("r_monte_carlo: need at least one replication");
  const DoseToxicityCurve curve = worst_case_curve(v, first_toxic_dose, levels);
  const RuleDesign design(kind, levels);

  struct Tally {
    long unsafe = 0;
    long truncated = 0;
    void merge(const Tally& other) {
      unsafe += other.unsafe;
      truncated += other.truncated;
    }
  };
  const Tally tally = detail::parallel_tally<Tally>(
      reps, num_threads, [&](Tally& local, long rep) {
        Rng rng = replication_rng(seed, static_cast<std::uint64_t>(rep));
        const TrialOutcome out = run_trial(design, curve, rng);
        if (out.mtd && curve.prob(*out.mtd) >= v) ++local.unsafe;
        if (out.mtd_at_boundary) ++local.truncated;
      });

  WorstCaseEstimate est;
  est.estimate = static_cast<double>(tally.unsafe) / static_cast<double>(reps);
  est.truncated_fraction = static_cast<double>(tally.truncated) / static_cast<double>(reps);
  return est;
}

struct CurveGridRow {
  double v = 0.0;
  std::vector<double> values;  // r(v) per design, in the order requested
};

/// Closed-form bound for every (design, v) pair; the data behind the
/// four-curve comparison plot.
inline std::vector<CurveGridRow> curve_grid(const std::vector<RuleDesignKind>& designs,
                                            const std::vector<double>& v_grid) {
  std::vector<CurveGridRow> rows;
  rows.reserve(v_grid.size());
  for (double v : v_grid) {
    CurveGridRow row;
    row.v = v;
    row.values.reserve(designs.size());
    for (RuleDesignKind kind : designs) row.values.push_back(r_closed_form(kind, v));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dosefind
