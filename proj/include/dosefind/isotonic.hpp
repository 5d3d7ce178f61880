#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dosefind/trial.hpp"

namespace dosefind {

/// Absolute tolerance for monotonicity and tie detection. Inputs here are
/// small rationals (t/n) and Beta posterior means, far from this scale.
inline constexpr double kIsotonicTol = 1e-12;

/// A weighted least-squares fit constrained to be nondecreasing.
struct IsotonicFit {
  std::vector<double> input;
  std::vector<double> weights;
  std::vector<double> fitted;
};

namespace detail {

inline void check_isotonic_args(const std::vector<double>& values,
                                const std::vector<double>& weights) {
  if (values.empty()) throw std::invalid_argument("isotonic fit: empty input");
  if (values.size() != weights.size()) {
    throw std::invalid_argument("isotonic fit: values/weights length mismatch");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("isotonic fit: weights must be positive");
  }
}

}  // namespace detail

/// Pool-adjacent-violators: the unique weighted least-squares fit under the
/// nondecreasing constraint. O(n) via a block stack.
inline IsotonicFit pava(std::vector<double> values, std::vector<double> weights) {
  detail::check_isotonic_args(values, weights);
  const std::size_t n = values.size();

  struct Block {
    double weight;
    double mean;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    blocks.push_back(Block{weights[i], values[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const double w = prev.weight + top.weight;
      prev.mean = (prev.weight * prev.mean + top.weight * top.mean) / w;
      prev.weight = w;
      prev.count += top.count;
    }
  }

  IsotonicFit fit;
  fit.input = std::move(values);
  fit.weights = std::move(weights);
  fit.fitted.reserve(n);
  for (const Block& b : blocks) {
    fit.fitted.insert(fit.fitted.end(), b.count, b.mean);
  }
  return fit;
}

/// Independent oracle for pava: enumerates every partition of the indices
/// into consecutive blocks, fits each block at its weighted mean, keeps the
/// monotone candidates, and returns the one with minimum weighted SSE.
/// Exponential in the length, hence the hard cap.
inline IsotonicFit brute_force_isotonic(const std::vector<double>& values,
                                        const std::vector<double>& weights) {
  detail::check_isotonic_args(values, weights);
  const std::size_t n = values.size();
  if (n > 12) throw std::invalid_argument("brute_force_isotonic: input longer than 12");

  std::vector<double> best;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> fitted(n);

  // Bit b of `mask` set means a block boundary between i = b and i = b + 1.
  const std::size_t partitions = std::size_t{1} << (n - 1);
  for (std::size_t mask = 0; mask < partitions; ++mask) {
    std::size_t start = 0;
    bool monotone = true;
    double prev_mean = -std::numeric_limits<double>::infinity();
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool boundary = (i + 1 == n) || ((mask >> i) & 1U);
      if (!boundary) continue;
      double w_sum = 0.0, wy_sum = 0.0;
      for (std::size_t j = start; j <= i; ++j) {
        w_sum += weights[j];
        wy_sum += weights[j] * values[j];
      }
      const double mean = wy_sum / w_sum;
      if (mean < prev_mean - kIsotonicTol) {
        monotone = false;
        break;
      }
      for (std::size_t j = start; j <= i; ++j) {
        fitted[j] = mean;
        const double r = values[j] - mean;
        sse += weights[j] * r * r;
      }
      prev_mean = mean;
      start = i + 1;
    }
    if (monotone && sse < best_sse) {
      best_sse = sse;
      best = fitted;
    }
  }

  return IsotonicFit{values, weights, std::move(best)};
}

/// Observed DLT rates t_i/n_i with weights n_i over the treated doses.
/// Untreated doses are omitted; `doses` keeps the original 1-based indices.
struct EmpiricalRates {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<int> doses;
};

inline EmpiricalRates empirical_rates(const std::vector<DoseGroupRecord>& groups) {
  EmpiricalRates out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].patients == 0) continue;
    out.values.push_back(static_cast<double>(groups[i].dlts) /
                         static_cast<double>(groups[i].patients));
    out.weights.push_back(static_cast<double>(groups[i].patients));
    out.doses.push_back(static_cast<int>(i) + 1);
  }
  return out;
}

inline EmpiricalRates empirical_rates(const TrialState& state) {
  return empirical_rates(state.groups());
}

inline EmpiricalRates empirical_rates(const TrialOutcome& outcome) {
  return empirical_rates(outcome.groups);
}

namespace detail {

inline void check_dose_map(const IsotonicFit& fit, const std::vector<int>& doses) {
  if (fit.fitted.size() != doses.size()) {
    throw std::invalid_argument("mtd selection: fit and dose map length mismatch");
  }
}

}  // namespace detail

/// Highest dose whose fitted rate does not exceed the target.
inline std::optional<int> mtd_largest_below(const IsotonicFit& fit, double p_target,
                                            const std::vector<int>& doses) {
  detail::check_dose_map(fit, doses);
  std::optional<int> best;
  for (std::size_t i = 0; i < fit.fitted.size(); ++i) {
    if (fit.fitted[i] <= p_target + kIsotonicTol) best = doses[i];
  }
  return best;
}

/// Dose whose fitted rate is closest to the target. Among tied doses the
/// highest is chosen when the mean of the tied fitted values is below the
/// target, otherwise the lowest.
inline std::optional<int> mtd_closest(const IsotonicFit& fit, double p_target,
                                      const std::vector<int>& doses) {
  detail::check_dose_map(fit, doses);
  if (fit.fitted.empty()) return std::nullopt;

  double best_dist = std::numeric_limits<double>::infinity();
  for (double f : fit.fitted) best_dist = std::min(best_dist, std::abs(f - p_target));

  std::vector<std::size_t> tied;
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < fit.fitted.size(); ++i) {
    if (std::abs(fit.fitted[i] - p_target) <= best_dist + kIsotonicTol) {
      tied.push_back(i);
      tie_sum += fit.fitted[i];
    }
  }
  const double tie_mean = tie_sum / static_cast<double>(tied.size());
  const std::size_t pick = (tie_mean < p_target - kIsotonicTol) ? tied.back() : tied.front();
  return doses[pick];
}

}  // namespace dosefind
