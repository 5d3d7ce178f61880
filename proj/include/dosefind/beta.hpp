#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace dosefind {

/// Beta distribution shape parameters.
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;

  friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

inline void validate(const BetaParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw std::invalid_argument("BetaParams: shapes must be positive");
  }
}

/// Beta posterior with its mean and standard deviation:
///   mean = a / (a + b),  sd^2 = a b / ((a + b)^2 (a + b + 1)).
struct BetaPosterior {
  BetaParams params;
  double mean = 0.0;
  double sd = 0.0;
};

inline BetaPosterior make_beta_posterior(const BetaParams& params) {
  validate(params);
  const double a = params.alpha;
  const double b = params.beta;
  const double s = a + b;
  BetaPosterior post;
  post.params = params;
  post.mean = a / s;
  post.sd = std::sqrt(a * b / (s * s * (s + 1.0)));
  return post;
}

/// Conjugate update of a Beta prior with t events out of n patients.
inline BetaPosterior posterior(const BetaParams& prior, int patients, int dlts) {
  validate(prior);
  if (patients < 0 || dlts < 0 || dlts > patients) {
    throw std::invalid_argument("posterior: DLT count must lie in [0, patients]");
  }
  return make_beta_posterior(BetaParams{prior.alpha + static_cast<double>(dlts),
                                        prior.beta + static_cast<double>(patients - dlts)});
}

/// P(p <= x) under Beta(alpha, beta): the regularized incomplete beta
/// function. Backed by Boost.Math, which stays accurate for the very
/// diffuse shapes used here (alpha, beta down to 0.005).
inline double beta_cdf(double x, const BetaParams& params) {
  validate(params);
  if (std::isnan(x)) throw std::invalid_argument("beta_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(params.alpha, params.beta, x);
}

}  // namespace dosefind
