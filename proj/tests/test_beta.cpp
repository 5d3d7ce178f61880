#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dosefind/beta.hpp"
#include "dosefind/rng.hpp"

using namespace dosefind;

namespace {

// Independent oracle for integer shapes: I_x(a, b) equals the upper
// binomial tail P(Bin(a + b - 1, x) >= a).
double integer_shape_cdf(double x, int a, int b) {
  const int n = a + b - 1;
  double coeff = 1.0;
  for (int j = 1; j < a; ++j) coeff = coeff * static_cast<double>(n - j + 1) / j;
  double sum = 0.0;
  for (int j = a; j <= n; ++j) {
    coeff = coeff * static_cast<double>(n - j + 1) / j;
    sum += coeff * std::pow(x, j) * std::pow(1.0 - x, n - j);
  }
  return sum;
}

// Reference values computed with 50-digit arithmetic.
struct RefPoint {
  double x, alpha, beta, cdf;
};
const std::vector<RefPoint> kReference = {
    {0.17, 2.005, 4.005, 0.2019719917000087026815},
    {0.17, 1.005, 2.005, 0.3096951590772940977746},
    {0.17, 1.005, 5.005, 0.6044101790168010085251},
    {0.17, 0.005, 0.005, 0.4960670416038312389444},
    {0.17, 3.005, 0.005, 9.363511725370325762168e-6},
    {0.17, 0.005, 3.005, 0.9970144643760467755153},
    {0.50, 0.005, 0.005, 0.5},
    {0.25, 2.5, 3.5, 0.2092843318634301221933},
    {0.75, 7.0, 2.0, 0.3670806884765625},
    {0.33, 0.005, 6.005, 0.9998163414391965982708},
    {0.90, 4.005, 2.005, 0.9190163587675395311783},
    {0.05, 1.005, 2.005, 0.09651389884425325511846},
};

}  // namespace

TEST_CASE("posterior is the conjugate update with exact moments") {
  SECTION("uniform prior with one DLT in three") {
    const BetaPosterior post = posterior(BetaParams{1, 1}, 3, 1);
    REQUIRE(post.params == BetaParams{2, 4 - 1});
    REQUIRE(post.mean == Catch::Approx(0.4).margin(1e-15));
  }
  SECTION("diffuse prior with one DLT in six") {
    const BetaPosterior post = posterior(BetaParams{0.005, 0.005}, 6, 1);
    REQUIRE(post.params.alpha == Catch::Approx(1.005).margin(1e-15));
    REQUIRE(post.params.beta == Catch::Approx(5.005).margin(1e-15));
  }
  SECTION("no data returns the prior") {
    const BetaPosterior post = posterior(BetaParams{1, 1}, 0, 0);
    REQUIRE(post.params == BetaParams{1, 1});
    REQUIRE(post.mean == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(post.sd * post.sd == Catch::Approx(1.0 / 12.0).margin(1e-15));
  }
  SECTION("moment formulas hold to 1e-14 across a sweep") {
    for (int n = 0; n <= 12; ++n) {
      for (int t = 0; t <= n; ++t) {
        const BetaPosterior post = posterior(BetaParams{0.005, 0.005}, n, t);
        const double a = post.params.alpha, b = post.params.beta, s = a + b;
        REQUIRE(std::abs(post.mean - a / s) < 1e-14);
        REQUIRE(std::abs(post.sd * post.sd - a * b / (s * s * (s + 1))) < 1e-14);
      }
    }
  }
  SECTION("rejects impossible counts and bad priors") {
    REQUIRE_THROWS_AS(posterior(BetaParams{1, 1}, 3, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(posterior(BetaParams{1, 1}, 3, -1), std::invalid_argument);
    REQUIRE_THROWS_AS(posterior(BetaParams{0, 1}, 3, 1), std::invalid_argument);
  }
}

TEST_CASE("beta_cdf basics") {
  SECTION("uniform distribution") {
    for (double x : {0.0, 0.1, 0.25, 0.5, 0.99, 1.0}) {
      REQUIRE(beta_cdf(x, BetaParams{1, 1}) == Catch::Approx(x).margin(1e-14));
    }
  }
  SECTION("symmetric shape at the midpoint") {
    REQUIRE(beta_cdf(0.5, BetaParams{2, 2}) == Catch::Approx(0.5).margin(1e-14));
  }
  SECTION("boundaries and clamping") {
    REQUIRE(beta_cdf(0.0, BetaParams{0.005, 3.0}) == 0.0);
    REQUIRE(beta_cdf(1.0, BetaParams{0.005, 3.0}) == 1.0);
    REQUIRE(beta_cdf(-0.5, BetaParams{2, 2}) == 0.0);
    REQUIRE(beta_cdf(1.5, BetaParams{2, 2}) == 1.0);
  }
}

TEST_CASE("beta_cdf matches the integer-shape binomial oracle") {
  for (int a = 1; a <= 7; ++a) {
    for (int b = 1; b <= 7; ++b) {
      for (double x : {0.05, 0.17, 0.33, 0.5, 0.8, 0.95}) {
        const double expected = integer_shape_cdf(x, a, b);
        REQUIRE(beta_cdf(x, BetaParams{double(a), double(b)}) ==
                Catch::Approx(expected).margin(1e-12));
      }
    }
  }
}

TEST_CASE("beta_cdf matches high-precision reference values") {
  for (const RefPoint& p : kReference) {
    REQUIRE(beta_cdf(p.x, BetaParams{p.alpha, p.beta}) ==
            Catch::Approx(p.cdf).margin(1e-12));
  }
}

TEST_CASE("beta_cdf is a nondecreasing cdf even for near-degenerate shapes") {
  Rng rng(7001);
  const std::vector<BetaParams> shapes = {
      {0.005, 0.005}, {0.005, 3.005}, {3.005, 0.005}, {1.005, 5.005}, {2, 4}, {5.5, 0.25}};
  for (const BetaParams& shape : shapes) {
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = static_cast<double>(i) / 200.0;
      const double c = beta_cdf(x, shape);
      REQUIRE(c >= prev - 1e-15);
      REQUIRE(c >= 0.0);
      REQUIRE(c <= 1.0);
      prev = c;
    }
    REQUIRE(beta_cdf(0.0, shape) == 0.0);
    REQUIRE(beta_cdf(1.0, shape) == 1.0);
    // random monotone pairs
    for (int i = 0; i < 50; ++i) {
      double x = rng.next_double(), y = rng.next_double();
      if (x > y) std::swap(x, y);
      REQUIRE(beta_cdf(x, shape) <= beta_cdf(y, shape) + 1e-15);
    }
  }
}
