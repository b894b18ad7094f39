#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "lshr/density.hpp"
#include "lshr/errors.hpp"
#include "lshr/reference.hpp"
#include "oracles.hpp"

using namespace lshr;

namespace {

double posterior_1d(const CauchyNormalParams& p, double t) {
  Vector x(1);
  x[0] = t;
  return std::exp(cauchy_normal_log_posterior(p, x));
}

}  // namespace

TEST_CASE("one-dimensional posterior CDF matches direct quadrature") {
  const auto params = CauchyNormalParams::make(1);
  const auto ref = CauchyNormalReference::build(params).theta1_reference_1d();
  const auto f = [&](double t) { return posterior_1d(params, t); };
  const double lo = -400.0;
  const double total = oracle::simpson(f, lo, 400.0, 400000);
  for (double t : {-5.0, 0.0, 2.0, 5.0, 8.0, 10.0, 15.0}) {
    const double direct = oracle::simpson(f, lo, t, 400000) / total;
    CHECK(std::abs(ref.cdf(t) - direct) <= 1e-4);
  }
}

TEST_CASE("one-dimensional posterior is bimodal") {
  const auto params = CauchyNormalParams::make(1);
  CHECK(posterior_1d(params, 0.0) == doctest::Approx(posterior_1d(params, 10.0)).epsilon(1e-9));
  std::vector<double> peaks;
  const double h = 0.01;
  for (double t = -5.0; t < 20.0; t += h) {
    const double c = posterior_1d(params, t);
    if (c > posterior_1d(params, t - h) && c > posterior_1d(params, t + h)) peaks.push_back(t);
  }
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0] > 0.0);
  CHECK(peaks[0] < 2.0);
  CHECK(peaks[1] > 5.0);
  CHECK(peaks[1] < 9.0);
}

TEST_CASE("prior-mode mass") {
  const auto one = CauchyNormalReference::build(CauchyNormalParams::make(1));
  const auto ref1 = one.theta1_reference_1d();
  CHECK(one.prior_mode_mass() == doctest::Approx(ref1.cdf(5.0)).epsilon(1e-4));

  const double m2 = CauchyNormalReference::build(CauchyNormalParams::make(2)).prior_mode_mass();
  CHECK(m2 > 0.2);
  CHECK(m2 < 0.8);
  const double m10 = CauchyNormalReference::build(CauchyNormalParams::make(10)).prior_mode_mass();
  CHECK(m10 < m2);
}

TEST_CASE("oracle draws agree with importance sampling in three dimensions") {
  const auto params = CauchyNormalParams::make(3);
  const auto ref = CauchyNormalReference::build(params);
  Rng rng(1);
  const std::int64_t n = 400000;
  const auto draws = ref.sample(n, rng);
  double above = 0.0;
  for (Eigen::Index i = 0; i < draws.draws.rows(); ++i) above += draws.draws(i, 0) > 5.0 ? 1.0 : 0.0;
  const double p_oracle = above / static_cast<double>(n);

  // Defensive mixture proposal: half Cauchy prior, half the likelihood.
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  std::chi_squared_distribution<double> chi1(1.0);
  std::bernoulli_distribution pick(0.5);
  const double s = std::sqrt(params.sigma2);
  const int m = 1000000;
  double sw = 0.0;
  double sw2 = 0.0;
  double swa = 0.0;
  std::vector<double> w(m);
  std::vector<char> hit(m);
  for (int i = 0; i < m; ++i) {
    Vector x(3);
    if (pick(gen)) {
      const double scale = 1.0 / std::sqrt(chi1(gen));
      for (int c = 0; c < 3; ++c) x[c] = z(gen) * scale;
    } else {
      for (int c = 0; c < 3; ++c) x[c] = params.y[c] + s * z(gen);
    }
    const double q = 0.5 * std::exp(cauchy_prior_log_density(3, x)) +
                     0.5 * std::exp(-0.5 * (x - params.y).squaredNorm() / params.sigma2) /
                         std::pow(2.0 * std::numbers::pi * params.sigma2, 1.5);
    w[i] = std::exp(cauchy_normal_log_posterior(params, x)) / q;
    hit[i] = x[0] > 5.0;
    sw += w[i];
    sw2 += w[i] * w[i];
    swa += hit[i] ? w[i] : 0.0;
  }
  const double p_is = swa / sw;
  double var = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = (hit[i] ? 1.0 : 0.0) - p_is;
    var += w[i] * w[i] * r * r;
  }
  const double se_is = std::sqrt(var) / sw;
  const double se_oracle = std::sqrt(p_oracle * (1 - p_oracle) / n);
  CHECK(std::abs(p_oracle - p_is) <= 4.0 * std::hypot(se_is, se_oracle) + 1e-3);
}

TEST_CASE("oracle log-density agrees with the model at every draw") {
  for (int d : {2, 5}) {
    const auto params = CauchyNormalParams::make(d);
    const auto ref = CauchyNormalReference::build(params);
    CHECK(ref.last_refinement_tv() < 1e-3);
    Rng rng(3);
    std::vector<double> logs;
    const auto batch = ref.sample(2000, rng, &logs);
    for (Eigen::Index i = 0; i < batch.draws.rows(); ++i) {
      const Vector x = batch.draws.row(i).transpose();
      CHECK(std::abs(logs[static_cast<std::size_t>(i)] - cauchy_normal_log_posterior(params, x)) <= 1e-9);
    }
  }
}

TEST_CASE("prior-mode fraction of a sample") {
  Matrix pts(4, 2);
  pts << 0, 0, 10, 10, 4, 4, 6, 6;
  Vector y = Vector::Constant(2, 10.0);
  CHECK(prior_mode_fraction(pts, y) == doctest::Approx(0.5));
  CHECK_THROWS_AS(CauchyNormalReference::build(CauchyNormalParams::make(2)).theta1_reference_1d(),
                  ArgumentError);
}
