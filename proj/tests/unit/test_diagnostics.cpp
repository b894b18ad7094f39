#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lshr/diagnostics.hpp"
#include "lshr/errors.hpp"
#include "oracles.hpp"

using namespace lshr;

TEST_CASE("autocorrelation of simple series") {
  std::vector<double> alt;
  for (int i = 0; i < 1000; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto a = autocorrelation(alt, 2);
  CHECK(a[0] == doctest::Approx(1.0));
  CHECK(a[1] == doctest::Approx(-0.999));
  CHECK(a[2] == doctest::Approx(0.998));

  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  std::vector<double> iid(100000);
  for (double& v : iid) v = z(gen);
  const auto b = autocorrelation(iid, 5);
  for (int k = 1; k <= 5; ++k) CHECK(std::abs(b[k]) < 4.0 / std::sqrt(100000.0));

  std::vector<double> ar(200000);
  ar[0] = 0.0;
  for (std::size_t i = 1; i < ar.size(); ++i) ar[i] = 0.7 * ar[i - 1] + z(gen);
  const auto c = autocorrelation(ar, 3);
  CHECK(std::abs(c[1] - 0.7) < 0.01);
  CHECK(std::abs(c[3] - 0.343) < 0.015);

  CHECK_THROWS_AS(autocorrelation(std::vector<double>(10, 2.0), 1), ArgumentError);
  CHECK_THROWS_AS(autocorrelation(std::vector<double>{1.0, 2.0}, 2), ArgumentError);
}

TEST_CASE("one-sample KS statistic") {
  const auto u = uniform_reference(0.0, 1.0);
  CHECK(ks_statistic(std::vector<double>{0.5}, u) == doctest::Approx(0.5));
  CHECK(ks_statistic(std::vector<double>{0.25, 0.75}, u) == doctest::Approx(0.25));
  CHECK(ks_statistic(std::vector<double>{2.0, 3.0}, u) == doctest::Approx(1.0));

  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  std::vector<double> s(50000);
  for (double& v : s) v = z(gen);
  CHECK(ks_statistic(s, standard_normal_reference()) <= 1.63 / std::sqrt(50000.0));
  for (double& v : s) v += 0.1;
  CHECK(ks_statistic(s, standard_normal_reference()) > 0.03);
}

TEST_CASE("two-sample KS statistic") {
  CHECK(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
  CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}) == doctest::Approx(0.5));
}

TEST_CASE("spike-slab marginal") {
  const SpikeSlabParams p{2, 0.05, 3.0};
  CHECK(spike_slab_true_cdf(p, 0.0) == doctest::Approx(0.5));
  CHECK(std::abs(spike_slab_true_cdf(p, 3.0) - 0.920673) < 1e-6);
  CHECK(spike_slab_true_cdf(p, 3.0) ==
        doctest::Approx(0.5 * oracle::normal_cdf(60.0) + 0.5 * oracle::normal_cdf(1.0)).epsilon(1e-12));
  for (double v : {-2.0, -0.04, 0.0, 0.01, 0.3, 4.0}) {
    const double h = 1e-5;
    const double numeric = (spike_slab_true_cdf(p, v + h) - spike_slab_true_cdf(p, v - h)) / (2 * h);
    CHECK(spike_slab_marginal_pdf(p, v) == doctest::Approx(numeric).epsilon(1e-5));
  }
  const auto ref = spike_slab_reference(p);
  CHECK(ref.cdf(3.0) == doctest::Approx(spike_slab_true_cdf(p, 3.0)));
  CHECK(ref.quantile(ref.cdf(1.7)) == doctest::Approx(1.7).epsilon(1e-8));
}

TEST_CASE("reference quantiles") {
  const auto n = standard_normal_reference();
  CHECK(n.quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  const auto table = reference_quantile_table(uniform_reference(0.0, 1.0), 3);
  REQUIRE(table.size() == 3);
  CHECK(table[0] == doctest::Approx(0.25));
  CHECK(table[2] == doctest::Approx(0.75));
  std::vector<double> s{4, 1, 3, 2, 5};
  const auto q = quantile_table(s, 1);
  CHECK(q[0] == doctest::Approx(3.0));
}

TEST_CASE("empirical reference") {
  const auto e = empirical_reference({3.0, 1.0, 2.0, 4.0}, "four points");
  CHECK(e.cdf(0.5) == 0.0);
  CHECK(e.cdf(2.0) == doctest::Approx(0.5));
  CHECK(e.cdf(10.0) == 1.0);
}

TEST_CASE("mixing trace and switch counts") {
  const std::vector<int> flags{1, 1, 0, 0, 1, 0};
  const auto tr = mixing_proportion_trace(flags);
  REQUIRE(tr.size() == 6);
  CHECK(tr[0] == 1.0);
  CHECK(tr[3] == doctest::Approx(0.5));
  CHECK(tr[5] == doctest::Approx(0.5));
  CHECK(count_switches(flags) == 3);
  CHECK_THROWS_AS(count_switches(std::vector<int>{}), ArgumentError);
  CHECK(count_switches(std::vector<int>{0, 0, 0}) == 0);
}

TEST_CASE("switch counts of an independent flag sequence follow the binomial law") {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.3);
  const int n = 100000;
  std::vector<int> flags(n);
  for (int& f : flags) f = coin(gen) ? 1 : 0;
  // Adjacent pairs differ with probability 2 p (1 - p).
  const double mean = (n - 1) * 2 * 0.3 * 0.7;
  CHECK(std::abs(static_cast<double>(count_switches(flags)) - mean) <= 5.0 * std::sqrt(mean));
}

TEST_CASE("histogram and total variation") {
  const std::vector<double> s{-1.0, 0.1, 0.6, 0.7, 2.0};
  const auto h = histogram_with_overflow(s, 0.0, 1.0, 2);
  REQUIRE(h.size() == 4);
  CHECK(h[0] == doctest::Approx(0.2));
  CHECK(h[1] == doctest::Approx(0.4));
  CHECK(h[2] == doctest::Approx(0.2));
  CHECK(h[3] == doctest::Approx(0.2));
  CHECK(total_variation(h, h) == 0.0);
  CHECK(total_variation(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK_THROWS_AS(total_variation(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), ArgumentError);
}
