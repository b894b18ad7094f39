#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lshr/density.hpp"

namespace lshr {

/// A univariate reference law, given by its CDF on [lo, hi].
struct ReferenceDistribution {
  std::function<double(double)> cdf;
  std::string description;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  /// Inverse CDF by bisection on [lo, hi] (finite bracket required; an
  /// infinite side is widened until the CDF crosses p).
  double quantile(double p) const;
};

ReferenceDistribution standard_normal_reference();
ReferenceDistribution uniform_reference(double lo, double hi);
/// Marginal of one coordinate of the spike-and-slab.
ReferenceDistribution spike_slab_reference(const SpikeSlabParams& params);
/// Law of |X| under the cone density.
ReferenceDistribution cone_radial_reference(const Cone& cone);
/// Empirical CDF of a (large) reference sample.
ReferenceDistribution empirical_reference(std::vector<double> samples, std::string description);

double standard_normal_cdf(double z);

/// Biased ACF, lags 0..max_lag. Throws ArgumentError for a constant series
/// or when the series is not longer than max_lag.
std::vector<double> autocorrelation(std::span<const double> series, int max_lag);

/// sup |F_n - F|.
double ks_statistic(std::span<const double> samples, const ReferenceDistribution& reference);

/// Two-sample sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// 0.5 Phi(v / spike_sd) + 0.5 Phi(v / slab_sd).
double spike_slab_true_cdf(const SpikeSlabParams& params, double v);
double spike_slab_marginal_pdf(const SpikeSlabParams& params, double v);

/// Running mean of spike-membership flags.
std::vector<double> mixing_proportion_trace(std::span<const int> in_spike);

/// Number of adjacent unequal pairs.
std::int64_t count_switches(std::span<const int> indicators);

/// Empirical quantiles at probabilities k / (count + 1), k = 1..count.
std::vector<double> quantile_table(std::span<const double> samples, int count = 99);
std::vector<double> reference_quantile_table(const ReferenceDistribution& reference, int count = 99);

/// Normalized histogram on `bins` equal bins over [lo, hi) plus two overflow
/// cells (below lo, at or above hi) appended at the end.
std::vector<double> histogram_with_overflow(std::span<const double> samples, double lo, double hi,
                                            int bins);

/// Total variation distance 0.5 * sum |a_i - b_i| between two probability
/// vectors of equal length.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace lshr
