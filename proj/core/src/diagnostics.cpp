#include "lshr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <numeric>

#include "lshr/errors.hpp"

namespace lshr {

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ReferenceDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("quantile: p must lie in (0, 1)");
  double a = std::isfinite(lo) ? lo : -1.0;
  double b = std::isfinite(hi) ? hi : 1.0;
  while (!std::isfinite(lo) && cdf(a) > p) a *= 2.0;
  while (!std::isfinite(hi) && cdf(b) < p) b *= 2.0;
  for (int i = 0; i < 200 && b - a > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    const double mid = 0.5 * (a + b);
    if (cdf(mid) < p) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

ReferenceDistribution standard_normal_reference() {
  return {standard_normal_cdf, "N(0,1)"};
}

ReferenceDistribution uniform_reference(double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("uniform_reference: require lo < hi");
  return {[lo, hi](double v) { return std::clamp((v - lo) / (hi - lo), 0.0, 1.0); },
          "Uniform(" + std::to_string(lo) + "," + std::to_string(hi) + ")", lo, hi};
}

ReferenceDistribution spike_slab_reference(const SpikeSlabParams& params) {
  params.validate();
  return {[params](double v) { return spike_slab_true_cdf(params, v); }, "spike-slab marginal"};
}

ReferenceDistribution cone_radial_reference(const Cone& cone) {
  const double radius = cone.radius();
  return {[cone](double r) { return cone.radial_cdf(r); }, "cone radial law", 0.0, radius};
}

ReferenceDistribution empirical_reference(std::vector<double> samples, std::string description) {
  if (samples.empty()) throw ArgumentError("empirical_reference: no samples");
  std::sort(samples.begin(), samples.end());
  auto sorted = std::make_shared<const std::vector<double>>(std::move(samples));
  const double lo = sorted->front();
  const double hi = sorted->back();
  return {[sorted](double v) {
            const auto it = std::upper_bound(sorted->begin(), sorted->end(), v);
            return static_cast<double>(it - sorted->begin()) / static_cast<double>(sorted->size());
          },
          std::move(description), lo, hi};
}

std::vector<double> autocorrelation(std::span<const double> series, int max_lag) {
  if (max_lag < 1) throw ArgumentError("autocorrelation: max_lag must be >= 1");
  if (series.size() <= static_cast<std::size_t>(max_lag)) {
    throw ArgumentError("autocorrelation: series must be longer than max_lag");
  }
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw ArgumentError("autocorrelation: series has zero variance");
  std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1);
  acf[0] = 1.0;
  for (int lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < series.size(); ++i) {
      c += (series[i] - mean) * (series[i + lag] - mean);
    }
    acf[static_cast<std::size_t>(lag)] = c / c0;
  }
  return acf;
}

double ks_statistic(std::span<const double> samples, const ReferenceDistribution& reference) {
  if (samples.empty()) throw ArgumentError("ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = reference.cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double spike_slab_true_cdf(const SpikeSlabParams& params, double v) {
  return 0.5 * standard_normal_cdf(v / params.spike_sd) +
         0.5 * standard_normal_cdf(v / params.slab_sd);
}

double spike_slab_marginal_pdf(const SpikeSlabParams& params, double v) {
  const auto phi = [](double z, double s) {
    return std::exp(-0.5 * z * z / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
  };
  return 0.5 * phi(v, params.spike_sd) + 0.5 * phi(v, params.slab_sd);
}

std::vector<double> mixing_proportion_trace(std::span<const int> in_spike) {
  if (in_spike.empty()) throw ArgumentError("mixing_proportion_trace: empty sequence");
  std::vector<double> out(in_spike.size());
  double total = 0.0;
  for (std::size_t i = 0; i < in_spike.size(); ++i) {
    total += in_spike[i] != 0 ? 1.0 : 0.0;
    out[i] = total / static_cast<double>(i + 1);
  }
  return out;
}

std::int64_t count_switches(std::span<const int> indicators) {
  if (indicators.empty()) throw ArgumentError("count_switches: empty sequence");
  std::int64_t switches = 0;
  for (std::size_t i = 1; i < indicators.size(); ++i) {
    if (indicators[i] != indicators[i - 1]) ++switches;
  }
  return switches;
}

std::vector<double> quantile_table(std::span<const double> samples, int count) {
  if (samples.empty()) throw ArgumentError("quantile_table: no samples");
  if (count < 1) throw ArgumentError("quantile_table: count must be >= 1");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(static_cast<std::size_t>(count));
  const double n = static_cast<double>(sorted.size());
  for (int k = 1; k <= count; ++k) {
    // Linear interpolation between order statistics (type 7).
    const double h = (n - 1.0) * k / (count + 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    out[static_cast<std::size_t>(k - 1)] = sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
  }
  return out;
}

std::vector<double> reference_quantile_table(const ReferenceDistribution& reference, int count) {
  if (count < 1) throw ArgumentError("reference_quantile_table: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    out[static_cast<std::size_t>(k - 1)] = reference.quantile(k / (count + 1.0));
  }
  return out;
}

std::vector<double> histogram_with_overflow(std::span<const double> samples, double lo, double hi,
                                            int bins) {
  if (bins < 1 || !(lo < hi)) throw ArgumentError("histogram: invalid binning");
  if (samples.empty()) throw ArgumentError("histogram: no samples");
  std::vector<double> h(static_cast<std::size_t>(bins) + 2, 0.0);
  const double width = (hi - lo) / bins;
  for (double v : samples) {
    std::size_t cell;
    if (v < lo) {
      cell = static_cast<std::size_t>(bins);
    } else if (v >= hi) {
      cell = static_cast<std::size_t>(bins) + 1;
    } else {
      cell = std::min(static_cast<std::size_t>((v - lo) / width), static_cast<std::size_t>(bins) - 1);
    }
    h[cell] += 1.0;
  }
  for (double& c : h) c /= static_cast<double>(samples.size());
  return h;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("total_variation: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace lshr
