#include "lshr/reference.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include "lshr/errors.hpp"

namespace lshr {
namespace {

constexpr int kMarginalBins = 100;

struct Grid {
  int nu = 0;
  int nv = 0;  // 1 for the d = 1 case
  std::vector<double> log_mass;
};

// Normalized probabilities from log masses.
std::vector<double> normalize(const std::vector<double>& log_mass) {
  const double top = *std::max_element(log_mass.begin(), log_mass.end());
  std::vector<double> p(log_mass.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_mass[i] - top);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

// Marginals of a (nu x nv) probability table binned to kMarginalBins per axis.
// Requires nu and nv to be multiples of kMarginalBins (or nv == 1).
std::vector<double> binned_marginals(const std::vector<double>& p, int nu, int nv) {
  std::vector<double> out(nv > 1 ? 2 * kMarginalBins : kMarginalBins, 0.0);
  const int per_u = nu / kMarginalBins;
  const int per_v = nv > 1 ? nv / kMarginalBins : 1;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double m = p[static_cast<std::size_t>(i) * nv + j];
      out[static_cast<std::size_t>(i / per_u)] += m;
      if (nv > 1) out[kMarginalBins + static_cast<std::size_t>(j / per_v)] += m;
    }
  }
  return out;
}

}  // namespace

double CauchyNormalReference::log_posterior_uv(double u, double v) const {
  const double d = params_.dimension;
  const double r2 = u * u + v * v;
  const double resid2 = (y_norm_ - u) * (y_norm_ - u) + v * v;
  return std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5) - 0.5 * d * std::log(std::numbers::pi) -
         0.5 * (d + 1.0) * std::log1p(r2) -
         0.5 * d * (std::log(2.0 * std::numbers::pi) + std::log(params_.sigma2)) -
         resid2 / (2.0 * params_.sigma2);
}

CauchyNormalReference CauchyNormalReference::build(const CauchyNormalParams& params) {
  return build(params, Options{});
}

CauchyNormalReference CauchyNormalReference::build(const CauchyNormalParams& params,
                                                   const Options& options) {
  params.validate();
  CauchyNormalReference ref;
  ref.params_ = params;
  ref.y_norm_ = params.y.norm();
  if (!(ref.y_norm_ > 0.0)) throw ArgumentError("cauchy-normal reference: y must be non-zero");
  ref.y_unit_ = params.y / ref.y_norm_;

  const int d = params.dimension;
  const double sigma = std::sqrt(params.sigma2);
  const bool radial = d >= 2;
  const auto jacobian = [d](double v) { return d > 2 ? (d - 2) * std::log(v) : 0.0; };

  // Cell-center log masses (up to a constant) over the current window.
  const auto tabulate = [&](int nu, int nv) {
    Grid g;
    g.nu = nu;
    g.nv = radial ? nv : 1;
    g.log_mass.resize(static_cast<std::size_t>(g.nu) * g.nv);
    const double du = (ref.u_hi_ - ref.u_lo_) / nu;
    const double dv = radial ? ref.v_hi_ / nv : 1.0;
    for (int i = 0; i < g.nu; ++i) {
      const double u = ref.u_lo_ + (i + 0.5) * du;
      for (int j = 0; j < g.nv; ++j) {
        const double v = radial ? (j + 0.5) * dv : 0.0;
        g.log_mass[static_cast<std::size_t>(i) * g.nv + j] =
            ref.log_posterior_uv(u, v) + (radial ? jacobian(v) : 0.0);
      }
    }
    return g;
  };

  // Generous window, then trim to where the mass is not negligible.
  ref.u_lo_ = -40.0 * sigma - 10.0;
  ref.u_hi_ = ref.y_norm_ + 40.0 * sigma + 10.0;
  ref.v_hi_ = radial ? 40.0 * sigma + 10.0 : 0.0;
  {
    const int coarse = radial ? 400 : 20000;
    const Grid g = tabulate(coarse, coarse);
    const double top = *std::max_element(g.log_mass.begin(), g.log_mass.end());
    int i_min = g.nu, i_max = -1, j_max = -1;
    for (int i = 0; i < g.nu; ++i) {
      for (int j = 0; j < g.nv; ++j) {
        if (g.log_mass[static_cast<std::size_t>(i) * g.nv + j] > top - options.log_mass_cutoff) {
          i_min = std::min(i_min, i);
          i_max = std::max(i_max, i);
          j_max = std::max(j_max, j);
        }
      }
    }
    const double du = (ref.u_hi_ - ref.u_lo_) / g.nu;
    const double new_lo = ref.u_lo_ + std::max(0, i_min - 2) * du;
    const double new_hi = ref.u_lo_ + std::min(g.nu, i_max + 3) * du;
    if (i_min == 0 || i_max == g.nu - 1 || (radial && j_max == g.nv - 1)) {
      throw OracleError("cauchy-normal reference: posterior mass reaches the search window edge");
    }
    ref.u_lo_ = new_lo;
    ref.u_hi_ = new_hi;
    if (radial) ref.v_hi_ = std::min(g.nv, j_max + 3) * (ref.v_hi_ / g.nv);
  }

  // Refine until the binned marginals settle.
  const int scale = radial ? 1 : 100;
  int cells = std::max(kMarginalBins, options.initial_cells / kMarginalBins * kMarginalBins) * scale;
  const int max_cells = options.max_cells * scale;
  std::vector<double> previous_marginals;
  std::vector<double> probabilities;
  bool converged = false;
  double tv = 1.0;
  for (; cells <= max_cells; cells *= 2) {
    const Grid g = tabulate(cells, cells);
    probabilities = normalize(g.log_mass);
    std::vector<double> marginals = binned_marginals(probabilities, g.nu, g.nv);
    if (!previous_marginals.empty()) {
      tv = total_variation(marginals, previous_marginals) / (radial ? 2.0 : 1.0);
      if (tv < options.tolerance) {
        converged = true;
        break;
      }
    }
    previous_marginals = std::move(marginals);
  }
  if (!converged) {
    throw OracleError("cauchy-normal reference: grid did not converge (last TV change " +
                      std::to_string(tv) + ")");
  }
  ref.cells_ = cells;
  ref.last_tv_ = tv;
  ref.cumulative_.resize(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(), ref.cumulative_.begin());
  ref.cumulative_.back() = 1.0;
  return ref;
}

SampleBatch CauchyNormalReference::sample(std::int64_t n, Rng& rng,
                                          std::vector<double>* log_density) const {
  if (n < 1) throw ArgumentError("cauchy-normal reference: n must be >= 1");
  const int d = params_.dimension;
  const bool radial = d >= 2;
  const int nv = radial ? cells_ : 1;
  const double du = (u_hi_ - u_lo_) / cells_;
  const double dv = radial ? v_hi_ / cells_ : 0.0;
  std::uniform_real_distribution<double> unif;
  std::normal_distribution<double> normal;

  SampleBatch batch;
  batch.sampler = "cauchy-normal-reference";
  batch.draws.resize(n, d);
  if (log_density) log_density->resize(static_cast<std::size_t>(n));
  Vector w(d);
  for (std::int64_t k = 0; k < n; ++k) {
    const double pick = unif(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick);
    const auto cell = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
    const auto i = static_cast<int>(cell / static_cast<std::size_t>(nv));
    const auto j = static_cast<int>(cell % static_cast<std::size_t>(nv));
    const double u = u_lo_ + (i + unif(rng)) * du;
    if (!radial) {
      batch.draws(k, 0) = u;
      if (log_density) (*log_density)[static_cast<std::size_t>(k)] = log_posterior_uv(u, 0.0);
      continue;
    }
    const double v = (j + unif(rng)) * dv;
    double wn = 0.0;
    do {
      for (int c = 0; c < d; ++c) w[c] = normal(rng);
      w -= w.dot(y_unit_) * y_unit_;
      wn = w.norm();
    } while (!(wn > 1e-12));
    batch.draws.row(k) = (u * y_unit_ + (v / wn) * w).transpose();
    if (log_density) (*log_density)[static_cast<std::size_t>(k)] = log_posterior_uv(u, v);
  }
  return batch;
}

std::vector<double> CauchyNormalReference::sample_theta1(std::int64_t n, Rng& rng) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  constexpr std::int64_t kChunk = 65536;
  for (std::int64_t done = 0; done < n; done += kChunk) {
    const SampleBatch b = sample(std::min(kChunk, n - done), rng);
    for (Eigen::Index r = 0; r < b.draws.rows(); ++r) out.push_back(b.draws(r, 0));
  }
  return out;
}

ReferenceDistribution CauchyNormalReference::theta1_reference_1d() const {
  if (params_.dimension != 1) {
    throw ArgumentError("theta1_reference_1d: exact CDF only available for d = 1");
  }
  const auto cumulative = std::make_shared<const std::vector<double>>(cumulative_);
  const double lo = u_lo_;
  const double hi = u_hi_;
  const double du = (hi - lo) / static_cast<double>(cumulative_.size());
  return {[cumulative, lo, hi, du](double x) {
            if (x <= lo) return 0.0;
            if (x >= hi) return 1.0;
            const double pos = (x - lo) / du;
            const auto i = std::min(static_cast<std::size_t>(pos), cumulative->size() - 1);
            const double before = i == 0 ? 0.0 : (*cumulative)[i - 1];
            return before + (pos - static_cast<double>(i)) * ((*cumulative)[i] - before);
          },
          "cauchy-normal posterior (quadrature)", lo, hi};
}

double CauchyNormalReference::prior_mode_mass() const {
  const int nv = params_.dimension >= 2 ? cells_ : 1;
  const double du = (u_hi_ - u_lo_) / cells_;
  double mass = 0.0;
  double prev = 0.0;
  for (std::size_t cell = 0; cell < cumulative_.size(); ++cell) {
    const int i = static_cast<int>(cell / static_cast<std::size_t>(nv));
    const double u = u_lo_ + (i + 0.5) * du;
    if (u < 0.5 * y_norm_) mass += cumulative_[cell] - prev;
    prev = cumulative_[cell];
  }
  return mass;
}

double prior_mode_fraction(const Matrix& draws, const Vector& y) {
  if (draws.rows() == 0) throw ArgumentError("prior_mode_fraction: no draws");
  if (draws.cols() != y.size()) throw ArgumentError("prior_mode_fraction: dimension mismatch");
  const double half = 0.5 * y.squaredNorm();
  Eigen::Index below = 0;
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    if (draws.row(r).dot(y.transpose()) < half) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(draws.rows());
}

}  // namespace lshr
