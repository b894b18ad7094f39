#pragma once

#include <cstdint>
#include <vector>

#include "lshr/density.hpp"
#include "lshr/diagnostics.hpp"
#include "lshr/level_set.hpp"
#include "lshr/random.hpp"

namespace lshr {

/// Exact-draw oracle for the Cauchy-normal posterior.
///
/// The unnormalized posterior depends on theta only through the coordinate
/// u = theta . y / |y| and the orthogonal radius v = |theta - u y / |y||.
/// For d >= 2 the oracle tabulates the (u, v) density, including the v^{d-2}
/// Jacobian, on a grid refined until both binned marginals move by less than
/// `tolerance` in total variation. A draw picks a cell, jitters uniformly
/// inside it and attaches a uniformly random direction orthogonal to y. For
/// d = 1 the grid is over theta itself and the CDF is exact up to quadrature.
class CauchyNormalReference {
 public:
  struct Options {
    int initial_cells = 100;
    int max_cells = 1600;
    double tolerance = 1e-3;
    /// Cells with log mass below max - cutoff are trimmed from the window.
    double log_mass_cutoff = 45.0;
  };

  static CauchyNormalReference build(const CauchyNormalParams& params);
  static CauchyNormalReference build(const CauchyNormalParams& params, const Options& options);

  int dimension() const noexcept { return params_.dimension; }
  const CauchyNormalParams& params() const noexcept { return params_; }
  /// Grid resolution per axis at convergence.
  int cells() const noexcept { return cells_; }
  double last_refinement_tv() const noexcept { return last_tv_; }

  /// n independent draws; `log_density` (if non-null) receives the oracle's
  /// own unnormalized log posterior at each draw, evaluated in (u, v) form.
  SampleBatch sample(std::int64_t n, Rng& rng, std::vector<double>* log_density = nullptr) const;

  /// First coordinates of n draws, without materializing full points.
  std::vector<double> sample_theta1(std::int64_t n, Rng& rng) const;

  /// Unnormalized log posterior expressed through (u, v), with no Jacobian.
  double log_posterior_uv(double u, double v) const;

  /// CDF of theta_1; exact quadrature for d = 1 only.
  ReferenceDistribution theta1_reference_1d() const;

  /// Posterior probability that theta . y / |y|^2 < 0.5 (closer to the prior
  /// mode than to the likelihood mode along y).
  double prior_mode_mass() const;

 private:
  CauchyNormalReference() = default;

  CauchyNormalParams params_;
  double y_norm_ = 0.0;
  Vector y_unit_;
  int cells_ = 0;
  double last_tv_ = 0.0;
  // Window: u in [u_lo, u_hi], v in [0, v_hi] (d >= 2) or theta in [u_lo, u_hi] (d = 1).
  double u_lo_ = 0.0;
  double u_hi_ = 0.0;
  double v_hi_ = 0.0;
  std::vector<double> cumulative_;  // normalized cumulative cell masses, row-major in (u, v)
};

/// Fraction of `draws` whose projection on y is below half of |y|^2.
double prior_mode_fraction(const Matrix& draws, const Vector& y);

}  // namespace lshr
