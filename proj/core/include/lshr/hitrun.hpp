#pragma once

#include <functional>
#include <vector>

#include "lshr/density.hpp"
#include "lshr/random.hpp"

namespace lshr {

/// Pure membership test for a convex set. Along any line the member points
/// form a single interval.
using MembershipPredicate = std::function<bool(const Vector&)>;

/// Segment {base + s * direction : s in [s_lo, s_hi]} clipped to a convex set.
struct Chord {
  Vector base;
  Vector direction;
  double s_lo = 0.0;
  double s_hi = 0.0;

  Vector at(double s) const { return base + s * direction; }
  Vector lower_end() const { return at(s_lo); }
  Vector upper_end() const { return at(s_hi); }
  double length() const { return s_hi - s_lo; }
};

/// Lower-triangular factor L with L L^T = Sigma + ridge. Directions are drawn
/// as L z / |L z| so that hit-and-run adapts to elongated sets.
class CovarianceScaler {
 public:
  static CovarianceScaler identity(int dimension);
  /// Throws ArgumentError if `factor` is not square and finite.
  explicit CovarianceScaler(Matrix factor);

  int dimension() const noexcept { return static_cast<int>(factor_.rows()); }
  const Matrix& factor() const noexcept { return factor_; }
  Matrix covariance() const { return factor_ * factor_.transpose(); }
  bool is_identity() const noexcept { return identity_; }

 private:
  Matrix factor_;
  bool identity_ = false;
};

/// Unit direction L z / |L z| with z standard normal.
Vector sample_direction(const CovarianceScaler& scaler, Rng& rng);

struct ChordSearchOptions {
  double initial_step = 1.0;
  /// Bracket expansion gives up beyond this distance.
  double max_extent = 1152921504606846976.0;  // 2^60
  int max_bisections = 80;
  double relative_tolerance = 1e-10;
};

/// Locates the chord of the member interval through `x` along `direction`.
///
/// Each end is found by doubling a step from 1.0 until the predicate fails,
/// then bisecting the last bracket. The returned s_lo and s_hi are the member
/// (inner) ends of their final brackets, so every point of the chord is a
/// member. Throws PreconditionError if pred(x) is false and UnboundedSetError
/// if an end is not found within max_extent.
Chord find_chord(const MembershipPredicate& pred, const Vector& x, const Vector& direction,
                 const ChordSearchOptions& options = {});

/// Uniform draw on the chord.
Vector sample_uniform_on_chord(const Chord& chord, Rng& rng);

/// Inverse CDF of the density proportional to exp(slope * s) on [s_lo, s_hi]
/// evaluated at u in [0, 1]. Stable for large |slope * (s_hi - s_lo)|.
double exp_tilted_quantile(double s_lo, double s_hi, double slope, double u);

/// Draw on the chord with density proportional to exp(p_slope * s).
Vector sample_exp_tilted_on_chord(const Chord& chord, double p_slope, Rng& rng);

/// Scaler for the sample covariance of `samples` (rows are points) plus a
/// ridge of 1e-8 * trace / dim. Falls back to identity when the
/// factorization fails. Throws ArgumentError for fewer than two rows.
CovarianceScaler update_covariance_scaler(const Matrix& samples);
CovarianceScaler update_covariance_scaler(const std::vector<Vector>& samples);

}  // namespace lshr
