#include "lshr/hitrun.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "lshr/errors.hpp"

namespace lshr {
namespace {

// Distance to the set boundary along +direction (as a positive number).
double boundary_distance(const MembershipPredicate& pred, const Vector& x, const Vector& direction,
                         double sign, const ChordSearchOptions& options) {
  double inside = 0.0;
  double step = options.initial_step;
  while (pred(x + (sign * step) * direction)) {
    inside = step;
    step *= 2.0;
    if (step > options.max_extent) {
      throw UnboundedSetError("find_chord: level set is unbounded along the sampled direction");
    }
  }
  double outside = step;
  for (int i = 0; i < options.max_bisections; ++i) {
    if (outside - inside <= options.relative_tolerance * (1.0 + outside)) break;
    const double mid = 0.5 * (inside + outside);
    if (pred(x + (sign * mid) * direction)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace

CovarianceScaler CovarianceScaler::identity(int dimension) {
  CovarianceScaler scaler(Matrix::Identity(dimension, dimension));
  scaler.identity_ = true;
  return scaler;
}

CovarianceScaler::CovarianceScaler(Matrix factor) : factor_(std::move(factor)) {
  if (factor_.rows() != factor_.cols() || factor_.rows() == 0) {
    throw ArgumentError("CovarianceScaler: factor must be square and non-empty");
  }
  if (!factor_.allFinite()) throw ArgumentError("CovarianceScaler: factor is not finite");
}

Vector sample_direction(const CovarianceScaler& scaler, Rng& rng) {
  std::normal_distribution<double> normal;
  const int d = scaler.dimension();
  Vector z(d);
  for (;;) {
    for (int i = 0; i < d; ++i) z[i] = normal(rng);
    Vector dir = scaler.is_identity() ? z : Vector(scaler.factor().triangularView<Eigen::Lower>() * z);
    const double n = dir.norm();
    if (n > 0.0 && std::isfinite(n)) return dir / n;
  }
}

Chord find_chord(const MembershipPredicate& pred, const Vector& x, const Vector& direction,
                 const ChordSearchOptions& options) {
  if (x.size() != direction.size()) throw ArgumentError("find_chord: dimension mismatch");
  if (!pred(x)) throw PreconditionError("find_chord: base point is not a member of the set");
  Chord chord;
  chord.base = x;
  chord.direction = direction;
  chord.s_hi = boundary_distance(pred, x, direction, 1.0, options);
  chord.s_lo = -boundary_distance(pred, x, direction, -1.0, options);
  return chord;
}

Vector sample_uniform_on_chord(const Chord& chord, Rng& rng) {
  if (!(chord.s_hi > chord.s_lo)) return chord.at(chord.s_lo);
  std::uniform_real_distribution<double> unif(chord.s_lo, chord.s_hi);
  return chord.at(unif(rng));
}

double exp_tilted_quantile(double s_lo, double s_hi, double slope, double u) {
  const double width = s_hi - s_lo;
  if (!(width > 0.0)) return s_lo;
  const double beta = slope * width;
  double frac;
  if (std::abs(beta) < 1e-8) {
    frac = u;
  } else if (beta > 0.0) {
    // 1 + log(u + (1 - u) e^{-beta}) / beta avoids overflowing e^{beta}.
    frac = 1.0 + std::log(u + (1.0 - u) * std::exp(-beta)) / beta;
  } else {
    frac = std::log1p(u * std::expm1(beta)) / beta;
  }
  frac = std::clamp(frac, 0.0, 1.0);
  return s_lo + width * frac;
}

Vector sample_exp_tilted_on_chord(const Chord& chord, double p_slope, Rng& rng) {
  std::uniform_real_distribution<double> unif;
  return chord.at(exp_tilted_quantile(chord.s_lo, chord.s_hi, p_slope, unif(rng)));
}

CovarianceScaler update_covariance_scaler(const Matrix& samples) {
  if (samples.rows() < 2) {
    throw ArgumentError("update_covariance_scaler: need at least 2 samples");
  }
  const int dim = static_cast<int>(samples.cols());
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Matrix centered = samples.rowwise() - mean;
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
  const double trace = cov.trace();
  if (!(trace > 0.0) || !std::isfinite(trace)) return CovarianceScaler::identity(dim);
  cov.diagonal().array() += 1e-8 * trace / dim;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return CovarianceScaler::identity(dim);
  Matrix factor = llt.matrixL();
  if (!factor.allFinite()) return CovarianceScaler::identity(dim);
  return CovarianceScaler(std::move(factor));
}

CovarianceScaler update_covariance_scaler(const std::vector<Vector>& samples) {
  if (samples.size() < 2) {
    throw ArgumentError("update_covariance_scaler: need at least 2 samples");
  }
  Matrix rows(static_cast<Eigen::Index>(samples.size()), samples.front().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = samples[i].transpose();
  }
  return update_covariance_scaler(rows);
}

}  // namespace lshr
