#pragma once

#include <limits>
#include <memory>
#include <string>

#include <Eigen/Core>
#include <Eigen/Cholesky>

namespace lshr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Evaluation contract for a target density f.
///
/// All evaluation is in log space. Implementations are immutable after
/// construction and may be shared between concurrently running samplers.
class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual int dimension() const = 0;
  /// log f(x); -inf outside the support.
  virtual double log_density(const Vector& x) const = 0;
  /// Point at which f is maximal.
  virtual Vector mode() const = 0;
  virtual double max_log_density() const = 0;
  virtual std::string name() const = 0;
};

/// A log-concave likelihood term log g(y | theta) for a fixed observation.
class LogLikelihood {
 public:
  virtual ~LogLikelihood() = default;

  virtual int dimension() const = 0;
  virtual double log_likelihood(const Vector& theta) const = 0;
};

// ---------------------------------------------------------------------------
// Spike-and-slab
// ---------------------------------------------------------------------------

/// How the two scale numbers given for a spike-and-slab are read.
enum class ScaleReading { kStandardDeviation, kVariance };

/// 50-50 mixture of N(0, spike_sd^2 I) and N(0, slab_sd^2 I).
struct SpikeSlabParams {
  int dimension = 1;
  double spike_sd = 0.05;
  double slab_sd = 3.0;

  /// Builds parameters from two scale numbers under the given reading.
  /// Throws ArgumentError unless 0 < spike < slab.
  static SpikeSlabParams make(int dimension, double spike, double slab,
                              ScaleReading reading = ScaleReading::kStandardDeviation);
  void validate() const;
};

double spike_slab_log_density(const SpikeSlabParams& params, const Vector& x);

class SpikeSlab final : public DensityModel {
 public:
  explicit SpikeSlab(SpikeSlabParams params);

  int dimension() const override { return params_.dimension; }
  double log_density(const Vector& x) const override;
  Vector mode() const override { return Vector::Zero(params_.dimension); }
  double max_log_density() const override { return max_log_density_; }
  std::string name() const override { return "spike-slab"; }

  const SpikeSlabParams& params() const noexcept { return params_; }

 private:
  SpikeSlabParams params_;
  double max_log_density_;
};

// ---------------------------------------------------------------------------
// Equicorrelated multivariate normal
// ---------------------------------------------------------------------------

/// Unit-diagonal covariance with every off-diagonal entry equal to rho.
struct MvnParams {
  int dimension = 2;
  double rho = 0.0;

  Matrix covariance() const;
};

/// Multivariate normal N(0, Sigma) with a precomputed Cholesky factor.
class EquicorrelatedNormal final : public DensityModel {
 public:
  /// Throws ArgumentError if Sigma is not positive definite.
  explicit EquicorrelatedNormal(MvnParams params);

  int dimension() const override { return params_.dimension; }
  double log_density(const Vector& x) const override;
  Vector mode() const override { return Vector::Zero(params_.dimension); }
  double max_log_density() const override { return log_norm_; }
  std::string name() const override { return "mvn"; }

  const MvnParams& params() const noexcept { return params_; }
  const Matrix& covariance() const noexcept { return covariance_; }
  /// Sigma^{-1}; used by the coordinate Gibbs sampler.
  const Matrix& precision() const noexcept { return precision_; }
  const Matrix& cholesky_factor() const noexcept { return factor_; }

 private:
  MvnParams params_;
  Matrix covariance_;
  Matrix factor_;
  Matrix precision_;
  Eigen::LLT<Matrix> llt_;
  double log_norm_;
};

double mvn_log_density(const EquicorrelatedNormal& model, const Vector& x);

/// N(y = 0 | theta, Sigma) viewed as a function of theta.
class CorrelatedNormalLikelihood final : public LogLikelihood {
 public:
  explicit CorrelatedNormalLikelihood(MvnParams params) : normal_(params) {}

  int dimension() const override { return normal_.dimension(); }
  double log_likelihood(const Vector& theta) const override {
    return normal_.log_density(theta);
  }

 private:
  EquicorrelatedNormal normal_;
};

// ---------------------------------------------------------------------------
// Uniform box
// ---------------------------------------------------------------------------

double uniform_box_log_density(int dimension, double lo, double hi, const Vector& theta);

/// Uniform density on [lo, hi]^d (closed box).
class UniformBox final : public DensityModel {
 public:
  UniformBox(int dimension, double lo, double hi);

  int dimension() const override { return dimension_; }
  double log_density(const Vector& x) const override;
  Vector mode() const override;
  double max_log_density() const override { return log_value_; }
  std::string name() const override { return "uniform-box"; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  int dimension_;
  double lo_;
  double hi_;
  double log_value_;
};

// ---------------------------------------------------------------------------
// Multivariate Cauchy (t with one degree of freedom)
// ---------------------------------------------------------------------------

double cauchy_prior_log_density(int dimension, const Vector& theta);

class MultivariateCauchy final : public DensityModel {
 public:
  explicit MultivariateCauchy(int dimension);

  int dimension() const override { return dimension_; }
  double log_density(const Vector& x) const override;
  Vector mode() const override { return Vector::Zero(dimension_); }
  double max_log_density() const override { return log_norm_; }
  std::string name() const override { return "cauchy"; }

 private:
  int dimension_;
  double log_norm_;
};

// ---------------------------------------------------------------------------
// Cauchy-normal posterior factors
// ---------------------------------------------------------------------------

/// Noise variance that equalizes the unnormalized posterior at theta = 0 and
/// theta = y for y = (10, ..., 10): d*10^2 / ((d+1) * log(1 + d*10^2)).
double cauchy_normal_sigma2(int dimension);

/// y | theta ~ N(theta, sigma2 I), theta ~ multivariate Cauchy(0, I).
struct CauchyNormalParams {
  int dimension = 1;
  Vector y;
  double sigma2 = 0.0;

  /// y = (10, ..., 10); sigma2 from cauchy_normal_sigma2 unless overridden.
  static CauchyNormalParams make(int dimension, double sigma2_override = 0.0);
  void validate() const;
};

/// log g(y | theta) = -(d/2) log(2 pi sigma2) - |y - theta|^2 / (2 sigma2).
double normal_log_likelihood(const CauchyNormalParams& params, const Vector& theta);

/// Unnormalized log posterior: Cauchy prior plus normal likelihood.
double cauchy_normal_log_posterior(const CauchyNormalParams& params, const Vector& theta);

/// Isotropic normal likelihood N(y | theta, sigma2 I).
class IsotropicNormalLikelihood final : public LogLikelihood {
 public:
  IsotropicNormalLikelihood(Vector y, double sigma2);
  explicit IsotropicNormalLikelihood(const CauchyNormalParams& params)
      : IsotropicNormalLikelihood(params.y, params.sigma2) {}

  int dimension() const override { return static_cast<int>(y_.size()); }
  double log_likelihood(const Vector& theta) const override;

  const Vector& y() const noexcept { return y_; }
  double sigma2() const noexcept { return sigma2_; }

 private:
  Vector y_;
  double sigma2_;
  double log_norm_;
};

// ---------------------------------------------------------------------------
// Cone
// ---------------------------------------------------------------------------

/// f(x) proportional to max(0, 1 - |x| / radius). Level sets are balls, so
/// volumes, slice probabilities and the radial law are all closed form.
class Cone final : public DensityModel {
 public:
  explicit Cone(int dimension, double radius = 1.0);

  int dimension() const override { return dimension_; }
  double log_density(const Vector& x) const override;
  Vector mode() const override { return Vector::Zero(dimension_); }
  double max_log_density() const override { return log_norm_; }
  std::string name() const override { return "cone"; }

  double radius() const noexcept { return radius_; }
  /// Radius of the level set {f > t}, t given as log t.
  double level_radius(double log_t) const;
  /// P(|X| <= r) = (d+1) u^d - d u^{d+1}, u = r / radius.
  double radial_cdf(double r) const;

 private:
  int dimension_;
  double radius_;
  double log_norm_;
};

/// log of the volume of the unit ball in `dimension` dimensions.
double log_unit_ball_volume(int dimension);

}  // namespace lshr
