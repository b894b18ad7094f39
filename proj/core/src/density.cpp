#include "lshr/density.hpp"

#include <cmath>
#include <numbers>

#include "lshr/errors.hpp"

namespace lshr {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_dimension(int expected, const Vector& x, const char* what) {
  if (x.size() != expected) {
    throw ArgumentError(std::string(what) + ": expected dimension " +
                        std::to_string(expected) + ", got " + std::to_string(x.size()));
  }
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log N(x; 0, sd^2 I) given |x|^2.
double isotropic_normal_log_pdf(int d, double sd, double norm2) {
  return -0.5 * d * kLog2Pi - d * std::log(sd) - 0.5 * norm2 / (sd * sd);
}

}  // namespace

// ---------------------------------------------------------------------------

SpikeSlabParams SpikeSlabParams::make(int dimension, double spike, double slab,
                                      ScaleReading reading) {
  SpikeSlabParams p;
  p.dimension = dimension;
  if (reading == ScaleReading::kVariance) {
    if (spike <= 0.0 || slab <= 0.0) throw ArgumentError("spike-slab: variances must be positive");
    p.spike_sd = std::sqrt(spike);
    p.slab_sd = std::sqrt(slab);
  } else {
    p.spike_sd = spike;
    p.slab_sd = slab;
  }
  p.validate();
  return p;
}

void SpikeSlabParams::validate() const {
  if (dimension < 1) throw ArgumentError("spike-slab: dimension must be >= 1");
  if (!(spike_sd > 0.0) || !(spike_sd < slab_sd) || !std::isfinite(slab_sd)) {
    throw ArgumentError("spike-slab: require 0 < spike_sd < slab_sd");
  }
}

double spike_slab_log_density(const SpikeSlabParams& params, const Vector& x) {
  check_dimension(params.dimension, x, "spike_slab_log_density");
  const double norm2 = x.squaredNorm();
  const double half = std::log(0.5);
  return log_add_exp(half + isotropic_normal_log_pdf(params.dimension, params.spike_sd, norm2),
                     half + isotropic_normal_log_pdf(params.dimension, params.slab_sd, norm2));
}

SpikeSlab::SpikeSlab(SpikeSlabParams params) : params_(params) {
  params_.validate();
  max_log_density_ = spike_slab_log_density(params_, Vector::Zero(params_.dimension));
}

double SpikeSlab::log_density(const Vector& x) const { return spike_slab_log_density(params_, x); }

// ---------------------------------------------------------------------------

Matrix MvnParams::covariance() const {
  Matrix sigma = Matrix::Constant(dimension, dimension, rho);
  sigma.diagonal().setOnes();
  return sigma;
}

EquicorrelatedNormal::EquicorrelatedNormal(MvnParams params) : params_(params) {
  if (params_.dimension < 1) throw ArgumentError("mvn: dimension must be >= 1");
  covariance_ = params_.covariance();
  llt_.compute(covariance_);
  if (llt_.info() != Eigen::Success) {
    throw ArgumentError("mvn: covariance is not positive definite (rho = " +
                        std::to_string(params_.rho) + ")");
  }
  factor_ = llt_.matrixL();
  const double min_pivot = factor_.diagonal().minCoeff();
  if (!(min_pivot > 1e-12)) {
    throw ArgumentError("mvn: covariance is not positive definite (rho = " +
                        std::to_string(params_.rho) + ")");
  }
  precision_ = llt_.solve(Matrix::Identity(params_.dimension, params_.dimension));
  const double log_det = 2.0 * factor_.diagonal().array().log().sum();
  log_norm_ = -0.5 * params_.dimension * kLog2Pi - 0.5 * log_det;
}

double EquicorrelatedNormal::log_density(const Vector& x) const {
  check_dimension(params_.dimension, x, "mvn_log_density");
  const Vector z = llt_.matrixL().solve(x);
  return log_norm_ - 0.5 * z.squaredNorm();
}

double mvn_log_density(const EquicorrelatedNormal& model, const Vector& x) {
  return model.log_density(x);
}

// ---------------------------------------------------------------------------

double uniform_box_log_density(int dimension, double lo, double hi, const Vector& theta) {
  check_dimension(dimension, theta, "uniform_box_log_density");
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= lo && theta[i] <= hi)) return kNegInf;
  }
  return -dimension * std::log(hi - lo);
}

UniformBox::UniformBox(int dimension, double lo, double hi)
    : dimension_(dimension), lo_(lo), hi_(hi) {
  if (dimension < 1) throw ArgumentError("uniform-box: dimension must be >= 1");
  if (!(lo < hi)) throw ArgumentError("uniform-box: require lo < hi");
  log_value_ = -dimension * std::log(hi - lo);
}

double UniformBox::log_density(const Vector& x) const {
  return uniform_box_log_density(dimension_, lo_, hi_, x);
}

Vector UniformBox::mode() const { return Vector::Constant(dimension_, 0.5 * (lo_ + hi_)); }

// ---------------------------------------------------------------------------

double cauchy_prior_log_density(int dimension, const Vector& theta) {
  check_dimension(dimension, theta, "cauchy_prior_log_density");
  const double d = dimension;
  return std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5) - 0.5 * d * std::log(std::numbers::pi) -
         0.5 * (d + 1.0) * std::log1p(theta.squaredNorm());
}

MultivariateCauchy::MultivariateCauchy(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw ArgumentError("cauchy: dimension must be >= 1");
  log_norm_ = cauchy_prior_log_density(dimension, Vector::Zero(dimension));
}

double MultivariateCauchy::log_density(const Vector& x) const {
  return cauchy_prior_log_density(dimension_, x);
}

// ---------------------------------------------------------------------------

double cauchy_normal_sigma2(int dimension) {
  if (dimension < 1) throw ArgumentError("cauchy_normal_sigma2: dimension must be >= 1");
  const double d = dimension;
  return d * 100.0 / ((d + 1.0) * std::log1p(d * 100.0));
}

CauchyNormalParams CauchyNormalParams::make(int dimension, double sigma2_override) {
  CauchyNormalParams p;
  p.dimension = dimension;
  p.y = Vector::Constant(dimension, 10.0);
  p.sigma2 = sigma2_override > 0.0 ? sigma2_override : cauchy_normal_sigma2(dimension);
  p.validate();
  return p;
}

void CauchyNormalParams::validate() const {
  if (dimension < 1) throw ArgumentError("cauchy-normal: dimension must be >= 1");
  if (y.size() != dimension) throw ArgumentError("cauchy-normal: y has wrong dimension");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ArgumentError("cauchy-normal: sigma2 must be positive");
  }
}

double normal_log_likelihood(const CauchyNormalParams& params, const Vector& theta) {
  check_dimension(params.dimension, theta, "normal_log_likelihood");
  return -0.5 * params.dimension * (kLog2Pi + std::log(params.sigma2)) -
         (params.y - theta).squaredNorm() / (2.0 * params.sigma2);
}

double cauchy_normal_log_posterior(const CauchyNormalParams& params, const Vector& theta) {
  return cauchy_prior_log_density(params.dimension, theta) + normal_log_likelihood(params, theta);
}

IsotropicNormalLikelihood::IsotropicNormalLikelihood(Vector y, double sigma2)
    : y_(std::move(y)), sigma2_(sigma2) {
  if (y_.size() < 1) throw ArgumentError("normal likelihood: empty observation");
  if (!(sigma2_ > 0.0)) throw ArgumentError("normal likelihood: sigma2 must be positive");
  log_norm_ = -0.5 * static_cast<double>(y_.size()) * (kLog2Pi + std::log(sigma2_));
}

double IsotropicNormalLikelihood::log_likelihood(const Vector& theta) const {
  check_dimension(static_cast<int>(y_.size()), theta, "normal_log_likelihood");
  return log_norm_ - (y_ - theta).squaredNorm() / (2.0 * sigma2_);
}

// ---------------------------------------------------------------------------

double log_unit_ball_volume(int dimension) {
  const double d = dimension;
  return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

Cone::Cone(int dimension, double radius) : dimension_(dimension), radius_(radius) {
  if (dimension < 1) throw ArgumentError("cone: dimension must be >= 1");
  if (!(radius > 0.0)) throw ArgumentError("cone: radius must be positive");
  log_norm_ = std::log(dimension + 1.0) - log_unit_ball_volume(dimension) -
              dimension * std::log(radius);
}

double Cone::log_density(const Vector& x) const {
  check_dimension(dimension_, x, "cone log_density");
  const double u = x.norm() / radius_;
  if (!(u < 1.0)) return kNegInf;
  return log_norm_ + std::log1p(-u);
}

double Cone::level_radius(double log_t) const {
  if (log_t >= log_norm_) return 0.0;
  return radius_ * -std::expm1(log_t - log_norm_);
}

double Cone::radial_cdf(double r) const {
  if (r <= 0.0) return 0.0;
  const double u = r / radius_;
  if (u >= 1.0) return 1.0;
  const double d = dimension_;
  return (d + 1.0) * std::pow(u, d) - d * std::pow(u, d + 1.0);
}

}  // namespace lshr
