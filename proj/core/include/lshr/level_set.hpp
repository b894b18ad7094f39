#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lshr/density.hpp"
#include "lshr/hitrun.hpp"
#include "lshr/random.hpp"

namespace lshr {

/// Where a level-set run stops: once an accepted threshold is at or below K.
struct StopBound {
  enum class Rule {
    /// log K = log f_max + d * log(value)
    kPerDimension,
    /// log K = log f_max + log(value)
    kRelative,
    /// log K = value
    kAbsoluteLog,
  };

  Rule rule = Rule::kPerDimension;
  double value = 1e-6;

  double log_bound(double log_fmax, int dimension) const;
  bool operator==(const StopBound&) const = default;
};

struct LevelSetOptions {
  /// Hit-and-run steps per level (and per threshold proposal).
  int m = 1000;
  /// t_1 = t1_fraction * f(x_max).
  double t1_fraction = 0.95;
  StopBound stop{};
  double accept_lo = 0.55;
  double accept_hi = 0.8;
  int max_adaptations = 200;
  /// LSHR2 starts at p = log g(theta_max) - initial_p_offset.
  double initial_p_offset = 1e-3;
  /// After a threshold is accepted (and for the first level), walk m further
  /// steps from the end of its cloud, with directions scaled by that cloud's
  /// covariance, and keep those as the level's collection. The walk that
  /// decided acceptance is then never reused as a sample of the level.
  bool refresh_accepted = true;
  /// Estimate every volume ratio with the product-limit estimator over all
  /// walks drawn on accepted levels, instead of one walk per level.
  bool pooled_ratios = true;
  ChordSearchOptions chord{};
};

enum class SamplerKind { kLshr1, kLshr2 };

/// Complete record of a level-set run.
///
/// Collections hold walk coordinates, one point per row: theta for LSHR1,
/// (theta, p) for LSHR2.
struct LevelSetRun {
  SamplerKind kind = SamplerKind::kLshr1;
  int dimension = 0;       // dimension of theta
  int m = 0;
  double log_t0 = 0.0;     // log f(x_max)
  double log_stop = 0.0;   // log K
  std::vector<double> log_thresholds;  // log t_1 > log t_2 > ... > log t_n
  std::vector<double> ratios;          // R_{k:k+1}, size n - 1
  std::vector<double> acceptance_ratios;  // the estimates that accepted each level
  std::vector<Matrix> collections;     // n matrices of m rows
  std::vector<CovarianceScaler> scalers;
  int proposals = 0;       // threshold proposals evaluated, accepted or not

  int levels() const noexcept { return static_cast<int>(log_thresholds.size()); }
  int walk_dimension() const noexcept {
    return kind == SamplerKind::kLshr2 ? dimension + 1 : dimension;
  }
};

/// A point of the LSHR2 augmented walk.
struct AugmentedPoint {
  Vector theta;
  double p = 0.0;

  static AugmentedPoint from_walk(const Vector& walk);
  Vector to_walk() const;
};

/// Unnormalized (log) and normalized level probabilities.
struct LevelWeights {
  std::vector<double> log_q;
  std::vector<double> probabilities;
};

/// Draws with provenance. `tags` carries the level index (LSHR), the
/// component indicator (spike-slab Gibbs) or nothing.
struct SampleBatch {
  std::string sampler;
  std::uint64_t seed = 0;
  Matrix draws;
  std::vector<int> tags;
  std::string tag_name;

  Eigen::Index size() const noexcept { return draws.rows(); }
  int dimension() const noexcept { return static_cast<int>(draws.cols()); }
  Vector column(int j) const { return draws.col(j); }
};

// ---------------------------------------------------------------------------
// Threshold scheduling
// ---------------------------------------------------------------------------

/// Why the previous proposal was turned down.
enum class RejectionReason { kTooCold, kTooClose };

struct RejectedProposal {
  double log_threshold;
  RejectionReason reason;
};

/// Next log threshold to try.
///
/// `accepted` holds log t_0 (the mode) followed by the accepted thresholds;
/// `rejections` lists the proposals already turned down at this level. With
/// no rejection the step equals the last accepted step. Close rejections
/// (ratio too large) and the current threshold bound the answer from above,
/// cold rejections (ratio too small) from below. With a cold bound the next
/// proposal is the midpoint of the tightest bounds, otherwise the distance
/// from the current threshold to the lowest close rejection is doubled.
/// Throws SchedulingError when the bracket collapses.
double propose_next_threshold(std::span<const double> accepted,
                              std::span<const RejectedProposal> rejections = {});

/// Volume ratios R_{k:k+1} = V_k / V_{k+1} from nested-set samples.
///
/// `counts[j][i]` is the number of samples drawn on level j whose innermost
/// level is i (i <= j, levels ordered from the mode outwards). Level i's ratio
/// to its parent is 1 - D_i / N_i, where N_i counts samples from levels
/// j >= i and D_i those of them that are in level i but not level i - 1.
std::vector<double> product_limit_ratios(const std::vector<std::vector<std::int64_t>>& counts);

/// Fraction of rows of `samples` that satisfy `previous`.
double estimate_ratio(const Matrix& samples, const MembershipPredicate& previous);

bool accept_threshold(double ratio, double lo = 0.55, double hi = 0.8);

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

/// Level-set hit-and-run for a quasi-concave density.
LevelSetRun lshr1_run(const DensityModel& model, const LevelSetOptions& options, Rng& rng);

/// Exponentially tilted level-set hit-and-run for prior * likelihood with a
/// quasi-concave prior and a log-concave likelihood.
LevelSetRun lshr2_run(const DensityModel& prior, const LogLikelihood& likelihood,
                      const LevelSetOptions& options, Rng& rng);

/// Level probabilities from thresholds and volume ratios:
/// q_i = (t_{i-1} - t_i) * prod_{j >= i} R_{j:j+1}, with R_{n:n+1} = 1.
LevelWeights level_weights(double log_t0, std::span<const double> log_thresholds,
                           std::span<const double> ratios);
LevelWeights level_weights(const LevelSetRun& run);

/// L draws: pick a level by its probability, then a uniform member of that
/// level's collection. LSHR2 draws drop the p coordinate.
SampleBatch subsample(const LevelSetRun& run, const LevelWeights& weights, std::int64_t count,
                      Rng& rng);

/// Membership predicates used by the drivers, exposed for re-checks.
MembershipPredicate lshr1_membership(const DensityModel& model, double log_t);
MembershipPredicate lshr2_membership(const DensityModel& prior, const LogLikelihood& likelihood,
                                     double log_t);

const char* to_string(SamplerKind kind) noexcept;

}  // namespace lshr
