#include "lshr/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lshr/errors.hpp"

namespace lshr {
namespace {

// Runs m hit-and-run steps inside `pred` from `start`. When `tilt_index` is
// set, chord draws are weighted by exp(walk[tilt_index]).
Matrix walk_level(const MembershipPredicate& pred, const Vector& start,
                  const CovarianceScaler& scaler, int m, std::optional<int> tilt_index,
                  const ChordSearchOptions& chord_options, Rng& rng) {
  Matrix out(m, start.size());
  Vector x = start;
  for (int i = 0; i < m; ++i) {
    const Vector dir = sample_direction(scaler, rng);
    const Chord chord = find_chord(pred, x, dir, chord_options);
    x = tilt_index ? sample_exp_tilted_on_chord(chord, dir[*tilt_index], rng)
                   : sample_uniform_on_chord(chord, rng);
    out.row(i) = x.transpose();
  }
  return out;
}

CovarianceScaler scaler_for(const Matrix& collection) {
  return update_covariance_scaler(collection);
}

using PredicateFactory = std::function<MembershipPredicate(double)>;

LevelSetRun run_levels(SamplerKind kind, int theta_dim, const Vector& start, double log_t0,
                       const PredicateFactory& make_pred, std::optional<int> tilt_index,
                       const LevelSetOptions& options, Rng& rng) {
  if (options.m < 2) throw ArgumentError("level-set run: m must be >= 2");
  if (!(options.t1_fraction > 0.0 && options.t1_fraction < 1.0)) {
    throw ArgumentError("level-set run: t1_fraction must lie in (0, 1)");
  }
  if (!(options.accept_lo > 0.0 && options.accept_lo < options.accept_hi &&
        options.accept_hi <= 1.0)) {
    throw ArgumentError("level-set run: invalid acceptance window");
  }
  if (!std::isfinite(log_t0)) throw ArgumentError("level-set run: density at the mode is not finite");

  LevelSetRun run;
  run.kind = kind;
  run.dimension = theta_dim;
  run.m = options.m;
  run.log_t0 = log_t0;
  run.log_stop = options.stop.log_bound(log_t0, theta_dim);

  const double log_t1 = log_t0 + std::log(options.t1_fraction);
  if (!(run.log_stop < log_t1)) {
    throw ArgumentError("level-set run: stop bound K must lie below t1");
  }

  const int walk_dim = static_cast<int>(start.size());
  std::vector<MembershipPredicate> levels;
  std::vector<std::vector<std::int64_t>> tallies;

  // Counts each row of `cloud` (drawn on the newest level) by its innermost level.
  const auto tally = [&](const Matrix& cloud) {
    const int j = static_cast<int>(levels.size()) - 1;
    auto& row = tallies.back();
    for (Eigen::Index r = 0; r < cloud.rows(); ++r) {
      const Vector x = cloud.row(r).transpose();
      int lo = 0;
      int hi = j;
      while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (levels[static_cast<std::size_t>(mid)](x)) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      ++row[static_cast<std::size_t>(lo)];
    }
  };

  // Stores a new level whose acceptance walk was `cloud`.
  const auto store = [&](const MembershipPredicate& pred, Matrix cloud) {
    levels.push_back(pred);
    tallies.emplace_back(levels.size(), 0);
    if (options.refresh_accepted) {
      const Vector from = cloud.row(cloud.rows() - 1).transpose();
      Matrix fresh = walk_level(pred, from, scaler_for(cloud), options.m, tilt_index, options.chord, rng);
      if (options.pooled_ratios) tally(cloud);
      cloud = std::move(fresh);
    }
    if (options.pooled_ratios) tally(cloud);
    run.scalers.push_back(scaler_for(cloud));
    run.collections.push_back(std::move(cloud));
  };

  MembershipPredicate current = make_pred(log_t1);
  run.log_thresholds.push_back(log_t1);
  store(current, walk_level(current, start, CovarianceScaler::identity(walk_dim), options.m,
                            tilt_index, options.chord, rng));

  std::vector<double> accepted{log_t0, log_t1};
  bool finished = false;
  while (!finished && run.log_thresholds.back() > run.log_stop) {
    std::vector<RejectedProposal> rejections;
    bool placed = false;
    for (int attempt = 0; attempt < options.max_adaptations; ++attempt) {
      const double proposal = propose_next_threshold(accepted, rejections);
      ++run.proposals;
      const MembershipPredicate candidate = make_pred(proposal);
      const Matrix& previous = run.collections.back();
      const Vector restart = previous.row(previous.rows() - 1).transpose();
      Matrix cloud = walk_level(candidate, restart, run.scalers.back(), options.m, tilt_index,
                                options.chord, rng);
      const double ratio = estimate_ratio(cloud, current);

      const bool in_window = accept_threshold(ratio, options.accept_lo, options.accept_hi);
      const bool terminal = !in_window && ratio > options.accept_hi && proposal <= run.log_stop;
      if (terminal && ratio >= 1.0) {
        // Nothing left outside the current set down to K.
        finished = true;
        placed = true;
        break;
      }
      if (in_window || terminal) {
        run.log_thresholds.push_back(proposal);
        run.acceptance_ratios.push_back(ratio);
        store(candidate, std::move(cloud));
        run.ratios.push_back(options.refresh_accepted ? estimate_ratio(run.collections.back(), current)
                                                      : ratio);
        accepted.push_back(proposal);
        current = candidate;
        placed = true;
        break;
      }
      rejections.push_back({proposal, ratio < options.accept_lo ? RejectionReason::kTooCold
                                                                : RejectionReason::kTooClose});
    }
    if (!placed) {
      throw SchedulingError("level-set run: no acceptable threshold after " +
                            std::to_string(options.max_adaptations) + " proposals at level " +
                            std::to_string(run.levels()));
    }
  }
  if (options.pooled_ratios) run.ratios = product_limit_ratios(tallies);
  return run;
}

}  // namespace

std::vector<double> product_limit_ratios(const std::vector<std::vector<std::int64_t>>& counts) {
  const std::size_t n = counts.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (counts[j].size() != j + 1) throw ArgumentError("product_limit_ratios: counts must be lower triangular");
  }
  std::vector<double> ratios;
  ratios.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::int64_t at_risk = 0;
    std::int64_t in_shell = 0;
    for (std::size_t j = i; j < n; ++j) {
      for (std::size_t k = 0; k <= i; ++k) at_risk += counts[j][k];
      in_shell += counts[j][i];
    }
    if (at_risk == 0) throw ArgumentError("product_limit_ratios: no samples inside level " + std::to_string(i));
    if (in_shell == at_risk) {
      throw SchedulingError("product_limit_ratios: no sample fell inside level " + std::to_string(i - 1));
    }
    ratios.push_back(1.0 - static_cast<double>(in_shell) / static_cast<double>(at_risk));
  }
  return ratios;
}

double StopBound::log_bound(double log_fmax, int dimension) const {
  switch (rule) {
    case Rule::kPerDimension:
      if (!(value > 0.0 && value < 1.0)) throw ArgumentError("stop bound: value must lie in (0, 1)");
      return log_fmax + dimension * std::log(value);
    case Rule::kRelative:
      if (!(value > 0.0 && value < 1.0)) throw ArgumentError("stop bound: value must lie in (0, 1)");
      return log_fmax + std::log(value);
    case Rule::kAbsoluteLog:
      return value;
  }
  return value;
}

AugmentedPoint AugmentedPoint::from_walk(const Vector& walk) {
  if (walk.size() < 2) throw ArgumentError("AugmentedPoint: walk vector too short");
  return {walk.head(walk.size() - 1), walk[walk.size() - 1]};
}

Vector AugmentedPoint::to_walk() const {
  Vector w(theta.size() + 1);
  w.head(theta.size()) = theta;
  w[theta.size()] = p;
  return w;
}

double propose_next_threshold(std::span<const double> accepted,
                              std::span<const RejectedProposal> rejections) {
  if (accepted.size() < 2) {
    throw ArgumentError("propose_next_threshold: need t0 and at least one accepted threshold");
  }
  const double current = accepted.back();
  const double previous = accepted[accepted.size() - 2];
  double upper = current;
  std::optional<double> lower;
  for (const auto& r : rejections) {
    if (r.reason == RejectionReason::kTooClose) {
      upper = std::min(upper, r.log_threshold);
    } else {
      lower = lower ? std::max(*lower, r.log_threshold) : r.log_threshold;
    }
  }
  double proposal;
  if (rejections.empty()) {
    proposal = current - (previous - current);
  } else if (lower) {
    proposal = 0.5 * (*lower + upper);
  } else {
    proposal = upper - (current - upper);
  }
  const double tol = 1e-14 * std::max(1.0, std::abs(current));
  if (!(current - proposal > tol) || (lower && !(upper - *lower > tol))) {
    throw SchedulingError("propose_next_threshold: threshold bracket collapsed");
  }
  return proposal;
}

double estimate_ratio(const Matrix& samples, const MembershipPredicate& previous) {
  if (samples.rows() == 0) throw ArgumentError("estimate_ratio: empty sample collection");
  Eigen::Index inside = 0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    if (previous(samples.row(i).transpose())) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(samples.rows());
}

bool accept_threshold(double ratio, double lo, double hi) { return ratio >= lo && ratio <= hi; }

MembershipPredicate lshr1_membership(const DensityModel& model, double log_t) {
  return [&model, log_t](const Vector& x) { return model.log_density(x) > log_t; };
}

MembershipPredicate lshr2_membership(const DensityModel& prior, const LogLikelihood& likelihood,
                                     double log_t) {
  const int d = prior.dimension();
  return [&prior, &likelihood, log_t, d](const Vector& w) {
    const Vector theta = w.head(d);
    return prior.log_density(theta) >= log_t && w[d] < likelihood.log_likelihood(theta);
  };
}

LevelSetRun lshr1_run(const DensityModel& model, const LevelSetOptions& options, Rng& rng) {
  return run_levels(
      SamplerKind::kLshr1, model.dimension(), model.mode(), model.max_log_density(),
      [&model](double log_t) { return lshr1_membership(model, log_t); }, std::nullopt, options,
      rng);
}

LevelSetRun lshr2_run(const DensityModel& prior, const LogLikelihood& likelihood,
                      const LevelSetOptions& options, Rng& rng) {
  const int d = prior.dimension();
  if (likelihood.dimension() != d) throw ArgumentError("lshr2_run: prior/likelihood dimension mismatch");
  const Vector mode = prior.mode();
  const double log_g = likelihood.log_likelihood(mode);
  if (!std::isfinite(log_g)) throw ArgumentError("lshr2_run: likelihood is not finite at the prior mode");
  const AugmentedPoint start{mode, log_g - options.initial_p_offset};
  return run_levels(
      SamplerKind::kLshr2, d, start.to_walk(), prior.max_log_density(),
      [&prior, &likelihood](double log_t) { return lshr2_membership(prior, likelihood, log_t); },
      d, options, rng);
}

LevelWeights level_weights(double log_t0, std::span<const double> log_thresholds,
                           std::span<const double> ratios) {
  const std::size_t n = log_thresholds.size();
  if (n == 0) throw ArgumentError("level_weights: no levels");
  if (ratios.size() + 1 != n) throw ArgumentError("level_weights: need n - 1 ratios");

  // Suffix sums of log R, with R_{n:n+1} = 1.
  std::vector<double> log_tail(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    if (!(ratios[i] > 0.0)) throw ArgumentError("level_weights: ratios must be positive");
    log_tail[i] = log_tail[i + 1] + std::log(ratios[i]);
  }

  // log(t_{i-1} - t_i) relative to log t0, the largest threshold.
  LevelWeights w;
  w.log_q.resize(n);
  double prev = log_t0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cur = log_thresholds[i];
    if (!(cur < prev)) throw ArgumentError("level_weights: thresholds must strictly decrease");
    w.log_q[i] = prev + std::log(-std::expm1(cur - prev)) + log_tail[i];
    prev = cur;
  }
  const double top = *std::max_element(w.log_q.begin(), w.log_q.end());
  double total = 0.0;
  w.probabilities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.probabilities[i] = std::exp(w.log_q[i] - top);
    total += w.probabilities[i];
  }
  for (double& p : w.probabilities) p /= total;
  return w;
}

LevelWeights level_weights(const LevelSetRun& run) {
  return level_weights(run.log_t0, run.log_thresholds, run.ratios);
}

SampleBatch subsample(const LevelSetRun& run, const LevelWeights& weights, std::int64_t count,
                      Rng& rng) {
  if (count < 1) throw ArgumentError("subsample: L must be >= 1");
  if (weights.probabilities.size() != run.collections.size()) {
    throw ArgumentError("subsample: weights do not match the run");
  }
  SampleBatch batch;
  batch.sampler = to_string(run.kind);
  batch.tag_name = "level";
  batch.draws.resize(count, run.dimension);
  batch.tags.resize(static_cast<std::size_t>(count));
  std::discrete_distribution<int> pick_level(weights.probabilities.begin(),
                                             weights.probabilities.end());
  for (std::int64_t l = 0; l < count; ++l) {
    const int level = pick_level(rng);
    const Matrix& collection = run.collections[static_cast<std::size_t>(level)];
    std::uniform_int_distribution<Eigen::Index> pick_row(0, collection.rows() - 1);
    batch.draws.row(l) = collection.row(pick_row(rng)).head(run.dimension);
    batch.tags[static_cast<std::size_t>(l)] = level + 1;
  }
  return batch;
}

const char* to_string(SamplerKind kind) noexcept {
  return kind == SamplerKind::kLshr2 ? "lshr2" : "lshr1";
}

}  // namespace lshr
