#include "lshr/gibbs.hpp"

#include <cmath>
#include <limits>

#include "lshr/errors.hpp"

namespace lshr {
namespace {

// Logistic of a log-odds, safe for large magnitudes.
double logistic(double log_odds) {
  if (log_odds >= 0.0) return 1.0 / (1.0 + std::exp(-log_odds));
  const double e = std::exp(log_odds);
  return e / (1.0 + e);
}

void check_run_options(const GibbsRunOptions& options) {
  if (options.iterations < 1) throw ArgumentError("gibbs: iterations must be >= 1");
  if (options.burn_in < 0 || options.burn_in >= options.iterations) {
    throw ArgumentError("gibbs: burn-in must lie in [0, iterations)");
  }
  if (options.thin < 1) throw ArgumentError("gibbs: thin must be >= 1");
}

template <typename Step>
GibbsTrace run_chain(GibbsChainState state, const GibbsRunOptions& options, bool track_indicator,
                     Step&& step) {
  check_run_options(options);
  GibbsTrace trace;
  const std::int64_t kept = (options.iterations - options.burn_in + options.thin - 1) / options.thin;
  trace.draws.resize(kept, state.x.size());
  if (track_indicator) trace.indicators.reserve(static_cast<std::size_t>(options.iterations));
  std::int64_t row = 0;
  for (std::int64_t it = 0; it < options.iterations; ++it) {
    state = step(std::move(state));
    if (track_indicator) {
      if (!trace.indicators.empty() && trace.indicators.back() != state.indicator) {
        ++trace.switch_count;
      }
      trace.indicators.push_back(state.indicator);
    }
    if (it >= options.burn_in && (it - options.burn_in) % options.thin == 0) {
      trace.draws.row(row++) = state.x.transpose();
    }
  }
  return trace;
}

}  // namespace

double spike_slab_slab_probability(const SpikeSlabParams& params, const Vector& x) {
  if (x.size() != params.dimension) throw ArgumentError("spike-slab gibbs: dimension mismatch");
  const double norm2 = x.squaredNorm();
  const double d = params.dimension;
  const double s0 = params.spike_sd;
  const double s1 = params.slab_sd;
  // log phi_1 - log phi_0; the (2 pi)^{-d/2} factors cancel.
  const double log_odds = -d * std::log(s1) - 0.5 * norm2 / (s1 * s1) + d * std::log(s0) +
                          0.5 * norm2 / (s0 * s0);
  return logistic(log_odds);
}

GibbsChainState spike_slab_gibbs_step(GibbsChainState state, const SpikeSlabParams& params,
                                      Rng& rng) {
  std::normal_distribution<double> normal;
  const double sd = state.indicator == 1 ? params.slab_sd : params.spike_sd;
  if (state.x.size() != params.dimension) state.x.resize(params.dimension);
  for (int i = 0; i < params.dimension; ++i) state.x[i] = sd * normal(rng);
  std::bernoulli_distribution slab(spike_slab_slab_probability(params, state.x));
  state.indicator = slab(rng) ? 1 : 0;
  ++state.iteration;
  return state;
}

double switch_probability_exact(int d, double spike_sd, double slab_sd, double norm2) {
  if (d < 1 || !(spike_sd > 0.0) || !(slab_sd > 0.0) || norm2 < 0.0) {
    throw ArgumentError("switch_probability_exact: invalid arguments");
  }
  const double log_a = -d * std::log(slab_sd) - norm2 / (2.0 * slab_sd * slab_sd);
  const double log_b = -d * std::log(spike_sd) - norm2 / (2.0 * spike_sd * spike_sd);
  return logistic(log_a - log_b);
}

double switch_probability_asymptotic(int d, double spike_sd, double slab_sd) {
  if (d < 1 || !(spike_sd > 0.0) || !(slab_sd > 0.0)) {
    throw ArgumentError("switch_probability_asymptotic: invalid arguments");
  }
  return std::exp(d * (std::log(spike_sd) + 0.5 - std::log(slab_sd)));
}

UnivariateNormal mvn_conditional(const EquicorrelatedNormal& model, const Vector& x, int k) {
  const Matrix& q = model.precision();
  const double qkk = q(k, k);
  const double cross = q.row(k).dot(x) - qkk * x[k];
  return {-cross / qkk, 1.0 / qkk};
}

GibbsChainState mvn_gibbs_step(GibbsChainState state, const EquicorrelatedNormal& model, Rng& rng) {
  if (state.x.size() != model.dimension()) throw ArgumentError("mvn gibbs: dimension mismatch");
  std::normal_distribution<double> normal;
  for (int k = 0; k < model.dimension(); ++k) {
    const UnivariateNormal c = mvn_conditional(model, state.x, k);
    state.x[k] = c.mean + std::sqrt(c.variance) * normal(rng);
  }
  ++state.iteration;
  return state;
}

GammaShapeRate cauchy_precision_conditional(int d, const Vector& theta) {
  // Prior 1/tau2 ~ Gamma(1/2, 1/2) times N(theta; 0, tau2 I).
  return {0.5 * (d + 1.0), 0.5 * (1.0 + theta.squaredNorm())};
}

GibbsChainState cauchy_normal_gibbs_step(GibbsChainState state, const CauchyNormalParams& params,
                                         Rng& rng, bool include_likelihood) {
  const int d = params.dimension;
  if (state.x.size() != d) throw ArgumentError("cauchy-normal gibbs: dimension mismatch");
  if (!(state.tau2 > 0.0)) throw ArgumentError("cauchy-normal gibbs: tau2 must be positive");
  std::normal_distribution<double> normal;
  if (include_likelihood) {
    const double precision = 1.0 / params.sigma2 + 1.0 / state.tau2;
    const double var = 1.0 / precision;
    const double sd = std::sqrt(var);
    for (int i = 0; i < d; ++i) {
      state.x[i] = var * params.y[i] / params.sigma2 + sd * normal(rng);
    }
  } else {
    const double sd = std::sqrt(state.tau2);
    for (int i = 0; i < d; ++i) state.x[i] = sd * normal(rng);
  }
  const GammaShapeRate g = cauchy_precision_conditional(d, state.x);
  // std::gamma_distribution takes (shape, scale); scale = 1 / rate.
  std::gamma_distribution<double> gamma(g.shape, 1.0 / g.rate);
  double precision_draw = gamma(rng);
  if (!(precision_draw > 0.0)) precision_draw = std::numeric_limits<double>::min();
  state.tau2 = 1.0 / precision_draw;
  ++state.iteration;
  return state;
}

GibbsTrace run_spike_slab_gibbs(const SpikeSlabParams& params, GibbsChainState initial,
                                const GibbsRunOptions& options, Rng& rng) {
  params.validate();
  if (initial.x.size() != params.dimension) initial.x = Vector::Zero(params.dimension);
  return run_chain(std::move(initial), options, true, [&](GibbsChainState s) {
    return spike_slab_gibbs_step(std::move(s), params, rng);
  });
}

GibbsTrace run_mvn_gibbs(const EquicorrelatedNormal& model, GibbsChainState initial,
                         const GibbsRunOptions& options, Rng& rng) {
  if (initial.x.size() != model.dimension()) initial.x = Vector::Zero(model.dimension());
  return run_chain(std::move(initial), options, false, [&](GibbsChainState s) {
    return mvn_gibbs_step(std::move(s), model, rng);
  });
}

GibbsTrace run_cauchy_normal_gibbs(const CauchyNormalParams& params, GibbsChainState initial,
                                   const GibbsRunOptions& options, Rng& rng) {
  params.validate();
  if (initial.x.size() != params.dimension) initial.x = Vector::Zero(params.dimension);
  return run_chain(std::move(initial), options, false, [&](GibbsChainState s) {
    return cauchy_normal_gibbs_step(std::move(s), params, rng);
  });
}

}  // namespace lshr
