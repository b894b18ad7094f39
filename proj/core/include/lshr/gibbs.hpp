#pragma once

#include <cstdint>
#include <vector>

#include "lshr/density.hpp"
#include "lshr/random.hpp"

namespace lshr {

/// State of a component-wise Gibbs chain.
///
/// `indicator` is only used by the spike-slab sampler (0 = spike, 1 = slab)
/// and `tau2` only by the Cauchy-normal sampler.
struct GibbsChainState {
  Vector x;
  int indicator = 0;
  double tau2 = 1.0;
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;
};

/// Retained draws plus, for spike-slab, the full indicator history.
struct GibbsTrace {
  Matrix draws;
  std::vector<int> indicators;
  std::int64_t switch_count = 0;
};

// ---------------------------------------------------------------------------
// Spike-and-slab data augmentation
// ---------------------------------------------------------------------------

/// P(I = 1 | x) = phi(x; 0, s1^2 I) / (phi(x; 0, s1^2 I) + phi(x; 0, s0^2 I)).
double spike_slab_slab_probability(const SpikeSlabParams& params, const Vector& x);

/// x ~ N(0, sigma_I^2 I) given the indicator, then I ~ Bernoulli(P(I = 1 | x)).
GibbsChainState spike_slab_gibbs_step(GibbsChainState state, const SpikeSlabParams& params,
                                      Rng& rng);

/// Switch probability out of the spike for a point with |x|^2 = norm2.
double switch_probability_exact(int d, double spike_sd, double slab_sd, double norm2);

/// Large-d approximation (spike_sd * sqrt(e) / slab_sd)^d.
double switch_probability_asymptotic(int d, double spike_sd, double slab_sd);

// ---------------------------------------------------------------------------
// Coordinate Gibbs for an equicorrelated normal
// ---------------------------------------------------------------------------

/// Conditional mean and variance of coordinate k given the others.
struct UnivariateNormal {
  double mean;
  double variance;
};
UnivariateNormal mvn_conditional(const EquicorrelatedNormal& model, const Vector& x, int k);

/// One ascending sweep over all coordinates.
GibbsChainState mvn_gibbs_step(GibbsChainState state, const EquicorrelatedNormal& model, Rng& rng);

// ---------------------------------------------------------------------------
// Cauchy-normal with a tau^2 scale augmentation
// ---------------------------------------------------------------------------

/// theta | tau2 ~ N(w y, v I), v = 1 / (1/sigma2 + 1/tau2), w = v / sigma2;
/// then 1/tau2 ~ Gamma(shape (d+1)/2, rate (1 + theta'theta)/2).
///
/// `include_likelihood = false` drops the data term, leaving a sampler for
/// the Cauchy prior itself.
GibbsChainState cauchy_normal_gibbs_step(GibbsChainState state, const CauchyNormalParams& params,
                                         Rng& rng, bool include_likelihood = true);

/// Shape and rate of the 1/tau2 full conditional.
struct GammaShapeRate {
  double shape;
  double rate;
};
GammaShapeRate cauchy_precision_conditional(int d, const Vector& theta);

// ---------------------------------------------------------------------------
// Chain drivers
// ---------------------------------------------------------------------------

struct GibbsRunOptions {
  std::int64_t iterations = 100000;
  std::int64_t burn_in = 0;
  /// Keep every draw after burn-in (thin = 1) or every thin-th.
  std::int64_t thin = 1;
};

/// Runs from `initial`; indicator history covers every iteration.
GibbsTrace run_spike_slab_gibbs(const SpikeSlabParams& params, GibbsChainState initial,
                                const GibbsRunOptions& options, Rng& rng);
GibbsTrace run_mvn_gibbs(const EquicorrelatedNormal& model, GibbsChainState initial,
                         const GibbsRunOptions& options, Rng& rng);
GibbsTrace run_cauchy_normal_gibbs(const CauchyNormalParams& params, GibbsChainState initial,
                                   const GibbsRunOptions& options, Rng& rng);

}  // namespace lshr
