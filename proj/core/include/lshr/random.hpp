#pragma once

#include <cstdint>
#include <random>

namespace lshr {

/// Generator used by every sampler. One instance per chain.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to `master + (stream + 1) * golden gamma`.
///
/// Child streams are a pure function of (master, stream), so adding or
/// removing a chain never perturbs the seeds handed to the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(derive_seed(master, stream));
}

}  // namespace lshr
