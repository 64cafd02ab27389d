#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lyafun {

//! Mixes a root seed and a stream counter into an independent seed
//! (splitmix64 finalizer). Used for counter-based per-replicate streams so
//! results do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

//! Seeded random source with platform-independent variates.
//!
//! The standard library distributions are implementation defined, so the
//! uniform, normal and index draws are produced here directly from the
//! mt19937_64 bit stream; outputs are reproducible across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  //! Standard normal (Marsaglia polar method).
  double normal();
  //! Uniform integer in [0, n).
  std::size_t index(std::size_t n);

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace lyafun
