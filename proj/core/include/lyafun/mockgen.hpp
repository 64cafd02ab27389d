#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lyafun/curves.hpp"

namespace lyafun {

//! Gaussian mock spectrum model
//!   f(l) = mu(l) + sum_j omega_j xi_j(l) + eta(l),
//!   omega_j ~ N(0, eigenvalue_j), eta(l) ~ N(0, sigma(l)^2).
struct MockModel {
  Curve mu;
  std::vector<Curve> xi;
  std::vector<double> eigenvalues;
  Curve sigma;

  std::size_t size() const { return xi.size(); }
  const WavelengthGrid& grid() const { return mu.grid(); }
  void validate() const;
};

struct MockRealization {
  RawSpectrum noisy;
  Curve true_continuum;
  std::vector<double> omega;
};

//! `count` independent realizations. Realization r is drawn from its own
//! stream derived from (seed, r), so a shorter run is a prefix of a longer one.
//! No absorption is simulated.
std::vector<MockRealization> generate(const MockModel& model, std::size_t count, std::uint64_t seed);

//! Knobs of the synthetic stand-in for measured eigenspectra.
struct SyntheticModelConfig {
  std::size_t components = 10;
  //! Ratio between consecutive eigenvalues. 0.5 puts ~97% of the variance in
  //! the first five components for N = 10.
  double eigenvalue_decay = 0.5;
  //! Largest eigenvalue (flux^2 * Angstrom, since the xi_j are L2-normalized).
  double leading_eigenvalue = 5.0;
  //! Baseline noise sd, inflated toward both ends of the grid.
  double noise_level = 0.05;
  double normalization_wavelength = 1300.0;
  //! Seeds the phases of the oscillatory basis.
  std::uint64_t seed = 0;
};

//! Smooth positive mean template (power law plus broad emission lines,
//! equal to 1 at the normalization wavelength), Gram-Schmidt orthonormalized
//! damped cosines as eigenspectra, geometric eigenvalues and an edge-inflated
//! noise profile. The cosines are tilted by (l - l_norm), so every
//! eigenspectrum is zero at the normalization wavelength and mock continua
//! all pass through 1 there.
MockModel synthetic_model(const WavelengthGrid& grid, const SyntheticModelConfig& config);

//! Fraction of the total eigenvalue mass in the first `k` eigenvalues.
double cumulative_eigenvalue_fraction(const std::vector<double>& eigenvalues, std::size_t k);

//! Writes one curve file per component plus `manifest.json` into `directory`.
void save_mock_model(const MockModel& model, const std::filesystem::path& directory);

//! Loads a model from a manifest listing mu, xi_j, eigenvalues and sigma.
//! All curves are resampled onto the grid of mu.
MockModel load_mock_model(const std::filesystem::path& manifest);

} // namespace lyafun
