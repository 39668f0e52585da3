#pragma once

// Discretized-mode evaluation of the two-photon coincidence probability.
//
// Builds the Gaussian single-photon position amplitude on a grid, transforms
// it to momentum space by direct discrete Fourier sums, applies the
// deflection phase to the first photon, routes both photons through a
// balanced beam splitter, keeps only the one-photon-per-port terms and
// projects onto detected momenta (k1, k2). Independent of the closed form in
// model.hpp, which it is used to check.

#include <complex>
#include <vector>

#include "shom/types.hpp"

namespace shom {

/// Transverse-position sampling grid: `n_points` midpoints covering
/// [-extent, extent].
struct ModeGrid {
  double extent = 0.0;
  int n_points = 0;

  /// Grid of `n_points` samples spanning `multiples` position-space standard
  /// deviations 1 / (2 sigma_k) on either side.
  static ModeGrid spanning(double multiples, int n_points, double sigma_k);
};

class CoincidenceOracle {
 public:
  /// Throws DomainError if the grid has fewer than 64 or an odd number of
  /// points or spans fewer than 6 position standard deviations, and
  /// ResolutionError if |psi|^2 at the grid edge exceeds 1e-10 of its peak.
  CoincidenceOracle(const BeamGeometry& geometry, const ModeGrid& grid);

  /// Single-photon momentum amplitude phi(k) by direct discrete Fourier sum.
  /// Throws ResolutionError beyond the grid's Nyquist momentum.
  std::complex<double> momentum_amplitude(double k) const;

  /// Coincidence amplitude for detector 3 registering k1 and detector 4 k2.
  std::complex<double> coincidence_amplitude(double delta_theta, double k1,
                                             double k2) const;

  /// Joint density |amplitude|^2 = 1/2 |phi(k1)|^2 |phi(k2)|^2 (1 -+ cos).
  double operator()(double delta_theta, double k1, double k2) const;

  double nyquist_momentum() const noexcept { return nyquist_; }

 private:
  BeamGeometry geometry_;
  double dx_ = 0.0;
  double nyquist_ = 0.0;
  std::vector<double> x_;
  std::vector<double> psi_;
};

double coincidence_oracle(double delta_theta, double k1, double k2,
                          const BeamGeometry& geometry, const ModeGrid& grid);

/// Distribution of the mean momentum (k1 + k2) / 2 for two independent
/// photons: |phi(k1)|^2 |phi(k2)|^2 = total_momentum_marginal(K) * C(k1 - k2).
double total_momentum_marginal(double k_mean, double sigma_k);

}  // namespace shom
