#pragma once

// Box-constrained Levenberg-Marquardt fit of interference fringes
//   rate(dk) = A * C(dk; sigma_k) * (1 -+ nu cos(dk * dtheta * d))
// to a slit-scan pattern (rate = counts / exposure).

#include <optional>
#include <span>

#include "shom/estimator.hpp"
#include "shom/sampler.hpp"
#include "shom/types.hpp"

namespace shom {

struct FringeParameters {
  double amplitude = 0.0;
  double sigma_k = 0.0;     // m^-1
  double visibility = 0.0;
  double delta_theta = 0.0; // rad
};

struct PatternFit {
  double delta_theta_hat = 0.0;
  double sigma_k_hat = 0.0;
  double visibility_hat = 0.0;
  double amplitude_hat = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
  /// The optimizer pressed against the visibility box [0, 1].
  bool visibility_clamped = false;
  /// False when the data carry no fringe (zero amplitude, visibility or
  /// deflection), so nu and dtheta are not separately determined.
  bool fringe_identifiable = true;

  FringeParameters parameters() const {
    return {amplitude_hat, sigma_k_hat, visibility_hat, delta_theta_hat};
  }
};

struct FitOptions {
  std::optional<FringeParameters> initial_guess;
  /// Deflection search bracket; by default [0, min(5 mrad, Nyquist)] where the
  /// Nyquist deflection puts two bins per fringe.
  std::optional<Bracket> bracket;
  int max_iterations = 500;
  double step_tolerance = 1e-10;
};

/// Model value at one delta_k.
double fringe_model(double delta_k, const FringeParameters& p,
                    const BeamGeometry& geometry);

/// Fit rates sampled at delta_k. Without an initial guess, runs one LM start
/// per eighth of the bracket, each seeded by a linear profile scan over its
/// segment, and keeps the converged start with the lowest residual. Throws
/// DomainError with fewer than 8 points, FitError if no start converges.
PatternFit fit_curve(std::span<const double> delta_k,
                     std::span<const double> rates,
                     const BeamGeometry& geometry,
                     const FitOptions& options = {});

/// fit_curve on counts / exposure of the bins with nonzero exposure.
PatternFit fit_pattern(const InterferencePattern& pattern,
                       const BeamGeometry& geometry,
                       const FitOptions& options = {});

}  // namespace shom
