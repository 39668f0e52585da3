#pragma once

// Closed-form probability model of the spatial two-photon interferometer.
//
// All functions take delta_k (momentum difference, m^-1) and delta_theta
// (relative deflection, rad). Densities are with respect to delta_k.

#include "shom/types.hpp"

namespace shom {

/// k = k0 * y / d. Throws ConfigError when geometry.k0 is absent.
double position_to_momentum(double y, const BeamGeometry& geometry);

/// Gaussian envelope C(dk) = exp(-dk^2 / 4 sigma_k^2) / sqrt(4 pi sigma_k^2).
/// Throws DomainError for sigma_k <= 0.
double envelope(double delta_k, double sigma_k);

/// Noiseless coincidence density P_c = C/2 * (1 -+ cos(dk dtheta d)).
double coincidence_density(double delta_k, double delta_theta,
                           const BeamGeometry& geometry);

/// Outcome probabilities conditioned on delta_k; sums to one.
OutcomeTriple conditional_outcome_probabilities(double delta_k,
                                                double delta_theta,
                                                const BeamGeometry& geometry,
                                                const NoiseModel& noise);

/// Joint densities over delta_k; sums to C(delta_k).
OutcomeTriple outcome_densities(double delta_k, double delta_theta,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise);

/// Mixes ideal coincidence/bunching conditionals through independent
/// per-photon loss. Throws DomainError if p_c + p_b deviates from 1 by more
/// than 1e-9.
OutcomeTriple loss_map(double p_coincidence, double p_bunching, double gamma);

/// Noiseless conditional coincidence probability, (1 -+ nu cos x) / 2, with
/// the visibility applied. Computed in half-angle form so the zeros are exact.
double fringe_coincidence(double delta_k, double delta_theta,
                          const BeamGeometry& geometry, double nu);

namespace detail {

/// Half-angle pieces of the fringe phase x = dk * dtheta * d, arranged so
/// that `anti` = 1 -+ nu cos x and `bunch` = 1 +- nu cos x carry no
/// cancellation error near their zeros.
struct Fringe {
  double anti;   // 2 * p_c
  double bunch;  // 2 * p_b
  double sin_half;
  double cos_half;
};

Fringe fringe(double phase, double nu, ExchangeSymmetry exchange) noexcept;

}  // namespace detail

}  // namespace shom
