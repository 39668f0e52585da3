#pragma once

// Maximum-likelihood deflection estimates from event records and Monte Carlo
// variance studies against the Cramer-Rao bound.
//
// The likelihood is even in the deflection, so only |delta_theta| is
// estimable; estimates are magnitudes.

#include <span>
#include <vector>

#include "shom/quadrature.hpp"
#include "shom/rng.hpp"
#include "shom/sampler.hpp"
#include "shom/types.hpp"

namespace shom {

struct Bracket {
  double lo = 0.0;
  double hi = 5.0 * units::mrad;
};

struct DeflectionEstimate {
  double value = 0.0;  // rad, magnitude
  /// Plug-in Cramer-Rao std 1 / sqrt(N_eff F(value)); +inf where F vanishes.
  double std = 0.0;
  double log_likelihood_at_max = 0.0;
  Bracket bracket_used;
  /// The maximum sits on a bracket edge (within the refinement tolerance).
  bool at_boundary = false;
};

/// Sum over events of log p(outcome | delta_k; delta_theta). Returns -infinity
/// if any event is impossible under the model. Throws DomainError on an empty
/// record.
double log_likelihood(std::span<const EventRecord> events, double delta_theta,
                      const BeamGeometry& geometry, const NoiseModel& noise);

inline constexpr int kLikelihoodGridPoints = 1024;
inline constexpr double kLikelihoodTolerance = 1e-9;  // rad

/// Grid scan over the bracket followed by golden-section refinement. Throws
/// NonIdentifiableError if the likelihood is flat over the bracket and
/// DomainError for an empty record or an invalid bracket.
DeflectionEstimate mle_deflection(std::span<const EventRecord> events,
                                  const BeamGeometry& geometry,
                                  const NoiseModel& noise,
                                  const Bracket& bracket = {},
                                  const QuadratureSpec& quad = {});

struct VarianceStudy {
  int n_trials = 0;
  std::size_t n_events_per_trial = 0;
  double empirical_variance = 0.0;  // rad^2
  double crb_variance = 0.0;        // 1 / (N F)
  double ratio = 0.0;               // empirical / crb
  double bias = 0.0;                // mean estimate - truth
  /// |bias| exceeds one CRB standard deviation.
  bool bias_flag = false;
  std::vector<double> estimates;  // rad, trial order
};

/// Runs m_trials independent simulate_run + mle_deflection pairs, trial t
/// seeded with derive_seed(seed, t). Throws DomainError for m_trials < 30.
VarianceStudy variance_study(int m_trials, std::size_t n_events,
                             double delta_theta, const BeamGeometry& geometry,
                             const NoiseModel& noise, const RngSeed& seed,
                             const Bracket& bracket = {},
                             const QuadratureSpec& quad = {});

}  // namespace shom
