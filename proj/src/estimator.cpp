#include "shom/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shom/error.hpp"
#include "shom/fisher.hpp"
#include "shom/golden.hpp"
#include "shom/kernels.hpp"
#include "shom/text.hpp"

namespace shom {

namespace {

void validate_bracket(const Bracket& b) {
  if (!(b.lo >= 0.0) || !(b.hi > b.lo) || !std::isfinite(b.hi)) {
    throw DomainError("deflection bracket must satisfy 0 <= lo < hi, got [" +
                      format_double(b.lo) + ", " + format_double(b.hi) + "]");
  }
}

}  // namespace

double log_likelihood(std::span<const EventRecord> events, double delta_theta,
                      const BeamGeometry& geometry, const NoiseModel& noise) {
  if (events.empty()) throw DomainError("log_likelihood needs at least one event");
  return log_likelihood_batch(EventBatch::from(events), delta_theta, geometry, noise);
}

DeflectionEstimate mle_deflection(std::span<const EventRecord> events,
                                  const BeamGeometry& geometry,
                                  const NoiseModel& noise,
                                  const Bracket& bracket,
                                  const QuadratureSpec& quad) {
  if (events.empty()) throw DomainError("mle_deflection needs at least one event");
  geometry.validate();
  noise.validate();
  validate_bracket(bracket);

  const EventBatch batch = EventBatch::from(events);
  std::vector<double> grid(kLikelihoodGridPoints);
  const double step = (bracket.hi - bracket.lo) / (kLikelihoodGridPoints - 1);
  for (int i = 0; i < kLikelihoodGridPoints; ++i) {
    grid[i] = i + 1 == kLikelihoodGridPoints ? bracket.hi : bracket.lo + step * i;
  }
  const std::vector<double> ll =
      parallel::log_likelihood_grid(batch, grid, geometry, noise);

  const auto [min_it, max_it] = std::minmax_element(ll.begin(), ll.end());
  if (!std::isfinite(*max_it)) {
    throw NonIdentifiableError(
        "every deflection in the bracket makes some event impossible");
  }
  if (*max_it - *min_it <= 1e-12 * std::max(1.0, std::abs(*max_it))) {
    throw NonIdentifiableError(
        "likelihood is flat over the bracket; deflection is not identifiable");
  }

  const auto best = static_cast<std::size_t>(max_it - ll.begin());
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  auto refined = golden_section_maximize(
      [&](double t) { return log_likelihood_batch(batch, t, geometry, noise); },
      a, b, kLikelihoodTolerance);
  if (refined.value < *max_it) refined = {grid[best], *max_it};

  DeflectionEstimate est;
  est.value = refined.x;
  est.log_likelihood_at_max = refined.value;
  est.bracket_used = bracket;
  est.at_boundary = refined.x - bracket.lo <= kLikelihoodTolerance ||
                    bracket.hi - refined.x <= kLikelihoodTolerance;

  const auto detected = static_cast<double>(std::count_if(
      batch.outcome.begin(), batch.outcome.end(),
      [](Outcome o) { return o != Outcome::ZeroDetectors; }));
  const double n_eff = detected / (1.0 - noise.gamma * noise.gamma);
  const double fisher =
      classical_fisher_information(est.value, geometry, noise, quad).value;
  est.std = fisher > 0.0 && n_eff > 0.0 ? 1.0 / std::sqrt(n_eff * fisher)
                                        : std::numeric_limits<double>::infinity();
  return est;
}

VarianceStudy variance_study(int m_trials, std::size_t n_events,
                             double delta_theta, const BeamGeometry& geometry,
                             const NoiseModel& noise, const RngSeed& seed,
                             const Bracket& bracket, const QuadratureSpec& quad) {
  if (m_trials < 30) throw DomainError("variance_study needs at least 30 trials");
  if (n_events < 1) throw DomainError("variance_study needs at least one event");
  geometry.validate();
  noise.validate();
  validate_bracket(bracket);

  VarianceStudy study;
  study.n_trials = m_trials;
  study.n_events_per_trial = n_events;
  study.estimates.resize(static_cast<std::size_t>(m_trials));
  std::vector<std::exception_ptr> errors(study.estimates.size());
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < m_trials; ++t) {
    try {
      const auto events = serial::generate_events(
          n_events, delta_theta, geometry, noise,
          derive_seed(seed, static_cast<std::uint64_t>(t)));
      study.estimates[t] =
          mle_deflection(events, geometry, noise, bracket, quad).value;
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const double m = static_cast<double>(m_trials);
  const double mean =
      std::accumulate(study.estimates.begin(), study.estimates.end(), 0.0) / m;
  double ss = 0.0;
  for (double e : study.estimates) ss += (e - mean) * (e - mean);
  study.empirical_variance = ss / (m - 1.0);
  const double fisher =
      classical_fisher_information(delta_theta, geometry, noise, quad).value;
  study.crb_variance = fisher > 0.0
                           ? 1.0 / (static_cast<double>(n_events) * fisher)
                           : std::numeric_limits<double>::infinity();
  study.ratio = study.empirical_variance / study.crb_variance;
  study.bias = mean - std::abs(delta_theta);
  study.bias_flag = std::abs(study.bias) > std::sqrt(study.crb_variance);
  return study;
}

}  // namespace shom
