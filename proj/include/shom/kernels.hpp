#pragma once

// Data-parallel kernels. Every kernel exists twice: a plain serial loop kept
// as the reference, and an OpenMP version that must reproduce it bit for bit
// (each output element depends only on its own index and derived seed).

#include <cstdint>
#include <span>
#include <vector>

#include "shom/quadrature.hpp"
#include "shom/rng.hpp"
#include "shom/sampler.hpp"
#include "shom/types.hpp"

namespace shom {

/// Events in likelihood-ready form.
struct EventBatch {
  std::vector<double> delta_k;
  std::vector<Outcome> outcome;

  static EventBatch from(std::span<const EventRecord> events);
  std::size_t size() const noexcept { return delta_k.size(); }
};

namespace serial {

std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad);
std::vector<double> fisher_over_geometries(
    std::span<const BeamGeometry> geometries, double delta_theta,
    const NoiseModel& noise, const QuadratureSpec& quad);
std::vector<EventRecord> generate_events(std::size_t n_events,
                                         double delta_theta,
                                         const BeamGeometry& geometry,
                                         const NoiseModel& noise,
                                         const RngSeed& seed);
std::vector<double> log_likelihood_grid(const EventBatch& events,
                                        std::span<const double> delta_thetas,
                                        const BeamGeometry& geometry,
                                        const NoiseModel& noise);
std::vector<std::int64_t> draw_counts(std::span<const double> probabilities,
                                      std::int64_t exposure,
                                      const RngSeed& seed,
                                      CountingStatistics statistics);

}  // namespace serial

namespace parallel {

std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad);
std::vector<double> fisher_over_geometries(
    std::span<const BeamGeometry> geometries, double delta_theta,
    const NoiseModel& noise, const QuadratureSpec& quad);
std::vector<EventRecord> generate_events(std::size_t n_events,
                                         double delta_theta,
                                         const BeamGeometry& geometry,
                                         const NoiseModel& noise,
                                         const RngSeed& seed);
std::vector<double> log_likelihood_grid(const EventBatch& events,
                                        std::span<const double> delta_thetas,
                                        const BeamGeometry& geometry,
                                        const NoiseModel& noise);
std::vector<std::int64_t> draw_counts(std::span<const double> probabilities,
                                      std::int64_t exposure,
                                      const RngSeed& seed,
                                      CountingStatistics statistics);

}  // namespace parallel

/// Sum of log conditional probabilities of the batch at one deflection;
/// -infinity if any event is impossible under the model.
double log_likelihood_batch(const EventBatch& events, double delta_theta,
                            const BeamGeometry& geometry,
                            const NoiseModel& noise);

}  // namespace shom
