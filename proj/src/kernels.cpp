#include "shom/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "shom/fisher.hpp"
#include "shom/model.hpp"

namespace shom {

namespace {

/// Runs body(i) for i in [0, n) on the OpenMP team. The exception of the
/// lowest failing index is rethrown after the loop.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

std::size_t chunk_count(std::size_t n_events) {
  return (n_events + kEventChunk - 1) / kEventChunk;
}

void fill_chunk(std::vector<EventRecord>& out, std::size_t chunk,
                double delta_theta, const BeamGeometry& geometry,
                const NoiseModel& noise, const RngSeed& seed) {
  Engine engine = make_engine(seed, chunk);
  EventSampler sampler(delta_theta, geometry, noise);
  const std::size_t begin = chunk * kEventChunk;
  const std::size_t end = std::min(out.size(), begin + kEventChunk);
  for (std::size_t i = begin; i < end; ++i) out[i] = sampler(engine);
}

std::int64_t draw_one(double p, std::int64_t exposure, const RngSeed& seed,
                      std::size_t bin, CountingStatistics statistics) {
  Engine engine = make_engine(seed, bin);
  if (statistics == CountingStatistics::poisson) {
    std::poisson_distribution<std::int64_t> dist(static_cast<double>(exposure) * p);
    return std::min(dist(engine), exposure);
  }
  std::binomial_distribution<std::int64_t> dist(exposure, p);
  return dist(engine);
}

}  // namespace

EventBatch EventBatch::from(std::span<const EventRecord> events) {
  EventBatch batch;
  batch.delta_k.reserve(events.size());
  batch.outcome.reserve(events.size());
  for (const auto& e : events) {
    batch.delta_k.push_back(e.delta_k);
    batch.outcome.push_back(e.outcome);
  }
  return batch;
}

double log_likelihood_batch(const EventBatch& events, double delta_theta,
                            const BeamGeometry& geometry,
                            const NoiseModel& noise) {
  const double g = noise.gamma;
  const double nu = noise.nu;
  const double kept = (1.0 - g) * (1.0 - g);
  const double lost_one = 2.0 * g * (1.0 - g);
  const double log_zero = std::log(g * g);
  const double scale = delta_theta * geometry.d;
  const bool symmetric = geometry.exchange == ExchangeSymmetry::symmetric;
  double total = 0.0;
  // Probabilities are <= 1; accumulate a product and take its log only when
  // it nears underflow. A zero probability propagates to -inf.
  double product = 1.0;
  std::size_t lost = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Outcome o = events.outcome[i];
    if (o == Outcome::ZeroDetectors) {
      ++lost;
      continue;
    }
    const double half = 0.5 * events.delta_k[i] * scale;
    // Coincidences need sin^2(x/2) and bunching cos^2(x/2) in the symmetric
    // convention; a single trig call per event keeps both zeros exact.
    const bool use_sin = (o == Outcome::TwoDetectors) == symmetric;
    const double t = use_sin ? std::sin(half) : std::cos(half);
    const double fringe = (1.0 - nu) + 2.0 * nu * t * t;
    const double p = o == Outcome::TwoDetectors ? 0.5 * kept * fringe
                                                : lost_one + 0.5 * kept * fringe;
    product *= p;
    if (product < 1e-250) {
      total += std::log(product);
      product = 1.0;
    }
  }
  total += std::log(product);
  if (lost > 0) total += static_cast<double>(lost) * log_zero;
  return total;
}

namespace serial {

std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad) {
  std::vector<double> out(delta_thetas.size());
  serial_for(out.size(), [&](std::size_t i) {
    out[i] = classical_fisher_information(delta_thetas[i], geometry, noise, quad).value;
  });
  return out;
}

std::vector<double> fisher_over_geometries(
    std::span<const BeamGeometry> geometries, double delta_theta,
    const NoiseModel& noise, const QuadratureSpec& quad) {
  std::vector<double> out(geometries.size());
  serial_for(out.size(), [&](std::size_t i) {
    out[i] = classical_fisher_information(delta_theta, geometries[i], noise, quad).value;
  });
  return out;
}

std::vector<EventRecord> generate_events(std::size_t n_events,
                                         double delta_theta,
                                         const BeamGeometry& geometry,
                                         const NoiseModel& noise,
                                         const RngSeed& seed) {
  std::vector<EventRecord> out(n_events);
  serial_for(chunk_count(n_events), [&](std::size_t c) {
    fill_chunk(out, c, delta_theta, geometry, noise, seed);
  });
  return out;
}

std::vector<double> log_likelihood_grid(const EventBatch& events,
                                        std::span<const double> delta_thetas,
                                        const BeamGeometry& geometry,
                                        const NoiseModel& noise) {
  std::vector<double> out(delta_thetas.size());
  serial_for(out.size(), [&](std::size_t j) {
    out[j] = log_likelihood_batch(events, delta_thetas[j], geometry, noise);
  });
  return out;
}

std::vector<std::int64_t> draw_counts(std::span<const double> probabilities,
                                      std::int64_t exposure,
                                      const RngSeed& seed,
                                      CountingStatistics statistics) {
  std::vector<std::int64_t> out(probabilities.size());
  serial_for(out.size(), [&](std::size_t i) {
    out[i] = draw_one(probabilities[i], exposure, seed, i, statistics);
  });
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad) {
  std::vector<double> out(delta_thetas.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = classical_fisher_information(delta_thetas[i], geometry, noise, quad).value;
  });
  return out;
}

std::vector<double> fisher_over_geometries(
    std::span<const BeamGeometry> geometries, double delta_theta,
    const NoiseModel& noise, const QuadratureSpec& quad) {
  std::vector<double> out(geometries.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = classical_fisher_information(delta_theta, geometries[i], noise, quad).value;
  });
  return out;
}

std::vector<EventRecord> generate_events(std::size_t n_events,
                                         double delta_theta,
                                         const BeamGeometry& geometry,
                                         const NoiseModel& noise,
                                         const RngSeed& seed) {
  std::vector<EventRecord> out(n_events);
  parallel_for(chunk_count(n_events), [&](std::size_t c) {
    fill_chunk(out, c, delta_theta, geometry, noise, seed);
  });
  return out;
}

std::vector<double> log_likelihood_grid(const EventBatch& events,
                                        std::span<const double> delta_thetas,
                                        const BeamGeometry& geometry,
                                        const NoiseModel& noise) {
  std::vector<double> out(delta_thetas.size());
  parallel_for(out.size(), [&](std::size_t j) {
    out[j] = log_likelihood_batch(events, delta_thetas[j], geometry, noise);
  });
  return out;
}

std::vector<std::int64_t> draw_counts(std::span<const double> probabilities,
                                      std::int64_t exposure,
                                      const RngSeed& seed,
                                      CountingStatistics statistics) {
  std::vector<std::int64_t> out(probabilities.size());
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = draw_one(probabilities[i], exposure, seed, i, statistics);
  });
  return out;
}

}  // namespace parallel

}  // namespace shom
