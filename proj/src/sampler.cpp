#include "shom/sampler.hpp"

#include <cmath>

#include "shom/error.hpp"
#include "shom/kernels.hpp"
#include "shom/model.hpp"
#include "shom/quadrature.hpp"
#include "shom/text.hpp"

namespace shom {

EventSampler::EventSampler(double delta_theta, const BeamGeometry& geometry,
                           const NoiseModel& noise)
    : delta_theta_(delta_theta),
      geometry_(geometry),
      noise_(noise),
      delta_k_(0.0, std::sqrt(2.0) * geometry.sigma_k) {
  geometry.validate();
  noise.validate();
}

EventRecord EventSampler::operator()(Engine& engine) {
  const double dk = delta_k_(engine);
  return {dk, outcome_at(dk, engine)};
}

Outcome EventSampler::outcome_at(double delta_k, Engine& engine) {
  const auto p =
      conditional_outcome_probabilities(delta_k, delta_theta_, geometry_, noise_);
  const double u = uniform_(engine);
  if (u < p.p0) return Outcome::ZeroDetectors;
  if (u < p.p0 + p.p1) return Outcome::OneDetector;
  return Outcome::TwoDetectors;
}

EventRecord sample_event(double delta_theta, const BeamGeometry& geometry,
                         const NoiseModel& noise, Engine& engine) {
  return EventSampler(delta_theta, geometry, noise)(engine);
}

std::vector<EventRecord> simulate_run(std::size_t n_events, double delta_theta,
                                      const BeamGeometry& geometry,
                                      const NoiseModel& noise,
                                      const RngSeed& seed) {
  if (n_events < 1) throw DomainError("simulate_run needs at least one event");
  geometry.validate();
  noise.validate();
  return parallel::generate_events(n_events, delta_theta, geometry, noise, seed);
}

std::vector<double> BinSpec::centers() const {
  std::vector<double> out(static_cast<std::size_t>(n_bins));
  const double step = spacing();
  for (int i = 0; i < n_bins; ++i) out[i] = i + 1 == n_bins ? hi : lo + step * i;
  return out;
}

double window_coincidence_probability(double center, double window,
                                      bool average, double delta_theta,
                                      const BeamGeometry& geometry,
                                      const NoiseModel& noise) {
  auto density = [&](double dk) {
    return outcome_densities(dk, delta_theta, geometry, noise).p2;
  };
  if (!average) return window * density(center);
  // Composite Simpson across the window.
  constexpr int kPanels = 64;
  const double h = window / kPanels;
  const double a = center - 0.5 * window;
  double sum = density(a) + density(a + window);
  for (int i = 1; i < kPanels; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * density(a + h * i);
  }
  return sum * h / 3.0;
}

InterferencePattern scan_pattern(const BinSpec& bins,
                                 std::int64_t exposure_per_bin,
                                 double delta_theta,
                                 const BeamGeometry& geometry,
                                 const NoiseModel& noise, const RngSeed& seed,
                                 const ScanOptions& options) {
  geometry.validate();
  noise.validate();
  if (exposure_per_bin < 1) throw DomainError("exposure_per_bin must be >= 1");
  if (bins.n_bins < 2 || !(bins.hi > bins.lo)) {
    throw DomainError("pattern needs at least two bins over a positive range");
  }
  const double limit = QuadratureSpec{}.half_width(geometry.sigma_k);
  if (std::abs(bins.lo) > limit || std::abs(bins.hi) > limit) {
    throw DomainError("pattern bins exceed the quadrature range +-" +
                      format_double(limit) + " m^-1");
  }
  double window = bins.spacing();
  if (options.slit_width) {
    if (!(*options.slit_width > 0.0)) throw DomainError("slit width must be positive");
    window = geometry.wave_number() * *options.slit_width / geometry.d;
  }

  InterferencePattern pattern;
  pattern.bin_centers = bins.centers();
  const std::size_t n = pattern.bin_centers.size();
  std::vector<double> probability(n);
  pattern.model_overlay.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dk = pattern.bin_centers[i];
    pattern.model_overlay[i] = outcome_densities(dk, delta_theta, geometry, noise).p2;
    probability[i] = window_coincidence_probability(
        dk, window, options.slit_width.has_value(), delta_theta, geometry, noise);
    if (probability[i] > 1.0) {
      throw DomainError("momentum window too wide: per-trial probability " +
                        format_double(probability[i]) + " exceeds 1");
    }
  }
  pattern.counts =
      parallel::draw_counts(probability, exposure_per_bin, seed, options.statistics);
  pattern.exposure.assign(n, exposure_per_bin);
  return pattern;
}

}  // namespace shom
