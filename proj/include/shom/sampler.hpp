#pragma once

// Seeded Monte Carlo generation of single-pair measurement records and of
// slit-scan interference patterns.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "shom/rng.hpp"
#include "shom/types.hpp"

namespace shom {

struct EventRecord {
  double delta_k = 0.0;  // m^-1
  Outcome outcome = Outcome::OneDetector;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Draws delta_k from the envelope (zero mean, std sqrt(2) sigma_k) and the
/// outcome by inverse transform over (0, 1, 2) detectors.
class EventSampler {
 public:
  EventSampler(double delta_theta, const BeamGeometry& geometry,
               const NoiseModel& noise);

  EventRecord operator()(Engine& engine);
  /// Outcome draw conditional on a given delta_k.
  Outcome outcome_at(double delta_k, Engine& engine);

 private:
  double delta_theta_;
  BeamGeometry geometry_;
  NoiseModel noise_;
  std::normal_distribution<double> delta_k_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

EventRecord sample_event(double delta_theta, const BeamGeometry& geometry,
                         const NoiseModel& noise, Engine& engine);

/// Events are generated in chunks of 2^16, chunk c drawing from
/// make_engine(seed, c), so the output does not depend on thread count.
inline constexpr std::size_t kEventChunk = std::size_t{1} << 16;

std::vector<EventRecord> simulate_run(std::size_t n_events, double delta_theta,
                                      const BeamGeometry& geometry,
                                      const NoiseModel& noise,
                                      const RngSeed& seed);

/// Uniform bins over [lo, hi] (bin centers), m^-1.
struct BinSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n_bins = 0;

  std::vector<double> centers() const;
  double spacing() const { return (hi - lo) / (n_bins - 1); }
};

enum class CountingStatistics { binomial, poisson };

struct InterferencePattern {
  std::vector<double> bin_centers;           // m^-1
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> exposure;        // trials per bin
  std::vector<double> model_overlay;         // noiseless coincidence density, m
};

/// Probability that one emitted pair lands in the momentum window centered at
/// `center` and yields a coincidence: window width times the window-averaged
/// coincidence density. With no slit the window is one bin, evaluated at its
/// center; with a slit of width w the window is k0 w / d and the density is
/// averaged across it.
double window_coincidence_probability(double center, double window,
                                      bool average, double delta_theta,
                                      const BeamGeometry& geometry,
                                      const NoiseModel& noise);

struct ScanOptions {
  std::optional<double> slit_width;  // m, detector plane
  CountingStatistics statistics = CountingStatistics::binomial;
};

/// Slit-scan pattern: each bin draws its coincidences from
/// make_engine(seed, bin) with `exposure_per_bin` trials.
InterferencePattern scan_pattern(const BinSpec& bins,
                                 std::int64_t exposure_per_bin,
                                 double delta_theta,
                                 const BeamGeometry& geometry,
                                 const NoiseModel& noise, const RngSeed& seed,
                                 const ScanOptions& options = {});

}  // namespace shom
