#pragma once

#include <numbers>
#include <optional>

namespace shom {

// Internal units are SI: radians, meters, inverse meters.
namespace units {
inline constexpr double per_um = 1e6;  // 1 um^-1 in m^-1
inline constexpr double mm = 1e-3;
inline constexpr double um = 1e-6;
inline constexpr double nm = 1e-9;
inline constexpr double mrad = 1e-3;
inline constexpr double urad = 1e-6;
}  // namespace units

/// Sign of the cosine fringe in the coincidence channel.
///
/// `symmetric` gives the coincidence dip 1 - cos; `antisymmetric` models the
/// exchange-antisymmetric (polarization singlet) input, which turns the dip
/// into a peak 1 + cos.
enum class ExchangeSymmetry { symmetric, antisymmetric };

/// Probe geometry: single-photon transverse-momentum spread, source-detector
/// distance, and the carrier wave number used only for mapping detector
/// positions to momenta.
struct BeamGeometry {
  double sigma_k = 0.029 * units::per_um;
  double d = 335.0 * units::mm;
  std::optional<double> k0 = 2.0 * std::numbers::pi / (810.0 * units::nm);
  ExchangeSymmetry exchange = ExchangeSymmetry::symmetric;

  /// Throws DomainError if sigma_k, d or k0 are not strictly positive.
  void validate() const;

  /// Carrier wave number; throws ConfigError if absent.
  double wave_number() const;
};

/// Per-photon loss probability and interference visibility.
struct NoiseModel {
  double gamma = 0.0;
  double nu = 1.0;

  void validate() const;
  bool ideal() const noexcept { return gamma == 0.0 && nu == 1.0; }
};

/// Probabilities (or densities over delta_k) of 0, 1 and 2 detectors firing.
struct OutcomeTriple {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  double sum() const noexcept { return p0 + p1 + p2; }
  double operator[](int outcome) const noexcept {
    return outcome == 0 ? p0 : outcome == 1 ? p1 : p2;
  }
};

enum class Outcome : int { ZeroDetectors = 0, OneDetector = 1, TwoDetectors = 2 };

}  // namespace shom
