#pragma once

// Run configuration in laboratory units, loadable from a plaintext file:
//
//   [geometry]
//   sigma_k_per_um = 0.029
//   d_mm = 335
//   wavelength_nm = 810
//   exchange_symmetry = symmetric
//   [noise]
//   gamma = 0.1
//   nu = 0.85
//   [run]
//   deflection_mrad = 1.01
//   seed = 7
//   [quadrature]
//   rule = adaptive-simpson
//   half_range = 8
//   rel_tol = 1e-9
//   max_subdivisions = 200000
//   [output]
//   path = events.csv
//
// '#' starts a comment. Unknown sections or keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "shom/quadrature.hpp"
#include "shom/types.hpp"

namespace shom {

struct RunConfig {
  double sigma_k_per_um = 0.029;
  double d_mm = 335.0;
  std::optional<double> wavelength_nm = 810.0;
  ExchangeSymmetry exchange = ExchangeSymmetry::symmetric;
  double gamma = 0.0;
  double nu = 1.0;
  double deflection_mrad = 1.01;
  std::uint64_t seed = 0;
  QuadratureSpec quadrature;
  std::string output_path;

  /// SI geometry; throws DomainError on invalid values.
  BeamGeometry geometry() const;
  NoiseModel noise() const;
  double deflection() const { return deflection_mrad * units::mrad; }
  void validate() const;
};

/// Applies `key = value` lines onto `config`. Throws ConfigError naming
/// `source` and the line number.
void apply_config(std::istream& in, RunConfig& config,
                  const std::string& source = "<config>");
RunConfig load_config_file(const std::string& path);

QuadratureRule parse_rule(const std::string& text);
ExchangeSymmetry parse_exchange(const std::string& text);

}  // namespace shom
