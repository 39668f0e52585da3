#pragma once

// Quantum and classical Fisher information for the deflection, Cramer-Rao
// bounds, working-point search and (sigma_k, d) surfaces.

#include <functional>
#include <span>
#include <vector>

#include "shom/quadrature.hpp"
#include "shom/types.hpp"

namespace shom {

struct FisherResult {
  double value = 0.0;         // rad^-2
  OutcomeTriple per_outcome;  // p0 term is identically zero
  double error_estimate = 0.0;
};

/// H = 2 sigma_k^2 d^2, independent of the deflection and of noise.
double quantum_fisher_information(const BeamGeometry& geometry);

/// Spectral-variance route to the quantum Fisher information:
/// (<W^2> - <W>^2) d^2 for a normalized density over the momentum offset W,
/// integrated over the quadrature range. Throws DomainError if the density
/// does not integrate to one within quad.rel_tol.
double qfi_moment_oracle(const std::function<double(double)>& spectral_density,
                         const BeamGeometry& geometry,
                         const QuadratureSpec& quad = {});

/// Classical Fisher information of the three-outcome momentum-resolved
/// measurement, integrated over delta_k.
FisherResult classical_fisher_information(double delta_theta,
                                          const BeamGeometry& geometry,
                                          const NoiseModel& noise,
                                          const QuadratureSpec& quad = {});

/// Per-outcome Fisher integrand at one delta_k: {p1 term, p2 term}.
std::array<double, 2> fisher_integrand(double delta_k, double delta_theta,
                                       const BeamGeometry& geometry,
                                       const NoiseModel& noise);

enum class CrbConvention {
  /// Var >= 1 / (N F): std = 1 / sqrt(N F).
  variance,
  /// delta_theta >= 1 / (2 sqrt(Q)) applied per sample: 1 / (2 sqrt(N F)).
  halved,
};

/// Cramer-Rao standard-deviation bound. Throws DomainError for F <= 0 or N < 1.
double cramer_rao_std(double fisher, double n_samples,
                      CrbConvention convention = CrbConvention::variance);

struct WorkingPoint {
  double delta_theta = 0.0;
  double fisher = 0.0;
  /// F varies by less than 1e-6 relative over the search range; the returned
  /// deflection is then the range midpoint.
  bool flat = false;
};

/// Grid scan of F over [lo, hi] followed by golden-section refinement around
/// the best grid node (absolute tolerance 1e-7 rad). Throws
/// NonIdentifiableError when F < 1e-12 H everywhere.
WorkingPoint optimal_working_point(const BeamGeometry& geometry,
                                   const NoiseModel& noise, double lo, double hi,
                                   int grid_points = 256,
                                   const QuadratureSpec& quad = {});

struct SurfaceNode {
  double sigma_k;
  double d;
  double fisher;
};

/// F on the (sigma_k, d) grid, sigma_k-major. Other geometry fields come from
/// `base`. Grids must be strictly increasing and positive.
std::vector<SurfaceNode> fisher_surface(std::span<const double> sigma_k_grid,
                                        std::span<const double> d_grid,
                                        double delta_theta,
                                        const NoiseModel& noise,
                                        const QuadratureSpec& quad = {},
                                        const BeamGeometry& base = {});

/// F at each deflection; parallel over the scan with index-ordered output.
std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad = {});

}  // namespace shom
