#include "shom/fisher.hpp"

#include <algorithm>
#include <cmath>

#include "shom/error.hpp"
#include "shom/golden.hpp"
#include "shom/kernels.hpp"
#include "shom/model.hpp"
#include "shom/text.hpp"

namespace shom {

namespace {

constexpr double kDenominatorFloor = 1e-300;
constexpr double kFlatTolerance = 1e-6;
constexpr double kRefineTolerance = 1e-7;

void require_increasing(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) {
      throw DomainError(std::string(name) + " grid must be positive");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
  }
}

}  // namespace

double quantum_fisher_information(const BeamGeometry& geometry) {
  return 2.0 * geometry.sigma_k * geometry.sigma_k * geometry.d * geometry.d;
}

double qfi_moment_oracle(const std::function<double(double)>& spectral_density,
                         const BeamGeometry& geometry,
                         const QuadratureSpec& quad) {
  quad.validate();
  const double half = quad.half_width(geometry.sigma_k);
  const auto moments = adaptive_simpson<3>(
      [&](double w) {
        const double rho = spectral_density(w);
        return std::array<double, 3>{rho, w * rho, w * w * rho};
      },
      -half, half, quad.rel_tol, quad.max_subdivisions);
  const double mass = moments.value[0];
  if (std::abs(mass - 1.0) > quad.rel_tol) {
    throw DomainError("spectral density integrates to " + format_double(mass) +
                      ", not 1");
  }
  const double mean = moments.value[1];
  const double variance = moments.value[2] - mean * mean;
  return variance * geometry.d * geometry.d;
}

std::array<double, 2> fisher_integrand(double delta_k, double delta_theta,
                                       const BeamGeometry& geometry,
                                       const NoiseModel& noise) {
  const double c = envelope(delta_k, geometry.sigma_k);
  const double u = delta_k * geometry.d * delta_k * geometry.d;
  const auto f = detail::fringe(delta_k * delta_theta * geometry.d, noise.nu,
                                geometry.exchange);
  const double s2 = f.sin_half * f.sin_half;
  const double c2 = f.cos_half * f.cos_half;
  const bool symmetric = geometry.exchange == ExchangeSymmetry::symmetric;
  if (noise.ideal()) {
    // sin^2 x / (1 -+ cos x) cancels exactly; the integrand sums to C (dk d)^2.
    return {c * u * (symmetric ? s2 : c2), c * u * (symmetric ? c2 : s2)};
  }
  const double g = noise.gamma;
  const double nu = noise.nu;
  // (d p_c / d dtheta)^2 = nu^2 sin^2(x/2) cos^2(x/2) (dk d)^2
  const double slope2 = nu * nu * s2 * c2 * u;
  const double kept = 1.0 - g;
  const double term2 = 2.0 * kept * kept * c * slope2 /
                       std::max(f.anti, kDenominatorFloor);
  const double term1 = kept * kept * kept * c * slope2 /
                       std::max(2.0 * g + 0.5 * kept * f.bunch, kDenominatorFloor);
  return {term1, term2};
}

FisherResult classical_fisher_information(double delta_theta,
                                          const BeamGeometry& geometry,
                                          const NoiseModel& noise,
                                          const QuadratureSpec& quad) {
  geometry.validate();
  noise.validate();
  quad.validate();
  auto integrand = [&](double dk) {
    return fisher_integrand(dk, delta_theta, geometry, noise);
  };
  QuadratureResult<2> q;
  if (quad.rule == QuadratureRule::gauss_hermite) {
    // delta_k envelope ~ exp(-dk^2 / (4 sigma_k^2)): scale 2 sigma_k.
    q = gauss_hermite<2>(integrand, 2.0 * geometry.sigma_k, quad.hermite_nodes);
  } else {
    const double half = quad.half_width(geometry.sigma_k);
    q = adaptive_simpson<2>(integrand, -half, half, quad.rel_tol,
                            quad.max_subdivisions);
  }
  FisherResult r;
  r.per_outcome = {0.0, q.value[0], q.value[1]};
  r.value = q.value[0] + q.value[1];
  r.error_estimate = q.error_estimate;
  return r;
}

double cramer_rao_std(double fisher, double n_samples, CrbConvention convention) {
  if (!(fisher > 0.0)) {
    throw DomainError("Cramer-Rao bound needs positive Fisher information, got " +
                      format_double(fisher));
  }
  if (!(n_samples >= 1.0)) {
    throw DomainError("Cramer-Rao bound needs at least one sample");
  }
  const double root = std::sqrt(n_samples * fisher);
  return convention == CrbConvention::variance ? 1.0 / root : 0.5 / root;
}

WorkingPoint optimal_working_point(const BeamGeometry& geometry,
                                   const NoiseModel& noise, double lo, double hi,
                                   int grid_points, const QuadratureSpec& quad) {
  if (!(hi > lo)) throw DomainError("working-point search range is empty");
  if (grid_points < 16) throw DomainError("working-point scan needs >= 16 points");
  geometry.validate();
  noise.validate();

  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  const double step = (hi - lo) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) grid[i] = i + 1 == grid_points ? hi : lo + step * i;
  const std::vector<double> f = fisher_scan(grid, geometry, noise, quad);

  const double qfi = quantum_fisher_information(geometry);
  const auto [min_it, max_it] = std::minmax_element(f.begin(), f.end());
  if (*max_it < 1e-12 * qfi) {
    throw NonIdentifiableError(
        "Fisher information vanishes over the search range; deflection is not "
        "identifiable");
  }
  if (*max_it - *min_it <= kFlatTolerance * *max_it) {
    const double mid = 0.5 * (lo + hi);
    return {mid, classical_fisher_information(mid, geometry, noise, quad).value,
            true};
  }
  // max_element returns the first maximum, i.e. the smallest deflection.
  const auto best = static_cast<std::size_t>(max_it - f.begin());
  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  const auto refined = golden_section_maximize(
      [&](double t) {
        return classical_fisher_information(t, geometry, noise, quad).value;
      },
      a, b, kRefineTolerance);
  if (refined.value < f[best]) return {grid[best], f[best], false};
  return {refined.x, refined.value, false};
}

std::vector<SurfaceNode> fisher_surface(std::span<const double> sigma_k_grid,
                                        std::span<const double> d_grid,
                                        double delta_theta,
                                        const NoiseModel& noise,
                                        const QuadratureSpec& quad,
                                        const BeamGeometry& base) {
  require_increasing(sigma_k_grid, "sigma_k");
  require_increasing(d_grid, "d");
  noise.validate();
  quad.validate();
  std::vector<BeamGeometry> nodes;
  nodes.reserve(sigma_k_grid.size() * d_grid.size());
  for (double s : sigma_k_grid) {
    for (double d : d_grid) {
      BeamGeometry g = base;
      g.sigma_k = s;
      g.d = d;
      nodes.push_back(g);
    }
  }
  const std::vector<double> f =
      parallel::fisher_over_geometries(nodes, delta_theta, noise, quad);
  std::vector<SurfaceNode> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.push_back({nodes[i].sigma_k, nodes[i].d, f[i]});
  }
  return out;
}

std::vector<double> fisher_scan(std::span<const double> delta_thetas,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise,
                                const QuadratureSpec& quad) {
  geometry.validate();
  noise.validate();
  quad.validate();
  return parallel::fisher_scan(delta_thetas, geometry, noise, quad);
}

}  // namespace shom
