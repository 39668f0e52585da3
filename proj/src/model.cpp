#include "shom/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "shom/error.hpp"
#include "shom/text.hpp"

namespace shom {

void BeamGeometry::validate() const {
  if (!(sigma_k > 0.0) || !std::isfinite(sigma_k)) {
    throw DomainError("sigma_k must be positive, got " + format_double(sigma_k));
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError("d must be positive, got " + format_double(d));
  }
  if (k0 && (!(*k0 > 0.0) || !std::isfinite(*k0))) {
    throw DomainError("k0 must be positive, got " + format_double(*k0));
  }
}

double BeamGeometry::wave_number() const {
  if (!k0) throw ConfigError("geometry is missing k0 (carrier wave number)");
  return *k0;
}

void NoiseModel::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError("gamma must lie in [0, 1], got " + format_double(gamma));
  }
  if (!(nu >= 0.0 && nu <= 1.0)) {
    throw DomainError("nu must lie in [0, 1], got " + format_double(nu));
  }
}

double position_to_momentum(double y, const BeamGeometry& geometry) {
  return geometry.wave_number() * y / geometry.d;
}

double envelope(double delta_k, double sigma_k) {
  if (!(sigma_k > 0.0)) {
    throw DomainError("envelope requires sigma_k > 0, got " +
                      format_double(sigma_k));
  }
  const double var = sigma_k * sigma_k;
  return std::exp(-delta_k * delta_k / (4.0 * var)) /
         std::sqrt(4.0 * std::numbers::pi * var);
}

namespace detail {

Fringe fringe(double phase, double nu, ExchangeSymmetry exchange) noexcept {
  const double s = std::sin(0.5 * phase);
  const double c = std::cos(0.5 * phase);
  // 1 - nu cos x = (1 - nu) + 2 nu sin^2(x/2);  1 + nu cos x = (1 - nu) + 2 nu cos^2(x/2)
  const double minus = (1.0 - nu) + 2.0 * nu * s * s;
  const double plus = (1.0 - nu) + 2.0 * nu * c * c;
  if (exchange == ExchangeSymmetry::symmetric) return {minus, plus, s, c};
  return {plus, minus, s, c};
}

}  // namespace detail

double fringe_coincidence(double delta_k, double delta_theta,
                          const BeamGeometry& geometry, double nu) {
  const auto f = detail::fringe(delta_k * delta_theta * geometry.d, nu,
                                geometry.exchange);
  return 0.5 * f.anti;
}

double coincidence_density(double delta_k, double delta_theta,
                           const BeamGeometry& geometry) {
  return envelope(delta_k, geometry.sigma_k) *
         fringe_coincidence(delta_k, delta_theta, geometry, 1.0);
}

OutcomeTriple conditional_outcome_probabilities(double delta_k,
                                                double delta_theta,
                                                const BeamGeometry& geometry,
                                                const NoiseModel& noise) {
  const auto f = detail::fringe(delta_k * delta_theta * geometry.d, noise.nu,
                                geometry.exchange);
  const double g = noise.gamma;
  const double kept = (1.0 - g) * (1.0 - g);
  // p1 = (1-g)(1+3g)/2 + (1-g)^2 nu cos / 2, regrouped so g = 1 is exact.
  return {g * g, 2.0 * g * (1.0 - g) + 0.5 * kept * f.bunch, 0.5 * kept * f.anti};
}

OutcomeTriple outcome_densities(double delta_k, double delta_theta,
                                const BeamGeometry& geometry,
                                const NoiseModel& noise) {
  const double c = envelope(delta_k, geometry.sigma_k);
  const auto p =
      conditional_outcome_probabilities(delta_k, delta_theta, geometry, noise);
  return {c * p.p0, c * p.p1, c * p.p2};
}

OutcomeTriple loss_map(double p_coincidence, double p_bunching, double gamma) {
  const double deviation = p_coincidence + p_bunching - 1.0;
  if (std::abs(deviation) > 1e-9) {
    throw DomainError("loss_map input not normalized: p_c + p_b - 1 = " +
                      format_double(deviation));
  }
  const double g = gamma;
  return {g * g * p_coincidence + g * g * p_bunching,
          2.0 * g * (1.0 - g) * p_coincidence + (1.0 - g * g) * p_bunching,
          (1.0 - 2.0 * g * (1.0 - g) - g * g) * p_coincidence};
}

}  // namespace shom
