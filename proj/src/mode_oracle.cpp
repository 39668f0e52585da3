#include "shom/mode_oracle.hpp"

#include <cmath>
#include <numbers>

#include "shom/error.hpp"
#include "shom/text.hpp"

namespace shom {

namespace {

constexpr double kEdgeTolerance = 1e-10;
constexpr double kMinExtentSigmas = 6.0;

double position_sigma(double sigma_k) { return 0.5 / sigma_k; }

}  // namespace

ModeGrid ModeGrid::spanning(double multiples, int n_points, double sigma_k) {
  return {multiples * position_sigma(sigma_k), n_points};
}

CoincidenceOracle::CoincidenceOracle(const BeamGeometry& geometry,
                                     const ModeGrid& grid)
    : geometry_(geometry) {
  geometry.validate();
  if (grid.n_points < 64 || grid.n_points % 2 != 0) {
    throw DomainError("mode grid needs an even number of points >= 64, got " +
                      std::to_string(grid.n_points));
  }
  const double sx = position_sigma(geometry.sigma_k);
  if (!(grid.extent >= kMinExtentSigmas * sx)) {
    throw DomainError("mode grid extent " + format_double(grid.extent) +
                      " m is below 6 position standard deviations (" +
                      format_double(kMinExtentSigmas * sx) + " m)");
  }
  // |psi(L)|^2 / |psi(0)|^2 = exp(-L^2 / (2 sx^2))
  const double edge = std::exp(-grid.extent * grid.extent / (2.0 * sx * sx));
  if (edge > kEdgeTolerance) {
    throw ResolutionError("mode grid truncates the amplitude: |psi|^2 at edge is " +
                          format_double(edge) + " of peak");
  }

  const auto n = static_cast<std::size_t>(grid.n_points);
  dx_ = 2.0 * grid.extent / static_cast<double>(n);
  nyquist_ = std::numbers::pi / dx_;
  x_.resize(n);
  psi_.resize(n);
  const double norm = std::pow(2.0 * std::numbers::pi * sx * sx, -0.25);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = -grid.extent + (static_cast<double>(j) + 0.5) * dx_;
    x_[j] = x;
    psi_[j] = norm * std::exp(-x * x / (4.0 * sx * sx));
  }
}

std::complex<double> CoincidenceOracle::momentum_amplitude(double k) const {
  if (std::abs(k) > nyquist_) {
    throw ResolutionError("momentum " + format_double(k) +
                          " m^-1 exceeds grid Nyquist limit " +
                          format_double(nyquist_));
  }
  double re = 0.0;
  double im = 0.0;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    const double phase = -k * x_[j];
    re += psi_[j] * std::cos(phase);
    im += psi_[j] * std::sin(phase);
  }
  const double scale = dx_ / std::sqrt(2.0 * std::numbers::pi);
  return {re * scale, im * scale};
}

std::complex<double> CoincidenceOracle::coincidence_amplitude(
    double delta_theta, double k1, double k2) const {
  const std::complex<double> phi1 = momentum_amplitude(k1);
  const std::complex<double> phi2 = momentum_amplitude(k2);
  const double shift = delta_theta * geometry_.d;
  // Deflected photon carries phi(k) exp(-i k dtheta d). Of the beam-splitter
  // output, only a3'(x2) a4'(x1) -+ a3'(x1) a4'(x2) survive post-selection:
  // photon 2 on detector 3 with photon 1 on detector 4, and vice versa.
  const std::complex<double> photon1_on_4 = std::polar(1.0, -k2 * shift);
  const std::complex<double> photon1_on_3 = std::polar(1.0, -k1 * shift);
  const double sign =
      geometry_.exchange == ExchangeSymmetry::symmetric ? -1.0 : 1.0;
  return 0.5 * (phi1 * phi2) * (photon1_on_4 + sign * photon1_on_3);
}

double CoincidenceOracle::operator()(double delta_theta, double k1,
                                     double k2) const {
  return std::norm(coincidence_amplitude(delta_theta, k1, k2));
}

double coincidence_oracle(double delta_theta, double k1, double k2,
                          const BeamGeometry& geometry, const ModeGrid& grid) {
  return CoincidenceOracle(geometry, grid)(delta_theta, k1, k2);
}

double total_momentum_marginal(double k_mean, double sigma_k) {
  const double var = sigma_k * sigma_k;
  return std::exp(-k_mean * k_mean / var) / std::sqrt(std::numbers::pi * var);
}

}  // namespace shom
