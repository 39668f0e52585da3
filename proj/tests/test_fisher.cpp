#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "shom/error.hpp"
#include "shom/fisher.hpp"
#include "shom/kernels.hpp"
#include "shom/model.hpp"
#include "test_support.hpp"

using namespace shom;
using shom::test::lab_geometry;
using shom::test::rel_err;

namespace {

// Frozen from tests/oracles/fisher_oracle.py (uniform Riemann sum of the
// closed-form densities, 10^6 samples over +-8 sqrt(2) sigma_k).
constexpr double kOracleFisherGamma05 = 12882966.441853587;  // gamma .5, nu .85, 1.01 mrad
constexpr double kOracleWorkingPoint = 1.0e-4;                // gamma .1, nu .85 on [0.1, 2] mrad
constexpr double kOracleWorkingFisher = 59355374.773047924;

/// In-test Riemann oracle on the unsimplified integrand.
double riemann_fisher(double theta, const BeamGeometry& g, const NoiseModel& n,
                      int samples = 200000) {
  const double half = 8.0 * std::sqrt(2.0) * g.sigma_k;
  const double h = 2.0 * half / (samples - 1);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double k = -half + h * i;
    const double c = envelope(k, g.sigma_k);
    const double x = k * theta * g.d;
    const double gm = n.gamma;
    const double p1 = 0.5 * (1 - gm) * (1 + 3 * gm) * c + 0.5 * (1 - gm) * (1 - gm) * c * n.nu * std::cos(x);
    const double p2 = 0.5 * (1 - gm) * (1 - gm) * c * (1 - n.nu * std::cos(x));
    const double dp = 0.5 * (1 - gm) * (1 - gm) * c * n.nu * std::sin(x) * k * g.d;
    if (p1 > 0) sum += dp * dp / p1;
    if (p2 > 0) sum += dp * dp / p2;
  }
  return sum * h;
}

}  // namespace

TEST_CASE("quantum Fisher information closed form") {
  const BeamGeometry g = lab_geometry();
  const double h = quantum_fisher_information(g);
  // 2 (2.9e4)^2 (0.335)^2
  CHECK(rel_err(h, 1.8876245e8) < 1e-12);
  BeamGeometry far = g;
  far.d *= 2.0;
  CHECK(rel_err(quantum_fisher_information(far), 4.0 * h) < 1e-15);
  BeamGeometry narrow = g;
  narrow.sigma_k = 1e-300;
  CHECK(quantum_fisher_information(narrow) == 0.0);
}

TEST_CASE("spectral-variance oracle agrees with the closed form") {
  const BeamGeometry g = lab_geometry();
  const double var = 2.0 * g.sigma_k * g.sigma_k;
  auto gaussian = [var](double shift) {
    return [var, shift](double w) {
      return std::exp(-(w - shift) * (w - shift) / (2.0 * var)) /
             std::sqrt(2.0 * std::numbers::pi * var);
    };
  };
  const double h = quantum_fisher_information(g);
  CHECK(rel_err(qfi_moment_oracle(gaussian(0.0), g), h) < 1e-9);
  CHECK(rel_err(qfi_moment_oracle(gaussian(0.5 * g.sigma_k), g), h) < 1e-9);

  const double narrow_var = 1e-8 * var;
  auto spike = [narrow_var](double w) {
    return std::exp(-w * w / (2.0 * narrow_var)) / std::sqrt(2.0 * std::numbers::pi * narrow_var);
  };
  CHECK(qfi_moment_oracle(spike, g) < 1e-6 * h);

  auto half_mass = [&](double w) { return 0.5 * gaussian(0.0)(w); };
  CHECK_THROWS_AS(qfi_moment_oracle(half_mass, g), DomainError);
}

TEST_CASE("ideal classical Fisher information saturates the quantum bound") {
  const BeamGeometry g = lab_geometry();
  const double h = quantum_fisher_information(g);
  for (int i = 0; i < 20; ++i) {
    const double theta = (0.1 + 1.9 * i / 19.0) * units::mrad;
    const auto r = classical_fisher_information(theta, g, {0.0, 1.0});
    CHECK(std::abs(r.value / h - 1.0) < 1e-6);
  }
  QuadratureSpec gh;
  gh.rule = QuadratureRule::gauss_hermite;
  CHECK(std::abs(classical_fisher_information(0.7e-3, g, {0.0, 1.0}, gh).value / h - 1.0) < 1e-12);
  // Near-ideal visibility goes through the general integrand and still agrees.
  const double near = classical_fisher_information(1.01e-3, g, {0.0, 1.0 - 1e-12}).value;
  CHECK(std::abs(near / h - 1.0) < 1e-4);
}

TEST_CASE("classical Fisher information matches the frozen Riemann oracle") {
  const BeamGeometry g = lab_geometry();
  const auto r = classical_fisher_information(1.01 * units::mrad, g, {0.5, 0.85});
  CHECK(rel_err(r.value, kOracleFisherGamma05) < 1e-7);
  CHECK(r.value > 0.0);
  CHECK(r.value < quantum_fisher_information(g));
  CHECK(r.per_outcome.p0 == 0.0);
  CHECK(rel_err(r.per_outcome.p1 + r.per_outcome.p2, r.value) < 1e-12);

  for (auto [gamma, nu, theta] : {std::tuple{0.2, 0.9, 0.6e-3}, std::tuple{0.0, 0.85, 1.5e-3},
                                  std::tuple{0.7, 0.3, 0.25e-3}}) {
    const NoiseModel n{gamma, nu};
    CHECK(rel_err(classical_fisher_information(theta, g, n).value,
                  riemann_fisher(theta, g, n)) < 1e-7);
  }
}

TEST_CASE("zero visibility carries no information") {
  const BeamGeometry g = lab_geometry();
  const double h = quantum_fisher_information(g);
  for (double gamma : {0.0, 0.3, 0.9}) {
    for (double theta : {0.1e-3, 1.0e-3, 3.0e-3}) {
      CHECK(classical_fisher_information(theta, g, {gamma, 0.0}).value < 1e-12 * h);
    }
  }
}

TEST_CASE("Fisher bound ordering and evenness over random draws") {
  const BeamGeometry g = lab_geometry();
  const double h = quantum_fisher_information(g);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const NoiseModel n{u(rng), u(rng)};
    const double theta = (0.05 + 2.5 * u(rng)) * units::mrad;
    const auto pos = classical_fisher_information(theta, g, n);
    CHECK(pos.value <= h * (1.0 + 1e-6));
    CHECK(pos.value >= 0.0);
    if (i % 10 == 0) {
      const auto neg = classical_fisher_information(-theta, g, n);
      CHECK(std::abs(neg.value - pos.value) <= 2.0 * (pos.error_estimate + neg.error_estimate) + 1e-12 * h);
    }
  }
}

TEST_CASE("tightening the tolerance moves F by less than the error estimate") {
  const BeamGeometry g = lab_geometry();
  for (auto [gamma, nu] : {std::pair{0.3, 0.85}, std::pair{0.1, 0.99}, std::pair{0.0, 0.85}}) {
    QuadratureSpec loose;
    QuadratureSpec tight;
    tight.rel_tol = 0.5 * loose.rel_tol;
    const auto a = classical_fisher_information(1.06e-3, g, {gamma, nu}, loose);
    const auto b = classical_fisher_information(1.06e-3, g, {gamma, nu}, tight);
    CHECK(std::abs(a.value - b.value) < a.error_estimate);
  }
}

TEST_CASE("quadrature that cannot converge reports the achieved tolerance") {
  QuadratureSpec q;
  q.rel_tol = 1e-15;
  q.max_subdivisions = 10;
  try {
    classical_fisher_information(1.01e-3, lab_geometry(), {0.3, 0.85}, q);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.achieved() > 0.0);
  }
}

TEST_CASE("Cramer-Rao standard deviation in both conventions") {
  const double h = quantum_fisher_information(lab_geometry());
  CHECK(cramer_rao_std(h, 1e4) / units::urad == doctest::Approx(0.7278).epsilon(1e-4));
  CHECK(cramer_rao_std(h, 1e4, CrbConvention::halved) / units::urad ==
        doctest::Approx(0.3639).epsilon(1e-4));
  CHECK(cramer_rao_std(h, 1.0, CrbConvention::halved) / units::urad ==
        doctest::Approx(36.39).epsilon(1e-4));
  CHECK(rel_err(cramer_rao_std(h, 4e4), 0.5 * cramer_rao_std(h, 1e4)) < 1e-15);
  CHECK_THROWS_AS(cramer_rao_std(0.0, 10), DomainError);
  CHECK_THROWS_AS(cramer_rao_std(-1.0, 10), DomainError);
  CHECK_THROWS_AS(cramer_rao_std(h, 0.5), DomainError);
}

TEST_CASE("optimal working point") {
  const BeamGeometry g = lab_geometry();
  const auto flat = optimal_working_point(g, {0.0, 1.0}, 0.1e-3, 2.0e-3);
  CHECK(flat.flat);
  CHECK(flat.delta_theta == doctest::Approx(1.05e-3));
  CHECK_THROWS_AS(optimal_working_point(g, {0.2, 0.0}, 0.1e-3, 2.0e-3), NonIdentifiableError);

  const auto wp = optimal_working_point(g, {0.1, 0.85}, 0.1e-3, 2.0e-3);
  CHECK_FALSE(wp.flat);
  CHECK(std::abs(wp.delta_theta - kOracleWorkingPoint) < 1e-3 * units::mrad);
  CHECK(rel_err(wp.fisher, kOracleWorkingFisher) < 1e-6);

  CHECK_THROWS_AS(optimal_working_point(g, {0.1, 0.85}, 2e-3, 1e-3), DomainError);
  CHECK_THROWS_AS(optimal_working_point(g, {0.1, 0.85}, 1e-4, 2e-3, 8), DomainError);
}

TEST_CASE("interior working point found by refinement") {
  // On [0.12, 0.5] mrad the Fisher information dips then recovers; the
  // maximum over a narrower window around the dip's right shoulder is
  // located by brute force for comparison.
  const BeamGeometry g = lab_geometry();
  const NoiseModel n{0.3, 1.0};
  const double lo = 0.02e-3, hi = 0.1e-3;
  const auto wp = optimal_working_point(g, n, lo, hi, 32);
  double best_t = lo, best_f = -1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = lo + (hi - lo) * i / 4000.0;
    const double f = riemann_fisher(t, g, n, 20000);
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  CHECK(std::abs(wp.delta_theta - best_t) < 1e-3 * units::mrad);
}

TEST_CASE("Fisher surface properties") {
  const std::vector<double> sigmas{0.01 * units::per_um, 0.02 * units::per_um, 0.029 * units::per_um,
                                   0.04 * units::per_um};
  const std::vector<double> ds{0.1, 0.2, 0.335, 0.5};
  const auto ideal = fisher_surface(sigmas, ds, 0.52e-3, {0.0, 1.0});
  REQUIRE(ideal.size() == 16);
  for (const auto& node : ideal) {
    CHECK(rel_err(node.fisher, 2.0 * node.sigma_k * node.sigma_k * node.d * node.d) < 1e-6);
  }
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    for (std::size_t j = 1; j < ds.size(); ++j) {
      CHECK(ideal[s * ds.size() + j].fisher > ideal[s * ds.size() + j - 1].fisher);
    }
  }
  const auto noisy = fisher_surface(sigmas, ds, 0.52e-3, {0.3, 0.85});
  for (std::size_t i = 0; i < noisy.size(); ++i) CHECK(noisy[i].fisher <= ideal[i].fisher);

  const std::vector<double> bad{0.02 * units::per_um, 0.01 * units::per_um};
  CHECK_THROWS_AS(fisher_surface(bad, ds, 0.52e-3, {0.0, 1.0}), DomainError);
}

TEST_CASE("parallel Fisher scan reproduces the serial kernel") {
  const BeamGeometry g = lab_geometry();
  std::vector<double> thetas;
  for (int i = 0; i < 24; ++i) thetas.push_back((0.1 + 0.08 * i) * units::mrad);
  const NoiseModel n{0.3, 0.85};
  const auto a = serial::fisher_scan(thetas, g, n, {});
  const auto b = parallel::fisher_scan(thetas, g, n, {});
  CHECK(a == b);
}
