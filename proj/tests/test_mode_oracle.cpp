#include <doctest.h>

#include <cmath>
#include <vector>

#include "shom/error.hpp"
#include "shom/mode_oracle.hpp"
#include "shom/model.hpp"
#include "test_support.hpp"

using namespace shom;
using shom::test::lab_geometry;

namespace {

/// Worst relative deviation from the closed form on a 10x10 (k1, k2) grid
/// spanning +-2.5 sigma_k. Points where both vanish count as exact.
double worst_deviation(const CoincidenceOracle& oracle, const BeamGeometry& g,
                       double theta) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double k1 = (-2.5 + 5.0 * i / 9.0) * g.sigma_k;
      const double k2 = (-2.5 + 5.0 * j / 9.0) * g.sigma_k;
      const double got = oracle(theta, k1, k2);
      const double want = total_momentum_marginal(0.5 * (k1 + k2), g.sigma_k) *
                          coincidence_density(k1 - k2, theta, g);
      if (want == 0.0 && got == 0.0) continue;
      worst = std::max(worst, std::abs(got - want) / want);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("oracle reproduces the dip") {
  const BeamGeometry g = lab_geometry();
  const CoincidenceOracle oracle(g, ModeGrid::spanning(8.0, 1024, g.sigma_k));
  for (double k1 : {-0.05, -0.01, 0.0, 0.02, 0.06}) {
    for (double k2 : {-0.04, 0.0, 0.03}) {
      CHECK(oracle(0.0, k1 * units::per_um, k2 * units::per_um) == 0.0);
    }
    CHECK(oracle(1.01 * units::mrad, k1 * units::per_um, k1 * units::per_um) == 0.0);
  }
}

TEST_CASE("oracle matches the closed form at 4096 points") {
  const BeamGeometry g = lab_geometry();
  const CoincidenceOracle oracle(g, ModeGrid::spanning(8.0, 4096, g.sigma_k));
  for (double theta : {0.52, 1.01, 1.12}) {
    CHECK(worst_deviation(oracle, g, theta * units::mrad) < 1e-6);
  }
}

TEST_CASE("oracle error decreases monotonically under refinement") {
  const BeamGeometry g = lab_geometry();
  double previous = 1.0;
  for (int level = 0; level <= 4; ++level) {
    const int n = 256 << level;
    const double extent = 7.0 + 0.25 * level;
    const CoincidenceOracle oracle(g, ModeGrid::spanning(extent, n, g.sigma_k));
    const double err = worst_deviation(oracle, g, 1.01 * units::mrad);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-6);
}

TEST_CASE("oracle honours the antisymmetric convention") {
  BeamGeometry g = lab_geometry();
  g.exchange = ExchangeSymmetry::antisymmetric;
  const CoincidenceOracle oracle(g, ModeGrid::spanning(8.0, 2048, g.sigma_k));
  const double k = 0.02 * units::per_um;
  const double want = total_momentum_marginal(0.0, g.sigma_k) * envelope(2.0 * k, g.sigma_k);
  CHECK(oracle(0.0, k, -k) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("oracle rejects coarse or truncated grids") {
  const BeamGeometry g = lab_geometry();
  CHECK_THROWS_AS(CoincidenceOracle(g, ModeGrid::spanning(8.0, 32, g.sigma_k)), DomainError);
  CHECK_THROWS_AS(CoincidenceOracle(g, ModeGrid::spanning(8.0, 1025, g.sigma_k)), DomainError);
  CHECK_THROWS_AS(CoincidenceOracle(g, ModeGrid::spanning(5.0, 1024, g.sigma_k)), DomainError);
  CHECK_THROWS_AS(CoincidenceOracle(g, ModeGrid::spanning(6.5, 1024, g.sigma_k)), ResolutionError);
  const CoincidenceOracle oracle(g, ModeGrid::spanning(8.0, 64, g.sigma_k));
  CHECK_THROWS_AS(oracle.momentum_amplitude(2.0 * oracle.nyquist_momentum()), ResolutionError);
}

TEST_CASE("momentum amplitude is the normalized Gaussian") {
  const BeamGeometry g = lab_geometry();
  const CoincidenceOracle oracle(g, ModeGrid::spanning(9.0, 1024, g.sigma_k));
  const double s2 = g.sigma_k * g.sigma_k;
  for (double k : {0.0, 0.01, -0.04}) {
    const double kk = k * units::per_um;
    const double want = std::exp(-kk * kk / (2.0 * s2)) / std::sqrt(2.0 * std::numbers::pi * s2);
    CHECK(std::norm(oracle.momentum_amplitude(kk)) == doctest::Approx(want).epsilon(1e-8));
  }
}
