#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "shom/error.hpp"
#include "shom/estimator.hpp"
#include "shom/fisher.hpp"
#include "shom/kernels.hpp"
#include "shom/model.hpp"
#include "shom/sampler.hpp"
#include "test_support.hpp"

using namespace shom;
using shom::test::lab_geometry;

namespace {

/// Dense-grid argmax by direct per-event evaluation of the conditionals.
double grid_argmax(const std::vector<EventRecord>& events, double lo, double hi, int points,
                   const BeamGeometry& g, const NoiseModel& n) {
  double best_t = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double t = lo + (hi - lo) * i / (points - 1);
    double ll = 0.0;
    for (const auto& e : events) {
      const auto p = conditional_outcome_probabilities(e.delta_k, t, g, n);
      ll += std::log(p[static_cast<int>(e.outcome)]);
    }
    if (ll > best) {
      best = ll;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

TEST_CASE("log-likelihood values and sentinels") {
  const BeamGeometry g = lab_geometry();
  std::vector<EventRecord> bunched;
  for (int i = 0; i < 50; ++i) bunched.push_back({(i - 25) * 1.7e3, Outcome::OneDetector});
  CHECK(log_likelihood(bunched, 0.0, g, {}) == 0.0);

  const std::vector<EventRecord> lost{{1e4, Outcome::ZeroDetectors}, {-3e4, Outcome::ZeroDetectors}};
  for (double t : {0.0, 1e-3, 2.2e-3})
    CHECK(log_likelihood(lost, t, g, {0.4, 0.85}) == doctest::Approx(2.0 * std::log(0.16)));

  const std::vector<EventRecord> impossible{{2e4, Outcome::TwoDetectors}};
  CHECK(log_likelihood(impossible, 0.0, g, {}) == -std::numeric_limits<double>::infinity());
  CHECK(log_likelihood(lost, 1e-3, g, {}) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(log_likelihood({}, 1e-3, g, {}), DomainError);
}

TEST_CASE("log-likelihood is even in the deflection") {
  const BeamGeometry g = lab_geometry();
  const NoiseModel n{0.2, 0.85};
  const auto events = simulate_run(2000, 1.01e-3, g, n, {8, 0});
  for (double t : {0.1e-3, 0.52e-3, 1.01e-3, 3.3e-3})
    CHECK(log_likelihood(events, t, g, n) == log_likelihood(events, -t, g, n));
}

TEST_CASE("dense-grid argmax near the truth") {
  const BeamGeometry g = lab_geometry();
  const auto events = simulate_run(10000, 1.01e-3, g, {}, {31, 0});
  const double crb = cramer_rao_std(quantum_fisher_information(g), 1e4);
  const double argmax = grid_argmax(events, 0.0, 2e-3, 2001, g, {});
  CHECK(std::abs(argmax - 1.01e-3) < 3.0 * crb);
}

TEST_CASE("refined MLE agrees with the dense-grid oracle") {
  const BeamGeometry g = lab_geometry();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Bracket bracket{0.0, 4e-3};
  const double step = (bracket.hi - bracket.lo) / (kLikelihoodGridPoints - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const NoiseModel n{0.5 * u(rng), 0.5 + 0.5 * u(rng)};
    const double truth = (0.2 + 2.8 * u(rng)) * 1e-3;
    const auto events = simulate_run(400, truth, g, n, {1000, static_cast<std::uint64_t>(trial)});
    const auto est = mle_deflection(events, g, n, bracket);
    const double oracle = grid_argmax(events, bracket.lo, bracket.hi, 8001, g, n);
    CHECK(std::abs(est.value - oracle) <= step);
    CHECK(est.value >= bracket.lo);
    CHECK(est.value <= bracket.hi);
    CHECK(est.std > 0.0);
  }
}

TEST_CASE("maximum-likelihood deflection") {
  const BeamGeometry g = lab_geometry();
  const auto bunched = simulate_run(5000, 0.0, g, {}, {4, 0});
  const auto zero = mle_deflection(bunched, g, {});
  CHECK(zero.value <= kLikelihoodTolerance);
  CHECK(zero.at_boundary);

  const auto events = simulate_run(100000, 0.96e-3, g, {}, {5, 0});
  const auto est = mle_deflection(events, g, {});
  const double crb = cramer_rao_std(quantum_fisher_information(g), 1e5);
  CHECK(std::abs(est.value - 0.96e-3) < 3.0 * crb);
  CHECK(est.std == doctest::Approx(crb).epsilon(1e-4));
  CHECK_FALSE(est.at_boundary);
  CHECK(est.bracket_used.hi == 5e-3);

  // Below the truth the likelihood rises monotonically from 0.7 mrad.
  const auto pinned = mle_deflection(events, g, {}, {0.7e-3, 0.93e-3});
  CHECK(pinned.at_boundary);
  CHECK(std::abs(pinned.value - 0.93e-3) <= kLikelihoodTolerance);
  // [0, 0.5] mrad holds the one-third subharmonic peak, an interior maximum.
  const auto sub = mle_deflection(events, g, {}, {0.0, 0.5e-3});
  CHECK_FALSE(sub.at_boundary);
  CHECK(std::abs(sub.value - 0.32e-3) < 0.01e-3);

  const auto flat = simulate_run(2000, 1.01e-3, g, {0.2, 0.0}, {6, 0});
  CHECK_THROWS_AS(mle_deflection(flat, g, {0.2, 0.0}), NonIdentifiableError);
  CHECK_THROWS_AS(mle_deflection({}, g, {}), DomainError);
  CHECK_THROWS_AS(mle_deflection(events, g, {}, {1e-3, 0.5e-3}), DomainError);
  CHECK_THROWS_AS(mle_deflection(events, g, {}, {-1e-3, 0.5e-3}), DomainError);
}

TEST_CASE("mean squared error shrinks with more events") {
  const BeamGeometry g = lab_geometry();
  const NoiseModel n{0.1, 0.9};
  const double truth = 1.01e-3;
  double mse_small = 0.0, mse_large = 0.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const double a = mle_deflection(simulate_run(1000, truth, g, n, {77, t}), g, n).value;
    const double b = mle_deflection(simulate_run(100000, truth, g, n, {77, t}), g, n).value;
    mse_small += (a - truth) * (a - truth);
    mse_large += (b - truth) * (b - truth);
  }
  CHECK(mse_large < mse_small);
}

TEST_CASE("variance study bookkeeping") {
  const BeamGeometry g = lab_geometry();
  const auto tiny = variance_study(30, 10, 1.01e-3, g, {}, {3, 0});
  CHECK(tiny.n_trials == 30);
  CHECK(tiny.estimates.size() == 30);
  CHECK(tiny.empirical_variance >= 0.0);
  CHECK(tiny.ratio == doctest::Approx(tiny.empirical_variance / tiny.crb_variance));
  CHECK(tiny.bias_flag == (std::abs(tiny.bias) > std::sqrt(tiny.crb_variance)));
  // Ten events cannot localize a 1 mrad deflection to a 73 urad CRB.
  CHECK(tiny.bias_flag);

  const auto again = variance_study(30, 10, 1.01e-3, g, {}, {3, 0});
  CHECK(again.estimates == tiny.estimates);
  CHECK_THROWS_AS(variance_study(29, 10, 1.01e-3, g, {}, {}), DomainError);
}

TEST_CASE("noisy variance respects the bound") {
  const BeamGeometry g = lab_geometry();
  const int m = 100;
  const auto study = variance_study(m, 3000, 1.01e-3, g, {0.2, 0.85}, {12, 0});
  CHECK(study.ratio >= 1.0 - 3.0 / std::sqrt(2.0 * m));
}
