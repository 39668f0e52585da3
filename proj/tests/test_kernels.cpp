#include <doctest.h>

#include <omp.h>

#include <vector>

#include "shom/estimator.hpp"
#include "shom/kernels.hpp"
#include "shom/model.hpp"
#include <cmath>
#include "test_support.hpp"

using namespace shom;
using shom::test::lab_geometry;

TEST_CASE("parallel kernels are bit-identical to the serial references") {
  const BeamGeometry g = lab_geometry();
  const NoiseModel n{0.15, 0.9};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);

  const auto ser_events = serial::generate_events(200000, 0.96e-3, g, n, {9, 2});
  const auto par_events = parallel::generate_events(200000, 0.96e-3, g, n, {9, 2});
  CHECK(ser_events == par_events);

  const EventBatch batch = EventBatch::from(par_events);
  std::vector<double> grid;
  for (int i = 0; i < 64; ++i) grid.push_back(0.03e-3 * i);
  CHECK(serial::log_likelihood_grid(batch, grid, g, n) ==
        parallel::log_likelihood_grid(batch, grid, g, n));

  std::vector<BeamGeometry> geometries;
  for (double d : {0.1, 0.2, 0.335}) {
    BeamGeometry b = g;
    b.d = d;
    geometries.push_back(b);
  }
  CHECK(serial::fisher_over_geometries(geometries, 1e-3, n, {}) ==
        parallel::fisher_over_geometries(geometries, 1e-3, n, {}));

  const std::vector<double> probabilities{0.0, 0.1, 0.5, 0.9, 1.0};
  for (auto stats : {CountingStatistics::binomial, CountingStatistics::poisson})
    CHECK(serial::draw_counts(probabilities, 5000, {1, 1}, stats) ==
          parallel::draw_counts(probabilities, 5000, {1, 1}, stats));
  omp_set_num_threads(saved);
}

TEST_CASE("batched log-likelihood matches per-event logs") {
  const BeamGeometry g = lab_geometry();
  const NoiseModel n{0.3, 0.8};
  const auto events = serial::generate_events(20000, 1.06e-3, g, n, {4, 0});
  for (double t : {0.2e-3, 1.06e-3, 2.5e-3}) {
    double direct = 0.0;
    for (const auto& e : events)
      direct += std::log(conditional_outcome_probabilities(e.delta_k, t, g, n)[static_cast<int>(e.outcome)]);
    CHECK(log_likelihood(events, t, g, n) == doctest::Approx(direct).epsilon(1e-12));
  }
}
