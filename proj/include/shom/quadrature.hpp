#pragma once

// One-dimensional quadrature over delta_k for Gaussian-weighted integrands.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "shom/error.hpp"
#include "shom/text.hpp"

namespace shom {

enum class QuadratureRule { adaptive_simpson, gauss_hermite };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::adaptive_simpson;
  /// Half-width of the integration range in units of sqrt(2) sigma_k, the
  /// standard deviation of the delta_k envelope.
  double half_range = 8.0;
  double rel_tol = 1e-9;
  int max_subdivisions = 200000;
  /// Node count for the Gauss-Hermite rule.
  int hermite_nodes = 64;

  void validate() const;
  /// Integration half-width in m^-1 for a given single-photon sigma_k.
  double half_width(double sigma_k) const {
    return half_range * std::sqrt(2.0) * sigma_k;
  }
};

template <std::size_t N>
struct QuadratureResult {
  std::array<double, N> value{};
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Physicists' Gauss-Hermite nodes and weights for weight exp(-t^2).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; cached per node count.
const HermiteRule& gauss_hermite_rule(int n);

namespace detail {

template <std::size_t N>
double component_sum(const std::array<double, N>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

template <std::size_t N>
std::array<double, N> simpson(double h, const std::array<double, N>& fa,
                              const std::array<double, N>& fm,
                              const std::array<double, N>& fb) {
  std::array<double, N> s{};
  for (std::size_t i = 0; i < N; ++i) s[i] = h / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]);
  return s;
}

}  // namespace detail

/// Adaptive Simpson integration of a vector-valued integrand over [lo, hi].
///
/// The range is first split into 64 panels; each panel is refined until the
/// summed absolute Richardson difference drops below its share of
/// rel_tol times the coarse integral magnitude. Throws NumericalError carrying
/// the achieved relative error when more than `max_subdivisions` splits are
/// needed.
template <std::size_t N, typename F>
QuadratureResult<N> adaptive_simpson(F&& f, double lo, double hi, double rel_tol,
                                     int max_subdivisions) {
  using Vec = std::array<double, N>;
  struct Panel {
    double a, b;
    Vec fa, fm, fb, whole;
  };
  constexpr int kInitialPanels = 64;
  QuadratureResult<N> out;
  const double width = hi - lo;
  const double step = width / kInitialPanels;

  std::vector<Panel> stack;
  stack.reserve(256);
  Vec f_left = f(lo);
  out.evaluations = 1;
  double coarse = 0.0;
  for (int p = 0; p < kInitialPanels; ++p) {
    const double a = lo + step * p;
    const double b = p + 1 == kInitialPanels ? hi : lo + step * (p + 1);
    const Vec fm = f(0.5 * (a + b));
    const Vec fb = f(b);
    out.evaluations += 2;
    Panel panel{a, b, f_left, fm, fb, detail::simpson(b - a, f_left, fm, fb)};
    coarse += std::abs(detail::component_sum(panel.whole));
    stack.push_back(panel);
    f_left = fb;
  }
  const double abs_tol =
      std::max(rel_tol * coarse, std::numeric_limits<double>::min());

  int splits = 0;
  bool exhausted = false;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const Vec flm = f(0.5 * (p.a + m));
    const Vec frm = f(0.5 * (m + p.b));
    out.evaluations += 2;
    const Vec left = detail::simpson(m - p.a, p.fa, flm, p.fm);
    const Vec right = detail::simpson(p.b - m, p.fm, frm, p.fb);
    double diff = 0.0;
    for (std::size_t i = 0; i < N; ++i) diff += std::abs(left[i] + right[i] - p.whole[i]);
    const double tol = abs_tol * (p.b - p.a) / width;
    const bool accept = diff <= 15.0 * tol;
    if (accept || splits >= max_subdivisions) {
      if (!accept) exhausted = true;
      for (std::size_t i = 0; i < N; ++i) {
        const double refined = left[i] + right[i];
        out.value[i] += refined + (refined - p.whole[i]) / 15.0;
      }
      // Raw difference: bounds the extrapolated panel conservatively.
      out.error_estimate += diff;
      continue;
    }
    ++splits;
    stack.push_back({m, p.b, p.fm, frm, p.fb, right});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left});
  }
  if (exhausted) {
    const double total = std::abs(detail::component_sum(out.value));
    const double achieved = total > 0.0 ? out.error_estimate / total
                                        : out.error_estimate;
    throw NumericalError("adaptive Simpson did not converge within " +
                             std::to_string(max_subdivisions) +
                             " subdivisions; achieved relative error " +
                             format_double(achieved),
                         achieved);
  }
  return out;
}

/// Gauss-Hermite integration of f over the real line, where f is expected
/// to decay like a Gaussian of standard deviation `scale` / sqrt(2).
/// Error estimate is the difference to the rule with half the nodes.
template <std::size_t N, typename F>
QuadratureResult<N> gauss_hermite(F&& f, double scale, int n_nodes) {
  auto apply = [&](int n, long& evals) {
    const HermiteRule& rule = gauss_hermite_rule(n);
    std::array<double, N> acc{};
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double t = rule.nodes[j];
      const auto v = f(scale * t);
      const double w = rule.weights[j] * std::exp(t * t) * scale;
      for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
    }
    evals += n;
    return acc;
  };
  QuadratureResult<N> out;
  out.value = apply(n_nodes, out.evaluations);
  const auto coarse = apply(std::max(2, n_nodes / 2), out.evaluations);
  for (std::size_t i = 0; i < N; ++i)
    out.error_estimate += std::abs(out.value[i] - coarse[i]);
  return out;
}

}  // namespace shom
