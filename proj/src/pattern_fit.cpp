#include "shom/pattern_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "shom/error.hpp"
#include "shom/model.hpp"
#include "shom/text.hpp"

namespace shom {

namespace {

using Vec4 = Eigen::Vector4d;

constexpr int kStarts = 8;
constexpr int kProfilePoints = 64;
constexpr std::array<double, 5> kSigmaFactors = {0.7, 0.85, 1.0, 1.15, 1.3};

double fringe_sign(const BeamGeometry& g) {
  return g.exchange == ExchangeSymmetry::symmetric ? -1.0 : 1.0;
}

FringeParameters unpack(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
Vec4 pack(const FringeParameters& p) {
  return {p.amplitude, p.sigma_k, p.visibility, p.delta_theta};
}

class FringeProblem {
 public:
  FringeProblem(std::span<const double> dk, std::span<const double> y,
                const BeamGeometry& geometry, const Bracket& bracket)
      : dk_(dk), y_(y), geometry_(geometry), bracket_(bracket) {}

  std::size_t size() const { return dk_.size(); }

  double cost(const Vec4& p) const {
    double sum = 0.0;
    const auto params = unpack(p);
    for (std::size_t i = 0; i < dk_.size(); ++i) {
      const double r = fringe_model(dk_[i], params, geometry_) - y_[i];
      sum += r * r;
    }
    return 0.5 * sum;
  }

  /// Normal equations J^T J and J^T r at p.
  void linearize(const Vec4& p, Eigen::Matrix4d& jtj, Vec4& jtr) const {
    jtj.setZero();
    jtr.setZero();
    const double s = fringe_sign(geometry_);
    const double amp = p[0], sigma = p[1], nu = p[2], theta = p[3];
    for (std::size_t i = 0; i < dk_.size(); ++i) {
      const double k = dk_[i];
      const double c = envelope(k, sigma);
      const double x = k * theta * geometry_.d;
      const double cx = std::cos(x);
      const double fringe = 1.0 + s * nu * cx;
      Vec4 j;
      j[0] = c * fringe;
      j[1] = amp * fringe * c * (k * k / (2.0 * sigma * sigma * sigma) - 1.0 / sigma);
      j[2] = amp * c * s * cx;
      j[3] = -amp * c * s * nu * std::sin(x) * k * geometry_.d;
      const double r = amp * c * fringe - y_[i];
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * r;
    }
  }

  Vec4 project(Vec4 p, double sigma_floor) const {
    p[0] = std::max(p[0], 0.0);
    p[1] = std::max(p[1], sigma_floor);
    p[2] = std::clamp(p[2], 0.0, 1.0);
    p[3] = std::clamp(p[3], bracket_.lo, bracket_.hi);
    return p;
  }

  /// Best linear (A, A s nu) at fixed (sigma, theta); returns residual cost.
  double profile(double sigma, double theta, FringeParameters& out) const {
    double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0, yy = 0;
    for (std::size_t i = 0; i < dk_.size(); ++i) {
      const double c = envelope(dk_[i], sigma);
      const double b = c * std::cos(dk_[i] * theta * geometry_.d);
      s11 += c * c;
      s12 += c * b;
      s22 += b * b;
      t1 += c * y_[i];
      t2 += b * y_[i];
      yy += y_[i] * y_[i];
    }
    const double det = s11 * s22 - s12 * s12;
    double a = 0.0, b = 0.0;
    if (det > 1e-12 * s11 * s22) {
      a = (t1 * s22 - t2 * s12) / det;
      b = (s11 * t2 - s12 * t1) / det;
    } else if (s11 > 0.0) {
      a = t1 / s11;
    }
    out.sigma_k = sigma;
    out.delta_theta = theta;
    out.amplitude = a > 0.0 ? a : std::max(t1 / s11, 0.0);
    out.visibility = a > 0.0 ? std::clamp(b / (a * fringe_sign(geometry_)), 0.05, 0.95)
                             : 0.5;
    return 0.5 * (yy - 2.0 * (a * t1 + b * t2) + a * a * s11 + 2.0 * a * b * s12 +
                  b * b * s22);
  }

 private:
  std::span<const double> dk_;
  std::span<const double> y_;
  BeamGeometry geometry_;
  Bracket bracket_;
};

struct LmOutcome {
  Vec4 params;
  double cost;
  bool converged;
  int iterations;
};

LmOutcome levenberg_marquardt(const FringeProblem& problem, const Vec4& start,
                              const Bracket& bracket, const FitOptions& options) {
  const double sigma_floor = 1e-6 * start[1];
  const Vec4 scale{std::max(start[0], std::numeric_limits<double>::min()),
                   start[1], 1.0, bracket.hi};
  Vec4 p = problem.project(start, sigma_floor);
  double cost = problem.cost(p);
  double lambda = 1e-3;
  Eigen::Matrix4d jtj;
  Vec4 jtr;
  for (int it = 1; it <= options.max_iterations; ++it) {
    if (cost == 0.0) return {p, cost, true, it};
    problem.linearize(p, jtj, jtr);
    const double diag_floor = 1e-30 * jtj.diagonal().maxCoeff();
    bool accepted = false;
    Vec4 step = Vec4::Zero();
    while (!accepted) {
      Eigen::Matrix4d damped = jtj;
      for (int i = 0; i < 4; ++i) {
        damped(i, i) += lambda * std::max(jtj(i, i), diag_floor);
      }
      const Vec4 delta = damped.ldlt().solve(-jtr);
      const Vec4 candidate = problem.project(p + delta, sigma_floor);
      const double candidate_cost = problem.cost(candidate);
      if (std::isfinite(candidate_cost) && candidate_cost < cost) {
        step = candidate - p;
        p = candidate;
        cost = candidate_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
      } else {
        lambda *= 10.0;
        // No descent direction left at machine precision: local minimum.
        if (lambda > 1e20) return {p, cost, true, it};
      }
    }
    const double rel =
        (step.cwiseAbs().array() / p.cwiseAbs().cwiseMax(scale).array()).maxCoeff();
    if (rel < options.step_tolerance) return {p, cost, true, it};
  }
  return {p, cost, false, options.max_iterations};
}

Bracket default_bracket(std::span<const double> delta_k, double d) {
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < delta_k.size(); ++i) {
    min_gap = std::min(min_gap, std::abs(delta_k[i] - delta_k[i - 1]));
  }
  const double nyquist = std::numbers::pi / (min_gap * d);
  return {0.0, std::min(5.0 * units::mrad, nyquist)};
}

double sigma_from_moments(std::span<const double> dk, std::span<const double> y) {
  double w = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < dk.size(); ++i) {
    const double yi = std::max(y[i], 0.0);
    w += yi;
    m2 += yi * dk[i] * dk[i];
  }
  if (w > 0.0 && m2 > 0.0) return std::sqrt(m2 / w / 2.0);
  // Flat data: the envelope spans the sampled range at 8 standard deviations.
  double half = 0.0;
  for (double k : dk) half = std::max(half, std::abs(k));
  return half / (8.0 * std::sqrt(2.0));
}

PatternFit to_fit(const FringeProblem& problem, const LmOutcome& lm,
                  const Bracket& bracket) {
  PatternFit fit;
  const auto p = unpack(lm.params);
  fit.amplitude_hat = p.amplitude;
  fit.sigma_k_hat = p.sigma_k;
  fit.visibility_hat = p.visibility;
  fit.delta_theta_hat = p.delta_theta;
  fit.residual_rms = std::sqrt(2.0 * lm.cost / static_cast<double>(problem.size()));
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  fit.visibility_clamped = p.visibility <= 0.0 || p.visibility >= 1.0;
  fit.fringe_identifiable = p.amplitude > 0.0 && p.visibility > 1e-6 &&
                            p.delta_theta > 1e-9 * bracket.hi;
  return fit;
}

}  // namespace

double fringe_model(double delta_k, const FringeParameters& p,
                    const BeamGeometry& geometry) {
  const double x = delta_k * p.delta_theta * geometry.d;
  return p.amplitude * envelope(delta_k, p.sigma_k) *
         (1.0 + fringe_sign(geometry) * p.visibility * std::cos(x));
}

PatternFit fit_curve(std::span<const double> delta_k,
                     std::span<const double> rates,
                     const BeamGeometry& geometry, const FitOptions& options) {
  if (delta_k.size() != rates.size()) {
    throw DomainError("fit_curve: delta_k and rates differ in length");
  }
  if (delta_k.size() < 8) {
    throw DomainError("pattern fit needs at least 8 bins with nonzero exposure, got " +
                      std::to_string(delta_k.size()));
  }
  geometry.validate();
  const Bracket bracket =
      options.bracket.value_or(default_bracket(delta_k, geometry.d));
  if (!(bracket.lo >= 0.0) || !(bracket.hi > bracket.lo)) {
    throw DomainError("pattern fit bracket must satisfy 0 <= lo < hi");
  }
  const FringeProblem problem(delta_k, rates, geometry, bracket);

  if (std::all_of(rates.begin(), rates.end(), [](double r) { return r == 0.0; })) {
    PatternFit fit;
    fit.sigma_k_hat = options.initial_guess ? options.initial_guess->sigma_k
                                            : sigma_from_moments(delta_k, rates);
    fit.converged = true;
    fit.fringe_identifiable = false;
    return fit;
  }

  if (options.initial_guess) {
    const auto lm = levenberg_marquardt(problem, pack(*options.initial_guess),
                                        bracket, options);
    if (!lm.converged) {
      throw FitError("pattern fit did not converge from the supplied guess",
                     std::sqrt(2.0 * lm.cost / static_cast<double>(problem.size())));
    }
    return to_fit(problem, lm, bracket);
  }

  const double sigma0 = sigma_from_moments(delta_k, rates);
  const double segment = (bracket.hi - bracket.lo) / kStarts;
  std::optional<LmOutcome> best;
  double best_any = std::numeric_limits<double>::infinity();
  for (int s = 0; s < kStarts; ++s) {
    FringeParameters start;
    double start_cost = std::numeric_limits<double>::infinity();
    for (double factor : kSigmaFactors) {
      for (int i = 0; i < kProfilePoints; ++i) {
        const double theta = bracket.lo + segment * (s + (i + 0.5) / kProfilePoints);
        FringeParameters candidate;
        const double c = problem.profile(factor * sigma0, theta, candidate);
        if (c < start_cost) {
          start_cost = c;
          start = candidate;
        }
      }
    }
    const auto lm = levenberg_marquardt(problem, pack(start), bracket, options);
    best_any = std::min(best_any, lm.cost);
    if (lm.converged && (!best || lm.cost < best->cost)) best = lm;
  }
  if (!best) {
    throw FitError("pattern fit did not converge from any start",
                   std::sqrt(2.0 * best_any / static_cast<double>(problem.size())));
  }
  return to_fit(problem, *best, bracket);
}

PatternFit fit_pattern(const InterferencePattern& pattern,
                       const BeamGeometry& geometry, const FitOptions& options) {
  std::vector<double> dk;
  std::vector<double> rates;
  for (std::size_t i = 0; i < pattern.bin_centers.size(); ++i) {
    if (pattern.exposure[i] <= 0) continue;
    dk.push_back(pattern.bin_centers[i]);
    rates.push_back(static_cast<double>(pattern.counts[i]) /
                    static_cast<double>(pattern.exposure[i]));
  }
  return fit_curve(dk, rates, geometry, options);
}

}  // namespace shom
