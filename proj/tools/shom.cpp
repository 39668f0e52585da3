// shom: command-line front end for the spatial HOM deflection toolkit.
//
// All numeric flags are in laboratory units (mrad, mm, um^-1, nm, um).
// Exit status: 0 success, 2 configuration error, 3 numerical error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shom/config.hpp"
#include "shom/csv.hpp"
#include "shom/error.hpp"
#include "shom/estimator.hpp"
#include "shom/fisher.hpp"
#include "shom/pattern_fit.hpp"
#include "shom/sampler.hpp"
#include "shom/text.hpp"

namespace {

using namespace shom;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// Flags shared by every subcommand; unset flags leave the config untouched.
struct CommonFlags {
  std::string config_path;
  std::optional<double> sigma_k, d, wavelength, gamma, nu, delta_theta;
  std::optional<std::string> exchange, rule;
  std::optional<double> rel_tol, half_range;
  std::optional<int> max_subdivisions;
  std::optional<std::uint64_t> seed;
  std::string out;

  void attach(CLI::App* app, bool with_deflection, bool with_seed) {
    app->add_option("--config", config_path, "key = value config file");
    app->add_option("--sigma-k", sigma_k, "single-photon momentum std [um^-1]");
    app->add_option("--d", d, "source-to-detector distance [mm]");
    app->add_option("--wavelength", wavelength, "signal wavelength [nm]");
    app->add_option("--gamma", gamma, "per-photon loss probability");
    app->add_option("--nu", nu, "interference visibility");
    app->add_option("--exchange", exchange, "symmetric | antisymmetric");
    app->add_option("--rule", rule, "adaptive-simpson | gauss-hermite");
    app->add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
    app->add_option("--half-range", half_range, "quadrature half range [sqrt(2) sigma_k]");
    app->add_option("--max-subdivisions", max_subdivisions, "adaptive quadrature cap");
    app->add_option("--out", out, "output file (default stdout)");
    if (with_deflection) app->add_option("--delta-theta", delta_theta, "deflection [mrad]");
    if (with_seed) app->add_option("--seed", seed, "master RNG seed");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    if (sigma_k) c.sigma_k_per_um = *sigma_k;
    if (d) c.d_mm = *d;
    if (wavelength) c.wavelength_nm = *wavelength;
    if (gamma) c.gamma = *gamma;
    if (nu) c.nu = *nu;
    if (exchange) c.exchange = parse_exchange(*exchange);
    if (rule) c.quadrature.rule = parse_rule(*rule);
    if (rel_tol) c.quadrature.rel_tol = *rel_tol;
    if (half_range) c.quadrature.half_range = *half_range;
    if (max_subdivisions) c.quadrature.max_subdivisions = *max_subdivisions;
    if (delta_theta) c.deflection_mrad = *delta_theta;
    if (seed) c.seed = *seed;
    if (!out.empty()) c.output_path = out;
    c.validate();
    return c;
  }
};

/// Writes through `fn` to the configured path, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  fn(file);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = i + 1 == n ? hi : lo + step * i;
  return out;
}

/// "lo:hi:n" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, double unit) {
  std::vector<double> values;
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  try {
    if (sep == ':') {
      if (parts.size() != 3) throw ConfigError("grid '" + text + "' must be lo:hi:n");
      values = linspace(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
    } else {
      for (const auto& p : parts) values.push_back(std::stod(p));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse grid '" + text + "'");
  }
  for (double& v : values) v *= unit;
  return values;
}

void print_field(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << " = " << value << '\n';
}
void print_field(std::ostream& out, const std::string& key, double value) {
  print_field(out, key, format_double(value));
}
void print_field(std::ostream& out, const std::string& key, bool value) {
  print_field(out, key, std::string(value ? "true" : "false"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial Hong-Ou-Mandel deflection sensing toolkit"};
  app.require_subcommand(1);

  // pattern
  CommonFlags pattern_flags;
  int pattern_bins = 81;
  std::optional<double> pattern_range;
  std::int64_t pattern_exposure = 100000;
  std::optional<double> pattern_slit;
  std::string pattern_stats = "binomial";
  std::uint64_t pattern_stream = 0;
  auto* pattern = app.add_subcommand("pattern", "synthetic slit-scan coincidence pattern (CSV)");
  pattern_flags.attach(pattern, true, true);
  pattern->add_option("--bins", pattern_bins, "number of delta_k bins");
  pattern->add_option("--range", pattern_range, "half range of delta_k [um^-1] (default 4 sqrt(2) sigma_k)");
  pattern->add_option("--exposure", pattern_exposure, "trials per bin");
  pattern->add_option("--slit-width", pattern_slit, "slit width [um]");
  pattern->add_option("--statistics", pattern_stats, "binomial | poisson");
  pattern->add_option("--stream", pattern_stream, "RNG stream index");

  // fisher
  CommonFlags fisher_flags;
  double fisher_from = 0.1, fisher_to = 2.0;
  int fisher_points = 96;
  auto* fisher = app.add_subcommand("fisher", "classical Fisher information versus deflection (CSV)");
  fisher_flags.attach(fisher, false, false);
  fisher->add_option("--from", fisher_from, "first deflection [mrad]");
  fisher->add_option("--to", fisher_to, "last deflection [mrad]");
  fisher->add_option("--points", fisher_points, "scan points");

  // qfi
  CommonFlags qfi_flags;
  double qfi_n = 1e4;
  auto* qfi = app.add_subcommand("qfi", "quantum Fisher information and Cramer-Rao bounds");
  qfi_flags.attach(qfi, false, false);
  qfi->add_option("--n", qfi_n, "number of detection events");

  // simulate
  CommonFlags sim_flags;
  std::size_t sim_events = 10000;
  std::uint64_t sim_stream = 0;
  auto* simulate = app.add_subcommand("simulate", "seeded event records (CSV)");
  sim_flags.attach(simulate, true, true);
  simulate->add_option("--n-events", sim_events, "number of events");
  simulate->add_option("--stream", sim_stream, "RNG stream index");

  // estimate
  CommonFlags est_flags;
  std::string est_in;
  double est_lo = 0.0;
  std::optional<double> est_hi;
  auto* estimate = app.add_subcommand("estimate", "estimate |delta_theta| from an events or pattern CSV");
  est_flags.attach(estimate, false, false);
  estimate->add_option("--in", est_in, "events.csv or pattern.csv")->required();
  estimate->add_option("--bracket-lo", est_lo, "lower deflection bound [mrad]");
  estimate->add_option("--bracket-hi", est_hi, "upper deflection bound [mrad] (default 5)");

  // study
  CommonFlags study_flags;
  int study_trials = 500;
  std::size_t study_events = 10000;
  std::string study_summary;
  auto* study = app.add_subcommand("study", "Monte Carlo variance study against the Cramer-Rao bound");
  study_flags.attach(study, true, true);
  study->add_option("--trials", study_trials, "number of trials (>= 30)");
  study->add_option("--n-events", study_events, "events per trial");
  study->add_option("--summary", study_summary, "summary file (default stdout)");

  // working-point
  CommonFlags wp_flags;
  double wp_from = 0.1, wp_to = 2.0;
  int wp_points = 256;
  auto* working = app.add_subcommand("working-point", "deflection maximizing the Fisher information");
  wp_flags.attach(working, false, false);
  working->add_option("--from", wp_from, "range start [mrad]");
  working->add_option("--to", wp_to, "range end [mrad]");
  working->add_option("--points", wp_points, "grid points (>= 16)");

  // surface
  CommonFlags surf_flags;
  std::string surf_sigma = "0.01:0.05:9";
  std::string surf_d = "100:600:11";
  auto* surface = app.add_subcommand("surface", "Fisher information over (sigma_k, d) (CSV)");
  surf_flags.attach(surface, true, false);
  surface->add_option("--sigma-k-grid", surf_sigma, "lo:hi:n or list [um^-1]");
  surface->add_option("--d-grid", surf_d, "lo:hi:n or list [mm]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*pattern) {
      const RunConfig c = pattern_flags.resolve();
      const BeamGeometry g = c.geometry();
      const double half = pattern_range ? *pattern_range * units::per_um
                                        : 4.0 * std::sqrt(2.0) * g.sigma_k;
      ScanOptions opts;
      if (pattern_slit) opts.slit_width = *pattern_slit * units::um;
      if (pattern_stats == "poisson") {
        opts.statistics = CountingStatistics::poisson;
      } else if (pattern_stats != "binomial") {
        throw ConfigError("unknown statistics '" + pattern_stats + "'");
      }
      const auto p = scan_pattern({-half, half, pattern_bins}, pattern_exposure,
                                  c.deflection(), g, c.noise(),
                                  {c.seed, pattern_stream}, opts);
      emit(c.output_path, [&](std::ostream& o) { csv::write_pattern(o, p); });
    } else if (*fisher) {
      const RunConfig c = fisher_flags.resolve();
      const auto thetas = linspace(fisher_from * units::mrad, fisher_to * units::mrad,
                                   fisher_points);
      const auto f = fisher_scan(thetas, c.geometry(), c.noise(), c.quadrature);
      emit(c.output_path, [&](std::ostream& o) { csv::write_fisher_scan(o, thetas, f); });
    } else if (*qfi) {
      const RunConfig c = qfi_flags.resolve();
      const double h = quantum_fisher_information(c.geometry());
      emit(c.output_path, [&](std::ostream& o) {
        print_field(o, "qfi_rad2", h);
        print_field(o, "n", qfi_n);
        print_field(o, "crb_std_urad", cramer_rao_std(h, qfi_n) / units::urad);
        print_field(o, "crb_std_halved_urad",
                    cramer_rao_std(h, qfi_n, CrbConvention::halved) / units::urad);
      });
    } else if (*simulate) {
      const RunConfig c = sim_flags.resolve();
      const auto events = simulate_run(sim_events, c.deflection(), c.geometry(),
                                       c.noise(), {c.seed, sim_stream});
      emit(c.output_path, [&](std::ostream& o) { csv::write_events(o, events); });
    } else if (*estimate) {
      const RunConfig c = est_flags.resolve();
      std::ifstream in(est_in, std::ios::binary);
      if (!in) throw ConfigError("cannot open input file '" + est_in + "'");
      std::string header;
      std::getline(in, header);
      in.seekg(0);
      const auto kind = csv::detect_kind(header);
      if (kind == csv::FileKind::events) {
        const auto events = csv::read_events(in, est_in);
        Bracket bracket;
        bracket.lo = est_lo * units::mrad;
        if (est_hi) bracket.hi = *est_hi * units::mrad;
        const auto e = mle_deflection(events, c.geometry(), c.noise(), bracket, c.quadrature);
        emit(c.output_path, [&](std::ostream& o) {
          print_field(o, "kind", std::string("events"));
          print_field(o, "n_events", static_cast<double>(events.size()));
          print_field(o, "delta_theta_mrad", e.value / units::mrad);
          print_field(o, "std_mrad", e.std / units::mrad);
          print_field(o, "log_likelihood", e.log_likelihood_at_max);
          print_field(o, "bracket_lo_mrad", e.bracket_used.lo / units::mrad);
          print_field(o, "bracket_hi_mrad", e.bracket_used.hi / units::mrad);
          print_field(o, "at_boundary", e.at_boundary);
        });
      } else if (kind == csv::FileKind::pattern) {
        const auto p = csv::read_pattern(in, est_in);
        FitOptions opts;
        if (est_hi || est_lo > 0.0) {
          opts.bracket = Bracket{est_lo * units::mrad,
                                 est_hi.value_or(5.0) * units::mrad};
        }
        const auto fit = fit_pattern(p, c.geometry(), opts);
        emit(c.output_path, [&](std::ostream& o) {
          print_field(o, "kind", std::string("pattern"));
          print_field(o, "delta_theta_mrad", fit.delta_theta_hat / units::mrad);
          print_field(o, "sigma_k_per_um", fit.sigma_k_hat / units::per_um);
          print_field(o, "visibility", fit.visibility_hat);
          print_field(o, "amplitude", fit.amplitude_hat);
          print_field(o, "residual_rms", fit.residual_rms);
          print_field(o, "converged", fit.converged);
          print_field(o, "visibility_clamped", fit.visibility_clamped);
          print_field(o, "fringe_identifiable", fit.fringe_identifiable);
        });
      } else {
        throw ConfigError(est_in + ":1: unrecognized CSV header '" + header + "'");
      }
    } else if (*study) {
      const RunConfig c = study_flags.resolve();
      const auto s = variance_study(study_trials, study_events, c.deflection(),
                                    c.geometry(), c.noise(), {c.seed, 0}, {},
                                    c.quadrature);
      if (!c.output_path.empty()) {
        emit(c.output_path, [&](std::ostream& o) { csv::write_study(o, s); });
      }
      emit(study_summary, [&](std::ostream& o) {
        print_field(o, "n_trials", static_cast<double>(s.n_trials));
        print_field(o, "n_events", static_cast<double>(s.n_events_per_trial));
        print_field(o, "empirical_var", s.empirical_variance);
        print_field(o, "crb_var", s.crb_variance);
        print_field(o, "ratio", s.ratio);
        print_field(o, "bias", s.bias);
        print_field(o, "bias_flag", s.bias_flag);
      });
    } else if (*working) {
      const RunConfig c = wp_flags.resolve();
      const auto wp = optimal_working_point(c.geometry(), c.noise(),
                                            wp_from * units::mrad, wp_to * units::mrad,
                                            wp_points, c.quadrature);
      emit(c.output_path, [&](std::ostream& o) {
        print_field(o, "delta_theta_mrad", wp.delta_theta / units::mrad);
        print_field(o, "fisher_rad2", wp.fisher);
        print_field(o, "flat", wp.flat);
      });
    } else if (*surface) {
      const RunConfig c = surf_flags.resolve();
      const auto sigmas = parse_grid(surf_sigma, units::per_um);
      const auto ds = parse_grid(surf_d, units::mm);
      const auto nodes = fisher_surface(sigmas, ds, c.deflection(), c.noise(),
                                        c.quadrature, c.geometry());
      emit(c.output_path, [&](std::ostream& o) { csv::write_surface(o, nodes); });
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
