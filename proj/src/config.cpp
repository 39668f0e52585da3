#include "shom/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <cmath>
#include <numbers>

#include "shom/error.hpp"

namespace shom {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T number(const std::string& text, const std::string& where) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(where + ": cannot parse number from '" + text + "'");
  }
  return value;
}

}  // namespace

QuadratureRule parse_rule(const std::string& text) {
  if (text == "adaptive-simpson") return QuadratureRule::adaptive_simpson;
  if (text == "gauss-hermite") return QuadratureRule::gauss_hermite;
  throw ConfigError("unknown quadrature rule '" + text +
                    "' (expected adaptive-simpson or gauss-hermite)");
}

ExchangeSymmetry parse_exchange(const std::string& text) {
  if (text == "symmetric") return ExchangeSymmetry::symmetric;
  if (text == "antisymmetric") return ExchangeSymmetry::antisymmetric;
  throw ConfigError("unknown exchange symmetry '" + text +
                    "' (expected symmetric or antisymmetric)");
}

BeamGeometry RunConfig::geometry() const {
  BeamGeometry g;
  g.sigma_k = sigma_k_per_um * units::per_um;
  g.d = d_mm * units::mm;
  g.k0.reset();
  if (wavelength_nm) g.k0 = 2.0 * std::numbers::pi / (*wavelength_nm * units::nm);
  g.exchange = exchange;
  g.validate();
  return g;
}

NoiseModel RunConfig::noise() const {
  NoiseModel n{gamma, nu};
  n.validate();
  return n;
}

void RunConfig::validate() const {
  geometry();
  noise();
  quadrature.validate();
  if (!std::isfinite(deflection_mrad)) throw DomainError("deflection must be finite");
}

void apply_config(std::istream& in, RunConfig& c, const std::string& source) {
  std::string section = "run";
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "geometry" && section != "noise" && section != "run" &&
          section != "quadrature" && section != "output") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");

    try {
      if (section == "geometry" && key == "sigma_k_per_um") {
        c.sigma_k_per_um = number<double>(value, where);
      } else if (section == "geometry" && key == "d_mm") {
        c.d_mm = number<double>(value, where);
      } else if (section == "geometry" && key == "wavelength_nm") {
        c.wavelength_nm = number<double>(value, where);
      } else if (section == "geometry" && key == "exchange_symmetry") {
        c.exchange = parse_exchange(value);
      } else if (section == "noise" && key == "gamma") {
        c.gamma = number<double>(value, where);
      } else if (section == "noise" && key == "nu") {
        c.nu = number<double>(value, where);
      } else if (section == "run" && key == "deflection_mrad") {
        c.deflection_mrad = number<double>(value, where);
      } else if (section == "run" && key == "seed") {
        c.seed = number<std::uint64_t>(value, where);
      } else if (section == "quadrature" && key == "rule") {
        c.quadrature.rule = parse_rule(value);
      } else if (section == "quadrature" && key == "half_range") {
        c.quadrature.half_range = number<double>(value, where);
      } else if (section == "quadrature" && key == "rel_tol") {
        c.quadrature.rel_tol = number<double>(value, where);
      } else if (section == "quadrature" && key == "max_subdivisions") {
        c.quadrature.max_subdivisions = number<int>(value, where);
      } else if (section == "quadrature" && key == "hermite_nodes") {
        c.quadrature.hermite_nodes = number<int>(value, where);
      } else if (section == "output" && key == "path") {
        c.output_path = value;
      } else {
        throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
      }
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind(source, 0) == 0) throw;
      throw ConfigError(where + ": " + what);
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig c;
  apply_config(in, c, path);
  return c;
}

}  // namespace shom
