#include "shom/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "shom/error.hpp"
#include "shom/text.hpp"

namespace shom::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void fail(const std::string& source, std::size_t line,
                       const std::string& what) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse(const std::string& text, const std::string& source, std::size_t line,
        const char* column) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(source, line, std::string("cannot parse ") + column + " from '" + text + "'");
  }
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

void expect_header(std::istream& in, const char* header, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(source, 1, "missing header");
  line = strip_cr(line);
  if (line != header) {
    fail(source, 1, "expected header '" + std::string(header) + "', got '" + line + "'");
  }
}

}  // namespace

void write_events(std::ostream& out, std::span<const EventRecord> events) {
  out << kEventsHeader << '\n';
  for (std::size_t i = 0; i < events.size(); ++i) {
    out << i << ',' << format_double(events[i].delta_k / units::per_um) << ','
        << static_cast<int>(events[i].outcome) << '\n';
  }
}

void write_pattern(std::ostream& out, const InterferencePattern& pattern) {
  out << kPatternHeader << '\n';
  for (std::size_t i = 0; i < pattern.bin_centers.size(); ++i) {
    const double overlay =
        pattern.model_overlay.empty() ? 0.0 : pattern.model_overlay[i];
    // density over delta_k in um^-1 has units of um
    out << format_double(pattern.bin_centers[i] / units::per_um) << ','
        << pattern.counts[i] << ',' << pattern.exposure[i] << ','
        << format_double(overlay * units::per_um) << '\n';
  }
}

void write_fisher_scan(std::ostream& out, std::span<const double> delta_thetas,
                       std::span<const double> fisher) {
  out << kFisherHeader << '\n';
  for (std::size_t i = 0; i < delta_thetas.size(); ++i) {
    out << format_double(delta_thetas[i] / units::mrad) << ','
        << format_double(fisher[i]) << '\n';
  }
}

void write_surface(std::ostream& out, std::span<const SurfaceNode> nodes) {
  out << kSurfaceHeader << '\n';
  for (const auto& n : nodes) {
    out << format_double(n.sigma_k / units::per_um) << ','
        << format_double(n.d / units::mm) << ',' << format_double(n.fisher) << '\n';
  }
}

void write_study(std::ostream& out, const VarianceStudy& study) {
  out << kStudyHeader << '\n';
  for (std::size_t i = 0; i < study.estimates.size(); ++i) {
    out << i << ',' << format_double(study.estimates[i] / units::mrad) << '\n';
  }
}

FileKind detect_kind(const std::string& header) {
  const std::string h = strip_cr(header);
  if (h == kEventsHeader) return FileKind::events;
  if (h == kPatternHeader) return FileKind::pattern;
  return FileKind::unknown;
}

std::vector<EventRecord> read_events(std::istream& in, const std::string& source) {
  expect_header(in, kEventsHeader, source);
  std::vector<EventRecord> events;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 3) fail(source, line_no, "expected 3 fields, got " + std::to_string(f.size()));
    parse<long long>(f[0], source, line_no, "event_index");
    const double dk = parse<double>(f[1], source, line_no, "delta_k_per_um");
    const int outcome = parse<int>(f[2], source, line_no, "outcome");
    if (outcome < 0 || outcome > 2) fail(source, line_no, "outcome must be 0, 1 or 2");
    if (!std::isfinite(dk)) fail(source, line_no, "delta_k must be finite");
    events.push_back({dk * units::per_um, static_cast<Outcome>(outcome)});
  }
  if (events.empty()) fail(source, line_no, "no events");
  return events;
}

InterferencePattern read_pattern(std::istream& in, const std::string& source) {
  expect_header(in, kPatternHeader, source);
  InterferencePattern p;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) fail(source, line_no, "expected 4 fields, got " + std::to_string(f.size()));
    const double dk = parse<double>(f[0], source, line_no, "delta_k_per_um") * units::per_um;
    const auto counts = parse<std::int64_t>(f[1], source, line_no, "counts");
    const auto exposure = parse<std::int64_t>(f[2], source, line_no, "exposure");
    const double density = parse<double>(f[3], source, line_no, "model_density");
    if (counts < 0 || exposure < 0 || counts > exposure) {
      fail(source, line_no, "counts must satisfy 0 <= counts <= exposure");
    }
    if (!p.bin_centers.empty() && !(dk > p.bin_centers.back())) {
      fail(source, line_no, "bin centers must be strictly increasing");
    }
    p.bin_centers.push_back(dk);
    p.counts.push_back(counts);
    p.exposure.push_back(exposure);
    p.model_overlay.push_back(density / units::per_um);
  }
  if (p.bin_centers.empty()) fail(source, line_no, "no bins");
  return p;
}

}  // namespace shom::csv
