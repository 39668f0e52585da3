#pragma once

// Fixed-schema CSV files: comma separator, '.' decimal, mandatory header,
// LF line endings. Physical quantities are written in the units named in the
// column header.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "shom/estimator.hpp"
#include "shom/fisher.hpp"
#include "shom/sampler.hpp"

namespace shom::csv {

inline constexpr const char* kEventsHeader = "event_index,delta_k_per_um,outcome";
inline constexpr const char* kPatternHeader =
    "delta_k_per_um,counts,exposure,model_density";
inline constexpr const char* kFisherHeader = "delta_theta_mrad,fisher_rad2";
inline constexpr const char* kSurfaceHeader = "sigma_k_per_um,d_mm,fisher_rad2";
inline constexpr const char* kStudyHeader = "trial,estimate_mrad";

void write_events(std::ostream& out, std::span<const EventRecord> events);
void write_pattern(std::ostream& out, const InterferencePattern& pattern);
void write_fisher_scan(std::ostream& out, std::span<const double> delta_thetas,
                       std::span<const double> fisher);
void write_surface(std::ostream& out, std::span<const SurfaceNode> nodes);
void write_study(std::ostream& out, const VarianceStudy& study);

enum class FileKind { events, pattern, unknown };

/// Classifies a CSV by its header line.
FileKind detect_kind(const std::string& header);

/// Parsers throw ConfigError naming `source` and the offending line number.
std::vector<EventRecord> read_events(std::istream& in,
                                     const std::string& source = "<events>");
InterferencePattern read_pattern(std::istream& in,
                                 const std::string& source = "<pattern>");

}  // namespace shom::csv
