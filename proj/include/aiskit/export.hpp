#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aiskit/bbox.hpp"
#include "aiskit/storage.hpp"
#include "aiskit/track.hpp"

namespace aiskit::io {

/// Optional processing stages. An unset field skips its stage. Stages run as
/// split, encode, interpolate, decimate.
struct PipelineFlags {
    std::optional<double> split_gap;           // seconds
    std::optional<double> distance_threshold;  // meters
    std::optional<double> speed_threshold;     // knots
    std::optional<double> interp_step;         // seconds
    std::optional<double> decimate_epsilon;    // meters

    bool encodes() const noexcept { return distance_threshold || speed_threshold; }
    /// Throws ContractViolation on non-positive values.
    void validate() const;
};

/// Selection plus processing for one track export.
struct TrackRequest {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::optional<BBox> bbox;
    std::optional<std::set<std::uint32_t>> mmsis;
    /// Ship-type filter: class names ("cargo"), exact type names or numeric
    /// codes. Vessels with no known type belong to "other".
    std::optional<std::set<std::string>> vessel_types;
    /// Vessels with mmsi <= cursor are skipped.
    std::optional<std::uint32_t> cursor;
    /// At most this many vessels.
    std::optional<std::size_t> limit;
    PipelineFlags flags;
};

struct TrackPage {
    std::vector<Track> tracks;  // (mmsi, first t) order
    /// Set when vessels beyond `limit` remain.
    std::optional<std::uint32_t> next_cursor;
};

/// Runs the query and the requested stages, vessel by vessel, and attaches
/// aggregate metadata.
TrackPage build_tracks(const store::StorageHandle& handle, const TrackRequest& request);

/// Applies the stages of `flags` to one vessel's raw track.
std::vector<Track> process_vessel(const Track& raw, const PipelineFlags& flags);

/// True iff the vessel's type matches one of `wanted`.
bool vessel_type_matches(const std::optional<VesselInfo>& info, const std::set<std::string>& wanted);

/// A finite decimal number. Throws FormatError naming `what`.
double parse_number(std::string_view text, const char* what);
/// Seconds from "90", "90s", "5m", "24h" or "2d". Throws FormatError.
double parse_duration(std::string_view text);
/// "xmin,ymin,xmax,ymax". Throws FormatError.
BBox parse_bbox(std::string_view text);
/// Comma-separated MMSIs. Throws FormatError.
std::set<std::uint32_t> parse_mmsi_list(std::string_view text);
/// Comma-separated, trimmed, non-empty items.
std::set<std::string> parse_word_list(std::string_view text);

/// Fixed nine-decimal rendering, never "-0.000000000".
std::string format_fixed9(double v);

/// One row per point with the frozen dynamic-row header.
void write_csv(std::ostream& out, const std::vector<Track>& tracks);

/// FeatureCollection of LineStrings; tracks with fewer than two points are
/// left out. `next_cursor` is always present (null when absent).
void write_geojson(std::ostream& out, const TrackPage& page);
std::string to_geojson(const TrackPage& page);

}  // namespace aiskit::io
