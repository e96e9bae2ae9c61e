#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aiskit {

/// One position of a vessel. `t` is unix seconds; interpolation may produce
/// fractional values.
struct TrackPoint {
    double x = 0.0;  // longitude, degrees
    double y = 0.0;  // latitude, degrees
    double t = 0.0;
    std::optional<double> sog;  // knots
    std::optional<double> cog;  // degrees
    std::optional<int> heading;
    std::optional<int> nav_status;
    std::string source;

    friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

/// Static metadata joined onto a track from the aggregate table.
struct VesselInfo {
    std::string ship_name;
    std::optional<int> ship_type;

    friend bool operator==(const VesselInfo&, const VesselInfo&) = default;
};

/// Time-ordered positions of one vessel; t strictly increasing.
struct Track {
    std::uint32_t mmsi = 0;
    std::vector<TrackPoint> points;
    std::optional<VesselInfo> info;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    friend bool operator==(const Track&, const Track&) = default;
};

}  // namespace aiskit
