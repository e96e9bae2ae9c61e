#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aiskit/bbox.hpp"
#include "aiskit/track.hpp"

namespace aiskit::gis {

inline constexpr double kEarthRadius = 6371000.0;  // meters
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const LonLat&, const LonLat&) = default;
};

/// Great-circle distance in meters.
double haversine(LonLat a, LonLat b) noexcept;

/// Initial bearing from a to b, degrees in [0, 360).
double bearing(LonLat a, LonLat b) noexcept;

/// Longitude wrapped into (-180, 180].
double normalize_lon(double lon) noexcept;

// ---------------------------------------------------------------------------
// Zones

/// Named simple polygon (exterior ring only). The ring is closed: the first
/// vertex is repeated at the end.
class ZonePolygon {
public:
    /// Throws FormatError for rings with fewer than 4 vertices, open rings or
    /// self-intersections.
    ZonePolygon(std::string name, std::vector<LonLat> ring);

    const std::string& name() const noexcept { return name_; }
    const std::vector<LonLat>& ring() const noexcept { return ring_; }
    const BBox& bbox() const noexcept { return bbox_; }

private:
    std::string name_;
    std::vector<LonLat> ring_;
    BBox bbox_;
};

/// Even-odd ray casting in the lon/lat plane. Points on an edge or vertex
/// count as inside.
bool point_in_polygon(LonLat p, const ZonePolygon& zone) noexcept;

inline constexpr std::string_view kOutside = "outside";

/// Name of the first zone containing p, in declaration order, else "outside".
std::string_view zone_of(LonLat p, std::span<const ZonePolygon> zones) noexcept;

/// Polygons of a GeoJSON FeatureCollection; each feature needs a `name`
/// property. Throws FormatError.
std::vector<ZonePolygon> parse_zones(std::string_view geojson);
std::vector<ZonePolygon> load_zones(const std::filesystem::path& path);

struct Edge {
    std::uint64_t transit_count = 0;
    std::set<std::uint32_t> mmsis;

    std::size_t vessel_count() const noexcept { return mmsis.size(); }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed multigraph of zone transitions.
struct GeoGraph {
    std::vector<std::string> nodes;  // declared zones, then "outside"
    std::map<std::pair<std::string, std::string>, Edge> edges;

    std::uint64_t total_transits() const noexcept;
};

GeoGraph build_graph(std::span<const Track> tracks, std::span<const ZonePolygon> zones);

// ---------------------------------------------------------------------------
// Feature distances

struct FeaturePointSet {
    std::string label;
    std::vector<std::string> names;
    std::vector<LonLat> points;
};

/// Reads CSV `name,lon,lat` (header optional). Throws FormatError on bad rows
/// or an empty set.
FeaturePointSet load_features(const std::filesystem::path& path, std::string label = {});

struct Nearest {
    double meters = 0.0;
    std::size_t index = 0;  // into FeaturePointSet::points
    LonLat point;

    friend bool operator==(const Nearest&, const Nearest&) = default;
};

/// Linear scan; ties go to the lowest index. Throws ContractViolation on an
/// empty set.
Nearest distance_to_nearest(LonLat p, const FeaturePointSet& features);

/// Uniform lon/lat binning over a feature set. Returns exactly what the
/// linear scan returns.
class FeatureIndex {
public:
    explicit FeatureIndex(const FeaturePointSet& features, double cell_degrees = 1.0);

    Nearest nearest(LonLat p) const;

private:
    struct Cell {
        double lon0, lon1, lat0, lat1;
        std::vector<std::size_t> members;
    };

    const FeaturePointSet* features_;
    std::vector<Cell> cells_;
};

}  // namespace aiskit::gis
