#include "aiskit/gis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "aiskit/csv_schema.hpp"
#include "aiskit/error.hpp"

namespace aiskit::gis {

double haversine(LonLat a, LonLat b) noexcept {
    const double p1 = a.lat * kDegToRad;
    const double p2 = b.lat * kDegToRad;
    const double dp = p2 - p1;
    const double dl = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dp / 2);
    const double s2 = std::sin(dl / 2);
    const double h = std::clamp(s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2, 0.0, 1.0);
    return 2 * kEarthRadius * std::asin(std::sqrt(h));
}

double bearing(LonLat a, LonLat b) noexcept {
    const double p1 = a.lat * kDegToRad;
    const double p2 = b.lat * kDegToRad;
    const double dl = (b.lon - a.lon) * kDegToRad;
    const double y = std::sin(dl) * std::cos(p2);
    const double x = std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl);
    double deg = std::atan2(y, x) / kDegToRad;
    if (deg < 0) deg += 360.0;
    if (deg >= 360.0) deg -= 360.0;
    return deg;
}

double normalize_lon(double lon) noexcept {
    if (lon > 180.0 || lon <= -180.0) {
        lon = std::fmod(lon + 180.0, 360.0);
        if (lon <= 0) lon += 360.0;
        lon -= 180.0;
    }
    return lon;
}

// ---------------------------------------------------------------------------

namespace {

double cross(LonLat o, LonLat a, LonLat b) noexcept {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

bool within_box(LonLat p, LonLat a, LonLat b) noexcept {
    return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
           p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool on_segment(LonLat p, LonLat a, LonLat b) noexcept {
    return cross(a, b, p) == 0.0 && within_box(p, a, b);
}

int sign(double v) noexcept { return (v > 0) - (v < 0); }

bool segments_intersect(LonLat a, LonLat b, LonLat c, LonLat d) noexcept {
    const int d1 = sign(cross(c, d, a));
    const int d2 = sign(cross(c, d, b));
    const int d3 = sign(cross(a, b, c));
    const int d4 = sign(cross(a, b, d));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    return (d1 == 0 && within_box(a, c, d)) || (d2 == 0 && within_box(b, c, d)) ||
           (d3 == 0 && within_box(c, a, b)) || (d4 == 0 && within_box(d, a, b));
}

}  // namespace

ZonePolygon::ZonePolygon(std::string name, std::vector<LonLat> ring)
    : name_(std::move(name)), ring_(std::move(ring)) {
    if (ring_.size() < 4) throw FormatError("zone '" + name_ + "': ring needs at least 4 vertices");
    if (!(ring_.front() == ring_.back())) throw FormatError("zone '" + name_ + "': ring is not closed");
    for (const auto& p : ring_) {
        if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
            throw FormatError("zone '" + name_ + "': non-finite vertex");
        }
    }
    const std::size_t n = ring_.size() - 1;  // edge count
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(ring_[i], ring_[i + 1], ring_[j], ring_[j + 1])) {
                throw FormatError("zone '" + name_ + "': ring self-intersects");
            }
        }
    }
    bbox_ = {ring_[0].lon, ring_[0].lat, ring_[0].lon, ring_[0].lat};
    for (const auto& p : ring_) {
        bbox_.xmin = std::min(bbox_.xmin, p.lon);
        bbox_.xmax = std::max(bbox_.xmax, p.lon);
        bbox_.ymin = std::min(bbox_.ymin, p.lat);
        bbox_.ymax = std::max(bbox_.ymax, p.lat);
    }
}

bool point_in_polygon(LonLat p, const ZonePolygon& zone) noexcept {
    const auto& b = zone.bbox();
    if (p.lon < b.xmin || p.lon > b.xmax || p.lat < b.ymin || p.lat > b.ymax) return false;
    const auto& r = zone.ring();
    bool inside = false;
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
        if (on_segment(p, r[j], r[i])) return true;
        if ((r[i].lat > p.lat) != (r[j].lat > p.lat)) {
            const double x = r[j].lon + (p.lat - r[j].lat) * (r[i].lon - r[j].lon) / (r[i].lat - r[j].lat);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

std::string_view zone_of(LonLat p, std::span<const ZonePolygon> zones) noexcept {
    for (const auto& z : zones) {
        if (point_in_polygon(p, z)) return z.name();
    }
    return kOutside;
}

std::vector<ZonePolygon> parse_zones(std::string_view geojson) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(geojson);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("zones: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array()) {
        throw FormatError("zones: expected a GeoJSON FeatureCollection");
    }
    std::vector<ZonePolygon> zones;
    for (const auto& f : doc["features"]) {
        const auto& props = f.contains("properties") ? f["properties"] : json();
        if (!props.is_object() || !props.contains("name") || !props["name"].is_string()) {
            throw FormatError("zones: feature without a string `name` property");
        }
        const std::string name = props["name"].get<std::string>();
        if (!f.contains("geometry") || !f["geometry"].is_object() ||
            f["geometry"].value("type", "") != "Polygon") {
            throw FormatError("zones: '" + name + "' is not a Polygon");
        }
        const auto& coords = f["geometry"]["coordinates"];
        if (!coords.is_array() || coords.empty()) throw FormatError("zones: '" + name + "' has no ring");
        std::vector<LonLat> ring;
        for (const auto& c : coords[0]) {
            if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
                throw FormatError("zones: '" + name + "' has a malformed position");
            }
            ring.push_back({c[0].get<double>(), c[1].get<double>()});
        }
        zones.emplace_back(name, std::move(ring));
    }
    return zones;
}

std::vector<ZonePolygon> load_zones(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read zones file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_zones(ss.str());
}

std::uint64_t GeoGraph::total_transits() const noexcept {
    std::uint64_t total = 0;
    for (const auto& [key, edge] : edges) total += edge.transit_count;
    return total;
}

GeoGraph build_graph(std::span<const Track> tracks, std::span<const ZonePolygon> zones) {
    GeoGraph g;
    for (const auto& z : zones) g.nodes.push_back(z.name());
    g.nodes.emplace_back(kOutside);
    for (const auto& track : tracks) {
        std::string_view prev;
        bool first = true;
        for (const auto& p : track.points) {
            const std::string_view z = zone_of({p.x, p.y}, zones);
            if (!first && z != prev) {
                auto& e = g.edges[{std::string(prev), std::string(z)}];
                ++e.transit_count;
                e.mmsis.insert(track.mmsi);
            }
            prev = z;
            first = false;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------

FeaturePointSet load_features(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read features file " + path.string());
    FeaturePointSet set;
    set.label = label.empty() ? path.stem().string() : std::move(label);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = csv::split_record(line);
        if (lineno == 1 && fields.size() == 3 && fields[1] == "lon" && fields[2] == "lat") continue;
        if (fields.size() != 3) throw FormatError("features line " + std::to_string(lineno) + ": expected name,lon,lat");
        try {
            std::size_t used = 0;
            const double lon = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("lon");
            const double lat = std::stod(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("lat");
            if (lon < -180 || lon > 180 || lat < -90 || lat > 90) throw std::out_of_range("range");
            set.names.push_back(fields[0]);
            set.points.push_back({lon, lat});
        } catch (const std::logic_error&) {
            throw FormatError("features line " + std::to_string(lineno) + ": bad coordinate");
        }
    }
    if (set.points.empty()) throw FormatError("features file " + path.string() + " has no points");
    return set;
}

Nearest distance_to_nearest(LonLat p, const FeaturePointSet& features) {
    if (features.points.empty()) throw ContractViolation("distance_to_nearest: empty feature set");
    Nearest best{std::numeric_limits<double>::infinity(), 0, {}};
    for (std::size_t i = 0; i < features.points.size(); ++i) {
        const double d = haversine(p, features.points[i]);
        if (d < best.meters) best = {d, i, features.points[i]};
    }
    return best;
}

FeatureIndex::FeatureIndex(const FeaturePointSet& features, double cell_degrees) : features_(&features) {
    if (features.points.empty()) throw ContractViolation("FeatureIndex: empty feature set");
    if (!(cell_degrees > 0)) throw ContractViolation("FeatureIndex: cell size must be positive");
    std::map<std::pair<long, long>, std::vector<std::size_t>> bins;
    for (std::size_t i = 0; i < features.points.size(); ++i) {
        const auto& p = features.points[i];
        bins[{static_cast<long>(std::floor(p.lon / cell_degrees)), static_cast<long>(std::floor(p.lat / cell_degrees))}]
            .push_back(i);
    }
    for (auto& [key, members] : bins) {
        Cell c;
        c.lon0 = key.first * cell_degrees;
        c.lon1 = c.lon0 + cell_degrees;
        c.lat0 = key.second * cell_degrees;
        c.lat1 = c.lat0 + cell_degrees;
        c.members = std::move(members);
        cells_.push_back(std::move(c));
    }
}

namespace {

/// Smallest longitude separation (radians, <= pi) between lon and [lon0, lon1].
double lon_gap(double lon, double lon0, double lon1) noexcept {
    if (lon >= lon0 && lon <= lon1) return 0.0;
    auto wrap = [](double d) {
        d = std::fmod(std::fabs(d), 360.0);
        return d > 180.0 ? 360.0 - d : d;
    };
    if (lon1 - lon0 >= 360.0) return 0.0;
    return std::min(wrap(lon - lon0), wrap(lon - lon1)) * kDegToRad;
}

}  // namespace

Nearest FeatureIndex::nearest(LonLat p) const {
    const double phi = p.lat * kDegToRad;
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& cell = cells_[c];
        const double clat = std::clamp(p.lat, cell.lat0, cell.lat1);
        const double dlat = std::fabs(p.lat - clat) * kDegToRad;
        const double dlon = std::min(lon_gap(p.lon, cell.lon0, cell.lon1), kPi / 2);
        const double across = std::asin(std::clamp(std::sin(dlon) * std::cos(phi), 0.0, 1.0));
        // the slack absorbs rounding so the bound never exceeds a true distance
        const double bound = kEarthRadius * std::max(dlat, across) * (1 - 1e-12) - 1e-6;
        order.emplace_back(bound, c);
    }
    std::sort(order.begin(), order.end());

    Nearest best{std::numeric_limits<double>::infinity(), 0, {}};
    for (const auto& [bound, c] : order) {
        if (bound > best.meters) break;
        for (std::size_t i : cells_[c].members) {
            const double d = haversine(p, features_->points[i]);
            if (d < best.meters || (d == best.meters && i < best.index)) best = {d, i, features_->points[i]};
        }
    }
    return best;
}

}  // namespace aiskit::gis
