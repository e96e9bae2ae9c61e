#pragma once

namespace aiskit {

/// Lon/lat rectangle, closed on all edges. xmin > xmax denotes a box that
/// crosses the antimeridian.
struct BBox {
    double xmin = -180.0;
    double ymin = -90.0;
    double xmax = 180.0;
    double ymax = 90.0;

    bool wraps() const noexcept { return xmin > xmax; }

    bool contains(double lon, double lat) const noexcept {
        if (lat < ymin || lat > ymax) return false;
        if (wraps()) return lon >= xmin || lon <= xmax;
        return lon >= xmin && lon <= xmax;
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

}  // namespace aiskit
