#include "aiskit/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "aiskit/error.hpp"
#include "aiskit/gis.hpp"

namespace aiskit::traj {

using gis::kDegToRad;
using gis::kEarthRadius;

void CleanParams::validate() const {
    if (!(speed_threshold > 0) || !(distance_threshold > 0)) {
        throw ContractViolation("speed and distance thresholds must be positive");
    }
}

ScoreBreakdown score(const TrackPoint& p, const TrackPoint& q, const CleanParams& params) {
    if (!(q.t > p.t)) throw ContractViolation("score: timestamps must increase");
    ScoreBreakdown s;
    s.m = gis::haversine({p.x, p.y}, {q.x, q.y});
    s.delta_t = q.t - p.t;
    s.v = s.m / s.delta_t / kMetersPerSecondPerKnot;
    if (s.v <= params.speed_threshold && s.m <= params.distance_threshold) {
        s.S = s.m / (std::max(s.m, 1.0) * s.delta_t);
        s.degenerate = s.m == 0.0;
    } else {
        s.S = -1.0;
    }
    return s;
}

std::vector<Track> split_timedelta(const Track& track, double gap) {
    if (!(gap > 0)) throw ContractViolation("split_timedelta: gap must be positive");
    std::vector<Track> out;
    for (std::size_t i = 0; i < track.points.size(); ++i) {
        if (i == 0 || track.points[i].t - track.points[i - 1].t > gap) {
            out.push_back({track.mmsi, {}, track.info});
        }
        out.back().points.push_back(track.points[i]);
    }
    return out;
}

namespace {

struct Junction {
    double S;
    double m;
    std::size_t from;
    std::size_t to;
};

std::vector<Track> reassemble(const Track& track, const CleanParams& params) {
    // gate cuts
    std::vector<std::pair<std::size_t, std::size_t>> pieces;  // [begin, end)
    std::size_t begin = 0;
    for (std::size_t i = 1; i < track.points.size(); ++i) {
        if (!score(track.points[i - 1], track.points[i], params).passes()) {
            pieces.emplace_back(begin, i);
            begin = i;
        }
    }
    if (!track.points.empty()) pieces.emplace_back(begin, track.points.size());

    const auto first = [&](std::size_t k) -> const TrackPoint& { return track.points[pieces[k].first]; };
    const auto last = [&](std::size_t k) -> const TrackPoint& { return track.points[pieces[k].second - 1]; };

    std::vector<Junction> candidates;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            // pieces are contiguous in time order, so only i -> j (i < j) can be valid
            const auto s = score(last(i), first(j), params);
            if (s.passes()) candidates.push_back({s.S, s.m, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Junction& a, const Junction& b) {
        return std::tie(b.S, a.m, a.from, a.to) < std::tie(a.S, b.m, b.from, b.to);
    });

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> next(pieces.size(), kNone);
    std::vector<bool> has_prev(pieces.size(), false);
    for (const auto& c : candidates) {
        if (next[c.from] != kNone || has_prev[c.to]) continue;
        next[c.from] = c.to;
        has_prev[c.to] = true;
    }

    std::vector<Track> out;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (has_prev[k]) continue;
        Track t{track.mmsi, {}, track.info};
        for (std::size_t cur = k; cur != kNone; cur = next[cur]) {
            t.points.insert(t.points.end(), track.points.begin() + static_cast<std::ptrdiff_t>(pieces[cur].first),
                            track.points.begin() + static_cast<std::ptrdiff_t>(pieces[cur].second));
        }
        if (t.points.size() < params.min_segment_length) {
            for (const auto& p : t.points) out.push_back({track.mmsi, {p}, track.info});
        } else {
            out.push_back(std::move(t));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Track& a, const Track& b) { return a.points.front().t < b.points.front().t; });
    return out;
}

}  // namespace

std::vector<Track> encode_greatcircledistance(std::span<const Track> tracks, const CleanParams& params) {
    params.validate();
    std::vector<Track> out;
    for (const auto& t : tracks) {
        auto pieces = reassemble(t, params);
        std::move(pieces.begin(), pieces.end(), std::back_inserter(out));
    }
    return out;
}

namespace {

/// Longitude step from a to b taking the short way around.
double lon_delta(double a, double b) noexcept {
    double d = b - a;
    if (d > 180.0) d -= 360.0;
    if (d < -180.0) d += 360.0;
    return d;
}

TrackPoint lerp(const TrackPoint& a, const TrackPoint& b, double f) {
    TrackPoint p = a;
    p.x = gis::normalize_lon(a.x + f * lon_delta(a.x, b.x));
    p.y = a.y + f * (b.y - a.y);
    p.t = a.t + f * (b.t - a.t);
    return p;
}

}  // namespace

Track interp_time(const Track& track, double step) {
    if (!(step > 0)) throw ContractViolation("interp_time: step must be positive");
    if (track.points.size() < 2) return track;
    const auto& pts = track.points;
    Track out{track.mmsi, {}, track.info};
    const double t0 = pts.front().t;
    const double t_last = pts.back().t;
    std::size_t seg = 0;
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * step;
        if (t > t_last) break;
        while (seg + 2 < pts.size() && pts[seg + 1].t <= t) ++seg;
        const auto& a = pts[seg];
        const auto& b = pts[seg + 1];
        TrackPoint p;
        if (t == a.t) {
            p = a;
        } else if (t == b.t) {
            p = b;
        } else {
            p = lerp(a, b, (t - a.t) / (b.t - a.t));
        }
        p.t = t;
        out.points.push_back(std::move(p));
    }
    return out;
}

Track interp_equidistant(const Track& track, double spacing) {
    if (!(spacing > 0)) throw ContractViolation("interp_equidistant: spacing must be positive");
    if (track.points.size() < 2) return track;
    const auto& pts = track.points;
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        cum[i] = cum[i - 1] + gis::haversine({pts[i - 1].x, pts[i - 1].y}, {pts[i].x, pts[i].y});
    }
    const double total = cum.back();
    Track out{track.mmsi, {}, track.info};
    std::size_t seg = 0;
    for (std::size_t k = 0;; ++k) {
        const double s = static_cast<double>(k) * spacing;
        // a sample within rounding of the end would duplicate the last point
        if (s >= total - 1e-9 * spacing) break;
        while (seg + 2 < pts.size() && cum[seg + 1] <= s) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double f = len > 0 ? (s - cum[seg]) / len : 0.0;
        out.points.push_back(f == 0.0 ? pts[seg] : lerp(pts[seg], pts[seg + 1], f));
    }
    out.points.push_back(pts.back());
    return out;
}

double segment_distance(const TrackPoint& p, const TrackPoint& a, const TrackPoint& b) {
    const double dbx = lon_delta(a.x, b.x);
    const double mid_lat = (a.y + b.y) / 2 * kDegToRad;
    const double kx = kEarthRadius * kDegToRad * std::cos(mid_lat);
    const double ky = kEarthRadius * kDegToRad;
    const double bx = dbx * kx;
    const double by = (b.y - a.y) * ky;
    const double px = lon_delta(a.x, p.x) * kx;
    const double py = (p.y - a.y) * ky;
    const double len2 = bx * bx + by * by;
    double f = len2 > 0 ? (px * bx + py * by) / len2 : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    return std::hypot(px - f * bx, py - f * by);
}

Track decimate(const Track& track, double epsilon) {
    if (!(epsilon > 0)) throw ContractViolation("decimate: epsilon must be positive");
    const auto& pts = track.points;
    if (pts.size() < 3) return track;
    std::vector<bool> keep(pts.size(), false);
    keep.front() = keep.back() = true;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        double worst = -1.0;
        std::size_t at = lo;
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const double d = segment_distance(pts[i], pts[lo], pts[hi]);
            if (d > worst) {
                worst = d;
                at = i;
            }
        }
        if (worst > epsilon) {
            keep[at] = true;
            stack.emplace_back(lo, at);
            stack.emplace_back(at, hi);
        }
    }
    Track out{track.mmsi, {}, track.info};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) out.points.push_back(pts[i]);
    }
    return out;
}

}  // namespace aiskit::traj
