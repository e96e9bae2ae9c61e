#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aiskit/track.hpp"

namespace aiskit::traj {

inline constexpr double kMetersPerSecondPerKnot = 0.514444;

struct CleanParams {
    double speed_threshold = 50.0;         // knots
    double distance_threshold = 200000.0;  // meters
    /// Reassembled tracks with fewer points than this are emitted as one
    /// singleton track per point.
    std::size_t min_segment_length = 1;

    /// Throws ContractViolation unless both thresholds are positive.
    void validate() const;
};

struct ScoreBreakdown {
    double m = 0.0;        // great-circle distance, meters
    double delta_t = 0.0;  // seconds
    double v = 0.0;        // implied speed, knots
    double S = 0.0;        // -1 when the gate fails
    bool degenerate = false;  // zero distance: the gate passes with S = 0

    bool passes() const noexcept { return S >= 0.0; }
};

/// Score of joining p -> q. Throws ContractViolation unless q.t > p.t.
ScoreBreakdown score(const TrackPoint& p, const TrackPoint& q, const CleanParams& params);

/// Cuts wherever consecutive points are more than `gap` seconds apart.
std::vector<Track> split_timedelta(const Track& track, double gap);

/// Cuts each track where the speed/distance gate fails, then re-joins the
/// pieces greedily by descending junction score. Points are never dropped.
std::vector<Track> encode_greatcircledistance(std::span<const Track> tracks, const CleanParams& params);

/// Resamples onto t0, t0 + step, ... <= t_last.
Track interp_time(const Track& track, double step);

/// Resamples at fixed along-track distance; the last point is always kept.
Track interp_equidistant(const Track& track, double spacing);

/// Ramer-Douglas-Peucker in meters. Throws ContractViolation for epsilon <= 0.
Track decimate(const Track& track, double epsilon);

/// Distance in meters from p to segment ab, in an equirectangular projection
/// centered on the segment midpoint.
double segment_distance(const TrackPoint& p, const TrackPoint& a, const TrackPoint& b);

}  // namespace aiskit::traj
