#include "aiskit/query.hpp"

#include <cmath>
#include <map>

#include "aiskit/error.hpp"

namespace aiskit::query {

void QuerySpec::validate() const {
    if (start >= end) throw ContractViolation("query start must be before end");
    if (bbox) {
        const BBox& b = *bbox;
        if (!(b.ymin < b.ymax)) throw ContractViolation("bbox ymin must be below ymax");
        if (!(b.xmin != b.xmax)) throw ContractViolation("bbox xmin must differ from xmax");
        if (b.xmin < -180.0 || b.xmax > 180.0 || b.xmax < -180.0 || b.xmin > 180.0 ||
            b.ymin < -90.0 || b.ymax > 90.0) {
            throw ContractViolation("bbox outside lon/lat range");
        }
    }
}

bool QuerySpec::matches(const DynamicRow& row) const {
    if (row.time < start || row.time > end) return false;
    if (bbox && !bbox->contains(row.lon, row.lat)) return false;
    if (mmsis && !mmsis->contains(row.mmsi)) return false;
    if (validity == Validity::ValidOnly && !valid_mmsi(row.mmsi)) return false;
    if (validity == Validity::InvalidOnly && valid_mmsi(row.mmsi)) return false;
    for (const auto& cb : callbacks) {
        if (!cb(row)) return false;
    }
    return true;
}

QueryCursor::QueryCursor(store::RowCursor cursor, QuerySpec spec)
    : cursor_(std::move(cursor)), spec_(std::move(spec)) {}

std::optional<DynamicRow> QueryCursor::next() {
    while (auto row = cursor_.next()) {
        // Residual pass: validity and callbacks are not pushed into storage.
        if (spec_.matches(*row)) return row;
    }
    return std::nullopt;
}

std::vector<int> months_in_range(const store::StorageHandle& handle, std::int64_t start,
                                 std::int64_t end) {
    std::vector<int> out;
    const int first = month_of(start);
    const int last = month_of(end);
    for (int m : handle.list_partitions()) {
        if (m >= first && m <= last) out.push_back(m);
    }
    return out;
}

QueryCursor run_query(const store::StorageHandle& handle, const QuerySpec& spec) {
    spec.validate();
    const auto months = months_in_range(handle, spec.start, spec.end);
    store::RowCursor cursor;
    if (!months.empty()) {
        store::ScanFilter filter;
        filter.start = spec.start;
        filter.end = spec.end;
        filter.bbox = spec.bbox;
        filter.mmsis = spec.mmsis;
        cursor = handle.scan(months, filter);
    }
    return QueryCursor(std::move(cursor), spec);
}

std::vector<DynamicRow> collect(QueryCursor cursor) {
    std::vector<DynamicRow> out;
    while (auto row = cursor.next()) out.push_back(std::move(*row));
    return out;
}

TrackPoint to_point(const DynamicRow& row) {
    return TrackPoint{row.lon,     row.lat,        static_cast<double>(row.time), row.sog,
                      row.cog,     row.heading,    row.nav_status,                row.source};
}

DynamicRow to_row(std::uint32_t mmsi, const TrackPoint& p) {
    DynamicRow row;
    row.mmsi = mmsi;
    row.time = std::llround(p.t);
    row.lon = p.x;
    row.lat = p.y;
    row.sog = p.sog;
    row.cog = p.cog;
    row.heading = p.heading;
    row.nav_status = p.nav_status;
    row.source = p.source;
    return row;
}

std::optional<Track> TrackGenerator::next() {
    if (!pending_) pending_ = source_();
    if (!pending_) return std::nullopt;

    Track track;
    track.mmsi = pending_->mmsi;
    if (started_ && track.mmsi < last_mmsi_) {
        throw ContractViolation("track_gen input is not ordered by mmsi");
    }
    started_ = true;
    last_mmsi_ = track.mmsi;
    track.points.push_back(to_point(*pending_));
    std::int64_t last_time = pending_->time;
    for (;;) {
        pending_ = source_();
        if (!pending_ || pending_->mmsi != track.mmsi) break;
        if (pending_->time < last_time) {
            throw ContractViolation("track_gen input is not ordered by time");
        }
        if (pending_->time == last_time) continue;
        last_time = pending_->time;
        track.points.push_back(to_point(*pending_));
    }
    if (pending_ && pending_->mmsi < track.mmsi) {
        throw ContractViolation("track_gen input is not ordered by mmsi");
    }
    return track;
}

std::vector<Track> track_gen(const std::vector<DynamicRow>& rows) {
    std::size_t i = 0;
    TrackGenerator gen([&]() -> std::optional<DynamicRow> {
        if (i == rows.size()) return std::nullopt;
        return rows[i++];
    });
    std::vector<Track> out;
    while (auto t = gen.next()) out.push_back(std::move(*t));
    return out;
}

void attach_metadata(const store::StorageHandle& handle, std::vector<Track>& tracks) {
    std::map<std::uint32_t, std::optional<VesselInfo>> cache;
    for (auto& track : tracks) {
        auto it = cache.find(track.mmsi);
        if (it == cache.end()) {
            std::optional<VesselInfo> info;
            if (auto agg = handle.vessel(track.mmsi)) info = VesselInfo{agg->ship_name, agg->ship_type};
            it = cache.emplace(track.mmsi, std::move(info)).first;
        }
        track.info = it->second;
    }
}

}  // namespace aiskit::query
