#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "aiskit/bbox.hpp"
#include "aiskit/storage.hpp"
#include "aiskit/timefmt.hpp"
#include "aiskit/track.hpp"

namespace aiskit::query {

enum class Validity { ValidOnly, InvalidOnly, All };

/// True iff 201000000 <= mmsi <= 775999999 (ITU national vessel block).
constexpr bool valid_mmsi(std::uint32_t mmsi) noexcept {
    return mmsi >= 201'000'000 && mmsi <= 775'999'999;
}

using RowCallback = std::function<bool(const DynamicRow&)>;

/// Composable filter; every predicate narrows the result. Time bounds are
/// inclusive.
struct QuerySpec {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::optional<BBox> bbox;
    std::optional<std::set<std::uint32_t>> mmsis;
    Validity validity = Validity::All;
    /// Extra in-memory predicates applied after the storage scan.
    std::vector<RowCallback> callbacks;

    /// Throws ContractViolation when start >= end or the box is inverted in
    /// latitude or out of range.
    void validate() const;
    /// True iff `row` passes every predicate.
    bool matches(const DynamicRow& row) const;
};

/// Streams matching rows in (mmsi, time) order.
class QueryCursor {
public:
    QueryCursor(store::RowCursor cursor, QuerySpec spec);
    std::optional<DynamicRow> next();

private:
    store::RowCursor cursor_;
    QuerySpec spec_;
};

/// Months (YYYYMM) of the store overlapping [start, end].
std::vector<int> months_in_range(const store::StorageHandle& handle, std::int64_t start,
                                 std::int64_t end);

QueryCursor run_query(const store::StorageHandle& handle, const QuerySpec& spec);
std::vector<DynamicRow> collect(QueryCursor cursor);

/// Groups (mmsi, time)-ordered rows into tracks, one per run of equal mmsi.
/// Repeated timestamps keep the first row. Throws ContractViolation on
/// out-of-order input.
class TrackGenerator {
public:
    using RowSource = std::function<std::optional<DynamicRow>()>;
    explicit TrackGenerator(RowSource source) : source_(std::move(source)) {}

    std::optional<Track> next();

private:
    RowSource source_;
    std::optional<DynamicRow> pending_;
    bool started_ = false;
    std::uint32_t last_mmsi_ = 0;
};

std::vector<Track> track_gen(const std::vector<DynamicRow>& rows);

TrackPoint to_point(const DynamicRow& row);
DynamicRow to_row(std::uint32_t mmsi, const TrackPoint& p);

/// Attaches aggregate-table metadata (latest month with an entry) to tracks.
void attach_metadata(const store::StorageHandle& handle, std::vector<Track>& tracks);

}  // namespace aiskit::query
