#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace aiskit {

/// One stored position report.
struct DynamicRow {
    std::uint32_t mmsi = 0;
    std::int64_t time = 0;
    double lon = 0.0;
    double lat = 0.0;
    std::optional<double> sog;
    std::optional<double> cog;
    std::optional<int> heading;
    std::optional<int> nav_status;
    std::string source;

    friend bool operator==(const DynamicRow&, const DynamicRow&) = default;
};

/// One stored static/voyage report. Text fields are empty when unknown.
struct StaticRow {
    std::uint32_t mmsi = 0;
    std::int64_t time = 0;
    std::optional<std::uint32_t> imo;
    std::string callsign;
    std::string ship_name;
    std::optional<int> ship_type;
    std::optional<int> dim_bow;
    std::optional<int> dim_stern;
    std::optional<int> dim_port;
    std::optional<int> dim_starboard;
    std::optional<double> draught;
    std::string destination;
    std::string eta;  // "MM-DDTHH:MM", empty when not available
    std::string source;

    friend bool operator==(const StaticRow&, const StaticRow&) = default;
};

/// Consolidated static information for one MMSI in one month.
struct AggregateRow {
    std::uint32_t mmsi = 0;
    std::string ship_name;
    std::optional<int> ship_type;
    std::optional<std::uint32_t> imo;
    std::string callsign;
    std::optional<int> dim_bow;
    std::optional<int> dim_stern;
    std::optional<int> dim_port;
    std::optional<int> dim_starboard;
    std::optional<double> draught;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

}  // namespace aiskit
