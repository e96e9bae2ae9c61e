#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aiskit/rows.hpp"

namespace aiskit::csv {

/// Frozen header of the dynamic-row CSV interchange format.
inline constexpr std::string_view kDynamicHeader =
    "mmsi,time,lon,lat,sog,cog,heading,nav_status,source";

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string quote(std::string_view field);

/// Shortest text that parses back to exactly `value`.
std::string format_exact(double value);

/// Column positions resolved from a header line.
class DynamicColumns {
public:
    /// Throws FormatError when a required column is missing.
    explicit DynamicColumns(std::string_view header);
    /// Throws FormatError on a malformed record.
    DynamicRow parse(std::string_view line) const;

private:
    int mmsi_ = -1, time_ = -1, lon_ = -1, lat_ = -1;
    int sog_ = -1, cog_ = -1, heading_ = -1, nav_ = -1, source_ = -1;
};

/// One data line (no trailing newline) in kDynamicHeader column order.
std::string format_dynamic(const DynamicRow& row);

}  // namespace aiskit::csv
