#include "aiskit/csv_schema.hpp"

#include <algorithm>
#include <charconv>

#include "aiskit/error.hpp"
#include "aiskit/timefmt.hpp"

namespace aiskit::csv {
namespace {

template <typename T>
T parse_number(const std::string& s, const char* column) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(std::string("bad value for column ") + column + ": '" + s + "'");
    }
    return v;
}

template <typename T>
std::optional<T> parse_optional(const std::string& s, const char* column) {
    if (s.empty()) return std::nullopt;
    return parse_number<T>(s, column);
}

const std::string& field(const std::vector<std::string>& fields, int index) {
    static const std::string empty;
    if (index < 0) return empty;
    return fields.at(static_cast<std::size_t>(index));
}

}  // namespace

std::vector<std::string> split_record(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw FormatError("unterminated quoted CSV field");
    out.push_back(std::move(cur));
    return out;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_exact(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

DynamicColumns::DynamicColumns(std::string_view header) {
    const auto names = split_record(header);
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        const int idx = static_cast<int>(i);
        if (n == "mmsi") mmsi_ = idx;
        else if (n == "time") time_ = idx;
        else if (n == "lon") lon_ = idx;
        else if (n == "lat") lat_ = idx;
        else if (n == "sog") sog_ = idx;
        else if (n == "cog") cog_ = idx;
        else if (n == "heading") heading_ = idx;
        else if (n == "nav_status") nav_ = idx;
        else if (n == "source") source_ = idx;
    }
    if (mmsi_ < 0 || time_ < 0 || lon_ < 0 || lat_ < 0) {
        throw FormatError("CSV header needs mmsi, time, lon and lat columns");
    }
}

DynamicRow DynamicColumns::parse(std::string_view line) const {
    const auto fields = split_record(line);
    const int needed = std::max({mmsi_, time_, lon_, lat_, sog_, cog_, heading_, nav_, source_});
    if (static_cast<int>(fields.size()) <= needed) throw FormatError("CSV record has too few fields");

    DynamicRow row;
    const auto mmsi = parse_number<std::int64_t>(field(fields, mmsi_), "mmsi");
    if (mmsi < 0 || mmsi >= 1'000'000'000) throw FormatError("mmsi out of range");
    row.mmsi = static_cast<std::uint32_t>(mmsi);
    row.time = text_to_epoch(field(fields, time_));
    row.lon = parse_number<double>(field(fields, lon_), "lon");
    row.lat = parse_number<double>(field(fields, lat_), "lat");
    if (!(row.lon > -180.0 && row.lon <= 180.0) || !(row.lat >= -90.0 && row.lat <= 90.0)) {
        throw FormatError("position out of range");
    }
    row.sog = parse_optional<double>(field(fields, sog_), "sog");
    row.cog = parse_optional<double>(field(fields, cog_), "cog");
    row.heading = parse_optional<int>(field(fields, heading_), "heading");
    row.nav_status = parse_optional<int>(field(fields, nav_), "nav_status");
    row.source = field(fields, source_);
    return row;
}

std::string format_dynamic(const DynamicRow& row) {
    std::string out = std::to_string(row.mmsi);
    out += ',' + epoch_to_text(row.time);
    out += ',' + format_exact(row.lon);
    out += ',' + format_exact(row.lat);
    out += ',';
    if (row.sog) out += format_exact(*row.sog);
    out += ',';
    if (row.cog) out += format_exact(*row.cog);
    out += ',';
    if (row.heading) out += std::to_string(*row.heading);
    out += ',';
    if (row.nav_status) out += std::to_string(*row.nav_status);
    out += ',' + quote(row.source);
    return out;
}

}  // namespace aiskit::csv
