#include "aiskit/export.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "aiskit/csv_schema.hpp"
#include "aiskit/error.hpp"
#include "aiskit/query.hpp"
#include "aiskit/shiptypes.hpp"
#include "aiskit/trajectory.hpp"

namespace aiskit::io {

void PipelineFlags::validate() const {
    auto positive = [](const std::optional<double>& v, const char* name) {
        if (v && !(*v > 0.0 && std::isfinite(*v))) {
            throw ContractViolation(std::string(name) + " must be a positive number");
        }
    };
    positive(split_gap, "split gap");
    positive(distance_threshold, "distance threshold");
    positive(speed_threshold, "speed threshold");
    positive(interp_step, "interpolation step");
    positive(decimate_epsilon, "decimation epsilon");
}

std::vector<Track> process_vessel(const Track& raw, const PipelineFlags& flags) {
    std::vector<Track> pieces;
    if (flags.split_gap) {
        pieces = traj::split_timedelta(raw, *flags.split_gap);
    } else {
        pieces.push_back(raw);
    }
    if (flags.encodes()) {
        traj::CleanParams params;
        if (flags.distance_threshold) params.distance_threshold = *flags.distance_threshold;
        if (flags.speed_threshold) params.speed_threshold = *flags.speed_threshold;
        pieces = traj::encode_greatcircledistance(pieces, params);
    }
    if (flags.interp_step) {
        for (auto& t : pieces) t = traj::interp_time(t, *flags.interp_step);
    }
    if (flags.decimate_epsilon) {
        for (auto& t : pieces) t = traj::decimate(t, *flags.decimate_epsilon);
    }
    for (auto& t : pieces) t.info = raw.info;
    return pieces;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

bool vessel_type_matches(const std::optional<VesselInfo>& info, const std::set<std::string>& wanted) {
    std::optional<int> code;
    if (info) code = info->ship_type;
    for (const auto& w : wanted) {
        const auto key = lower(w);
        if (!code) {
            if (key == "other") return true;
            continue;
        }
        if (key == ship_type_class(*code) || key == lower(ship_type_name(*code)) || key == std::to_string(*code)) {
            return true;
        }
    }
    return false;
}

TrackPage build_tracks(const store::StorageHandle& handle, const TrackRequest& request) {
    request.flags.validate();
    if (request.limit && *request.limit == 0) throw ContractViolation("limit must be positive");

    query::QuerySpec spec;
    spec.start = request.start;
    spec.end = request.end;
    spec.bbox = request.bbox;
    spec.mmsis = request.mmsis;
    if (request.cursor) {
        const std::uint32_t after = *request.cursor;
        spec.callbacks.push_back([after](const DynamicRow& r) { return r.mmsi > after; });
    }
    auto cursor = query::run_query(handle, spec);
    query::TrackGenerator gen([&] { return cursor.next(); });

    TrackPage page;
    std::size_t vessels = 0;
    std::uint32_t last = 0;
    while (auto raw = gen.next()) {
        std::vector<Track> one{std::move(*raw)};
        query::attach_metadata(handle, one);
        if (request.vessel_types && !vessel_type_matches(one.front().info, *request.vessel_types)) continue;
        if (request.limit && vessels == *request.limit) {
            page.next_cursor = last;
            break;
        }
        ++vessels;
        last = one.front().mmsi;
        for (auto& t : process_vessel(one.front(), request.flags)) page.tracks.push_back(std::move(t));
    }
    return page;
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto comma = text.find(',');
        out.push_back(trim(text.substr(0, comma)));
        if (comma == std::string_view::npos) return out;
        text.remove_prefix(comma + 1);
    }
}

}  // namespace

double parse_number(std::string_view text, const char* what) {
    const std::string s(trim(text));
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) {
        throw FormatError(std::string("invalid ") + what + ": '" + s + "'");
    }
    return v;
}

double parse_duration(std::string_view text) {
    text = trim(text);
    double unit = 1.0;
    if (!text.empty()) {
        switch (std::tolower(static_cast<unsigned char>(text.back()))) {
            case 's': unit = 1.0; break;
            case 'm': unit = 60.0; break;
            case 'h': unit = 3600.0; break;
            case 'd': unit = 86400.0; break;
            default: unit = 0.0; break;
        }
        if (unit != 0.0) {
            text.remove_suffix(1);
        } else {
            unit = 1.0;
        }
    }
    return parse_number(text, "duration") * unit;
}

BBox parse_bbox(std::string_view text) {
    const auto parts = split_commas(text);
    if (parts.size() != 4) throw FormatError("bbox needs xmin,ymin,xmax,ymax");
    return {parse_number(parts[0], "xmin"), parse_number(parts[1], "ymin"), parse_number(parts[2], "xmax"),
            parse_number(parts[3], "ymax")};
}

std::set<std::uint32_t> parse_mmsi_list(std::string_view text) {
    std::set<std::uint32_t> out;
    for (auto part : split_commas(text)) {
        const std::string s(part);
        if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw FormatError("invalid mmsi: '" + s + "'");
        }
        out.insert(static_cast<std::uint32_t>(std::stoul(s)));
    }
    return out;
}

std::set<std::string> parse_word_list(std::string_view text) {
    std::set<std::string> out;
    for (auto part : split_commas(text)) {
        if (!part.empty()) out.emplace(part);
    }
    return out;
}

std::string format_fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s(buf);
    if (s == "-0.000000000") s.erase(0, 1);
    return s;
}

namespace {

std::string format_time(double t) {
    if (t == std::floor(t) && std::fabs(t) < 9e15) return std::to_string(static_cast<std::int64_t>(t));
    return format_fixed9(t);
}

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<Track>& tracks) {
    out << csv::kDynamicHeader << '\n';
    for (const auto& t : tracks) {
        for (const auto& p : t.points) out << csv::format_dynamic(query::to_row(t.mmsi, p)) << '\n';
    }
}

void write_geojson(std::ostream& out, const TrackPage& page) {
    out << R"({"type":"FeatureCollection","features":[)";
    bool first = true;
    std::optional<std::uint32_t> prev_mmsi;
    int segment = 0;
    for (const auto& t : page.tracks) {
        segment = prev_mmsi == t.mmsi ? segment + 1 : 0;
        prev_mmsi = t.mmsi;
        if (t.size() < 2) continue;
        if (!first) out << ',';
        first = false;
        out << R"({"type":"Feature","geometry":{"type":"LineString","coordinates":[)";
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) out << ',';
            out << '[' << format_fixed9(t.points[i].x) << ',' << format_fixed9(t.points[i].y) << ']';
        }
        out << R"(]},"properties":{"mmsi":)" << t.mmsi << R"(,"segment":)" << segment;
        const std::optional<int> code = t.info ? t.info->ship_type : std::nullopt;
        out << R"(,"ship_name":)" << (t.info && !t.info->ship_name.empty() ? json_string(t.info->ship_name) : "null");
        out << R"(,"ship_type":)" << (code ? std::to_string(*code) : "null");
        out << R"(,"ship_type_name":)" << json_string(code ? ship_type_name(*code) : "Unknown");
        out << R"(,"ship_class":)" << json_string(code ? ship_type_class(*code) : "other");
        out << R"(,"timestamps":[)";
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) out << ',';
            out << format_time(t.points[i].t);
        }
        out << "]}}";
    }
    out << R"(],"next_cursor":)" << (page.next_cursor ? std::to_string(*page.next_cursor) : "null") << "}\n";
}

std::string to_geojson(const TrackPage& page) {
    std::ostringstream out;
    write_geojson(out, page);
    return out.str();
}

}  // namespace aiskit::io
