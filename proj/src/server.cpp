#include "aiskit/server.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "aiskit/error.hpp"
#include "aiskit/gis.hpp"
#include "aiskit/shiptypes.hpp"
#include "aiskit/storage.hpp"
#include "aiskit/timefmt.hpp"

namespace aiskit::server {

using nlohmann::json;

Response error_response(int status, std::string_view message) {
    json body = {{"error", {{"status", status}, {"message", std::string(message)}}}};
    return {status, body.dump()};
}

namespace {

const std::set<std::string>& known_track_params() {
    static const std::set<std::string> names = {
        "start", "end", "xmin", "ymin", "xmax", "ymax", "vtype", "mmsi", "limit", "cursor",
        "split_gap", "distance_threshold", "speed_threshold", "interp_step", "decimate_epsilon"};
    return names;
}

std::optional<std::string> single(const Params& params, const std::string& name) {
    const auto [lo, hi] = params.equal_range(name);
    if (lo == hi) return std::nullopt;
    if (std::next(lo) != hi) throw FormatError("parameter '" + name + "' given more than once");
    return lo->second;
}

std::size_t parse_count(const std::string& text, const char* name) {
    if (text.empty() || text.size() > 9 ||
        !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw FormatError(std::string("invalid ") + name + ": '" + text + "'");
    }
    return std::stoul(text);
}

store::StorageHandle open_read_only(const std::filesystem::path& db) {
    return store::StorageHandle::open(db, store::BackendKind::Sqlite, store::OpenMode::ReadOnly);
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

io::TrackRequest parse_track_params(const Params& params, std::size_t default_limit, std::size_t max_limit) {
    for (const auto& [name, _] : params) {
        if (!known_track_params().contains(name)) throw FormatError("unknown parameter '" + name + "'");
    }
    io::TrackRequest req;
    const auto start = single(params, "start");
    const auto end = single(params, "end");
    if (!start || !end) throw FormatError("start and end are required");
    req.start = text_to_epoch(*start);
    req.end = text_to_epoch(*end);
    if (req.start >= req.end) throw FormatError("start must be before end");

    const auto xmin = single(params, "xmin"), ymin = single(params, "ymin");
    const auto xmax = single(params, "xmax"), ymax = single(params, "ymax");
    const int given = !!xmin + !!ymin + !!xmax + !!ymax;
    if (given != 0 && given != 4) throw FormatError("xmin, ymin, xmax and ymax must be given together");
    if (given == 4) {
        BBox b = io::parse_bbox(*xmin + "," + *ymin + "," + *xmax + "," + *ymax);
        if (!(b.ymin < b.ymax) || b.xmin == b.xmax || b.xmin < -180 || b.xmin > 180 || b.xmax < -180 ||
            b.xmax > 180 || b.ymin < -90 || b.ymax > 90) {
            throw FormatError("bbox out of range or empty");
        }
        req.bbox = b;
    }
    if (auto v = single(params, "vtype")) {
        auto types = io::parse_word_list(*v);
        if (!types.empty()) req.vessel_types = std::move(types);
    }
    if (auto v = single(params, "mmsi")) req.mmsis = io::parse_mmsi_list(*v);
    req.limit = default_limit;
    if (auto v = single(params, "limit")) {
        const auto n = parse_count(*v, "limit");
        if (n == 0 || n > max_limit) throw FormatError("limit must be between 1 and " + std::to_string(max_limit));
        req.limit = n;
    }
    if (auto v = single(params, "cursor")) req.cursor = static_cast<std::uint32_t>(parse_count(*v, "cursor"));

    auto positive = [&](const char* name, bool duration) -> std::optional<double> {
        auto v = single(params, name);
        if (!v) return std::nullopt;
        const double x = duration ? io::parse_duration(*v) : io::parse_number(*v, name);
        if (!(x > 0)) throw FormatError(std::string(name) + " must be positive");
        return x;
    };
    req.flags.split_gap = positive("split_gap", true);
    req.flags.distance_threshold = positive("distance_threshold", false);
    req.flags.speed_threshold = positive("speed_threshold", false);
    req.flags.interp_step = positive("interp_step", true);
    req.flags.decimate_epsilon = positive("decimate_epsilon", false);
    return req;
}

TrackService::TrackService(ServerOptions options) : options_(std::move(options)) {
    if (options_.zones) {
        gis::load_zones(*options_.zones);
        std::ifstream in(*options_.zones);
        zones_json_ = json::parse(in).dump();
    } else {
        zones_json_ = R"({"type":"FeatureCollection","features":[]})";
    }
}

Response TrackService::handle(std::string_view path, const Params& params) const {
    try {
        if (path == "/tracks") return tracks(params);
        if (path == "/zones") return zones();
        if (path == "/stats") return stats();
        constexpr std::string_view prefix = "/vessels/";
        if (path.starts_with(prefix)) return vessel(path.substr(prefix.size()));
        return error_response(404, "no such endpoint: " + std::string(path));
    } catch (const FormatError& e) {
        return error_response(400, e.what());
    } catch (const ContractViolation& e) {
        return error_response(400, e.what());
    } catch (const store::StorageError& e) {
        return error_response(503, e.what());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

Response TrackService::tracks(const Params& params) const {
    const auto request = parse_track_params(params, options_.default_limit, options_.max_limit);
    const auto handle = open_read_only(options_.db);
    return {200, io::to_geojson(io::build_tracks(handle, request)), "application/geo+json"};
}

Response TrackService::vessel(std::string_view mmsi_text) const {
    const std::string text(mmsi_text);
    if (text.empty() || text.size() > 9 ||
        !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        return error_response(400, "invalid mmsi: '" + text + "'");
    }
    const auto handle = open_read_only(options_.db);
    const auto row = handle.vessel(static_cast<std::uint32_t>(std::stoul(text)));
    if (!row) return error_response(404, "no static data for mmsi " + text);
    json body = {{"mmsi", row->mmsi},
                 {"ship_name", row->ship_name},
                 {"ship_type", optional_json(row->ship_type)},
                 {"ship_type_name", row->ship_type ? std::string(ship_type_name(*row->ship_type)) : "Unknown"},
                 {"ship_class", row->ship_type ? std::string(ship_type_class(*row->ship_type)) : "other"},
                 {"imo", optional_json(row->imo)},
                 {"callsign", row->callsign},
                 {"dim_bow", optional_json(row->dim_bow)},
                 {"dim_stern", optional_json(row->dim_stern)},
                 {"dim_port", optional_json(row->dim_port)},
                 {"dim_starboard", optional_json(row->dim_starboard)},
                 {"draught", optional_json(row->draught)}};
    return {200, body.dump()};
}

Response TrackService::zones() const { return {200, zones_json_, "application/geo+json"}; }

Response TrackService::stats() const {
    const auto handle = open_read_only(options_.db);
    json parts = json::array();
    std::uint64_t dynamic = 0, statics = 0;
    for (const auto& p : handle.summary()) {
        parts.push_back({{"month", p.month},
                         {"dynamic_rows", p.dynamic_rows},
                         {"static_rows", p.static_rows},
                         {"aggregate_rows", p.aggregate_rows}});
        dynamic += p.dynamic_rows;
        statics += p.static_rows;
    }
    json body = {{"partitions", parts}, {"dynamic_rows", dynamic}, {"static_rows", statics}};
    return {200, body.dump()};
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
    const TrackService& service;
    httplib::Server http;

    explicit Impl(const TrackService& s) : service(s) {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
        http.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
            Params params(req.params.begin(), req.params.end());
            const auto out = service.handle(req.path, params);
            res.status = out.status;
            res.set_content(out.body, out.content_type);
        });
        http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        auto refuse = [](const httplib::Request&, httplib::Response& res) {
            const auto out = error_response(405, "read-only service");
            res.status = out.status;
            res.set_header("Allow", "GET, OPTIONS");
            res.set_content(out.body, out.content_type);
        };
        http.Post(R"(/.*)", refuse);
        http.Put(R"(/.*)", refuse);
        http.Patch(R"(/.*)", refuse);
        http.Delete(R"(/.*)", refuse);
    }
};

HttpServer::HttpServer(const TrackService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::run() { impl_->http.listen_after_bind(); }

void HttpServer::stop() { impl_->http.stop(); }

}  // namespace aiskit::server
