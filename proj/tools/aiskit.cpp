// Command-line entry point: import, query, graph, sample, nearest, replay,
// listen and serve.

#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <thread>

#include <CLI11.hpp>

#include "aiskit/commands.hpp"
#include "aiskit/error.hpp"
#include "aiskit/server.hpp"
#include "aiskit/timefmt.hpp"

using namespace aiskit;

namespace {

struct QueryArgs {
    std::string start, end, bbox, mmsi, vtype;
    std::string split_gap, interp_step;
    std::optional<double> distance_threshold, speed_threshold, decimate_epsilon;
};

void add_query_options(CLI::App* app, QueryArgs& q, bool required) {
    app->add_option("--start", q.start, "Window start (ISO-8601 UTC or unix seconds)")->required(required);
    app->add_option("--end", q.end, "Window end, inclusive")->required(required);
    app->add_option("--bbox", q.bbox, "xmin,ymin,xmax,ymax (xmin > xmax crosses the antimeridian)");
    app->add_option("--mmsi", q.mmsi, "Comma-separated MMSIs");
    app->add_option("--vtype", q.vtype, "Comma-separated vessel classes, type names or codes");
    app->add_option("--split-gap", q.split_gap, "Split tracks at time gaps, e.g. 24h");
    app->add_option("--distance-threshold", q.distance_threshold, "Cleaning distance threshold, meters");
    app->add_option("--speed-threshold", q.speed_threshold, "Cleaning speed threshold, knots");
    app->add_option("--interp-step", q.interp_step, "Resample at a fixed time step, e.g. 5m");
    app->add_option("--decimate-epsilon", q.decimate_epsilon, "Simplify within this many meters");
}

io::TrackRequest to_request(const QueryArgs& q) {
    io::TrackRequest r;
    r.start = text_to_epoch(q.start);
    r.end = text_to_epoch(q.end);
    if (!q.bbox.empty()) r.bbox = io::parse_bbox(q.bbox);
    if (!q.mmsi.empty()) r.mmsis = io::parse_mmsi_list(q.mmsi);
    if (!q.vtype.empty()) r.vessel_types = io::parse_word_list(q.vtype);
    if (!q.split_gap.empty()) r.flags.split_gap = io::parse_duration(q.split_gap);
    if (!q.interp_step.empty()) r.flags.interp_step = io::parse_duration(q.interp_step);
    r.flags.distance_threshold = q.distance_threshold;
    r.flags.speed_threshold = q.speed_threshold;
    r.flags.decimate_epsilon = q.decimate_epsilon;
    return r;
}

/// Writes to --output when given, else stdout.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    body(out);
    if (!out.flush()) throw FormatError("write failed: " + path);
}

/// Calls `on_signal` once SIGINT or SIGTERM arrives. The signals must already
/// be blocked in every thread.
class ShutdownWatcher {
public:
    explicit ShutdownWatcher(std::function<void()> on_signal)
        : thread_([fn = std::move(on_signal)](std::stop_token stop) {
              sigset_t set;
              sigemptyset(&set);
              sigaddset(&set, SIGINT);
              sigaddset(&set, SIGTERM);
              const timespec tick{0, 200'000'000};
              while (!stop.stop_requested()) {
                  if (sigtimedwait(&set, nullptr, &tick) > 0) {
                      fn();
                      return;
                  }
              }
          }) {}

    static void block_signals() {
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);
    }

private:
    std::jthread thread_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIS decoding, storage, track processing and serving"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string db = "aiskit.db";
    app.add_option("--db", db, "Store file")->capture_default_str();

    // import
    auto* import = app.add_subcommand("import", "Decode NM4, CSV or zip archives into the store");
    std::vector<std::string> import_files;
    std::string import_format;
    import->add_option("files", import_files, "Source files")->required();
    import->add_option("--format", import_format, "nm4, csv or zip (default: by extension)");

    // query
    auto* query = app.add_subcommand("query", "Export tracks as CSV or GeoJSON");
    QueryArgs qargs;
    std::string format = "geojson", output;
    add_query_options(query, qargs, true);
    query->add_option("--format", format, "csv or geojson")->capture_default_str();
    query->add_option("-o,--output", output, "Output file (default stdout)");

    // graph
    auto* graph = app.add_subcommand("graph", "Zone transition edge list");
    QueryArgs gargs;
    std::string zones;
    add_query_options(graph, gargs, true);
    graph->add_option("--zones", zones, "Zones GeoJSON")->required();
    graph->add_option("-o,--output", output, "Output file (default stdout)");

    // sample / nearest
    auto* sample = app.add_subcommand("sample", "Annotate track points with raster values");
    QueryArgs sargs;
    std::string tracks_csv, raster_file, method = "bilinear";
    add_query_options(sample, sargs, false);
    sample->add_option("--tracks", tracks_csv, "Track CSV instead of a store query");
    sample->add_option("--raster", raster_file, "ESRI ASCII grid or GeoTIFF")->required();
    sample->add_option("--method", method, "nearest or bilinear")->capture_default_str();
    sample->add_option("-o,--output", output, "Output file (default stdout)");

    auto* nearest = app.add_subcommand("nearest", "Distance from track points to the nearest feature");
    QueryArgs nargs;
    std::string features;
    add_query_options(nearest, nargs, false);
    nearest->add_option("--tracks", tracks_csv, "Track CSV instead of a store query");
    nearest->add_option("--features", features, "CSV name,lon,lat")->required();
    nearest->add_option("-o,--output", output, "Output file (default stdout)");

    // replay / listen
    cli::StreamRunOptions run;
    double flush_seconds = 5.0, report_seconds = 10.0;
    auto add_stream_options = [&](CLI::App* sub) {
        sub->add_option("--batch", run.pipeline.batch_size, "Messages per write")->capture_default_str();
        sub->add_option("--flush", flush_seconds, "Seconds between forced writes")->capture_default_str();
        sub->add_option("--queue", run.queue_capacity, "Line queue capacity")->capture_default_str();
        sub->add_option("--report", report_seconds, "Seconds between counter lines")->capture_default_str();
    };
    auto* replay = app.add_subcommand("replay", "Play an archive through the live pipeline");
    std::string replay_source, speed = "inf", pace = "tag";
    double interval = 0.0;
    replay->add_option("source", replay_source, "NM4 file or zip")->required();
    replay->add_option("--speed", speed, "Archive seconds per second, or inf")->capture_default_str();
    replay->add_option("--pace", pace, "tag (tag-block times) or fixed")->capture_default_str();
    replay->add_option("--interval", interval, "Seconds between untimed lines")->capture_default_str();
    add_stream_options(replay);

    auto* listen = app.add_subcommand("listen", "Ingest a TCP line feed until interrupted");
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    double backoff_base = 1.0, backoff_cap = 60.0;
    listen->add_option("--host", host)->capture_default_str();
    listen->add_option("--port", port)->required();
    listen->add_option("--backoff", backoff_base, "First reconnect delay, seconds")->capture_default_str();
    listen->add_option("--backoff-cap", backoff_cap, "Longest reconnect delay, seconds")->capture_default_str();
    add_stream_options(listen);

    // serve
    auto* serve = app.add_subcommand("serve", "Read-only HTTP track API");
    std::string bind = "127.0.0.1", serve_zones;
    int serve_port = 8080;
    serve->add_option("--bind", bind)->capture_default_str();
    serve->add_option("--port", serve_port)->capture_default_str();
    serve->add_option("--zones", serve_zones, "Zones GeoJSON served at /zones");

    CLI11_PARSE(app, argc, argv);

    auto seconds = [](double s) {
        return std::chrono::milliseconds(static_cast<std::int64_t>(s * 1000.0));
    };
    auto tracks_for = [&](const QueryArgs& q) {
        if (!tracks_csv.empty()) return cli::load_track_csv(tracks_csv);
        if (q.start.empty() || q.end.empty()) throw FormatError("give --tracks, or --start and --end");
        return cli::query_tracks(db, to_request(q));
    };

    try {
        if (import->parsed()) {
            std::vector<std::filesystem::path> files(import_files.begin(), import_files.end());
            std::optional<ais::SourceFormat> fmt;
            if (!import_format.empty()) fmt = ais::parse_source_format(import_format);
            cli::cmd_import(db, files, fmt, std::cout);
        } else if (query->parsed()) {
            const auto fmt = cli::parse_output_format(format);
            const auto request = to_request(qargs);
            with_output(output, [&](std::ostream& out) { cli::cmd_query(db, request, fmt, out); });
        } else if (graph->parsed()) {
            const auto request = to_request(gargs);
            with_output(output, [&](std::ostream& out) { cli::cmd_graph(db, zones, request, out); });
        } else if (sample->parsed()) {
            raster::Method m;
            if (method == "nearest") {
                m = raster::Method::Nearest;
            } else if (method == "bilinear") {
                m = raster::Method::Bilinear;
            } else {
                throw FormatError("unknown method '" + method + "' (nearest or bilinear)");
            }
            const auto tracks = tracks_for(sargs);
            with_output(output, [&](std::ostream& out) { cli::cmd_sample(tracks, raster_file, m, out); });
        } else if (nearest->parsed()) {
            const auto tracks = tracks_for(nargs);
            with_output(output, [&](std::ostream& out) { cli::cmd_nearest(tracks, features, out); });
        } else if (replay->parsed()) {
            stream::ReplayOptions ro;
            ro.speed = speed == "inf" ? std::numeric_limits<double>::infinity() : io::parse_number(speed, "speed");
            if (pace == "fixed") {
                ro.clock = stream::PaceClock::FixedInterval;
            } else if (pace != "tag") {
                throw FormatError("unknown pace '" + pace + "' (tag or fixed)");
            }
            ro.fixed_interval = interval;
            run.pipeline.flush_interval = seconds(flush_seconds);
            run.report_every = seconds(report_seconds);
            stream::StreamStats stats;
            cli::cmd_replay(db, replay_source, ro, run, stats, std::cout);
        } else if (listen->parsed()) {
            ShutdownWatcher::block_signals();
            std::stop_source stop;
            ShutdownWatcher watcher([&] { stop.request_stop(); });
            run.pipeline.flush_interval = seconds(flush_seconds);
            run.report_every = seconds(report_seconds);
            stream::BackoffPolicy backoff;
            backoff.base = seconds(backoff_base);
            backoff.cap = seconds(backoff_cap);
            stream::StreamStats stats;
            cli::cmd_listen(db, host, port, backoff, run, stats, std::cout, stop.get_token());
        } else if (serve->parsed()) {
            ShutdownWatcher::block_signals();
            server::ServerOptions opts;
            opts.db = db;
            if (!serve_zones.empty()) opts.zones = serve_zones;
            const server::TrackService service(opts);
            server::HttpServer http(service);
            const int bound = http.bind(bind, serve_port);
            ShutdownWatcher watcher([&] { http.stop(); });
            std::cout << "serving " << db << " on http://" << bind << ':' << bound << std::endl;
            http.run();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
