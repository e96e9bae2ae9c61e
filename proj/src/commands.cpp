#include "aiskit/commands.hpp"

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "aiskit/csv_schema.hpp"
#include "aiskit/error.hpp"
#include "aiskit/gis.hpp"
#include "aiskit/query.hpp"
#include "aiskit/timefmt.hpp"

namespace aiskit::cli {

namespace {

bool is_static(int type) { return type == 5 || type == 19 || type == 24; }

void aggregate_all(store::StorageHandle& handle, std::vector<int>* months = nullptr) {
    for (const auto& p : handle.summary()) {
        if (p.static_rows == 0) continue;
        handle.aggregate_statics(p.month);
        if (months) months->push_back(p.month);
    }
}

}  // namespace

ImportSummary cmd_import(const std::filesystem::path& db, const std::vector<std::filesystem::path>& files,
                         std::optional<ais::SourceFormat> format, std::ostream& out, ais::Clock clock) {
    auto handle = store::StorageHandle::open(db);
    ImportSummary summary;
    std::set<int> months;
    std::vector<ais::DecodedMessage> batch;
    auto flush = [&] {
        if (batch.empty()) return;
        summary.report += handle.insert_messages(batch);
        batch.clear();
    };
    for (const auto& file : files) {
        ais::SourceReader reader(file, format.value_or(ais::source_format_for(file)), clock);
        while (auto msg = reader.next()) {
            if (is_static(msg->message_type)) months.insert(month_of(msg->timestamp));
            batch.push_back(std::move(*msg));
            if (batch.size() >= 4096) flush();
        }
        flush();
        const auto s = reader.stats();
        summary.lines += s.lines;
        summary.malformed += s.malformed;
        summary.messages += s.messages;
        ++summary.files;
        out << file.string() << ": " << s.lines << " lines, " << s.malformed << " malformed, " << s.messages
            << " messages\n";
    }
    for (int m : months) {
        handle.aggregate_statics(m);
        summary.months_aggregated.push_back(m);
    }
    const auto& r = summary.report;
    out << "stored " << r.messages_stored << " messages (" << r.dynamic_rows << " dynamic rows, " << r.static_rows
        << " static rows); skipped " << r.duplicates_skipped << " duplicates, " << r.unsupported_skipped
        << " unsupported, " << r.invalid_skipped << " without position\n";
    nlohmann::json j = {{"files", summary.files},
                        {"lines", summary.lines},
                        {"malformed", summary.malformed},
                        {"messages", summary.messages},
                        {"messages_stored", r.messages_stored},
                        {"dynamic_rows", r.dynamic_rows},
                        {"static_rows", r.static_rows},
                        {"duplicates_skipped", r.duplicates_skipped},
                        {"unsupported_skipped", r.unsupported_skipped},
                        {"invalid_skipped", r.invalid_skipped},
                        {"months_aggregated", summary.months_aggregated}};
    out << j.dump() << '\n';
    return summary;
}

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "geojson") return OutputFormat::GeoJson;
    throw FormatError("unknown output format '" + std::string(text) + "' (csv or geojson)");
}

std::vector<Track> query_tracks(const std::filesystem::path& db, const io::TrackRequest& request) {
    const auto handle = store::StorageHandle::open(db, store::BackendKind::Sqlite, store::OpenMode::ReadOnly);
    return io::build_tracks(handle, request).tracks;
}

void cmd_query(const std::filesystem::path& db, const io::TrackRequest& request, OutputFormat format,
               std::ostream& out) {
    const auto handle = store::StorageHandle::open(db, store::BackendKind::Sqlite, store::OpenMode::ReadOnly);
    const auto page = io::build_tracks(handle, request);
    if (format == OutputFormat::Csv) {
        io::write_csv(out, page.tracks);
    } else {
        io::write_geojson(out, page);
    }
}

void cmd_graph(const std::filesystem::path& db, const std::filesystem::path& zones_path,
               const io::TrackRequest& request, std::ostream& out) {
    const auto zones = gis::load_zones(zones_path);
    const auto tracks = query_tracks(db, request);
    const auto graph = gis::build_graph(tracks, zones);
    out << "from,to,transit_count,vessel_count\n";
    for (const auto& [key, edge] : graph.edges) {
        out << csv::quote(key.first) << ',' << csv::quote(key.second) << ',' << edge.transit_count << ','
            << edge.vessel_count() << '\n';
    }
}

std::vector<Track> load_track_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const csv::DynamicColumns columns(line);
    std::vector<DynamicRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            rows.push_back(columns.parse(line));
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const DynamicRow& a, const DynamicRow& b) {
        return std::tie(a.mmsi, a.time) < std::tie(b.mmsi, b.time);
    });
    return query::track_gen(rows);
}

void cmd_sample(const std::vector<Track>& tracks, const std::filesystem::path& raster_path, raster::Method method,
                std::ostream& out) {
    const auto grid = raster::load_grid(raster_path);
    out << csv::kDynamicHeader << ",value\n";
    for (const auto& t : tracks) {
        const auto values = raster::annotate_track(t, grid, method);
        for (std::size_t i = 0; i < t.size(); ++i) {
            out << csv::format_dynamic(query::to_row(t.mmsi, t.points[i])) << ','
                << (values[i] ? csv::format_exact(*values[i]) : "") << '\n';
        }
    }
}

void cmd_nearest(const std::vector<Track>& tracks, const std::filesystem::path& features_path, std::ostream& out) {
    const auto features = gis::load_features(features_path);
    const gis::FeatureIndex index(features);
    out << csv::kDynamicHeader << ",feature,distance_m\n";
    for (const auto& t : tracks) {
        for (const auto& p : t.points) {
            const auto n = index.nearest({p.x, p.y});
            out << csv::format_dynamic(query::to_row(t.mmsi, p)) << ',' << csv::quote(features.names[n.index]) << ','
                << io::format_fixed9(n.meters) << '\n';
        }
    }
}

// ---------------------------------------------------------------------------

void print_stats(std::ostream& out, const stream::StreamStats::Snapshot& s) {
    out << "lines=" << s.lines_seen << " malformed=" << s.lines_malformed << " decoded=" << s.messages_decoded
        << " stored=" << s.messages_stored << " duplicates=" << s.duplicates << " unsupported=" << s.unsupported
        << " invalid=" << s.invalid << " expired_fragments=" << s.fragments_expired << " batches=" << s.batches
        << " reconnects=" << s.connect_failures << " queue_full=" << s.producer_waits;
    if (s.last_receipt) out << " last=" << epoch_to_text(s.last_receipt);
    out << std::endl;
}

namespace {

/// Prints stats every `every` until destroyed.
class Reporter {
public:
    Reporter(std::ostream& out, const stream::StreamStats& stats, std::chrono::milliseconds every)
        : thread_([&out, &stats, every](std::stop_token stop) {
              std::mutex mu;
              std::condition_variable_any cv;
              std::unique_lock lock(mu);
              while (!cv.wait_for(lock, stop, every, [] { return false; })) {
                  if (stop.stop_requested()) return;
                  print_stats(out, stats.snapshot());
              }
          }) {}

private:
    std::jthread thread_;
};

}  // namespace

void cmd_replay(const std::filesystem::path& db, const std::filesystem::path& source,
                const stream::ReplayOptions& replay, const StreamRunOptions& options, stream::StreamStats& stats,
                std::ostream& out) {
    auto handle = store::StorageHandle::open(db);
    {
        Reporter reporter(out, stats, options.report_every);
        stream::ingest_replay(source, handle, replay, options.pipeline, stats, options.queue_capacity);
    }
    aggregate_all(handle);
    print_stats(out, stats.snapshot());
}

void cmd_listen(const std::filesystem::path& db, const std::string& host, std::uint16_t port,
                const stream::BackoffPolicy& backoff, const StreamRunOptions& options, stream::StreamStats& stats,
                std::ostream& out, std::stop_token stop) {
    auto handle = store::StorageHandle::open(db);
    {
        stream::LineQueue queue(options.queue_capacity, &stats);
        Reporter reporter(out, stats, options.report_every);
        std::jthread producer([&](std::stop_token own) {
            std::stop_source both;
            std::stop_callback a(own, [&] { both.request_stop(); });
            std::stop_callback b(stop, [&] { both.request_stop(); });
            const auto token = both.get_token();
            stream::connect_lines(host, port, backoff,
                                  [&](std::string line) { return queue.push(std::move(line), token); }, stats, token);
            queue.close();
        });
        stream::run_pipeline(queue, handle, options.pipeline, stats);
    }
    aggregate_all(handle);
    print_stats(out, stats.snapshot());
}

}  // namespace aiskit::cli
