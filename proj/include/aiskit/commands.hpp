#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stop_token>
#include <string>
#include <vector>

#include "aiskit/decoder.hpp"
#include "aiskit/export.hpp"
#include "aiskit/raster.hpp"
#include "aiskit/storage.hpp"
#include "aiskit/stream.hpp"

// Implementations behind the `aiskit` command line. Each writes its output
// to a stream so the same code serves the CLI and the tests.
namespace aiskit::cli {

struct ImportSummary {
    std::uint64_t files = 0;
    std::uint64_t lines = 0;
    std::uint64_t malformed = 0;
    std::uint64_t messages = 0;
    store::IngestReport report;
    std::vector<int> months_aggregated;
};

/// Decodes and stores every file, then rebuilds the static aggregate of each
/// month that received static reports. Prints a text report followed by one
/// JSON summary line.
ImportSummary cmd_import(const std::filesystem::path& db, const std::vector<std::filesystem::path>& files,
                         std::optional<ais::SourceFormat> format, std::ostream& out,
                         ais::Clock clock = ais::system_clock_seconds);

enum class OutputFormat { Csv, GeoJson };
OutputFormat parse_output_format(std::string_view text);

/// Every matching vessel (the request's limit and cursor are honoured if set).
std::vector<Track> query_tracks(const std::filesystem::path& db, const io::TrackRequest& request);

void cmd_query(const std::filesystem::path& db, const io::TrackRequest& request, OutputFormat format,
               std::ostream& out);

/// Edge list CSV `from,to,transit_count,vessel_count`.
void cmd_graph(const std::filesystem::path& db, const std::filesystem::path& zones, const io::TrackRequest& request,
               std::ostream& out);

/// Tracks from a dynamic-row CSV, grouped by vessel.
std::vector<Track> load_track_csv(const std::filesystem::path& path);

/// Dynamic-row CSV plus a `value` column (empty where there is no data).
void cmd_sample(const std::vector<Track>& tracks, const std::filesystem::path& raster, raster::Method method,
                std::ostream& out);

/// Dynamic-row CSV plus `feature,distance_m` columns.
void cmd_nearest(const std::vector<Track>& tracks, const std::filesystem::path& features, std::ostream& out);

struct StreamRunOptions {
    stream::PipelineOptions pipeline;
    std::size_t queue_capacity = 10000;
    std::chrono::milliseconds report_every{10000};
};

/// Prints one counters line every `report_every` and a final one.
void print_stats(std::ostream& out, const stream::StreamStats::Snapshot& s);

void cmd_replay(const std::filesystem::path& db, const std::filesystem::path& source,
                const stream::ReplayOptions& replay, const StreamRunOptions& options, stream::StreamStats& stats,
                std::ostream& out);

/// Runs until `stop` is requested; the final batch is flushed on the way out.
void cmd_listen(const std::filesystem::path& db, const std::string& host, std::uint16_t port,
                const stream::BackoffPolicy& backoff, const StreamRunOptions& options, stream::StreamStats& stats,
                std::ostream& out, std::stop_token stop);

}  // namespace aiskit::cli
