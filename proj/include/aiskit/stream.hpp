#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <stop_token>
#include <string>
#include <string_view>

#include "aiskit/decoder.hpp"
#include "aiskit/storage.hpp"

namespace aiskit::stream {

/// Counters shared between the pipeline threads and observers.
struct StreamStats {
    std::atomic<std::uint64_t> lines_seen{0};
    std::atomic<std::uint64_t> lines_malformed{0};
    std::atomic<std::uint64_t> messages_decoded{0};
    std::atomic<std::uint64_t> messages_stored{0};
    std::atomic<std::uint64_t> duplicates{0};
    std::atomic<std::uint64_t> unsupported{0};
    std::atomic<std::uint64_t> invalid{0};
    std::atomic<std::uint64_t> fragments_expired{0};
    std::atomic<std::uint64_t> batches{0};
    std::atomic<std::uint64_t> connect_failures{0};
    std::atomic<std::uint64_t> producer_waits{0};  // pushes that found the queue full
    std::atomic<std::int64_t> last_receipt{0};     // unix seconds

    struct Snapshot {
        std::uint64_t lines_seen, lines_malformed, messages_decoded, messages_stored, duplicates, unsupported,
            invalid, fragments_expired, batches, connect_failures, producer_waits;
        std::int64_t last_receipt;
    };
    Snapshot snapshot() const noexcept;
};

/// Bounded FIFO of lines. A full queue blocks the producer; nothing is
/// dropped.
class LineQueue {
public:
    explicit LineQueue(std::size_t capacity = 10000, StreamStats* stats = nullptr);

    /// Blocks while full. Returns false if the queue was closed or `stop`
    /// was requested before the line could be queued.
    bool push(std::string line, std::stop_token stop = {});

    enum class PopStatus { Item, Timeout, Closed };
    /// Waits until `deadline` for a line. Closed means closed and drained.
    PopStatus pop(std::string& out, std::chrono::steady_clock::time_point deadline);

    /// No further pushes; consumers drain what is left.
    void close();

    std::size_t size() const;
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t high_water() const;

private:
    mutable std::mutex mu_;
    std::condition_variable_any not_full_;
    std::condition_variable not_empty_;
    std::deque<std::string> lines_;
    std::size_t capacity_;
    std::size_t high_water_ = 0;
    bool closed_ = false;
    StreamStats* stats_;
};

using LineSink = std::function<bool(std::string)>;

enum class PaceClock { TagBlock, FixedInterval };

struct ReplayOptions {
    /// Archive seconds per wall second; infinity disables pacing.
    double speed = std::numeric_limits<double>::infinity();
    PaceClock clock = PaceClock::TagBlock;
    /// Wall seconds between lines in FixedInterval mode, and for lines
    /// without a tag-block timestamp in TagBlock mode.
    double fixed_interval = 0.0;
};

/// Emits the lines of an NM4 file (or the NM4 members of a zip archive) to
/// `sink`, paced per `options`. Stops early when `sink` returns false or
/// `stop` is requested. Returns the number of lines emitted.
std::uint64_t replay(const std::filesystem::path& path, const ReplayOptions& options, const LineSink& sink,
                     std::stop_token stop = {});

struct BackoffPolicy {
    std::chrono::milliseconds base{1000};
    std::chrono::milliseconds cap{60000};
    double jitter = 0.5;  // delay drawn uniformly from [(1 - jitter) * d, d]

    /// Delay before reconnect attempt `attempt` (0-based).
    std::chrono::milliseconds delay(unsigned attempt, std::mt19937_64& rng) const;
};

/// Reads newline-delimited text from host:port, reconnecting with backoff
/// until `stop` is requested or `sink` returns false. Failures are counted in
/// `stats`, never thrown.
void connect_lines(const std::string& host, std::uint16_t port, const BackoffPolicy& policy, const LineSink& sink,
                   StreamStats& stats, std::stop_token stop);

struct PipelineOptions {
    std::size_t batch_size = 4096;
    std::chrono::milliseconds flush_interval{5000};
    ais::Clock clock = ais::system_clock_seconds;
};

/// Consumer loop: decodes queued lines and stores them in batches. Returns
/// after the queue is closed and drained; the final partial batch is flushed.
void run_pipeline(LineQueue& queue, store::StorageHandle& handle, const PipelineOptions& options,
                  StreamStats& stats);

/// Replays an archive through a producer thread and the pipeline.
void ingest_replay(const std::filesystem::path& path, store::StorageHandle& handle, const ReplayOptions& replay_options,
                   const PipelineOptions& options, StreamStats& stats, std::size_t queue_capacity = 10000);

}  // namespace aiskit::stream
