#include "aiskit/stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include "aiskit/error.hpp"
#include "aiskit/zip.hpp"

namespace aiskit::stream {

StreamStats::Snapshot StreamStats::snapshot() const noexcept {
    return {lines_seen.load(),    lines_malformed.load(), messages_decoded.load(), messages_stored.load(),
            duplicates.load(),    unsupported.load(),     invalid.load(),          fragments_expired.load(),
            batches.load(),       connect_failures.load(), producer_waits.load(),  last_receipt.load()};
}

// ---------------------------------------------------------------------------

LineQueue::LineQueue(std::size_t capacity, StreamStats* stats) : capacity_(capacity), stats_(stats) {
    if (capacity_ == 0) throw ContractViolation("LineQueue: capacity must be positive");
}

bool LineQueue::push(std::string line, std::stop_token stop) {
    std::unique_lock lock(mu_);
    if (lines_.size() >= capacity_ && stats_) ++stats_->producer_waits;
    if (!not_full_.wait(lock, stop, [&] { return closed_ || lines_.size() < capacity_; })) return false;
    if (closed_) return false;
    lines_.push_back(std::move(line));
    high_water_ = std::max(high_water_, lines_.size());
    lock.unlock();
    not_empty_.notify_one();
    return true;
}

LineQueue::PopStatus LineQueue::pop(std::string& out, std::chrono::steady_clock::time_point deadline) {
    std::unique_lock lock(mu_);
    if (!not_empty_.wait_until(lock, deadline, [&] { return closed_ || !lines_.empty(); })) {
        return PopStatus::Timeout;
    }
    if (lines_.empty()) return PopStatus::Closed;
    out = std::move(lines_.front());
    lines_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return PopStatus::Item;
}

void LineQueue::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    not_full_.notify_all();
    not_empty_.notify_all();
}

std::size_t LineQueue::size() const {
    std::lock_guard lock(mu_);
    return lines_.size();
}

std::size_t LineQueue::high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
}

// ---------------------------------------------------------------------------

namespace {

/// Sleeps until `deadline`; returns false if `stop` fires first.
bool sleep_until(std::chrono::steady_clock::time_point deadline, std::stop_token stop) {
    std::mutex mu;
    std::condition_variable_any cv;
    std::unique_lock lock(mu);
    return !cv.wait_until(lock, stop, deadline, [] { return false; }) && !stop.stop_requested();
}

std::optional<std::int64_t> line_timestamp(std::string_view line) {
    try {
        auto split = ais::parse_tag_block(line);
        if (split.tag) return split.tag->receiver_timestamp;
    } catch (const ais::DecodeError&) {
    }
    return std::nullopt;
}

class Pacer {
public:
    explicit Pacer(const ReplayOptions& o) : o_(o), start_(std::chrono::steady_clock::now()) {}

    /// Wall-clock deadline for the next line.
    std::chrono::steady_clock::time_point deadline(std::string_view line) {
        if (std::isinf(o_.speed)) return start_;
        std::optional<std::int64_t> ts;
        if (o_.clock == PaceClock::TagBlock) ts = line_timestamp(line);
        if (ts) {
            if (!first_ts_) first_ts_ = *ts;
            const double archive_elapsed = std::max(0.0, static_cast<double>(*ts - *first_ts_));
            offset_ = std::max(offset_, anchor_ + archive_elapsed / o_.speed);
        } else {
            offset_ += o_.fixed_interval;
            anchor_ = offset_;
            if (first_ts_) first_ts_.reset();
        }
        return start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(offset_));
    }

private:
    ReplayOptions o_;
    std::chrono::steady_clock::time_point start_;
    std::optional<std::int64_t> first_ts_;
    double anchor_ = 0.0;  // wall offset at which first_ts_ was seen
    double offset_ = 0.0;
};

bool emit_text(std::istream& in, Pacer& pacer, const LineSink& sink, std::stop_token stop, std::uint64_t& emitted) {
    std::string line;
    while (std::getline(in, line)) {
        if (stop.stop_requested()) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto when = pacer.deadline(line);
        if (when > std::chrono::steady_clock::now() && !sleep_until(when, stop)) return false;
        if (!sink(std::move(line))) return false;
        ++emitted;
    }
    return true;
}

}  // namespace

std::uint64_t replay(const std::filesystem::path& path, const ReplayOptions& options, const LineSink& sink,
                     std::stop_token stop) {
    if (!(options.speed > 0)) throw ContractViolation("replay: speed must be positive");
    if (!(options.fixed_interval >= 0)) throw ContractViolation("replay: interval must be non-negative");
    Pacer pacer(options);
    std::uint64_t emitted = 0;
    if (ais::source_format_for(path) == ais::SourceFormat::Zip) {
        zip::Archive archive(path);
        for (const auto& entry : archive.entries()) {
            auto name = entry.name;
            std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
            if (name.ends_with(".csv") || name.ends_with('/')) continue;
            std::istringstream in(archive.read(entry));
            if (!emit_text(in, pacer, sink, stop, emitted)) break;
        }
        return emitted;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    emit_text(in, pacer, sink, stop, emitted);
    return emitted;
}

// ---------------------------------------------------------------------------

std::chrono::milliseconds BackoffPolicy::delay(unsigned attempt, std::mt19937_64& rng) const {
    const double full = std::min(static_cast<double>(cap.count()),
                                 static_cast<double>(base.count()) * std::pow(2.0, std::min(attempt, 62u)));
    const double lo = full * (1.0 - std::clamp(jitter, 0.0, 1.0));
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::uniform_real_distribution<double>(lo, full)(rng)));
}

namespace {

int open_socket(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) return -1;
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    freeaddrinfo(res);
    return fd;
}

}  // namespace

void connect_lines(const std::string& host, std::uint16_t port, const BackoffPolicy& policy, const LineSink& sink,
                   StreamStats& stats, std::stop_token stop) {
    std::mt19937_64 rng(std::random_device{}());
    unsigned attempt = 0;
    while (!stop.stop_requested()) {
        const int fd = open_socket(host, port);
        if (fd >= 0) {
            attempt = 0;
            std::string pending;
            char buf[8192];
            bool open = true;
            while (open && !stop.stop_requested()) {
                pollfd pfd{fd, POLLIN, 0};
                const int ready = ::poll(&pfd, 1, 200);
                if (ready < 0) break;
                if (ready == 0) continue;
                const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
                if (n <= 0) break;
                pending.append(buf, static_cast<std::size_t>(n));
                std::size_t start = 0;
                for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
                    std::string line = pending.substr(start, nl - start);
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    if (line.empty()) continue;
                    if (!sink(std::move(line))) {
                        open = false;
                        break;
                    }
                }
                pending.erase(0, start);
            }
            ::close(fd);
            if (!open) return;
        }
        if (stop.stop_requested()) return;
        ++stats.connect_failures;
        sleep_until(std::chrono::steady_clock::now() + policy.delay(attempt++, rng), stop);
    }
}

// ---------------------------------------------------------------------------

void run_pipeline(LineQueue& queue, store::StorageHandle& handle, const PipelineOptions& options,
                  StreamStats& stats) {
    if (options.batch_size == 0) throw ContractViolation("run_pipeline: batch size must be positive");
    ais::LineDecoder decoder(options.clock);
    std::vector<ais::DecodedMessage> batch;
    batch.reserve(options.batch_size);
    ais::LineStats seen{};

    auto sync = [&] {
        const auto& s = decoder.stats();
        stats.lines_malformed += s.malformed - seen.malformed;
        stats.fragments_expired += s.fragments_expired - seen.fragments_expired;
        seen = s;
    };
    auto flush = [&] {
        if (batch.empty()) return;
        const auto report = handle.insert_messages(batch);
        stats.messages_stored += report.messages_stored;
        stats.duplicates += report.duplicates_skipped;
        stats.unsupported += report.unsupported_skipped;
        stats.invalid += report.invalid_skipped;
        ++stats.batches;
        batch.clear();
    };

    auto next_flush = std::chrono::steady_clock::now() + options.flush_interval;
    std::string line;
    for (;;) {
        const auto status = queue.pop(line, next_flush);
        if (status == LineQueue::PopStatus::Closed) break;
        if (status == LineQueue::PopStatus::Item) {
            ++stats.lines_seen;
            stats.last_receipt = ais::system_clock_seconds();
            if (auto msg = decoder.feed(line)) {
                ++stats.messages_decoded;
                batch.push_back(std::move(*msg));
            }
            sync();
            if (batch.size() >= options.batch_size) {
                flush();
                next_flush = std::chrono::steady_clock::now() + options.flush_interval;
            }
        }
        if (std::chrono::steady_clock::now() >= next_flush) {
            flush();
            next_flush = std::chrono::steady_clock::now() + options.flush_interval;
        }
    }
    decoder.finish();
    sync();
    flush();
}

void ingest_replay(const std::filesystem::path& path, store::StorageHandle& handle, const ReplayOptions& replay_options,
                   const PipelineOptions& options, StreamStats& stats, std::size_t queue_capacity) {
    LineQueue queue(queue_capacity, &stats);
    std::exception_ptr producer_error;
    std::jthread producer([&](std::stop_token stop) {
        try {
            replay(path, replay_options, [&](std::string line) { return queue.push(std::move(line), stop); }, stop);
        } catch (...) {
            producer_error = std::current_exception();
        }
        queue.close();
    });
    try {
        run_pipeline(queue, handle, options, stats);
    } catch (...) {
        producer.request_stop();
        queue.close();
        throw;
    }
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);
}

}  // namespace aiskit::stream
