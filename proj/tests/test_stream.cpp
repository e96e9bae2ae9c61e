#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "aiskit/error.hpp"
#include "aiskit/stream.hpp"
#include "aiskit/zip.hpp"
#include "support/generators.hpp"

using namespace aiskit;
using namespace aiskit::stream;
using aiskit::testing::Rng;
using aiskit::testing::uniform_int;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::int64_t kT0 = 1672531200;  // 2023-01-01

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string tagged(const ais::DecodedMessage& m) {
    return ais::with_tag_block(ais::encode_message(m).front(), m.timestamp);
}

struct Archive {
    std::vector<std::string> lines;
    /// (mmsi, t, lon, lat) keys of every valid position line; a set, so
    /// repeats collapse exactly as the store's dedup key does.
    std::set<std::tuple<std::uint32_t, std::int64_t, double, double>> unique_positions;
    std::uint64_t position_lines = 0;
    std::uint64_t statics = 0;
    std::uint64_t unsupported = 0;
    std::uint64_t garbage = 0;
};

/// A noisy but fully accounted archive.
Archive noisy_archive(Rng& rng, int n) {
    Archive a;
    for (int i = 0; i < n; ++i) {
        const auto mmsi = static_cast<std::uint32_t>(uniform_int(rng, 0, 40) + 316000000);
        const std::int64_t t = kT0 + uniform_int(rng, 0, 86400 * 20);
        const double lon = uniform_int(rng, -3900000, -3800000) / 600000.0;
        const double lat = uniform_int(rng, 2640000, 2700000) / 600000.0;
        const int kind = uniform_int(rng, 0, 19);
        if (kind == 0) {
            a.lines.push_back("!AIVDM,1,1,,A,13u?etPv2;0n:dDPwUM1U1Cb069D,0*00");  // bad checksum
            ++a.garbage;
        } else if (kind == 1) {
            a.lines.push_back("garbage " + std::to_string(i));
            ++a.garbage;
        } else if (kind == 2) {
            auto m = aiskit::testing::random_message(rng, 8);  // unsupported type
            m.timestamp = t;
            for (auto& s : ais::encode_message(m, {'B', i % 10})) a.lines.push_back(ais::with_tag_block(s, t));
            ++a.unsupported;
        } else if (kind == 3) {
            auto m = aiskit::testing::voyage_msg(mmsi, t, "SHIP " + std::to_string(mmsi % 97), 70);
            for (auto& s : ais::encode_message(m, {'A', i % 10})) a.lines.push_back(ais::with_tag_block(s, t));
            ++a.statics;
        } else {
            auto m = aiskit::testing::position_msg(mmsi, t, lon, lat);
            const auto line = tagged(m);
            a.lines.push_back(line);
            a.unique_positions.insert({mmsi, t, lon, lat});
            ++a.position_lines;
            if (kind == 4) {  // exact repeat
                a.lines.push_back(line);
                ++a.position_lines;
            }
        }
    }
    return a;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\r\n";
}

std::uint64_t stored_rows(const store::StorageHandle& h) {
    auto months = h.list_partitions();
    return h.scan_all(months).size();
}

}  // namespace

TEST_CASE("line queue: fifo, close and drain") {
    LineQueue q(4);
    CHECK(q.push("a"));
    CHECK(q.push("b"));
    std::string out;
    CHECK(q.pop(out, Clock::now()) == LineQueue::PopStatus::Item);
    CHECK(out == "a");
    q.close();
    CHECK_FALSE(q.push("c"));
    CHECK(q.pop(out, Clock::now()) == LineQueue::PopStatus::Item);
    CHECK(out == "b");
    CHECK(q.pop(out, Clock::now() + std::chrono::seconds(5)) == LineQueue::PopStatus::Closed);
    CHECK_THROWS_AS(LineQueue(0), ContractViolation);

    LineQueue empty(2);
    const auto t = Clock::now();
    CHECK(empty.pop(out, t + std::chrono::milliseconds(50)) == LineQueue::PopStatus::Timeout);
    CHECK(seconds_since(t) >= 0.045);
}

TEST_CASE("line queue: a slow consumer blocks the producer and loses nothing") {
    StreamStats stats;
    LineQueue q(8, &stats);
    constexpr int kLines = 1000;
    std::jthread producer([&] {
        for (int i = 0; i < kLines; ++i) REQUIRE(q.push(std::to_string(i)));
        q.close();
    });
    std::vector<std::string> got;
    std::string line;
    while (q.pop(line, Clock::now() + std::chrono::seconds(10)) == LineQueue::PopStatus::Item) {
        got.push_back(line);
        if (got.size() % 50 == 0) std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    REQUIRE(got.size() == kLines);
    for (int i = 0; i < kLines; ++i) CHECK(got[static_cast<std::size_t>(i)] == std::to_string(i));
    CHECK(q.high_water() <= 8);
    CHECK(stats.producer_waits > 0);
}

TEST_CASE("line queue: a stop request releases a blocked producer") {
    LineQueue q(1);
    REQUIRE(q.push("x"));
    std::stop_source stop;
    bool result = true;
    std::jthread producer([&] { result = q.push("y", stop.get_token()); });
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    stop.request_stop();
    producer.join();
    CHECK_FALSE(result);
    CHECK(q.size() == 1);
}

TEST_CASE("replay: unpaced, in order and complete") {
    Rng rng(91);
    auto archive = noisy_archive(rng, 300);
    auto path = aiskit::testing::temp_path("replay.nm4");
    auto lines = archive.lines;
    lines.insert(lines.begin() + 10, "");
    write_lines(path, lines);

    std::vector<std::string> got;
    const auto n = replay(path, {}, [&](std::string l) {
        got.push_back(std::move(l));
        return true;
    });
    CHECK(n == archive.lines.size());
    CHECK(got == archive.lines);

    // the sink can stop it early
    got.clear();
    replay(path, {}, [&](std::string l) {
        got.push_back(std::move(l));
        return got.size() < 5;
    });
    CHECK(got.size() == 5);

    CHECK_THROWS_AS(replay(path, {.speed = 0}, [](std::string) { return true; }), ContractViolation);
    CHECK_THROWS_AS(replay("/nonexistent.nm4", {}, [](std::string) { return true; }), FormatError);
}

TEST_CASE("replay: zip members in order") {
    auto zpath = aiskit::testing::temp_path("replay.zip");
    zip::write_archive(zpath, {{"a.nm4", "L1\nL2\n"}, {"b.csv", "mmsi,time\n"}, {"c.nm4", "L3\n"}}, true);
    std::vector<std::string> got;
    replay(zpath, {}, [&](std::string l) {
        got.push_back(std::move(l));
        return true;
    });
    CHECK(got == std::vector<std::string>{"L1", "L2", "L3"});
}

TEST_CASE("replay: tag-block pacing follows archive time over speed") {
    auto path = aiskit::testing::temp_path("paced.nm4");
    const auto a = tagged(aiskit::testing::position_msg(316000001, kT0, -63.5, 44.6));
    const auto b = tagged(aiskit::testing::position_msg(316000001, kT0 + 10, -63.5, 44.61));
    write_lines(path, {a, b});

    std::vector<double> at;
    const auto start = Clock::now();
    replay(path, {.speed = 10.0}, [&](std::string) {
        at.push_back(seconds_since(start));
        return true;
    });
    REQUIRE(at.size() == 2);
    const double gap = at[1] - at[0];
    CHECK(gap >= 0.8);
    CHECK(gap <= 1.2);
}

TEST_CASE("replay: fixed interval and interruption") {
    auto path = aiskit::testing::temp_path("fixed.nm4");
    write_lines(path, {"x1", "x2", "x3"});
    const auto start = Clock::now();
    int n = 0;
    replay(path, {.speed = 1.0, .clock = PaceClock::FixedInterval, .fixed_interval = 0.1}, [&](std::string) {
        ++n;
        return true;
    });
    CHECK(n == 3);
    const double took = seconds_since(start);
    CHECK(took >= 0.27);
    CHECK(took <= 0.6);

    // untagged lines with no interval drain immediately
    const auto t2 = Clock::now();
    replay(path, {.speed = 1.0}, [](std::string) { return true; });
    CHECK(seconds_since(t2) < 0.1);

    write_lines(path, {"x1", "x2"});
    std::stop_source stop;
    std::jthread stopper([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        stop.request_stop();
    });
    const auto t3 = Clock::now();
    const auto emitted = replay(path, {.speed = 1.0, .clock = PaceClock::FixedInterval, .fixed_interval = 30.0},
                                [](std::string) { return true; }, stop.get_token());
    CHECK(emitted == 0);
    CHECK(seconds_since(t3) < 2.0);
}

TEST_CASE("pipeline: replayed archive is stored without loss") {
    Rng rng(92);
    auto archive = noisy_archive(rng, 3000);
    auto path = aiskit::testing::temp_path("noloss.nm4");
    write_lines(path, archive.lines);

    auto db = aiskit::testing::temp_path("noloss.db");
    auto handle = store::StorageHandle::open(db);
    StreamStats stats;
    ingest_replay(path, handle, {}, {.batch_size = 97}, stats, 16);
    const auto s = stats.snapshot();

    CHECK(s.lines_seen == archive.lines.size());
    CHECK(s.lines_malformed == archive.garbage);
    CHECK(s.messages_decoded == archive.position_lines + archive.statics + archive.unsupported);
    CHECK(s.unsupported == archive.unsupported);
    CHECK(s.invalid == 0);
    CHECK(s.duplicates == archive.position_lines - archive.unique_positions.size());
    CHECK(s.messages_stored == s.messages_decoded - s.unsupported - s.duplicates - s.invalid);
    CHECK(s.messages_stored == archive.unique_positions.size() + archive.statics);
    CHECK(stored_rows(handle) == archive.unique_positions.size());
    CHECK(s.batches == (s.messages_decoded + 96) / 97);
    CHECK(s.producer_waits > 0);
}

TEST_CASE("pipeline: the flush interval bounds latency") {
    auto db = aiskit::testing::temp_path("flush.db");
    auto handle = store::StorageHandle::open(db);
    auto reader = store::StorageHandle::open(db, store::BackendKind::Sqlite, store::OpenMode::ReadOnly);
    StreamStats stats;
    LineQueue q(100);
    std::jthread consumer(
        [&] { run_pipeline(q, handle, {.batch_size = 1000, .flush_interval = std::chrono::milliseconds(50)}, stats); });
    for (int i = 0; i < 5; ++i) q.push(tagged(aiskit::testing::position_msg(316000002, kT0 + i * 10, -63.5, 44.6 + i * 1e-3)));
    const auto deadline = Clock::now() + std::chrono::seconds(5);
    while (stats.messages_stored < 5 && Clock::now() < deadline) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    CHECK(stats.messages_stored == 5);
    CHECK(stored_rows(reader) == 5);
    q.close();
    consumer.join();
    CHECK(stats.batches == 1);
}

TEST_CASE("backoff: exponential, capped and jittered") {
    BackoffPolicy p{std::chrono::milliseconds(100), std::chrono::milliseconds(3000), 0.5};
    std::mt19937_64 rng(93);
    for (unsigned a = 0; a < 40; ++a) {
        const double full = std::min(3000.0, 100.0 * std::pow(2.0, a));
        for (int k = 0; k < 50; ++k) {
            const auto d = p.delay(a, rng).count();
            CHECK(d >= static_cast<long>(full * 0.5) - 1);
            CHECK(d <= static_cast<long>(full));
        }
    }
}

namespace {

/// Listening socket on 127.0.0.1 with an ephemeral port.
struct LocalServer {
    int fd = -1;
    std::uint16_t port = 0;

    LocalServer() {
        fd = ::socket(AF_INET, SOCK_STREAM, 0);
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
        REQUIRE(::listen(fd, 4) == 0);
        socklen_t len = sizeof addr;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
        port = ntohs(addr.sin_port);
    }
    ~LocalServer() { ::close(fd); }

    void serve_once(const std::vector<std::string>& chunks) const {
        const int c = ::accept(fd, nullptr, nullptr);
        for (const auto& chunk : chunks) {
            ::send(c, chunk.data(), chunk.size(), 0);
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        ::close(c);
    }
};

}  // namespace

TEST_CASE("tcp: lines survive chunking and a reconnect") {
    LocalServer server;
    std::jthread serve([&] {
        server.serve_once({"!AIVDM,one", "\r\n!AIVDM,two\n", "\n!AIVDM,thr", "ee\n"});
        server.serve_once({"!AIVDM,four\n!AIVDM,five\n"});
    });
    std::vector<std::string> got;
    StreamStats stats;
    std::stop_source stop;
    BackoffPolicy fast{std::chrono::milliseconds(10), std::chrono::milliseconds(40), 0.5};
    connect_lines("127.0.0.1", server.port, fast, [&](std::string l) {
        got.push_back(std::move(l));
        return got.size() < 5;
    }, stats, stop.get_token());
    CHECK(got == std::vector<std::string>{"!AIVDM,one", "!AIVDM,two", "!AIVDM,three", "!AIVDM,four", "!AIVDM,five"});
    CHECK(stats.connect_failures >= 1);  // the first session ended
}

TEST_CASE("tcp: refused connections are counted until stopped") {
    std::uint16_t port;
    {
        LocalServer closed;
        port = closed.port;
    }
    StreamStats stats;
    std::stop_source stop;
    std::jthread stopper([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(150));
        stop.request_stop();
    });
    const auto t = Clock::now();
    connect_lines("127.0.0.1", port, {std::chrono::milliseconds(10), std::chrono::milliseconds(20), 0.5},
                  [](std::string) { return true; }, stats, stop.get_token());
    CHECK(seconds_since(t) < 2.0);
    CHECK(stats.connect_failures >= 2);
}
