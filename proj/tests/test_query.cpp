#include <doctest.h>

#include <algorithm>
#include <map>

#include "aiskit/error.hpp"
#include "aiskit/query.hpp"
#include "support/generators.hpp"

using namespace aiskit;
using namespace aiskit::query;
using aiskit::testing::position_msg;
using aiskit::testing::Rng;
using aiskit::testing::uniform_int;

namespace {

constexpr std::int64_t kJan = 1672531200;

using Key = std::tuple<std::uint32_t, std::int64_t, double, double>;

Key key_of(const DynamicRow& r) { return {r.mmsi, r.time, r.lon, r.lat}; }

bool oracle_match(const DynamicRow& r, std::int64_t start, std::int64_t end, const std::optional<BBox>& box,
                  const std::optional<std::set<std::uint32_t>>& ids, Validity v) {
    if (r.time < start || r.time > end) return false;
    if (box) {
        if (r.lat < box->ymin || r.lat > box->ymax) return false;
        const bool in_lon = box->xmin <= box->xmax ? (r.lon >= box->xmin && r.lon <= box->xmax)
                                                   : (r.lon >= box->xmin || r.lon <= box->xmax);
        if (!in_lon) return false;
    }
    if (ids && !ids->contains(r.mmsi)) return false;
    const bool valid = r.mmsi >= 201000000 && r.mmsi <= 775999999;
    if (v == Validity::ValidOnly && !valid) return false;
    if (v == Validity::InvalidOnly && valid) return false;
    return true;
}

}  // namespace

TEST_CASE("valid_mmsi") {
    CHECK(valid_mmsi(316001234));
    CHECK_FALSE(valid_mmsi(0));
    CHECK_FALSE(valid_mmsi(999999999));
    CHECK(valid_mmsi(201000000));
    CHECK(valid_mmsi(775999999));
    CHECK_FALSE(valid_mmsi(200999999));
    CHECK_FALSE(valid_mmsi(776000000));
}

TEST_CASE("time text") {
    CHECK(epoch_to_text(0) == "1970-01-01T00:00:00Z");
    CHECK(text_to_epoch("1970-01-01T00:00:01Z") == 1);
    CHECK(text_to_epoch("2023-01-01") == kJan);
    CHECK(text_to_epoch("2023-01-01 00:01") == kJan + 60);
    CHECK(text_to_epoch("1672531200") == kJan);
    CHECK_THROWS_AS(text_to_epoch("yesterday"), FormatError);
    CHECK_THROWS_AS(text_to_epoch("2023-13-01"), FormatError);
    Rng rng(31);
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t t = static_cast<std::int64_t>(rng() % 4102444800ULL);
        CHECK(text_to_epoch(epoch_to_text(t)) == t);
    }
}

TEST_CASE("spec validation") {
    QuerySpec s;
    s.start = 10;
    s.end = 10;
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s.end = 11;
    CHECK_NOTHROW(s.validate());
    s.bbox = BBox{0, 5, 1, 4};
    CHECK_THROWS_AS(s.validate(), ContractViolation);
    s.bbox = BBox{170, -10, -170, 10};
    CHECK_NOTHROW(s.validate());
    s.bbox = BBox{0, 0, 200, 1};
    CHECK_THROWS_AS(s.validate(), ContractViolation);
}

TEST_CASE("antimeridian box") {
    BBox b{170, -10, -170, 10};
    CHECK(b.contains(175, 0));
    CHECK(b.contains(-175, 0));
    CHECK_FALSE(b.contains(0, 0));
    CHECK(b.contains(170, 10));  // closed edges
}

TEST_CASE("run_query matches the linear-scan oracle") {
    Rng rng(41);
    auto h = store::StorageHandle::open(aiskit::testing::temp_path("q.db"));
    std::vector<ais::DecodedMessage> batch;
    std::vector<std::uint32_t> ids;
    for (int i = 0; i < 40; ++i) {
        ids.push_back(i % 4 == 0 ? static_cast<std::uint32_t>(uniform_int(rng, 1, 200000000))
                                 : static_cast<std::uint32_t>(uniform_int(rng, 201000000, 775999999)));
    }
    for (int i = 0; i < 10000; ++i) {
        batch.push_back(position_msg(ids[static_cast<std::size_t>(uniform_int(rng, 0, 39))],
                                     kJan + uniform_int(rng, 0, 70 * 86400),
                                     uniform_int(rng, -18000, 18000) / 100.0, uniform_int(rng, -9000, 9000) / 100.0));
    }
    h.insert_messages(batch);
    const std::vector<int> all_months = h.list_partitions();
    const auto everything = h.scan_all(all_months);

    QuerySpec world;
    world.start = 0;
    world.end = kJan * 2;
    CHECK(collect(run_query(h, world)).size() == everything.size());

    for (int trial = 0; trial < 30; ++trial) {
        QuerySpec s;
        s.start = kJan + uniform_int(rng, -86400, 60 * 86400);
        s.end = s.start + uniform_int(rng, 1, 40 * 86400);
        if (uniform_int(rng, 0, 3) > 0) {
            double x0 = uniform_int(rng, -180, 180), x1 = uniform_int(rng, -180, 180);
            double y0 = uniform_int(rng, -90, 90), y1 = uniform_int(rng, -90, 90);
            s.bbox = BBox{x0, std::min(y0, y1), x1, std::max(y0, y1)};
        }
        if (uniform_int(rng, 0, 2) == 0) {
            s.mmsis = std::set<std::uint32_t>{};
            for (int k = 0; k < 5; ++k) s.mmsis->insert(ids[static_cast<std::size_t>(uniform_int(rng, 0, 39))]);
        }
        s.validity = static_cast<Validity>(uniform_int(rng, 0, 2));

        std::multiset<Key> expected;
        for (const auto& r : everything) {
            if (oracle_match(r, s.start, s.end, s.bbox, s.mmsis, s.validity)) expected.insert(key_of(r));
        }
        const auto got = collect(run_query(h, s));
        std::multiset<Key> got_keys;
        for (const auto& r : got) got_keys.insert(key_of(r));
        CHECK(got_keys == expected);
        for (std::size_t i = 1; i < got.size(); ++i) {
            CHECK(std::pair(got[i - 1].mmsi, got[i - 1].time) <= std::pair(got[i].mmsi, got[i].time));
        }

        // adding a predicate never adds rows
        QuerySpec narrower = s;
        narrower.callbacks.push_back([](const DynamicRow& r) { return r.sog && *r.sog > 5; });
        CHECK(collect(run_query(h, narrower)).size() <= got.size());
    }
}

TEST_CASE("twenty hour window") {
    auto h = store::StorageHandle::open(aiskit::testing::temp_path("window.db"));
    std::vector<ais::DecodedMessage> batch;
    for (int i = 0; i < 48; ++i) batch.push_back(position_msg(316001234, kJan + i * 3600, 0, 0));
    h.insert_messages(batch);
    const std::int64_t now = kJan + 47 * 3600;
    QuerySpec s;
    s.start = now - 20 * 3600;
    s.end = now;
    auto rows = collect(run_query(h, s));
    CHECK(rows.size() == 21);
    for (const auto& r : rows) CHECK((r.time >= s.start && r.time <= s.end));
}

TEST_CASE("track_gen groups by mmsi and drops repeated timestamps") {
    std::vector<DynamicRow> rows{{1, 10, 0, 0}, {1, 10, 1, 1}, {1, 20, 0, 0}, {2, 5, 0, 0}, {2, 6, 0, 0}};
    auto tracks = track_gen(rows);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].size() == 2);
    CHECK(tracks[0].points[0].x == 0);
    CHECK(tracks[1].size() == 2);

    std::vector<DynamicRow> bad{{1, 20, 0, 0}, {1, 10, 0, 0}};
    CHECK_THROWS_AS(track_gen(bad), ContractViolation);
    std::vector<DynamicRow> bad_mmsi{{2, 1, 0, 0}, {1, 2, 0, 0}};
    CHECK_THROWS_AS(track_gen(bad_mmsi), ContractViolation);
    CHECK(track_gen({}).empty());
}

TEST_CASE("track_gen agrees with a dictionary grouping") {
    Rng rng(51);
    std::vector<DynamicRow> rows;
    std::map<std::uint32_t, std::set<std::int64_t>> oracle;
    for (int i = 0; i < 5000; ++i) {
        DynamicRow r;
        r.mmsi = static_cast<std::uint32_t>(uniform_int(rng, 1, 100));
        r.time = uniform_int(rng, 0, 2000);
        rows.push_back(r);
        oracle[r.mmsi].insert(r.time);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return std::pair(a.mmsi, a.time) < std::pair(b.mmsi, b.time); });
    auto tracks = track_gen(rows);
    CHECK(tracks.size() == oracle.size());
    for (const auto& t : tracks) {
        CHECK(t.size() == oracle[t.mmsi].size());
        for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.points[i - 1].t < t.points[i].t);
    }
}

TEST_CASE("metadata join uses the aggregate") {
    auto h = store::StorageHandle::open(aiskit::testing::temp_path("meta.db"));
    std::vector<ais::DecodedMessage> batch{position_msg(316001234, kJan, 0, 0),
                                           aiskit::testing::voyage_msg(316001234, kJan, "SHIP", 70)};
    h.insert_messages(batch);
    h.aggregate_statics(202301);
    auto tracks = track_gen(h.scan_all(h.list_partitions()));
    attach_metadata(h, tracks);
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].info);
    CHECK(tracks[0].info->ship_name == "SHIP");
    CHECK(tracks[0].info->ship_type == 70);
}
