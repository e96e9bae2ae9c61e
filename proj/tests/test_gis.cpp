#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>

#include "aiskit/error.hpp"
#include "aiskit/gis.hpp"
#include "support/generators.hpp"

using namespace aiskit;
using namespace aiskit::gis;
using aiskit::testing::haversine_oracle;
using aiskit::testing::Rng;
using aiskit::testing::uniform;
using aiskit::testing::uniform_int;

namespace {

ZonePolygon square(const std::string& name, double x0, double y0, double size) {
    return ZonePolygon(name, {{x0, y0}, {x0 + size, y0}, {x0 + size, y0 + size}, {x0, y0 + size}, {x0, y0}});
}

/// Winding number of a closed ring around p (nonzero means inside).
int winding(LonLat p, const std::vector<LonLat>& ring) {
    int wn = 0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const auto& a = ring[i];
        const auto& b = ring[i + 1];
        const double side = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
        if (a.lat <= p.lat) {
            if (b.lat > p.lat && side > 0) ++wn;
        } else if (b.lat <= p.lat && side < 0) {
            --wn;
        }
    }
    return wn;
}

/// Random convex polygon: sorted angles on an ellipse.
std::vector<LonLat> convex_ring(Rng& rng) {
    const double cx = uniform(rng, -50, 50), cy = uniform(rng, -50, 50);
    const double rx = uniform(rng, 0.1, 5), ry = uniform(rng, 0.1, 5);
    const int n = uniform_int(rng, 3, 12);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(uniform(rng, 0, 2 * aiskit::testing::kPi));
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    std::vector<LonLat> ring;
    for (double a : angles) ring.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    ring.push_back(ring.front());
    return ring;
}

TrackPoint at(double x, double y) {
    TrackPoint p;
    p.x = x;
    p.y = y;
    return p;
}

/// Azimuth from 3-D unit vectors: project b onto the local north/east frame at a.
double azimuth_oracle(LonLat a, LonLat b) {
    const double d = aiskit::testing::kPi / 180;
    auto vec = [&](LonLat p) {
        return std::array<double, 3>{std::cos(p.lat * d) * std::cos(p.lon * d), std::cos(p.lat * d) * std::sin(p.lon * d),
                                     std::sin(p.lat * d)};
    };
    const auto va = vec(a), vb = vec(b);
    const std::array<double, 3> east{-std::sin(a.lon * d), std::cos(a.lon * d), 0};
    const std::array<double, 3> north{-std::sin(a.lat * d) * std::cos(a.lon * d), -std::sin(a.lat * d) * std::sin(a.lon * d),
                                      std::cos(a.lat * d)};
    std::array<double, 3> diff{vb[0] - va[0], vb[1] - va[1], vb[2] - va[2]};
    const double e = diff[0] * east[0] + diff[1] * east[1] + diff[2] * east[2];
    const double n = diff[0] * north[0] + diff[1] * north[1] + diff[2] * north[2];
    double deg = std::atan2(e, n) / d;
    return deg < 0 ? deg + 360 : deg;
}

}  // namespace

TEST_CASE("haversine: identity, antipode, symmetry, triangle inequality") {
    CHECK(haversine({12.5, -7.25}, {12.5, -7.25}) == 0);
    CHECK(std::fabs(haversine({0, 0}, {180, 0}) - aiskit::testing::kPi * 6371000.0) < 1.0);
    Rng rng(71);
    for (int i = 0; i < 10000; ++i) {
        LonLat a{uniform(rng, -180, 180), uniform(rng, -90, 90)};
        LonLat b{uniform(rng, -180, 180), uniform(rng, -90, 90)};
        LonLat c{uniform(rng, -180, 180), uniform(rng, -90, 90)};
        const double ab = haversine(a, b);
        CHECK(ab >= 0);
        CHECK(ab == haversine(b, a));
        CHECK(ab <= haversine(a, c) + haversine(c, b) + 1e-6);
        CHECK(ab == doctest::Approx(haversine_oracle(a.lon, a.lat, b.lon, b.lat)).epsilon(1e-9));
    }
}

TEST_CASE("bearing") {
    CHECK(bearing({10, 10}, {10, 11}) == doctest::Approx(0));
    CHECK(bearing({0, 0}, {1, 0}) == doctest::Approx(90));
    CHECK(bearing({0, 0}, {0, -1}) == doctest::Approx(180));
    CHECK(bearing({0, 0}, {-1, 0}) == doctest::Approx(270));
    Rng rng(72);
    for (int i = 0; i < 5000; ++i) {
        LonLat a{uniform(rng, -180, 180), uniform(rng, -80, 80)};
        LonLat b{a.lon + uniform(rng, -20, 20), std::clamp(a.lat + uniform(rng, -20, 20), -85.0, 85.0)};
        const double got = bearing(a, b);
        CHECK(got >= 0);
        CHECK(got < 360);
        double diff = std::fabs(got - azimuth_oracle(a, b));
        diff = std::min(diff, 360 - diff);
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("normalize_lon") {
    CHECK(normalize_lon(180) == 180);
    CHECK(normalize_lon(-180) == 180);
    CHECK(normalize_lon(181) == doctest::Approx(-179));
    CHECK(normalize_lon(-541) == doctest::Approx(179));
    CHECK(normalize_lon(12.5) == 12.5);
}

TEST_CASE("point_in_polygon: square cases and boundary rule") {
    auto sq = square("unit", 0, 0, 1);
    CHECK(point_in_polygon({0.5, 0.5}, sq));
    CHECK_FALSE(point_in_polygon({2, 2}, sq));
    CHECK_FALSE(point_in_polygon({-0.1, 0.5}, sq));
    CHECK(point_in_polygon({0, 0.5}, sq));
    CHECK(point_in_polygon({1, 1}, sq));
    CHECK(point_in_polygon({0.5, 0}, sq));
}

TEST_CASE("point_in_polygon: concave ring") {
    ZonePolygon u("u", {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}, {0, 0}});
    CHECK(point_in_polygon({0.5, 2}, u));
    CHECK(point_in_polygon({2.5, 2}, u));
    CHECK_FALSE(point_in_polygon({1.5, 2}, u));
    CHECK(point_in_polygon({1.5, 0.5}, u));
}

TEST_CASE("point_in_polygon: agrees with the winding number on convex polygons") {
    Rng rng(73);
    int inside = 0;
    for (int i = 0; i < 10000; ++i) {
        auto ring = convex_ring(rng);
        if (ring.size() < 4) continue;
        ZonePolygon z("c", ring);
        const auto& b = z.bbox();
        LonLat p{uniform(rng, b.xmin - 1, b.xmax + 1), uniform(rng, b.ymin - 1, b.ymax + 1)};
        const bool expected = winding(p, ring) != 0;
        CHECK(point_in_polygon(p, z) == expected);
        inside += expected;
        // small translation of point and polygon together
        std::vector<LonLat> moved;
        for (auto v : ring) moved.push_back({v.lon + 0.125, v.lat - 0.25});
        CHECK(point_in_polygon({p.lon + 0.125, p.lat - 0.25}, ZonePolygon("m", moved)) == expected);
    }
    CHECK(inside > 1000);
}

TEST_CASE("zone validation") {
    CHECK_THROWS_AS(ZonePolygon("few", {{0, 0}, {1, 0}, {0, 0}}), FormatError);
    CHECK_THROWS_AS(ZonePolygon("open", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}), FormatError);
    CHECK_THROWS_AS(ZonePolygon("bowtie", {{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}), FormatError);
    CHECK_NOTHROW(ZonePolygon("tri", {{0, 0}, {1, 0}, {0, 1}, {0, 0}}));
}

TEST_CASE("zone_of uses declaration order") {
    std::vector<ZonePolygon> zones{square("A", 0, 0, 2), square("B", 1, 1, 2)};
    CHECK(zone_of({1.5, 1.5}, zones) == "A");
    CHECK(zone_of({2.5, 2.5}, zones) == "B");
    CHECK(zone_of({5, 5}, zones) == kOutside);
}

TEST_CASE("parse_zones") {
    const std::string doc = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"name":"harbour"},
       "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})";
    auto zones = parse_zones(doc);
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].name() == "harbour");
    CHECK(zones[0].ring().size() == 5);
    CHECK_THROWS_AS(parse_zones("{"), FormatError);
    CHECK_THROWS_AS(parse_zones(R"({"type":"FeatureCollection","features":[{"properties":{},"geometry":{}}]})"),
                    FormatError);
    CHECK_THROWS_AS(parse_zones(R"({"type":"FeatureCollection","features":[{"properties":{"name":"p"},
        "geometry":{"type":"Point","coordinates":[0,0]}}]})"),
                    FormatError);
}

TEST_CASE("build_graph: hand-built fixtures") {
    std::vector<ZonePolygon> zones{square("A", 0, 0, 1), square("B", 1, 0, 1)};
    Track inside{1, {at(0.2, 0.5), at(0.4, 0.5), at(0.6, 0.5)}, std::nullopt};
    Track once{2, {at(0.5, 0.5), at(0.9, 0.5), at(1.5, 0.5)}, std::nullopt};
    Track back{3, {at(0.5, 0.5), at(1.5, 0.5), at(1.6, 0.5), at(0.5, 0.5)}, std::nullopt};

    std::vector<Track> t1{inside};
    auto g1 = build_graph(t1, zones);
    CHECK(g1.edges.empty());
    CHECK(g1.nodes == std::vector<std::string>{"A", "B", "outside"});

    std::vector<Track> t2{once};
    auto g2 = build_graph(t2, zones);
    REQUIRE(g2.edges.size() == 1);
    CHECK(g2.edges.at({"A", "B"}).transit_count == 1);

    std::vector<Track> t3{back, once};
    auto g3 = build_graph(t3, zones);
    CHECK(g3.edges.at({"A", "B"}).transit_count == 2);
    CHECK(g3.edges.at({"A", "B"}).vessel_count() == 2);
    CHECK(g3.edges.at({"B", "A"}).transit_count == 1);
    CHECK(g3.total_transits() == 3);

    Track out{4, {at(0.5, 0.5), at(5, 5), at(1.5, 0.5)}, std::nullopt};
    std::vector<Track> t4{out};
    auto g4 = build_graph(t4, zones);
    CHECK(g4.edges.at({"A", "outside"}).transit_count == 1);
    CHECK(g4.edges.at({"outside", "B"}).transit_count == 1);
    for (const auto& [key, e] : g4.edges) CHECK(key.first != key.second);
}

TEST_CASE("build_graph: edge totals match a direct transition scan") {
    Rng rng(74);
    std::vector<ZonePolygon> zones{square("west", 0, 0, 1), square("east", 1, 0, 1), square("north", 0, 1, 2)};
    std::vector<Track> tracks;
    for (int v = 0; v < 100; ++v) {
        Track t{static_cast<std::uint32_t>(v), {}, std::nullopt};
        const int n = uniform_int(rng, 1, 50);
        for (int i = 0; i < n; ++i) t.points.push_back(at(uniform(rng, -0.5, 2.5), uniform(rng, -0.5, 2.5)));
        tracks.push_back(t);
    }
    auto g = build_graph(tracks, zones);
    std::map<std::pair<std::string, std::string>, std::uint64_t> oracle;
    std::uint64_t total = 0;
    for (const auto& t : tracks) {
        std::string prev;
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            const auto& p = t.points[i];
            std::string z = "outside";
            if (p.y >= 0 && p.y <= 1 && p.x >= 0 && p.x <= 1) {
                z = "west";
            } else if (p.y >= 0 && p.y <= 1 && p.x >= 1 && p.x <= 2) {
                z = "east";
            } else if (p.y >= 1 && p.y <= 3 && p.x >= 0 && p.x <= 2) {
                z = "north";
            }
            if (i > 0 && z != prev) {
                ++oracle[{prev, z}];
                ++total;
            }
            prev = z;
        }
    }
    CHECK(g.total_transits() == total);
    for (const auto& [key, count] : oracle) CHECK(g.edges.at(key).transit_count == count);
    CHECK(g.edges.size() == oracle.size());
}

TEST_CASE("features: loading") {
    auto path = aiskit::testing::temp_path("ports.csv");
    std::ofstream(path) << "name,lon,lat\nHalifax,-63.57,44.65\n\"Saint John\",-66.06,45.27\n";
    auto set = load_features(path, "ports");
    CHECK(set.label == "ports");
    REQUIRE(set.points.size() == 2);
    CHECK(set.names[1] == "Saint John");
    CHECK(set.points[1] == LonLat{-66.06, 45.27});

    std::ofstream(path) << "name,lon,lat\n";
    CHECK_THROWS_AS(load_features(path), FormatError);
    std::ofstream(path) << "x,abc,1\n";
    CHECK_THROWS_AS(load_features(path), FormatError);
}

TEST_CASE("nearest: trivial cases") {
    FeaturePointSet set{"s", {"a", "b"}, {{1, 1}, {5, 5}}};
    auto n = distance_to_nearest({1, 1}, set);
    CHECK(n.meters == 0);
    CHECK(n.index == 0);
    FeaturePointSet one{"s", {"a"}, {{3, 4}}};
    CHECK(distance_to_nearest({0, 0}, one).meters == haversine({0, 0}, {3, 4}));
    CHECK(FeatureIndex(one).nearest({0, 0}).meters == haversine({0, 0}, {3, 4}));
    CHECK_THROWS_AS(distance_to_nearest({0, 0}, FeaturePointSet{}), ContractViolation);
}

TEST_CASE("nearest: index agrees with the linear scan") {
    Rng rng(75);
    FeaturePointSet set;
    for (int i = 0; i < 3000; ++i) {
        if (i % 10 == 0 && i > 0) {
            set.points.push_back(set.points[static_cast<std::size_t>(uniform_int(rng, 0, i - 1))]);  // exact duplicates
        } else if (i % 3 == 0) {
            set.points.push_back({uniform(rng, -180, 180), uniform(rng, -90, 90)});
        } else {
            set.points.push_back({uniform(rng, -70, -55), uniform(rng, 40, 50)});
        }
        set.names.push_back(std::to_string(i));
    }
    for (double cell : {0.25, 1.0, 10.0}) {
        FeatureIndex idx(set, cell);
        for (int q = 0; q < 1000; ++q) {
            LonLat p = q % 2 ? LonLat{uniform(rng, -180, 180), uniform(rng, -90, 90)}
                             : LonLat{uniform(rng, -72, -53), uniform(rng, 38, 52)};
            if (q % 50 == 0) p = set.points[static_cast<std::size_t>(q)];
            CHECK(idx.nearest(p) == distance_to_nearest(p, set));
        }
    }
}
