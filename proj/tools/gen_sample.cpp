// Writes the bundled sample data set: a 30-hour NM4 archive of synthetic
// traffic off Halifax, a zones file, a depth grid and a port list.
//
//   gen_sample <output-dir>
//
// Output is a pure function of the fixed seed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "aiskit/decoder.hpp"
#include "aiskit/export.hpp"
#include "aiskit/raster.hpp"

using namespace aiskit;

namespace {

constexpr std::int64_t kStart = 1685577600;  // 2023-06-01T00:00:00Z
constexpr std::int64_t kSpan = 30 * 3600;
constexpr double kPi = 3.14159265358979323846;

struct Vessel {
    std::uint32_t mmsi;
    bool class_b;
    int ship_type;
    std::string name;
    double lon, lat, course, knots;
    int interval;  // seconds between reports
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void emit(const ais::DecodedMessage& m, const std::string& station) {
        ais::EncodeOptions opt;
        opt.channel = m.mmsi % 2 ? 'A' : 'B';
        opt.sequence_id = seq_++ % 10;
        for (const auto& s : ais::encode_message(m, opt)) lines_.push_back({m.timestamp, ais::with_tag_block(s, m.timestamp, station)});
    }
    void raw(std::int64_t t, std::string line) { lines_.push_back({t, std::move(line)}); }

    /// Receiver order: by time, stable for equal times.
    void flush() {
        std::stable_sort(lines_.begin(), lines_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [t, l] : lines_) out_ << l << "\r\n";
    }
    std::size_t size() const { return lines_.size(); }

private:
    std::ostream& out_;
    std::vector<std::pair<std::int64_t, std::string>> lines_;
    int seq_ = 0;
};

double quantize(double deg) { return std::round(deg * 600000.0) / 600000.0; }

ais::DecodedMessage position(const Vessel& v, std::int64_t t) {
    ais::DecodedMessage m;
    m.mmsi = v.mmsi;
    m.timestamp = t;
    const double sog = std::round(v.knots * 10) / 10;
    const double cog = std::fmod(std::round(v.course * 10), 3600.0) / 10;
    const int heading = static_cast<int>(std::lround(v.course)) % 360;
    if (v.class_b) {
        m.message_type = 18;
        m.body = ais::PositionReportB{quantize(v.lon), quantize(v.lat), sog, cog, heading, std::nullopt};
    } else {
        m.message_type = 1;
        m.body = ais::PositionReportA{quantize(v.lon), quantize(v.lat), sog, cog, heading, 0};
    }
    return m;
}

std::vector<ais::DecodedMessage> statics(const Vessel& v, std::int64_t t, std::mt19937_64& rng) {
    std::vector<ais::DecodedMessage> out;
    ais::DecodedMessage m;
    m.mmsi = v.mmsi;
    m.timestamp = t;
    if (v.class_b) {
        m.message_type = 24;
        ais::StaticDataReport a;
        a.part = 0;
        a.ship_name = v.name;
        m.body = a;
        out.push_back(m);
        ais::StaticDataReport b;
        b.part = 1;
        b.ship_type = v.ship_type;
        b.callsign = "VB" + std::to_string(v.mmsi % 10000);
        b.dims = {5, 4, 2, 2};
        m.body = b;
        m.timestamp = t + 6;
        out.push_back(m);
    } else {
        m.message_type = 5;
        ais::StaticVoyage s;
        s.imo = 9000000 + v.mmsi % 999999;
        s.callsign = "VA" + std::to_string(v.mmsi % 10000);
        s.ship_name = v.name;
        s.ship_type = v.ship_type;
        s.dims = {std::uniform_int_distribution<int>(40, 200)(rng), 30, 10, 12};
        s.epfd = 1;
        s.eta = {6, 2, 12, 0};
        s.draught = std::uniform_int_distribution<int>(40, 120)(rng) / 10.0;
        s.destination = "HALIFAX";
        m.body = s;
        out.push_back(m);
    }
    return out;
}

void advance(Vessel& v, double seconds, std::mt19937_64& rng) {
    const double meters = v.knots * 0.514444 * seconds;
    const double c = v.course * kPi / 180;
    v.lat += meters * std::cos(c) / 111195.0;
    v.lon += meters * std::sin(c) / (111195.0 * std::cos(v.lat * kPi / 180));
    v.course = std::fmod(v.course + std::normal_distribution<double>(0, 3)(rng) + 360.0, 360.0);
    // keep traffic inside the area by turning back at its edges
    if (v.lon < -64.4 || v.lon > -62.4 || v.lat < 43.7 || v.lat > 44.8) v.course = std::fmod(v.course + 180, 360);
}

void write_archive(const std::filesystem::path& path) {
    std::mt19937_64 rng(20230601);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    const int types[] = {70, 71, 80, 30, 60, 52, 37, 36, 79, 84};
    const char* names[] = {"ATLANTIC", "NORTHERN", "SCOTIA", "HARBOUR", "BEDFORD", "SABLE", "CHEBUCTO", "FUNDY"};

    std::vector<Vessel> fleet;
    for (int i = 0; i < 30; ++i) {
        Vessel v;
        v.mmsi = 316001000 + static_cast<std::uint32_t>(i) * 37;
        v.class_b = i % 5 == 4;
        v.ship_type = types[i % 10];
        v.name = std::string(names[i % 8]) + " " + std::to_string(i + 1);
        v.lon = uni(-64.1, -62.9);
        v.lat = uni(43.9, 44.6);
        v.course = uni(0, 360);
        v.knots = v.ship_type == 30 ? uni(2, 7) : uni(6, 16);
        v.interval = v.class_b ? 180 : 120 + 30 * (i % 4);
        fleet.push_back(v);
    }

    std::ofstream out(path, std::ios::binary);
    Writer w(out);
    const char* stations[] = {"HFX1", "HFX2"};
    int k = 0;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        Vessel v = fleet[i];
        const bool goes_dark = i % 10 == 3;  // silent for 25 h, then back
        std::int64_t t = kStart + static_cast<std::int64_t>(uni(0, 600));
        std::int64_t next_static = t;
        while (t < kStart + kSpan) {
            if (goes_dark && t > kStart + 3 * 3600 && t < kStart + 28 * 3600) {
                advance(v, static_cast<double>(kStart + 28 * 3600 - t), rng);
                t = kStart + 28 * 3600;
                continue;
            }
            const auto msg = position(v, t);
            w.emit(msg, stations[k % 2]);
            ++k;
            if (k % 23 == 0) w.emit(msg, stations[(k + 1) % 2]);  // heard by both stations
            if (k % 211 == 0) {  // receiver glitch: a far-off position
                Vessel ghost = v;
                ghost.lat += 2.5;
                ghost.lon -= 1.5;
                w.emit(position(ghost, t + 1), stations[0]);
            }
            if (k % 307 == 0) {  // position not available
                auto na = msg;
                std::visit([](auto& b) {
                    if constexpr (requires { b.lon; }) b.lon.reset();
                }, na.body);
                na.timestamp = t + 2;
                w.emit(na, stations[1]);
            }
            if (t >= next_static) {
                for (const auto& s : statics(v, t + 3, rng)) w.emit(s, stations[0]);
                next_static = t + 3600;
            }
            const int dt = v.interval + static_cast<int>(uni(-10, 10));
            advance(v, dt, rng);
            t += dt;
        }
    }

    // base station reports and other unsupported types
    for (std::int64_t t = kStart; t < kStart + kSpan; t += 600) {
        ais::DecodedMessage m;
        m.message_type = 4;
        m.mmsi = 3160001;
        m.timestamp = t;
        m.body = ais::Unsupported{};
        w.emit(m, stations[0]);
    }
    // line noise
    for (int i = 0; i < 40; ++i) {
        const std::int64_t t = kStart + static_cast<std::int64_t>(uni(0, kSpan));
        std::string line;
        switch (i % 4) {
            case 0: line = ais::with_tag_block("!AIVDM,1,1,,A,15M67FC000G?ufbE`FepT@3n00Sa,0*00", t); break;
            case 1: line = ais::with_tag_block("!AIVDM,1,1,,B,15M67FC000G?uf", t); break;
            case 2: line = "$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,*47"; break;
            default: line = "\\c:" + std::to_string(t) + "*00\\!AIVDM,1,1,,A,13u?etPv2;0n:dDPwUM1U1Cb069D,0*24"; break;
        }
        w.raw(t, line);
    }
    w.flush();
    std::cout << path.string() << ": " << w.size() << " lines\n";
}

void write_zones(const std::filesystem::path& path) {
    std::ofstream out(path);
    auto feature = [](const char* name, double x0, double y0, double x1, double y1) {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      R"({"type":"Feature","properties":{"name":"%s"},"geometry":{"type":"Polygon","coordinates":[[[%.4f,%.4f],[%.4f,%.4f],[%.4f,%.4f],[%.4f,%.4f],[%.4f,%.4f]]]}})",
                      name, x0, y0, x1, y0, x1, y1, x0, y1, x0, y0);
        return std::string(buf);
    };
    out << R"({"type":"FeatureCollection","features":[)" << '\n'
        << feature("Harbour Approaches", -63.70, 44.40, -63.40, 44.70) << ",\n"
        << feature("Western Shelf", -64.40, 43.70, -63.70, 44.80) << ",\n"
        << feature("Eastern Shelf", -63.40, 43.70, -62.40, 44.80) << "\n]}\n";
}

void write_depth(const std::filesystem::path& path) {
    raster::RasterGrid g;
    g.ncols = 84;
    g.nrows = 48;
    g.x_origin = -64.5;
    g.y_origin = 43.6;
    g.cell_size = 0.025;
    g.nodata = -9999;
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) {
            const auto [x, y] = g.center(r, c);
            // shelf deepening offshore, with a shallow bank
            const double offshore = (44.7 - y) * 180 + std::fabs(x + 63.55) * 40;
            const double bank = 60 * std::exp(-(std::pow((x + 63.0) / 0.15, 2) + std::pow((y - 44.0) / 0.1, 2)));
            g.values.push_back(std::round(-(20 + offshore - bank) * 10) / 10);
        }
    }
    raster::write_ascii_grid(path, g);
}

void write_ports(const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "name,lon,lat\n"
        << "Halifax,-63.5752,44.6488\n"
        << "Dartmouth,-63.5714,44.6713\n"
        << "Sambro,-63.6056,44.4740\n"
        << "Sheet Harbour,-62.5397,44.9260\n"
        << "Lunenburg,-64.3095,44.3770\n"
        << "Peggys Cove,-63.9170,44.4924\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_sample <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    write_archive(dir / "sample.nm4");
    write_zones(dir / "zones.geojson");
    write_depth(dir / "depth.asc");
    write_ports(dir / "ports.csv");
    return 0;
}
