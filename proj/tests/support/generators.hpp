#pragma once

// Random fixtures and independent oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it checks.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "aiskit/decoder.hpp"

namespace aiskit::testing {

using Rng = std::mt19937_64;

inline constexpr double kEarthRadius = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Byte-loop XOR oracle.
inline std::uint8_t xor_oracle(const std::string& body) {
    unsigned x = 0;
    for (std::size_t i = 0; i < body.size(); ++i) x = x ^ static_cast<unsigned char>(body[i]);
    return static_cast<std::uint8_t>(x);
}

inline std::string hex_byte(std::uint8_t v) {
    static const char* digits = "0123456789ABCDEF";
    return {digits[v >> 4], digits[v & 15]};
}

/// Text of AIS six-bit characters without trailing '@' or ' '.
inline std::string random_ais_text(Rng& rng, int max_len) {
    static const std::string alphabet =
        "@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_ !\"#$%&'()*+,-./0123456789:;<=>?";
    const int len = uniform_int(rng, 0, max_len);
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(alphabet[static_cast<std::size_t>(uniform_int(rng, 0, 63))]);
    while (!s.empty() && (s.back() == '@' || s.back() == ' ')) s.pop_back();
    return s;
}

template <typename T>
std::optional<T> maybe(Rng& rng, T value) {
    if (uniform_int(rng, 0, 9) == 0) return std::nullopt;
    return value;
}

inline std::optional<double> random_lon(Rng& rng) {
    // raw -108000000 decodes as +180, so keep the generator in (-180, 180]
    return maybe(rng, uniform_int(rng, -107'999'999, 108'000'000) / 600000.0);
}
inline std::optional<double> random_lat(Rng& rng) {
    return maybe(rng, uniform_int(rng, -54'000'000, 54'000'000) / 600000.0);
}
inline std::optional<double> random_sog(Rng& rng) { return maybe(rng, uniform_int(rng, 0, 1022) / 10.0); }
inline std::optional<double> random_cog(Rng& rng) { return maybe(rng, uniform_int(rng, 0, 3599) / 10.0); }
inline std::optional<int> random_heading(Rng& rng) { return maybe(rng, uniform_int(rng, 0, 359)); }

inline ais::Dimensions random_dims(Rng& rng) {
    return {uniform_int(rng, 0, 511), uniform_int(rng, 0, 511), uniform_int(rng, 0, 63),
            uniform_int(rng, 0, 63)};
}

/// Random message of `type` with every field inside its representable range.
inline ais::DecodedMessage random_message(Rng& rng, int type) {
    ais::DecodedMessage m;
    m.message_type = type;
    m.repeat = uniform_int(rng, 0, 3);
    m.mmsi = static_cast<std::uint32_t>(uniform_int(rng, 0, 999'999'999));
    switch (type) {
        case 1:
        case 2:
        case 3:
            m.body = ais::PositionReportA{random_lon(rng), random_lat(rng), random_sog(rng),
                                          random_cog(rng), random_heading(rng), uniform_int(rng, 0, 15)};
            break;
        case 18:
        case 19: {
            ais::PositionReportB b{random_lon(rng), random_lat(rng), random_sog(rng),
                                   random_cog(rng), random_heading(rng), std::nullopt};
            if (type == 19) {
                b.extension = ais::ClassBExtension{random_ais_text(rng, 20), uniform_int(rng, 0, 255),
                                                   random_dims(rng)};
            }
            m.body = b;
            break;
        }
        case 5: {
            ais::StaticVoyage s;
            s.ais_version = uniform_int(rng, 0, 3);
            s.imo = static_cast<std::uint32_t>(uniform_int(rng, 0, (1 << 30) - 1));
            s.callsign = random_ais_text(rng, 7);
            s.ship_name = random_ais_text(rng, 20);
            s.ship_type = uniform_int(rng, 0, 255);
            s.dims = random_dims(rng);
            s.epfd = uniform_int(rng, 0, 15);
            s.eta = {uniform_int(rng, 0, 12), uniform_int(rng, 0, 31), uniform_int(rng, 0, 24),
                     uniform_int(rng, 0, 60)};
            s.draught = uniform_int(rng, 0, 255) / 10.0;
            s.destination = random_ais_text(rng, 20);
            s.dte = uniform_int(rng, 0, 1) == 1;
            m.body = s;
            break;
        }
        case 24: {
            ais::StaticDataReport s;
            s.part = uniform_int(rng, 0, 1);
            if (s.part == 0) {
                s.ship_name = random_ais_text(rng, 20);
            } else {
                s.ship_type = uniform_int(rng, 0, 255);
                s.callsign = random_ais_text(rng, 7);
                s.dims = random_dims(rng);
            }
            m.body = s;
            break;
        }
        default:
            m.body = ais::Unsupported{};
            break;
    }
    return m;
}

/// Class A position report with every kinematic field set.
inline ais::DecodedMessage position_msg(std::uint32_t mmsi, std::int64_t t, double lon, double lat,
                                        double sog = 10.0, int type = 1) {
    ais::DecodedMessage m;
    m.message_type = type;
    m.mmsi = mmsi;
    m.timestamp = t;
    m.source = "stn";
    if (type == 18) {
        m.body = ais::PositionReportB{lon, lat, sog, 90.0, 90, std::nullopt};
    } else {
        m.body = ais::PositionReportA{lon, lat, sog, 90.0, 90, 0};
    }
    return m;
}

/// Type 5 report carrying a name and ship type.
inline ais::DecodedMessage voyage_msg(std::uint32_t mmsi, std::int64_t t, const std::string& name,
                                      int ship_type) {
    ais::DecodedMessage m;
    m.message_type = 5;
    m.mmsi = mmsi;
    m.timestamp = t;
    ais::StaticVoyage s;
    s.ship_name = name;
    s.ship_type = ship_type;
    s.callsign = "CALL";
    s.dims = {10, 20, 3, 4};
    s.draught = 5.5;
    m.body = s;
    return m;
}

/// Haversine written out independently of the library.
inline double haversine_oracle(double lon1, double lat1, double lon2, double lat2) {
    const double d2r = kPi / 180.0;
    const double a = std::pow(std::sin((lat2 - lat1) * d2r / 2), 2) +
                     std::cos(lat1 * d2r) * std::cos(lat2 * d2r) *
                         std::pow(std::sin((lon2 - lon1) * d2r / 2), 2);
    return 2 * kEarthRadius * std::atan2(std::sqrt(a), std::sqrt(std::max(0.0, 1 - a)));
}

/// Fresh path inside the system temp directory.
inline std::filesystem::path temp_path(const std::string& stem) {
    static std::uint64_t counter = 0;
    auto dir = std::filesystem::temp_directory_path() / "aiskit-tests";
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(stem);
    auto p = dir / (base.stem().string() + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) +
                    base.extension().string());
    std::filesystem::remove(p);
    return p;
}

}  // namespace aiskit::testing
