#include <cmath>
#include <string>

#include "aiskit/decoder.hpp"

namespace aiskit::ais {
namespace {

using Kind = DecodeError::Kind;

constexpr std::int64_t kLonNotAvailable = 0x6791AC0;  // 181 degrees
constexpr std::int64_t kLatNotAvailable = 0x3412140;  // 91 degrees
constexpr std::int64_t kLonLimit = 180 * 600000;
constexpr std::int64_t kLatLimit = 90 * 600000;
constexpr std::uint64_t kSogNotAvailable = 1023;
constexpr std::uint64_t kCogNotAvailable = 3600;
constexpr std::uint64_t kHeadingNotAvailable = 511;

void require_bits(const BitBuffer& bits, std::size_t needed, int type) {
    if (bits.size() < needed) {
        throw DecodeError(Kind::Truncated, "type " + std::to_string(type) + " needs " +
                                               std::to_string(needed) + " bits, got " +
                                               std::to_string(bits.size()));
    }
}

std::optional<double> decode_lon(std::int64_t raw) {
    if (raw == kLonNotAvailable || raw > kLonLimit || raw < -kLonLimit) return std::nullopt;
    if (raw == -kLonLimit) raw = kLonLimit;  // keep lon in (-180, 180]
    return static_cast<double>(raw) / 600000.0;
}

std::optional<double> decode_lat(std::int64_t raw) {
    if (raw > kLatLimit || raw < -kLatLimit) return std::nullopt;
    return static_cast<double>(raw) / 600000.0;
}

std::optional<double> decode_sog(std::uint64_t raw) {
    if (raw == kSogNotAvailable) return std::nullopt;
    return static_cast<double>(raw) / 10.0;
}

std::optional<double> decode_cog(std::uint64_t raw) {
    if (raw >= kCogNotAvailable) return std::nullopt;
    return static_cast<double>(raw) / 10.0;
}

std::optional<int> decode_heading(std::uint64_t raw) {
    if (raw >= 360) return std::nullopt;
    return static_cast<int>(raw);
}

// Reads the shared class B position block that starts at bit 46.
template <typename Report>
void read_class_b_position(const BitBuffer& b, Report& r) {
    r.sog = decode_sog(b.unsigned_field(46, 10));
    r.lon = decode_lon(b.signed_field(57, 28));
    r.lat = decode_lat(b.signed_field(85, 27));
    r.cog = decode_cog(b.unsigned_field(112, 12));
    r.heading = decode_heading(b.unsigned_field(124, 9));
}

Dimensions read_dims(const BitBuffer& b, std::size_t pos) {
    Dimensions d;
    d.bow = static_cast<int>(b.unsigned_field(pos, 9));
    d.stern = static_cast<int>(b.unsigned_field(pos + 9, 9));
    d.port = static_cast<int>(b.unsigned_field(pos + 18, 6));
    d.starboard = static_cast<int>(b.unsigned_field(pos + 24, 6));
    return d;
}

// -- encoding helpers --------------------------------------------------------

[[noreturn]] void out_of_range(const std::string& field) {
    throw DecodeError(Kind::OutOfRange, field + " is not representable");
}

void push_checked(BitBuffer& b, std::int64_t value, int nbits, std::int64_t lo, std::int64_t hi,
                  const char* field) {
    if (value < lo || value > hi) out_of_range(field);
    b.push(static_cast<std::uint64_t>(value), nbits);
}

void push_signed(BitBuffer& b, std::int64_t value, int nbits) {
    const std::uint64_t mask = (std::uint64_t{1} << nbits) - 1;
    b.push(static_cast<std::uint64_t>(value) & mask, nbits);
}

void push_text(BitBuffer& b, const std::string& text, int nchars, const char* field) {
    if (text.size() > static_cast<std::size_t>(nchars)) out_of_range(field);
    for (char c : text) {
        if (ascii_to_sixbit(c) < 0) out_of_range(field);
    }
    b.push_text(text, nchars);
}

void push_lon(BitBuffer& b, const std::optional<double>& lon) {
    if (!lon) return push_signed(b, kLonNotAvailable, 28);
    if (!(*lon >= -180.0 && *lon <= 180.0)) out_of_range("lon");
    push_signed(b, std::llround(*lon * 600000.0), 28);
}

void push_lat(BitBuffer& b, const std::optional<double>& lat) {
    if (!lat) return push_signed(b, kLatNotAvailable, 27);
    if (!(*lat >= -90.0 && *lat <= 90.0)) out_of_range("lat");
    push_signed(b, std::llround(*lat * 600000.0), 27);
}

void push_sog(BitBuffer& b, const std::optional<double>& sog) {
    if (!sog) return b.push(kSogNotAvailable, 10);
    push_checked(b, std::llround(*sog * 10.0), 10, 0, 1022, "sog");
}

void push_cog(BitBuffer& b, const std::optional<double>& cog) {
    if (!cog) return b.push(kCogNotAvailable, 12);
    push_checked(b, std::llround(*cog * 10.0), 12, 0, 3599, "cog");
}

void push_heading(BitBuffer& b, const std::optional<int>& heading) {
    if (!heading) return b.push(kHeadingNotAvailable, 9);
    push_checked(b, *heading, 9, 0, 359, "heading");
}

void push_dims(BitBuffer& b, const Dimensions& d) {
    push_checked(b, d.bow, 9, 0, 511, "dim_bow");
    push_checked(b, d.stern, 9, 0, 511, "dim_stern");
    push_checked(b, d.port, 6, 0, 63, "dim_port");
    push_checked(b, d.starboard, 6, 0, 63, "dim_starboard");
}

void push_header(BitBuffer& b, const DecodedMessage& m) {
    push_checked(b, m.message_type, 6, 0, 63, "message_type");
    push_checked(b, m.repeat, 2, 0, 3, "repeat");
    push_checked(b, m.mmsi, 30, 0, 999'999'999, "mmsi");
}

}  // namespace

DecodedMessage decode_message(const BitBuffer& b, std::int64_t timestamp) {
    require_bits(b, 38, -1);
    DecodedMessage m;
    m.timestamp = timestamp;
    m.message_type = static_cast<int>(b.unsigned_field(0, 6));
    m.repeat = static_cast<int>(b.unsigned_field(6, 2));
    const std::uint64_t mmsi = b.unsigned_field(8, 30);
    if (mmsi >= 1'000'000'000) {
        throw DecodeError(Kind::BadField, "mmsi " + std::to_string(mmsi) + " exceeds 9 digits", 8);
    }
    m.mmsi = static_cast<std::uint32_t>(mmsi);

    switch (m.message_type) {
        case 1:
        case 2:
        case 3: {
            require_bits(b, 137, m.message_type);
            PositionReportA r;
            r.nav_status = static_cast<int>(b.unsigned_field(38, 4));
            r.sog = decode_sog(b.unsigned_field(50, 10));
            r.lon = decode_lon(b.signed_field(61, 28));
            r.lat = decode_lat(b.signed_field(89, 27));
            r.cog = decode_cog(b.unsigned_field(116, 12));
            r.heading = decode_heading(b.unsigned_field(128, 9));
            m.body = r;
            break;
        }
        case 18: {
            require_bits(b, 133, 18);
            PositionReportB r;
            read_class_b_position(b, r);
            m.body = r;
            break;
        }
        case 19: {
            require_bits(b, 301, 19);
            PositionReportB r;
            read_class_b_position(b, r);
            ClassBExtension ext;
            ext.ship_name = b.text_field(143, 20);
            ext.ship_type = static_cast<int>(b.unsigned_field(263, 8));
            ext.dims = read_dims(b, 271);
            r.extension = std::move(ext);
            m.body = r;
            break;
        }
        case 5: {
            require_bits(b, 422, 5);
            StaticVoyage s;
            s.ais_version = static_cast<int>(b.unsigned_field(38, 2));
            s.imo = static_cast<std::uint32_t>(b.unsigned_field(40, 30));
            s.callsign = b.text_field(70, 7);
            s.ship_name = b.text_field(112, 20);
            s.ship_type = static_cast<int>(b.unsigned_field(232, 8));
            s.dims = read_dims(b, 240);
            s.epfd = static_cast<int>(b.unsigned_field(270, 4));
            s.eta.month = static_cast<int>(b.unsigned_field(274, 4));
            s.eta.day = static_cast<int>(b.unsigned_field(278, 5));
            s.eta.hour = static_cast<int>(b.unsigned_field(283, 5));
            s.eta.minute = static_cast<int>(b.unsigned_field(288, 6));
            s.draught = static_cast<double>(b.unsigned_field(294, 8)) / 10.0;
            s.destination = b.text_field(302, 20);
            s.dte = b.size() > 422 && b.bit(422);
            m.body = s;
            break;
        }
        case 24: {
            require_bits(b, 40, 24);
            StaticDataReport s;
            s.part = static_cast<int>(b.unsigned_field(38, 2));
            if (s.part == 0) {
                require_bits(b, 160, 24);
                s.ship_name = b.text_field(40, 20);
            } else if (s.part == 1) {
                require_bits(b, 162, 24);
                s.ship_type = static_cast<int>(b.unsigned_field(40, 8));
                s.callsign = b.text_field(90, 7);
                s.dims = read_dims(b, 132);
            } else {
                throw DecodeError(Kind::InvalidPart,
                                  "type 24 part number " + std::to_string(s.part), 38);
            }
            m.body = s;
            break;
        }
        default:
            m.body = Unsupported{};
            break;
    }
    return m;
}

BitBuffer encode_bits(const DecodedMessage& m) {
    BitBuffer b;
    push_header(b, m);
    const int type = m.message_type;

    if (const auto* r = std::get_if<PositionReportA>(&m.body)) {
        if (type < 1 || type > 3) out_of_range("message_type for class A position");
        push_checked(b, r->nav_status, 4, 0, 15, "nav_status");
        b.push(0x80, 8);  // rate of turn not available
        push_sog(b, r->sog);
        b.push(0, 1);
        push_lon(b, r->lon);
        push_lat(b, r->lat);
        push_cog(b, r->cog);
        push_heading(b, r->heading);
        b.push(60, 6);  // time stamp not available
        b.push(0, 2 + 3 + 1 + 19);
    } else if (const auto* r = std::get_if<PositionReportB>(&m.body)) {
        if (type != 18 && type != 19) out_of_range("message_type for class B position");
        if ((type == 19) != r->extension.has_value()) out_of_range("type 19 extension");
        b.push(0, 8);
        push_sog(b, r->sog);
        b.push(0, 1);
        push_lon(b, r->lon);
        push_lat(b, r->lat);
        push_cog(b, r->cog);
        push_heading(b, r->heading);
        b.push(60, 6);
        if (type == 18) {
            b.push(0, 2 + 1 + 1 + 1 + 1 + 1 + 1 + 1 + 20);
        } else {
            b.push(0, 4);
            push_text(b, r->extension->ship_name, 20, "ship_name");
            push_checked(b, r->extension->ship_type, 8, 0, 255, "ship_type");
            push_dims(b, r->extension->dims);
            b.push(0, 4 + 1 + 1 + 1 + 4);
        }
    } else if (const auto* s = std::get_if<StaticVoyage>(&m.body)) {
        if (type != 5) out_of_range("message_type for static voyage");
        push_checked(b, s->ais_version, 2, 0, 3, "ais_version");
        push_checked(b, s->imo, 30, 0, (1 << 30) - 1, "imo");
        push_text(b, s->callsign, 7, "callsign");
        push_text(b, s->ship_name, 20, "ship_name");
        push_checked(b, s->ship_type, 8, 0, 255, "ship_type");
        push_dims(b, s->dims);
        push_checked(b, s->epfd, 4, 0, 15, "epfd");
        push_checked(b, s->eta.month, 4, 0, 15, "eta_month");
        push_checked(b, s->eta.day, 5, 0, 31, "eta_day");
        push_checked(b, s->eta.hour, 5, 0, 31, "eta_hour");
        push_checked(b, s->eta.minute, 6, 0, 63, "eta_minute");
        push_checked(b, std::llround(s->draught * 10.0), 8, 0, 255, "draught");
        push_text(b, s->destination, 20, "destination");
        b.push(s->dte ? 1 : 0, 1);
        b.push(0, 1);
    } else if (const auto* s = std::get_if<StaticDataReport>(&m.body)) {
        if (type != 24) out_of_range("message_type for static data report");
        push_checked(b, s->part, 2, 0, 1, "part");
        if (s->part == 0) {
            push_text(b, s->ship_name, 20, "ship_name");
            b.push(0, 8);
        } else {
            push_checked(b, s->ship_type, 8, 0, 255, "ship_type");
            b.push(0, 18 + 4 + 20);
            push_text(b, s->callsign, 7, "callsign");
            push_dims(b, s->dims);
            b.push(0, 6);
        }
    } else {
        switch (type) {
            case 1: case 2: case 3: case 5: case 18: case 19: case 24:
                out_of_range("Unsupported body for a supported message_type");
            default:
                break;
        }
        b.push(0, 168 - 38);
    }
    return b;
}

}  // namespace aiskit::ais
