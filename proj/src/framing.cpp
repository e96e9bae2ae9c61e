#include <charconv>
#include <chrono>
#include <string>
#include <vector>

#include "aiskit/decoder.hpp"

namespace aiskit::ais {
namespace {

std::string_view trim_right(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

// Position of '*' followed by exactly two hex digits at the end, or npos.
std::size_t checksum_star(std::string_view s) {
    const auto star = s.rfind('*');
    if (star == std::string_view::npos || star + 3 != s.size()) return std::string_view::npos;
    if (hex_digit(s[star + 1]) < 0 || hex_digit(s[star + 2]) < 0) return std::string_view::npos;
    return star;
}

int parse_hex_byte(std::string_view two) { return hex_digit(two[0]) * 16 + hex_digit(two[1]); }

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

const char* kHex = "0123456789ABCDEF";

std::string hex2(std::uint8_t v) { return {kHex[v >> 4], kHex[v & 0xF]}; }

}  // namespace

std::uint8_t nmea_checksum(std::string_view body) noexcept {
    std::uint8_t x = 0;
    for (char c : body) x ^= static_cast<std::uint8_t>(c);
    return x;
}

bool validate_checksum(std::string_view line) {
    line = trim_right(line);
    const auto star = checksum_star(line);
    const std::size_t start = (!line.empty() && (line[0] == '!' || line[0] == '$')) ? 1 : 0;
    if (star == std::string_view::npos || star < start) {
        throw DecodeError(DecodeError::Kind::Unterminated, "sentence has no *hh checksum suffix");
    }
    return nmea_checksum(line.substr(start, star - start)) == parse_hex_byte(line.substr(star + 1));
}

TagBlockSplit parse_tag_block(std::string_view line) {
    if (line.empty() || line[0] != '\\') return {std::nullopt, line};
    const auto close = line.find('\\', 1);
    if (close == std::string_view::npos) {
        throw DecodeError(DecodeError::Kind::Unterminated, "tag block has no closing backslash");
    }
    const std::string_view content = line.substr(1, close - 1);
    const auto star = checksum_star(content);
    if (star == std::string_view::npos) {
        throw DecodeError(DecodeError::Kind::Unterminated, "tag block has no *hh checksum suffix");
    }
    const std::string_view body = content.substr(0, star);
    if (nmea_checksum(body) != parse_hex_byte(content.substr(star + 1))) {
        throw DecodeError(DecodeError::Kind::TagBlockChecksum, "tag block checksum mismatch");
    }

    TagBlock tag;
    tag.raw = std::string(line.substr(0, close + 1));
    for (std::string_view kv : split(body, ',')) {
        if (kv.size() < 2 || kv[1] != ':') continue;
        const std::string_view value = kv.substr(2);
        if (kv[0] == 'c') {
            std::int64_t ts = 0;
            if (parse_int(value, ts) && ts > 0) {
                // Some receivers write milliseconds.
                if (ts > 100'000'000'000LL) ts /= 1000;
                tag.receiver_timestamp = ts;
            }
        } else if (kv[0] == 's') {
            tag.source_station = std::string(value);
        }
    }
    return {std::move(tag), line.substr(close + 1)};
}

SentenceFragment parse_sentence(std::string_view line) {
    using Kind = DecodeError::Kind;
    line = trim_right(line);
    const auto star = line.rfind('*');
    const auto fields = split(line.substr(0, star), ',');
    if (fields.size() != 7) {
        throw DecodeError(Kind::FieldCount,
                          "expected 7 sentence fields, got " + std::to_string(fields.size()));
    }
    const std::string_view address = fields[0];
    if (address.size() != 6 || address[0] != '!' ||
        !(address.substr(3) == "VDM" || address.substr(3) == "VDO")) {
        throw DecodeError(Kind::NotAis, "not an AIS VDM/VDO sentence");
    }

    SentenceFragment f;
    if (!parse_int(fields[1], f.fragment_count) || f.fragment_count < 1 || f.fragment_count > 9) {
        throw DecodeError(Kind::BadField, "fragment count must be 1..9");
    }
    if (!parse_int(fields[2], f.fragment_index)) {
        throw DecodeError(Kind::BadField, "fragment index is not a number");
    }
    if (f.fragment_index < 1 || f.fragment_index > f.fragment_count) {
        throw DecodeError(Kind::FragmentIndex, "fragment index outside 1..fragment count");
    }
    if (!fields[3].empty()) {
        int seq = 0;
        if (!parse_int(fields[3], seq) || seq < 0 || seq > 9) {
            throw DecodeError(Kind::BadField, "sequence id must be 0..9");
        }
        f.sequence_id = seq;
    }
    const std::string_view chan = fields[4];
    if (chan == "A" || chan == "1") {
        f.channel = 'A';
    } else if (chan == "B" || chan == "2") {
        f.channel = 'B';
    } else if (!chan.empty()) {
        throw DecodeError(Kind::BadField, "channel must be A or B");
    }
    const std::string_view payload = fields[5];
    for (std::size_t i = 0; i < payload.size(); ++i) {
        if (!is_armor_char(payload[i])) {
            throw DecodeError(Kind::BadPayloadChar,
                              "payload character outside armoring alphabet at offset " +
                                  std::to_string(i),
                              i);
        }
    }
    f.payload = std::string(payload);
    if (!parse_int(fields[6], f.fill_bits) || f.fill_bits < 0 || f.fill_bits > 5) {
        throw DecodeError(Kind::BadField, "fill bits must be 0..5");
    }
    return f;
}

// ---------------------------------------------------------------------------

std::optional<AssembledPayload> FragmentAssembler::push(const SentenceFragment& fragment,
                                                        std::int64_t stream_time,
                                                        const std::optional<TagBlock>& tag) {
    expire(stream_time);
    if (fragment.fragment_count == 1) {
        return AssembledPayload{sixbit_decode(fragment.payload, fragment.fill_bits), tag};
    }

    const Key key{fragment.sequence_id.value_or(-1), fragment.channel.value_or('\0')};
    auto it = groups_.find(key);
    if (it != groups_.end() && it->second.fragment_count != fragment.fragment_count) {
        ++dropped_;
        groups_.erase(it);
        it = groups_.end();
    }
    if (it == groups_.end()) {
        Group g;
        g.fragment_count = fragment.fragment_count;
        g.started = stream_time;
        it = groups_.emplace(key, std::move(g)).first;
    }
    Group& group = it->second;
    if (group.parts.contains(fragment.fragment_index)) {
        ++duplicates_;
        groups_.erase(it);
        return std::nullopt;
    }
    group.parts.emplace(fragment.fragment_index, fragment);
    if (!group.tag && tag) group.tag = tag;
    if (static_cast<int>(group.parts.size()) < group.fragment_count) return std::nullopt;

    std::string payload;
    for (const auto& [index, part] : group.parts) payload += part.payload;
    const int fill = group.parts.rbegin()->second.fill_bits;
    AssembledPayload out{sixbit_decode(payload, fill), std::move(group.tag)};
    groups_.erase(it);
    return out;
}

void FragmentAssembler::expire(std::int64_t stream_time) {
    for (auto it = groups_.begin(); it != groups_.end();) {
        if (it->second.started < stream_time - window_) {
            ++dropped_;
            it = groups_.erase(it);
        } else {
            ++it;
        }
    }
}

void FragmentAssembler::finish() {
    dropped_ += groups_.size();
    groups_.clear();
}

// ---------------------------------------------------------------------------

std::vector<std::string> encode_payload(const BitBuffer& bits, const EncodeOptions& options) {
    constexpr std::size_t kMaxChars = 62;
    const ArmoredPayload armored = sixbit_encode(bits);
    const std::size_t total = armored.payload.size();
    const std::size_t count = total <= kMaxChars ? 1 : (total + kMaxChars - 1) / kMaxChars;
    if (count > 9) throw DecodeError(DecodeError::Kind::OutOfRange, "payload needs more than 9 fragments");

    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        const bool last = i + 1 == count;
        std::string body = options.talker;
        body += ',' + std::to_string(count) + ',' + std::to_string(i + 1) + ',';
        if (count > 1) body += std::to_string(options.sequence_id);
        body += ',';
        body += options.channel;
        body += ',';
        body += armored.payload.substr(i * kMaxChars, kMaxChars);
        body += ',' + std::to_string(last ? armored.fill_bits : 0);
        out.push_back('!' + body + '*' + hex2(nmea_checksum(body)));
    }
    return out;
}

std::vector<std::string> encode_message(const DecodedMessage& msg, const EncodeOptions& options) {
    return encode_payload(encode_bits(msg), options);
}

std::string with_tag_block(std::string_view sentence, std::int64_t timestamp,
                           std::string_view station) {
    std::string body = "c:" + std::to_string(timestamp);
    if (!station.empty()) {
        body += ",s:";
        body += station;
    }
    std::string out = "\\" + body + '*' + hex2(nmea_checksum(body)) + "\\";
    out += sentence;
    return out;
}

// ---------------------------------------------------------------------------

std::int64_t system_clock_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

LineDecoder::LineDecoder(Clock clock, std::int64_t fragment_window)
    : clock_(std::move(clock)), assembler_(fragment_window) {}

void LineDecoder::sync_assembler_counts() {
    stats_.fragments_expired += assembler_.dropped() - seen_expired_;
    seen_expired_ = assembler_.dropped();
    stats_.groups_discarded += assembler_.duplicates() - seen_duplicates_;
    seen_duplicates_ = assembler_.duplicates();
}

std::optional<DecodedMessage> LineDecoder::feed(std::string_view line) {
    ++stats_.lines;
    line = trim_right(line);
    if (line.empty()) return std::nullopt;
    try {
        auto [tag, sentence] = parse_tag_block(line);
        if (!validate_checksum(sentence)) {
            throw DecodeError(DecodeError::Kind::ChecksumMismatch, "sentence checksum mismatch");
        }
        const SentenceFragment fragment = parse_sentence(sentence);
        const std::int64_t now =
            tag && tag->receiver_timestamp ? *tag->receiver_timestamp : clock_();
        auto payload = assembler_.push(fragment, now, tag);
        sync_assembler_counts();
        if (!payload) return std::nullopt;

        const std::int64_t ts = payload->tag && payload->tag->receiver_timestamp
                                    ? *payload->tag->receiver_timestamp
                                    : now;
        DecodedMessage msg = decode_message(payload->bits, ts);
        if (payload->tag) msg.source = payload->tag->source_station;
        ++stats_.messages;
        if (!msg.supported()) ++stats_.unsupported;
        return msg;
    } catch (const DecodeError& e) {
        ++stats_.malformed;
        if (e.kind() == DecodeError::Kind::TagBlockChecksum) ++stats_.tagblock_rejected;
        sync_assembler_counts();
        return std::nullopt;
    }
}

void LineDecoder::finish() {
    assembler_.finish();
    sync_assembler_counts();
}

}  // namespace aiskit::ais
