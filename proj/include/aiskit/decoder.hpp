#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "aiskit/bits.hpp"

namespace aiskit::ais {

class DecodeError : public std::runtime_error {
public:
    enum class Kind {
        Unterminated,      // no `*hh` suffix, or tag block without closing '\'
        ChecksumMismatch,  // sentence checksum
        TagBlockChecksum,  // tag-block checksum
        NotAis,            // not an !xxVDM / !xxVDO sentence
        FieldCount,
        FragmentIndex,
        BadField,
        BadPayloadChar,
        Truncated,         // bit buffer shorter than the message type needs
        InvalidPart,       // type 24 part number other than A/B
        OutOfRange,        // encode: field not representable
    };

    DecodeError(Kind kind, const std::string& what, std::size_t offset = 0)
        : std::runtime_error(what), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

// ---------------------------------------------------------------------------
// Framing

/// True iff the XOR of the bytes between the leading '!' or '$' and the last
/// '*' equals the two-hex-digit suffix. Throws DecodeError(Unterminated) when
/// there is no `*hh` suffix.
bool validate_checksum(std::string_view line);

/// XOR of all bytes in `body`.
std::uint8_t nmea_checksum(std::string_view body) noexcept;

struct TagBlock {
    std::optional<std::int64_t> receiver_timestamp;
    std::string source_station;
    std::string raw;
};

struct TagBlockSplit {
    std::optional<TagBlock> tag;
    std::string_view remainder;
};

/// Splits an optional `\k:v,...*hh\` prefix off a line. Lines that do not
/// start with '\' come back untouched with no tag.
TagBlockSplit parse_tag_block(std::string_view line);

struct SentenceFragment {
    int fragment_count = 1;
    int fragment_index = 1;
    std::optional<int> sequence_id;
    std::optional<char> channel;
    std::string payload;
    int fill_bits = 0;

    friend bool operator==(const SentenceFragment&, const SentenceFragment&) = default;
};

/// Maps the comma fields of a checksum-valid sentence to a fragment.
SentenceFragment parse_sentence(std::string_view line);

struct AssembledPayload {
    BitBuffer bits;
    std::optional<TagBlock> tag;  // first tag block seen in the group
};

/// Joins multi-sentence messages. Groups are keyed by (sequence_id, channel)
/// and expire after `window` seconds of stream time.
class FragmentAssembler {
public:
    explicit FragmentAssembler(std::int64_t window_seconds = 30) : window_(window_seconds) {}

    /// Feeds one fragment observed at `stream_time`. Returns the completed
    /// payload when this fragment finishes a group.
    std::optional<AssembledPayload> push(const SentenceFragment& fragment,
                                         std::int64_t stream_time,
                                         const std::optional<TagBlock>& tag = std::nullopt);

    /// Drops groups started before `stream_time - window`.
    void expire(std::int64_t stream_time);
    /// Drops every pending group (end of stream).
    void finish();

    std::size_t pending() const noexcept { return groups_.size(); }
    std::uint64_t dropped() const noexcept { return dropped_; }
    std::uint64_t duplicates() const noexcept { return duplicates_; }

private:
    struct Group {
        int fragment_count = 0;
        std::int64_t started = 0;
        std::optional<TagBlock> tag;
        std::map<int, SentenceFragment> parts;
    };
    using Key = std::pair<int, int>;  // sequence id (-1 absent), channel (0 absent)

    std::int64_t window_;
    std::map<Key, Group> groups_;
    std::uint64_t dropped_ = 0;
    std::uint64_t duplicates_ = 0;
};

// ---------------------------------------------------------------------------
// Messages

struct Dimensions {
    int bow = 0;
    int stern = 0;
    int port = 0;
    int starboard = 0;

    friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// Raw ETA fields; 0 month/day, hour 24 and minute 60 mean not available.
struct Eta {
    int month = 0;
    int day = 0;
    int hour = 24;
    int minute = 60;

    friend bool operator==(const Eta&, const Eta&) = default;
};

/// Types 1, 2, 3.
struct PositionReportA {
    std::optional<double> lon;
    std::optional<double> lat;
    std::optional<double> sog;
    std::optional<double> cog;
    std::optional<int> heading;
    int nav_status = 15;

    friend bool operator==(const PositionReportA&, const PositionReportA&) = default;
};

/// Static part carried by type 19 extended class B reports.
struct ClassBExtension {
    std::string ship_name;
    int ship_type = 0;
    Dimensions dims;

    friend bool operator==(const ClassBExtension&, const ClassBExtension&) = default;
};

/// Types 18, 19.
struct PositionReportB {
    std::optional<double> lon;
    std::optional<double> lat;
    std::optional<double> sog;
    std::optional<double> cog;
    std::optional<int> heading;
    std::optional<ClassBExtension> extension;  // present for type 19

    friend bool operator==(const PositionReportB&, const PositionReportB&) = default;
};

/// Type 5.
struct StaticVoyage {
    int ais_version = 0;
    std::uint32_t imo = 0;
    std::string callsign;
    std::string ship_name;
    int ship_type = 0;
    Dimensions dims;
    int epfd = 0;
    Eta eta;
    double draught = 0.0;  // meters
    std::string destination;
    bool dte = false;

    friend bool operator==(const StaticVoyage&, const StaticVoyage&) = default;
};

/// Type 24. Part A (0) carries the name; part B (1) type, callsign and dims.
struct StaticDataReport {
    int part = 0;
    std::string ship_name;
    int ship_type = 0;
    std::string callsign;
    Dimensions dims;

    friend bool operator==(const StaticDataReport&, const StaticDataReport&) = default;
};

/// Any other message type: only type and mmsi are kept.
struct Unsupported {
    friend bool operator==(const Unsupported&, const Unsupported&) = default;
};

using MessageBody =
    std::variant<PositionReportA, PositionReportB, StaticVoyage, StaticDataReport, Unsupported>;

struct DecodedMessage {
    int message_type = 0;
    int repeat = 0;
    std::uint32_t mmsi = 0;
    std::int64_t timestamp = 0;  // receiver time, unix seconds
    std::string source;          // receiving station, if known
    MessageBody body;

    bool supported() const noexcept { return !std::holds_alternative<Unsupported>(body); }
    bool is_position() const noexcept {
        return std::holds_alternative<PositionReportA>(body) ||
               std::holds_alternative<PositionReportB>(body);
    }

    friend bool operator==(const DecodedMessage&, const DecodedMessage&) = default;
};

/// Extracts fields for types 1, 2, 3, 5, 18, 19 and 24. Every other type
/// becomes an Unsupported record. Throws DecodeError(Truncated) when the
/// buffer is shorter than the claimed type needs.
DecodedMessage decode_message(const BitBuffer& bits, std::int64_t timestamp);

/// Inverse of decode_message for supported bodies. Throws
/// DecodeError(OutOfRange) for unrepresentable fields.
BitBuffer encode_bits(const DecodedMessage& msg);

struct EncodeOptions {
    char channel = 'A';
    int sequence_id = 0;  // used only for multi-fragment output
    std::string talker = "AIVDM";
};

/// Checksummed sentences for an arbitrary bit payload; payloads longer than
/// 62 armored characters are split into fragments.
std::vector<std::string> encode_payload(const BitBuffer& bits, const EncodeOptions& options = {});

std::vector<std::string> encode_message(const DecodedMessage& msg, const EncodeOptions& options = {});

/// Prefixes a sentence with a `\c:<ts>,s:<station>*hh\` tag block.
std::string with_tag_block(std::string_view sentence, std::int64_t timestamp,
                           std::string_view station = {});

// ---------------------------------------------------------------------------
// Line-level decoding shared by file sources and the live pipeline

struct LineStats {
    std::uint64_t lines = 0;
    std::uint64_t malformed = 0;         // any framing or decode failure
    std::uint64_t tagblock_rejected = 0;
    std::uint64_t fragments_expired = 0;
    std::uint64_t groups_discarded = 0;  // duplicate fragment index
    std::uint64_t messages = 0;          // decoded, including Unsupported
    std::uint64_t unsupported = 0;
};

using Clock = std::function<std::int64_t()>;

/// Wall clock in unix seconds.
std::int64_t system_clock_seconds();

/// Turns NM4/NMEA lines into messages. Timestamps come from the tag-block
/// `c:` field, else from `clock`. Not thread-safe.
class LineDecoder {
public:
    explicit LineDecoder(Clock clock = system_clock_seconds, std::int64_t fragment_window = 30);

    /// Never throws on bad input; failures are counted in stats().
    std::optional<DecodedMessage> feed(std::string_view line);
    void finish();

    const LineStats& stats() const noexcept { return stats_; }

private:
    Clock clock_;
    FragmentAssembler assembler_;
    LineStats stats_;
    std::uint64_t seen_expired_ = 0;
    std::uint64_t seen_duplicates_ = 0;

    void sync_assembler_counts();
};

// ---------------------------------------------------------------------------
// File sources

enum class SourceFormat { Nm4, Csv, Zip };

/// "nm4", "csv" or "zip"; anything else throws FormatError.
SourceFormat parse_source_format(std::string_view tag);
/// Guess from the extension: .csv, .zip, everything else NM4.
SourceFormat source_format_for(const std::filesystem::path& path);

struct SourceStats {
    std::uint64_t lines = 0;
    std::uint64_t malformed = 0;
    std::uint64_t messages = 0;
};

/// Lazily yields the messages of an NM4, CSV or zip archive. Malformed lines
/// are skipped and counted.
class SourceReader {
public:
    SourceReader(const std::filesystem::path& path, SourceFormat format,
                 Clock clock = system_clock_seconds);
    ~SourceReader();
    SourceReader(SourceReader&&) noexcept;
    SourceReader& operator=(SourceReader&&) noexcept;

    std::optional<DecodedMessage> next();
    SourceStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: drains a SourceReader.
std::vector<DecodedMessage> decode_source(const std::filesystem::path& path, SourceFormat format,
                                          Clock clock = system_clock_seconds);

}  // namespace aiskit::ais
