#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aiskit::ais {

/// MSB-first bit sequence assembled from an armored AIS payload.
class BitBuffer {
public:
    BitBuffer() = default;

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    /// Appends the low `nbits` of `value`, most significant first.
    void push(std::uint64_t value, int nbits);
    /// Appends `nchars` six-bit AIS text characters, padding with '@'.
    void push_text(std::string_view text, int nchars);

    bool bit(std::size_t pos) const;
    std::uint64_t unsigned_field(std::size_t pos, int nbits) const;
    std::int64_t signed_field(std::size_t pos, int nbits) const;
    /// Decodes `nchars` characters of AIS six-bit text, stripping trailing
    /// '@' and spaces.
    std::string text_field(std::size_t pos, int nchars) const;

    /// Drops the last `nbits` bits.
    void truncate(std::size_t nbits);

    friend bool operator==(const BitBuffer& a, const BitBuffer& b);

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t size_ = 0;
};

/// True for characters of the payload armoring alphabet (ASCII 48-87, 96-119).
constexpr bool is_armor_char(char c) noexcept {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 48 && u <= 87) || (u >= 96 && u <= 119);
}

/// Six-bit value of an armored character; caller checks is_armor_char first.
constexpr int armor_value(char c) noexcept {
    int v = static_cast<unsigned char>(c) - 48;
    if (v > 40) v -= 8;
    return v;
}

constexpr char armor_char(int value) noexcept {
    return static_cast<char>(value < 40 ? value + 48 : value + 56);
}

/// AIS text table: 0-31 map to '@'..'_', 32-63 to ' '..'?'.
constexpr char sixbit_to_ascii(int value) noexcept {
    return static_cast<char>(value < 32 ? value + 64 : value);
}

/// Inverse of sixbit_to_ascii, or -1 for characters outside the table.
constexpr int ascii_to_sixbit(char c) noexcept {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 64 && u <= 95) return u - 64;
    if (u >= 32 && u <= 63) return u;
    return -1;
}

/// Unpacks an armored payload. Throws DecodeError (kind BadPayloadChar)
/// naming the offset of the first character outside the alphabet.
BitBuffer sixbit_decode(std::string_view payload, int fill_bits);

struct ArmoredPayload {
    std::string payload;
    int fill_bits = 0;
};

/// Packs bits into armored characters, zero-padding the final character.
ArmoredPayload sixbit_encode(const BitBuffer& bits);

}  // namespace aiskit::ais
