#include "aiskit/bits.hpp"

#include <string>

#include "aiskit/decoder.hpp"

namespace aiskit::ais {

void BitBuffer::push(std::uint64_t value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
        const std::size_t byte = size_ / 8;
        if (byte == bytes_.size()) bytes_.push_back(0);
        if ((value >> i) & 1U) bytes_[byte] |= static_cast<std::uint8_t>(0x80U >> (size_ % 8));
        ++size_;
    }
}

void BitBuffer::push_text(std::string_view text, int nchars) {
    for (int i = 0; i < nchars; ++i) {
        int v = 0;  // '@'
        if (static_cast<std::size_t>(i) < text.size()) {
            v = ascii_to_sixbit(text[static_cast<std::size_t>(i)]);
            if (v < 0) v = 0;
        }
        push(static_cast<std::uint64_t>(v), 6);
    }
}

bool BitBuffer::bit(std::size_t pos) const {
    return (bytes_[pos / 8] >> (7 - pos % 8)) & 1U;
}

std::uint64_t BitBuffer::unsigned_field(std::size_t pos, int nbits) const {
    if (pos + static_cast<std::size_t>(nbits) > size_) {
        throw DecodeError(DecodeError::Kind::Truncated,
                          "field at bit " + std::to_string(pos) + " runs past end of " +
                              std::to_string(size_) + "-bit message",
                          pos);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < nbits; ++i) v = (v << 1) | (bit(pos + static_cast<std::size_t>(i)) ? 1U : 0U);
    return v;
}

std::int64_t BitBuffer::signed_field(std::size_t pos, int nbits) const {
    const std::uint64_t raw = unsigned_field(pos, nbits);
    const std::uint64_t sign = std::uint64_t{1} << (nbits - 1);
    if (raw & sign) return static_cast<std::int64_t>(raw) - static_cast<std::int64_t>(sign << 1);
    return static_cast<std::int64_t>(raw);
}

std::string BitBuffer::text_field(std::size_t pos, int nchars) const {
    std::string out;
    out.reserve(static_cast<std::size_t>(nchars));
    for (int i = 0; i < nchars; ++i) {
        out.push_back(sixbit_to_ascii(static_cast<int>(unsigned_field(pos + 6 * static_cast<std::size_t>(i), 6))));
    }
    while (!out.empty() && (out.back() == '@' || out.back() == ' ')) out.pop_back();
    return out;
}

void BitBuffer::truncate(std::size_t nbits) {
    if (nbits > size_) nbits = size_;
    size_ -= nbits;
    bytes_.resize((size_ + 7) / 8);
    if (size_ % 8 != 0) {
        bytes_.back() &= static_cast<std::uint8_t>(0xFFU << (8 - size_ % 8));
    }
}

bool operator==(const BitBuffer& a, const BitBuffer& b) {
    return a.size_ == b.size_ && a.bytes_ == b.bytes_;
}

BitBuffer sixbit_decode(std::string_view payload, int fill_bits) {
    if (fill_bits < 0 || fill_bits > 5) {
        throw DecodeError(DecodeError::Kind::BadField, "fill bits must be 0..5");
    }
    BitBuffer bits;
    for (std::size_t i = 0; i < payload.size(); ++i) {
        const char c = payload[i];
        if (!is_armor_char(c)) {
            throw DecodeError(DecodeError::Kind::BadPayloadChar,
                              "payload character outside armoring alphabet at offset " +
                                  std::to_string(i),
                              i);
        }
        bits.push(static_cast<std::uint64_t>(armor_value(c)), 6);
    }
    bits.truncate(static_cast<std::size_t>(fill_bits));
    return bits;
}

ArmoredPayload sixbit_encode(const BitBuffer& bits) {
    ArmoredPayload out;
    const std::size_t n = bits.size();
    const std::size_t chars = (n + 5) / 6;
    out.payload.reserve(chars);
    for (std::size_t c = 0; c < chars; ++c) {
        int v = 0;
        for (std::size_t b = 0; b < 6; ++b) {
            const std::size_t pos = c * 6 + b;
            v = (v << 1) | (pos < n && bits.bit(pos) ? 1 : 0);
        }
        out.payload.push_back(armor_char(v));
    }
    out.fill_bits = static_cast<int>(chars * 6 - n);
    return out;
}

}  // namespace aiskit::ais
