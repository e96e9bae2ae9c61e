#include "aiskit/zip.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>

#include "aiskit/error.hpp"

namespace aiskit::zip {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;

std::uint32_t le(const std::string& s, std::size_t pos, int n) {
    if (pos + static_cast<std::size_t>(n) > s.size()) throw FormatError("zip: truncated record");
    std::uint32_t v = 0;
    for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
    return v;
}

void put(std::string& s, std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string inflate_raw(const std::string& data, std::uint64_t expected) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw FormatError("zip: inflateInit failed");
    std::string out(expected, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) throw FormatError("zip: corrupt deflate stream");
    return out;
}

std::string deflate_raw(const std::string& data) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw FormatError("zip: deflateInit failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    deflate(&zs, Z_FINISH);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

}  // namespace

Archive::Archive(const std::filesystem::path& path) : path_(path) {
    const std::string data = slurp(path);
    if (data.size() < 22) throw FormatError(path.string() + " is not a zip archive");
    std::size_t end = std::string::npos;
    const std::size_t lowest = data.size() > 65557 ? data.size() - 65557 : 0;
    for (std::size_t pos = data.size() - 22 + 1; pos-- > lowest;) {
        if (le(data, pos, 4) == kEndSig) {
            end = pos;
            break;
        }
    }
    if (end == std::string::npos) throw FormatError(path.string() + " is not a zip archive");

    const std::uint32_t count = le(data, end + 10, 2);
    std::size_t pos = le(data, end + 16, 4);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (le(data, pos, 4) != kCentralSig) throw FormatError("zip: bad central directory");
        Entry e;
        e.method = static_cast<std::uint16_t>(le(data, pos + 10, 2));
        e.crc32 = le(data, pos + 16, 4);
        e.compressed_size = le(data, pos + 20, 4);
        e.uncompressed_size = le(data, pos + 24, 4);
        const std::uint32_t name_len = le(data, pos + 28, 2);
        const std::uint32_t extra_len = le(data, pos + 30, 2);
        const std::uint32_t comment_len = le(data, pos + 32, 2);
        e.local_header_offset = le(data, pos + 42, 4);
        if (pos + 46 + name_len > data.size()) throw FormatError("zip: truncated entry name");
        e.name = data.substr(pos + 46, name_len);
        pos += 46 + name_len + extra_len + comment_len;
        if (!e.name.empty() && e.name.back() != '/') entries_.push_back(std::move(e));
    }
}

std::string Archive::read(const Entry& entry) const {
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path_.string());
    std::string header(30, '\0');
    in.seekg(static_cast<std::streamoff>(entry.local_header_offset));
    in.read(header.data(), 30);
    if (!in || le(header, 0, 4) != kLocalSig) throw FormatError("zip: bad local header for " + entry.name);
    const std::uint32_t skip = le(header, 26, 2) + le(header, 28, 2);
    in.seekg(static_cast<std::streamoff>(entry.local_header_offset + 30 + skip));
    std::string raw(entry.compressed_size, '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!in) throw FormatError("zip: truncated data for " + entry.name);

    std::string out;
    if (entry.method == 0) {
        out = std::move(raw);
    } else if (entry.method == 8) {
        out = inflate_raw(raw, entry.uncompressed_size);
    } else {
        throw FormatError("zip: unsupported compression method " + std::to_string(entry.method) +
                          " for " + entry.name);
    }
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size()));
    if (crc != entry.crc32) throw FormatError("zip: CRC mismatch for " + entry.name);
    return out;
}

void write_archive(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& files, bool deflate) {
    std::string body;
    std::string central;
    for (const auto& [name, content] : files) {
        const std::string stored = deflate ? deflate_raw(content) : content;
        const auto crc = static_cast<std::uint32_t>(
            crc32(0L, reinterpret_cast<const Bytef*>(content.data()), static_cast<uInt>(content.size())));
        const auto offset = static_cast<std::uint32_t>(body.size());
        const std::uint32_t method = deflate ? 8 : 0;

        put(body, kLocalSig, 4);
        put(body, 20, 2);
        put(body, 0, 2);
        put(body, method, 2);
        put(body, 0, 4);  // time, date
        put(body, crc, 4);
        put(body, static_cast<std::uint32_t>(stored.size()), 4);
        put(body, static_cast<std::uint32_t>(content.size()), 4);
        put(body, static_cast<std::uint32_t>(name.size()), 2);
        put(body, 0, 2);
        body += name;
        body += stored;

        put(central, kCentralSig, 4);
        put(central, 20, 2);
        put(central, 20, 2);
        put(central, 0, 2);
        put(central, method, 2);
        put(central, 0, 4);
        put(central, crc, 4);
        put(central, static_cast<std::uint32_t>(stored.size()), 4);
        put(central, static_cast<std::uint32_t>(content.size()), 4);
        put(central, static_cast<std::uint32_t>(name.size()), 2);
        put(central, 0, 2 + 2 + 2 + 2);
        put(central, 0, 4);
        put(central, offset, 4);
        central += name;
    }
    std::string out = body + central;
    put(out, kEndSig, 4);
    put(out, 0, 4);
    put(out, static_cast<std::uint32_t>(files.size()), 2);
    put(out, static_cast<std::uint32_t>(files.size()), 2);
    put(out, static_cast<std::uint32_t>(central.size()), 4);
    put(out, static_cast<std::uint32_t>(body.size()), 4);
    put(out, 0, 2);

    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace aiskit::zip
