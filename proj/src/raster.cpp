#include "aiskit/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include "aiskit/csv_schema.hpp"
#include "aiskit/error.hpp"

namespace aiskit::raster {

std::pair<double, double> RasterGrid::center(std::size_t row, std::size_t col) const {
    return {x_origin + (static_cast<double>(col) + 0.5) * cell_size,
            y_origin + (static_cast<double>(nrows - row) - 0.5) * cell_size};
}

void RasterGrid::validate() const {
    if (ncols == 0 || nrows == 0) throw FormatError("grid has no cells");
    if (!(cell_size > 0) || !std::isfinite(cell_size)) throw FormatError("grid cell size must be positive");
    if (ncols > kMaxCells / nrows) throw FormatError("grid exceeds the in-memory size ceiling");
    if (values.size() != ncols * nrows) {
        throw FormatError("grid value count " + std::to_string(values.size()) + " does not match " +
                          std::to_string(ncols) + "x" + std::to_string(nrows));
    }
}

GridFormat parse_grid_format(std::string_view tag) {
    if (tag == "ascii" || tag == "asc") return GridFormat::AsciiGrid;
    if (tag == "geotiff" || tag == "tif" || tag == "tiff") return GridFormat::GeoTiff;
    throw FormatError("unknown grid format '" + std::string(tag) + "'");
}

GridFormat grid_format_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".tif" || ext == ".tiff" ? GridFormat::GeoTiff : GridFormat::AsciiGrid;
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_number(const std::string& token, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used == token.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw FormatError("ascii grid: bad " + what + " '" + token + "'");
}

RasterGrid load_ascii(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read grid " + path.string());
    RasterGrid g;
    std::map<std::string, std::string> header;
    std::string key;
    std::streampos body = in.tellg();
    while (in >> key) {
        const std::string k = lower(key);
        if (k != "ncols" && k != "nrows" && k != "xllcorner" && k != "yllcorner" && k != "xllcenter" &&
            k != "yllcenter" && k != "cellsize" && k != "nodata_value") {
            break;
        }
        std::string value;
        if (!(in >> value)) throw FormatError("ascii grid: header key '" + key + "' without a value");
        header[k] = value;
        body = in.tellg();
    }
    for (const char* required : {"ncols", "nrows", "cellsize"}) {
        if (!header.contains(required)) throw FormatError(std::string("ascii grid: missing ") + required);
    }
    const double ncols = parse_number(header["ncols"], "ncols");
    const double nrows = parse_number(header["nrows"], "nrows");
    if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows)) {
        throw FormatError("ascii grid: ncols/nrows must be positive integers");
    }
    g.ncols = static_cast<std::size_t>(ncols);
    g.nrows = static_cast<std::size_t>(nrows);
    g.cell_size = parse_number(header["cellsize"], "cellsize");
    if (header.contains("xllcorner") && header.contains("yllcorner")) {
        g.x_origin = parse_number(header["xllcorner"], "xllcorner");
        g.y_origin = parse_number(header["yllcorner"], "yllcorner");
    } else if (header.contains("xllcenter") && header.contains("yllcenter")) {
        g.x_origin = parse_number(header["xllcenter"], "xllcenter") - g.cell_size / 2;
        g.y_origin = parse_number(header["yllcenter"], "yllcenter") - g.cell_size / 2;
    } else {
        throw FormatError("ascii grid: missing xllcorner/yllcorner");
    }
    if (header.contains("nodata_value")) g.nodata = parse_number(header["nodata_value"], "NODATA_value");
    if (g.ncols > kMaxCells / g.nrows) throw FormatError("grid exceeds the in-memory size ceiling");

    in.clear();
    in.seekg(body);
    std::string token;
    g.values.reserve(g.ncols * g.nrows);
    while (in >> token) {
        if (g.values.size() == g.ncols * g.nrows) {
            throw FormatError("ascii grid: more values than ncols x nrows");
        }
        g.values.push_back(parse_number(token, "value"));
    }
    g.validate();
    return g;
}

}  // namespace

void write_ascii_grid(const std::filesystem::path& path, const RasterGrid& grid) {
    grid.validate();
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write grid " + path.string());
    out << "ncols " << grid.ncols << "\n"
        << "nrows " << grid.nrows << "\n"
        << "xllcorner " << csv::format_exact(grid.x_origin) << "\n"
        << "yllcorner " << csv::format_exact(grid.y_origin) << "\n"
        << "cellsize " << csv::format_exact(grid.cell_size) << "\n";
    if (grid.nodata) out << "NODATA_value " << csv::format_exact(*grid.nodata) << "\n";
    for (std::size_t r = 0; r < grid.nrows; ++r) {
        for (std::size_t c = 0; c < grid.ncols; ++c) {
            if (c) out << ' ';
            out << csv::format_exact(grid.at(r, c));
        }
        out << '\n';
    }
    if (!out) throw FormatError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// GeoTIFF subset

namespace {

enum Tag : std::uint16_t {
    ImageWidth = 256,
    ImageLength = 257,
    BitsPerSample = 258,
    Compression = 259,
    Photometric = 262,
    StripOffsets = 273,
    SamplesPerPixel = 277,
    RowsPerStrip = 278,
    StripByteCounts = 279,
    PlanarConfiguration = 284,
    TileWidth = 322,
    SampleFormat = 339,
    ModelPixelScale = 33550,
    ModelTiepoint = 33922,
    GeoKeyDirectory = 34735,
    GdalNodata = 42113,
};

class TiffReader {
public:
    explicit TiffReader(std::vector<unsigned char> bytes) : b_(std::move(bytes)) {
        if (b_.size() < 8) throw FormatError("geotiff: file too short");
        if (b_[0] == 'I' && b_[1] == 'I') {
            big_ = false;
        } else if (b_[0] == 'M' && b_[1] == 'M') {
            big_ = true;
        } else {
            throw FormatError("geotiff: bad byte-order mark");
        }
        const auto magic = u16(2);
        if (magic == 43) throw FormatError("geotiff: unsupported encoding (BigTIFF)");
        if (magic != 42) throw FormatError("geotiff: bad magic number");
    }

    std::uint16_t u16(std::size_t at) const {
        need(at, 2);
        return big_ ? static_cast<std::uint16_t>(b_[at] << 8 | b_[at + 1])
                    : static_cast<std::uint16_t>(b_[at + 1] << 8 | b_[at]);
    }
    std::uint32_t u32(std::size_t at) const {
        need(at, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::size_t k = big_ ? at + static_cast<std::size_t>(i) : at + 3 - static_cast<std::size_t>(i);
            v = v << 8 | b_[k];
        }
        return v;
    }
    std::uint64_t u64(std::size_t at) const {
        need(at, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            const std::size_t k = big_ ? at + static_cast<std::size_t>(i) : at + 7 - static_cast<std::size_t>(i);
            v = v << 8 | b_[k];
        }
        return v;
    }
    void need(std::size_t at, std::size_t n) const {
        if (at > b_.size() || n > b_.size() - at) throw FormatError("geotiff: offset past end of file");
    }
    std::size_t size() const noexcept { return b_.size(); }

    struct Entry {
        std::uint16_t type = 0;
        std::uint32_t count = 0;
        std::size_t data = 0;  // offset of the value bytes
    };

    std::map<std::uint16_t, Entry> read_ifd() const {
        const std::size_t ifd = u32(4);
        const std::size_t n = u16(ifd);
        std::map<std::uint16_t, Entry> entries;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = ifd + 2 + i * 12;
            Entry e{u16(at + 2), u32(at + 4), 0};
            const std::size_t width = type_size(e.type);
            const std::size_t bytes = width * e.count;
            e.data = bytes <= 4 ? at + 8 : u32(at + 8);
            if (width) need(e.data, bytes);
            entries[u16(at)] = e;
        }
        return entries;
    }

    static std::size_t type_size(std::uint16_t type) noexcept {
        switch (type) {
            case 1: case 2: case 6: case 7: return 1;
            case 3: case 8: return 2;
            case 4: case 9: case 11: return 4;
            case 5: case 10: case 12: return 8;
            default: return 0;
        }
    }

    std::vector<double> numbers(const Entry& e, const char* name) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < e.count; ++i) {
            switch (e.type) {
                case 1: out.push_back(b_[e.data + i]); break;
                case 3: out.push_back(u16(e.data + 2 * i)); break;
                case 4: out.push_back(u32(e.data + 4 * i)); break;
                case 11: out.push_back(std::bit_cast<float>(u32(e.data + 4 * i))); break;
                case 12: out.push_back(std::bit_cast<double>(u64(e.data + 8 * i))); break;
                default:
                    throw FormatError(std::string("geotiff: unsupported encoding: field type ") +
                                      std::to_string(e.type) + " in tag " + name);
            }
        }
        return out;
    }

    std::string text(const Entry& e) const {
        std::string s(b_.begin() + static_cast<std::ptrdiff_t>(e.data),
                      b_.begin() + static_cast<std::ptrdiff_t>(e.data + e.count));
        while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
        return s;
    }

    const unsigned char* data() const noexcept { return b_.data(); }
    bool big_endian() const noexcept { return big_; }

private:
    std::vector<unsigned char> b_;
    bool big_ = false;
};

RasterGrid load_geotiff(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read grid " + path.string());
    TiffReader tiff(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));
    const auto ifd = tiff.read_ifd();

    auto one = [&](std::uint16_t tag, const char* name, std::optional<double> fallback) -> double {
        auto it = ifd.find(tag);
        if (it == ifd.end()) {
            if (fallback) return *fallback;
            throw FormatError(std::string("geotiff: missing tag ") + name);
        }
        auto v = tiff.numbers(it->second, name);
        if (v.empty()) throw FormatError(std::string("geotiff: empty tag ") + name);
        for (double x : v) {
            if (x != v.front()) throw FormatError(std::string("geotiff: unsupported encoding: mixed ") + name);
        }
        return v.front();
    };

    if (ifd.contains(TileWidth)) throw FormatError("geotiff: unsupported encoding: TileWidth (tiled layout)");
    if (const double c = one(Compression, "Compression", 1.0); c != 1) {
        throw FormatError("geotiff: unsupported encoding: Compression=" + std::to_string(static_cast<int>(c)));
    }
    if (one(SamplesPerPixel, "SamplesPerPixel", 1.0) != 1) {
        throw FormatError("geotiff: unsupported encoding: SamplesPerPixel (multi-band)");
    }
    const int bits = static_cast<int>(one(BitsPerSample, "BitsPerSample", 1.0));
    const int format = static_cast<int>(one(SampleFormat, "SampleFormat", 1.0));
    SampleType type;
    if (bits == 16 && format == 2) {
        type = SampleType::Int16;
    } else if (bits == 32 && format == 3) {
        type = SampleType::Float32;
    } else {
        throw FormatError("geotiff: unsupported encoding: BitsPerSample=" + std::to_string(bits) +
                          " SampleFormat=" + std::to_string(format));
    }

    RasterGrid g;
    g.ncols = static_cast<std::size_t>(one(ImageWidth, "ImageWidth", std::nullopt));
    g.nrows = static_cast<std::size_t>(one(ImageLength, "ImageLength", std::nullopt));
    if (g.ncols == 0 || g.nrows == 0) throw FormatError("geotiff: empty image");
    if (g.ncols > kMaxCells / g.nrows) throw FormatError("grid exceeds the in-memory size ceiling");

    if (!ifd.contains(ModelPixelScale)) throw FormatError("geotiff: missing tag ModelPixelScaleTag");
    if (!ifd.contains(ModelTiepoint)) throw FormatError("geotiff: missing tag ModelTiepointTag");
    const auto scale = tiff.numbers(ifd.at(ModelPixelScale), "ModelPixelScaleTag");
    const auto tie = tiff.numbers(ifd.at(ModelTiepoint), "ModelTiepointTag");
    if (scale.size() < 2 || tie.size() < 6) throw FormatError("geotiff: short georeferencing tags");
    if (scale[0] != scale[1]) throw FormatError("geotiff: unsupported encoding: ModelPixelScaleTag (non-square cells)");
    g.cell_size = scale[0];

    bool pixel_is_point = false;
    if (auto it = ifd.find(GeoKeyDirectory); it != ifd.end()) {
        const auto keys = tiff.numbers(it->second, "GeoKeyDirectoryTag");
        for (std::size_t k = 4; k + 3 < keys.size(); k += 4) {
            if (keys[k] == 1025 && keys[k + 1] == 0 && keys[k + 3] == 2) pixel_is_point = true;
        }
    }
    const double half = pixel_is_point ? g.cell_size / 2 : 0.0;
    const double left = tie[3] - tie[0] * g.cell_size - half;
    const double top = tie[4] + tie[1] * g.cell_size + half;
    g.x_origin = left;
    g.y_origin = top - static_cast<double>(g.nrows) * g.cell_size;

    if (auto it = ifd.find(GdalNodata); it != ifd.end()) {
        const std::string s = tiff.text(it->second);
        try {
            g.nodata = std::stod(s);
        } catch (const std::logic_error&) {
            throw FormatError("geotiff: bad GDAL_NODATA '" + s + "'");
        }
    }

    if (!ifd.contains(StripOffsets) || !ifd.contains(StripByteCounts)) {
        throw FormatError("geotiff: missing tag StripOffsets");
    }
    const auto offsets = tiff.numbers(ifd.at(StripOffsets), "StripOffsets");
    const auto counts = tiff.numbers(ifd.at(StripByteCounts), "StripByteCounts");
    if (offsets.size() != counts.size()) throw FormatError("geotiff: strip table size mismatch");
    const std::size_t width = static_cast<std::size_t>(bits / 8);
    const std::size_t expected = g.ncols * g.nrows * width;
    std::vector<unsigned char> raw;
    raw.reserve(expected);
    for (std::size_t s = 0; s < offsets.size(); ++s) {
        const auto off = static_cast<std::size_t>(offsets[s]);
        const auto cnt = static_cast<std::size_t>(counts[s]);
        tiff.need(off, cnt);
        raw.insert(raw.end(), tiff.data() + off, tiff.data() + off + cnt);
    }
    if (raw.size() < expected) throw FormatError("geotiff: strips hold fewer bytes than the image needs");

    g.values.resize(g.ncols * g.nrows);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const unsigned char* p = raw.data() + i * width;
        std::uint32_t v = 0;
        for (std::size_t k = 0; k < width; ++k) {
            v = v << 8 | (tiff.big_endian() ? p[k] : p[width - 1 - k]);
        }
        g.values[i] = type == SampleType::Int16 ? static_cast<double>(static_cast<std::int16_t>(v))
                                                : static_cast<double>(std::bit_cast<float>(v));
    }
    g.validate();
    return g;
}

class TiffWriter {
public:
    explicit TiffWriter(bool big) : big_(big) {}

    void u8(unsigned v) { out_.push_back(static_cast<unsigned char>(v)); }
    void u16(std::uint32_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) {
            const int shift = big_ ? 8 * (n - 1 - i) : 8 * i;
            out_.push_back(static_cast<unsigned char>(v >> shift));
        }
    }
    std::size_t size() const noexcept { return out_.size(); }
    std::vector<unsigned char>& bytes() noexcept { return out_; }

private:
    bool big_;
    std::vector<unsigned char> out_;
};

}  // namespace

void write_geotiff(const std::filesystem::path& path, const RasterGrid& grid, SampleType type, bool big_endian) {
    grid.validate();
    const int bits = type == SampleType::Int16 ? 16 : 32;
    const std::size_t width = static_cast<std::size_t>(bits / 8);
    for (double v : grid.values) {
        if (type == SampleType::Int16 && (v != std::floor(v) || v < -32768 || v > 32767)) {
            throw FormatError("write_geotiff: value not representable as int16");
        }
    }

    struct Out {
        std::uint16_t tag, type;
        std::uint32_t count;
        std::vector<unsigned char> payload;  // already in file byte order
    };
    auto encode = [&](auto fill) {
        TiffWriter w(big_endian);
        fill(w);
        return w.bytes();
    };
    const auto image_bytes = static_cast<std::uint32_t>(grid.values.size() * width);
    std::vector<Out> entries;
    auto short_entry = [&](std::uint16_t tag, std::uint32_t v) {
        entries.push_back({tag, 3, 1, encode([&](TiffWriter& w) { w.u16(v); })});
    };
    auto long_entry = [&](std::uint16_t tag, std::uint32_t v) {
        entries.push_back({tag, 4, 1, encode([&](TiffWriter& w) { w.u32(v); })});
    };
    long_entry(ImageWidth, static_cast<std::uint32_t>(grid.ncols));
    long_entry(ImageLength, static_cast<std::uint32_t>(grid.nrows));
    short_entry(BitsPerSample, static_cast<std::uint32_t>(bits));
    short_entry(Compression, 1);
    short_entry(Photometric, 1);
    long_entry(StripOffsets, 0);  // patched below
    short_entry(SamplesPerPixel, 1);
    long_entry(RowsPerStrip, static_cast<std::uint32_t>(grid.nrows));
    long_entry(StripByteCounts, image_bytes);
    short_entry(PlanarConfiguration, 1);
    short_entry(SampleFormat, type == SampleType::Int16 ? 2 : 3);
    entries.push_back({ModelPixelScale, 12, 3, encode([&](TiffWriter& w) {
                           for (double d : {grid.cell_size, grid.cell_size, 0.0}) w.u64(std::bit_cast<std::uint64_t>(d));
                       })});
    const double top = grid.y_origin + static_cast<double>(grid.nrows) * grid.cell_size;
    entries.push_back({ModelTiepoint, 12, 6, encode([&](TiffWriter& w) {
                           for (double d : {0.0, 0.0, 0.0, grid.x_origin, top, 0.0}) {
                               w.u64(std::bit_cast<std::uint64_t>(d));
                           }
                       })});
    // GTModelType geographic, GTRasterType pixel-is-area, GeographicType WGS 84
    entries.push_back({GeoKeyDirectory, 3, 16, encode([&](TiffWriter& w) {
                           for (std::uint32_t k : {1u, 1u, 0u, 3u, 1024u, 0u, 1u, 2u, 1025u, 0u, 1u, 1u, 2048u, 0u, 1u, 4326u}) {
                               w.u16(k);
                           }
                       })});
    if (grid.nodata) {
        std::string s = csv::format_exact(*grid.nodata);
        s.push_back('\0');
        entries.push_back({GdalNodata, 2, static_cast<std::uint32_t>(s.size()),
                           std::vector<unsigned char>(s.begin(), s.end())});
    }

    TiffWriter w(big_endian);
    w.u8(big_endian ? 'M' : 'I');
    w.u8(big_endian ? 'M' : 'I');
    w.u16(42);
    w.u32(8);
    const std::size_t ifd_size = 2 + entries.size() * 12 + 4;
    std::size_t extra = 8 + ifd_size;
    std::vector<std::size_t> offsets;
    for (const auto& e : entries) {
        offsets.push_back(extra);
        if (e.payload.size() > 4) extra += e.payload.size() + (e.payload.size() & 1);
    }
    const std::size_t image_at = extra;
    for (auto& e : entries) {
        if (e.tag == StripOffsets) e.payload = encode([&](TiffWriter& t) { t.u32(static_cast<std::uint32_t>(image_at)); });
    }

    w.u16(static_cast<std::uint32_t>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        w.u16(e.tag);
        w.u16(e.type);
        w.u32(e.count);
        if (e.payload.size() <= 4) {
            for (unsigned char c : e.payload) w.u8(c);
            for (std::size_t k = e.payload.size(); k < 4; ++k) w.u8(0);
        } else {
            w.u32(static_cast<std::uint32_t>(offsets[i]));
        }
    }
    w.u32(0);
    for (const auto& e : entries) {
        if (e.payload.size() <= 4) continue;
        for (unsigned char c : e.payload) w.u8(c);
        if (e.payload.size() & 1) w.u8(0);
    }
    for (double v : grid.values) {
        if (type == SampleType::Int16) {
            w.u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
        } else {
            w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write grid " + path.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

RasterGrid load_grid(const std::filesystem::path& path, GridFormat format) {
    return format == GridFormat::GeoTiff ? load_geotiff(path) : load_ascii(path);
}

RasterGrid load_grid(const std::filesystem::path& path) { return load_grid(path, grid_format_for(path)); }

// ---------------------------------------------------------------------------
// Sampling

namespace {

std::optional<double> cell_value(const RasterGrid& g, std::size_t row_from_south, std::size_t col) {
    const double v = g.at(g.nrows - 1 - row_from_south, col);
    if (g.nodata && (v == *g.nodata || (std::isnan(*g.nodata) && std::isnan(v)))) return std::nullopt;
    return v;
}

}  // namespace

std::optional<double> sample(const RasterGrid& g, double lon, double lat, Method method) {
    const double width = static_cast<double>(g.ncols) * g.cell_size;
    const double height = static_cast<double>(g.nrows) * g.cell_size;
    const double u = (lon - g.x_origin) / g.cell_size;  // columns from the west edge
    const double w = (lat - g.y_origin) / g.cell_size;  // rows from the south edge
    if (!(lon >= g.x_origin && lon <= g.x_origin + width && lat >= g.y_origin && lat <= g.y_origin + height)) {
        return std::nullopt;
    }
    const double max_col = static_cast<double>(g.ncols - 1);
    const double max_row = static_cast<double>(g.nrows - 1);

    if (method == Method::Nearest) {
        const auto col = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, max_col));
        const auto row = static_cast<std::size_t>(std::clamp(std::floor(w), 0.0, max_row));
        return cell_value(g, row, col);
    }

    const double fx = std::clamp(u - 0.5, 0.0, max_col);
    const double fy = std::clamp(w - 0.5, 0.0, max_row);
    const auto c0 = static_cast<std::size_t>(std::min(std::floor(fx), std::max(max_col - 1, 0.0)));
    const auto r0 = static_cast<std::size_t>(std::min(std::floor(fy), std::max(max_row - 1, 0.0)));
    const std::size_t c1 = std::min(c0 + 1, g.ncols - 1);
    const std::size_t r1 = std::min(r0 + 1, g.nrows - 1);
    const double tx = fx - static_cast<double>(c0);
    const double ty = fy - static_cast<double>(r0);
    const auto v00 = cell_value(g, r0, c0);
    const auto v01 = cell_value(g, r0, c1);
    const auto v10 = cell_value(g, r1, c0);
    const auto v11 = cell_value(g, r1, c1);
    if (!v00 || !v01 || !v10 || !v11) return std::nullopt;
    const double south = *v00 + (*v01 - *v00) * tx;
    const double north = *v10 + (*v11 - *v10) * tx;
    return south + (north - south) * ty;
}

std::vector<std::optional<double>> annotate_track(const Track& track, const RasterGrid& grid, Method method) {
    std::vector<std::optional<double>> out;
    out.reserve(track.points.size());
    for (const auto& p : track.points) out.push_back(sample(grid, p.x, p.y, method));
    return out;
}

}  // namespace aiskit::raster
