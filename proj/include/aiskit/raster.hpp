#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "aiskit/track.hpp"

namespace aiskit::raster {

/// Largest grid loaded into memory (cells). Grids are held whole.
inline constexpr std::size_t kMaxCells = std::size_t{1} << 28;

/// Single-band lon/lat grid. Values are cell-center registered, stored row
/// major with row 0 at the north edge; (x_origin, y_origin) is the lower-left
/// outer corner.
struct RasterGrid {
    std::size_t ncols = 0;
    std::size_t nrows = 0;
    double x_origin = 0.0;
    double y_origin = 0.0;
    double cell_size = 1.0;
    std::optional<double> nodata;
    std::vector<double> values;

    double at(std::size_t row, std::size_t col) const { return values[row * ncols + col]; }
    /// Center of cell (row, col) as lon, lat.
    std::pair<double, double> center(std::size_t row, std::size_t col) const;
    /// Throws FormatError when the shape or cell size is inconsistent.
    void validate() const;
};

enum class GridFormat { AsciiGrid, GeoTiff };
enum class Method { Nearest, Bilinear };

/// Parses "ascii"/"asc" or "geotiff"/"tif"/"tiff"; throws FormatError.
GridFormat parse_grid_format(std::string_view tag);
GridFormat grid_format_for(const std::filesystem::path& path);

RasterGrid load_grid(const std::filesystem::path& path, GridFormat format);
RasterGrid load_grid(const std::filesystem::path& path);

void write_ascii_grid(const std::filesystem::path& path, const RasterGrid& grid);

enum class SampleType { Int16, Float32 };
/// Writes an uncompressed, single-strip GeoTIFF.
void write_geotiff(const std::filesystem::path& path, const RasterGrid& grid, SampleType type,
                   bool big_endian = false);

/// Value under (lon, lat), or nullopt outside the extent or on nodata.
std::optional<double> sample(const RasterGrid& grid, double lon, double lat, Method method);

std::vector<std::optional<double>> annotate_track(const Track& track, const RasterGrid& grid, Method method);

}  // namespace aiskit::raster
