#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aiskit::zip {

struct Entry {
    std::string name;
    std::uint16_t method = 0;  // 0 stored, 8 deflate
    std::uint32_t crc32 = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t uncompressed_size = 0;
    std::uint64_t local_header_offset = 0;
};

/// Read-only view of a zip archive (stored and deflate entries, no zip64).
class Archive {
public:
    /// Throws FormatError if the file is unreadable or not a zip archive.
    explicit Archive(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    /// Inflates one entry and verifies its CRC.
    std::string read(const Entry& entry) const;

private:
    std::filesystem::path path_;
    std::vector<Entry> entries_;
};

/// Writes a zip archive. Used by tests and fixture tooling.
void write_archive(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& files, bool deflate);

}  // namespace aiskit::zip
