#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aiskit/bbox.hpp"
#include "aiskit/decoder.hpp"
#include "aiskit/rows.hpp"

struct sqlite3;
struct sqlite3_stmt;

namespace aiskit::store {

inline constexpr int kSchemaVersion = 1;

enum class BackendKind { Sqlite };
enum class OpenMode { ReadWrite, ReadOnly };

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IngestReport {
    std::uint64_t dynamic_rows = 0;
    std::uint64_t static_rows = 0;
    std::uint64_t duplicates_skipped = 0;
    std::uint64_t unsupported_skipped = 0;
    std::uint64_t invalid_skipped = 0;  // position reports without a usable lon/lat
    std::uint64_t messages_stored = 0;  // messages that produced at least one row

    IngestReport& operator+=(const IngestReport& o);
    friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

/// Predicates pushed into a scan. Time bounds are inclusive.
struct ScanFilter {
    std::optional<std::int64_t> start;
    std::optional<std::int64_t> end;
    std::optional<BBox> bbox;
    std::optional<std::set<std::uint32_t>> mmsis;
};

struct PartitionSummary {
    int month = 0;  // YYYYMM
    std::uint64_t dynamic_rows = 0;
    std::uint64_t static_rows = 0;
    std::uint64_t aggregate_rows = 0;
};

namespace detail {
struct StmtDeleter {
    void operator()(sqlite3_stmt* s) const noexcept;
};
using Stmt = std::unique_ptr<sqlite3_stmt, StmtDeleter>;
}  // namespace detail

/// Streams dynamic rows ordered by (mmsi, time). Must not outlive its handle.
class RowCursor {
public:
    RowCursor() = default;
    std::optional<DynamicRow> next();

private:
    friend class StorageHandle;
    detail::Stmt stmt_;
    std::optional<std::set<std::uint32_t>> residual_mmsis_;
};

/// Connection to a monthly-partitioned AIS store. One handle per thread.
class StorageHandle {
public:
    /// Opens (creating when writable) the store at `location`.
    static StorageHandle open(const std::filesystem::path& location,
                              BackendKind kind = BackendKind::Sqlite,
                              OpenMode mode = OpenMode::ReadWrite);

    StorageHandle(StorageHandle&&) noexcept;
    StorageHandle& operator=(StorageHandle&&) noexcept;
    ~StorageHandle();

    BackendKind backend() const noexcept { return kind_; }
    const std::filesystem::path& location() const noexcept { return location_; }
    bool read_only() const noexcept { return mode_ == OpenMode::ReadOnly; }

    /// Writes one batch in a single transaction; a failure rolls the whole
    /// batch back and rethrows.
    IngestReport insert_messages(std::span<const ais::DecodedMessage> batch);

    /// Rebuilds static_<month>_aggregate; returns its row count.
    std::size_t aggregate_statics(int month);

    /// Months (YYYYMM, ascending) with a dynamic or static partition.
    std::vector<int> list_partitions() const;

    RowCursor scan(std::span<const int> months, const ScanFilter& filter = {}) const;
    std::vector<DynamicRow> scan_all(std::span<const int> months, const ScanFilter& filter = {}) const;

    std::vector<StaticRow> static_rows(int month) const;
    std::vector<AggregateRow> aggregate_rows(int month) const;
    /// Aggregate row for `mmsi` from the most recent month that has one.
    std::optional<AggregateRow> vessel(std::uint32_t mmsi) const;
    std::vector<PartitionSummary> summary() const;

    int schema_version() const;

private:
    StorageHandle() = default;

    void exec(const std::string& sql) const;
    detail::Stmt prepare(const std::string& sql) const;
    bool table_exists(const std::string& name) const;
    void ensure_dynamic(int month);
    void ensure_static(int month);
    void init_schema();

    sqlite3* db_ = nullptr;
    BackendKind kind_ = BackendKind::Sqlite;
    OpenMode mode_ = OpenMode::ReadWrite;
    std::filesystem::path location_;
    std::set<int> known_dynamic_;
    std::set<int> known_static_;
};

std::string dynamic_table(int month);
std::string static_table(int month);
std::string aggregate_table(int month);

/// The dynamic row a position message maps to, or nullopt when it has no
/// usable position.
std::optional<DynamicRow> to_dynamic_row(const ais::DecodedMessage& msg);
/// The static row of a type 5, 19 or 24 message.
std::optional<StaticRow> to_static_row(const ais::DecodedMessage& msg);

}  // namespace aiskit::store
