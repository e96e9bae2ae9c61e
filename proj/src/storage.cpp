#include "aiskit/storage.hpp"

#include <sqlite3.h>

#include <cstdio>
#include <map>
#include <utility>

#include "aiskit/error.hpp"
#include "aiskit/shiptypes.hpp"
#include "aiskit/timefmt.hpp"

namespace aiskit::store {

void detail::StmtDeleter::operator()(sqlite3_stmt* s) const noexcept { sqlite3_finalize(s); }

namespace {

using detail::Stmt;

std::string month_suffix(int month) { return std::to_string(month); }

void bind_opt(sqlite3_stmt* s, int idx, const std::optional<double>& v) {
    v ? sqlite3_bind_double(s, idx, *v) : sqlite3_bind_null(s, idx);
}
void bind_opt(sqlite3_stmt* s, int idx, const std::optional<int>& v) {
    v ? sqlite3_bind_int(s, idx, *v) : sqlite3_bind_null(s, idx);
}
void bind_opt(sqlite3_stmt* s, int idx, const std::optional<std::uint32_t>& v) {
    v ? sqlite3_bind_int64(s, idx, *v) : sqlite3_bind_null(s, idx);
}
void bind_text(sqlite3_stmt* s, int idx, const std::string& v, bool null_if_empty) {
    if (null_if_empty && v.empty()) {
        sqlite3_bind_null(s, idx);
    } else {
        sqlite3_bind_text(s, idx, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    }
}

template <typename T>
std::optional<T> column_opt(sqlite3_stmt* s, int col) {
    if (sqlite3_column_type(s, col) == SQLITE_NULL) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
        return sqlite3_column_double(s, col);
    } else {
        return static_cast<T>(sqlite3_column_int64(s, col));
    }
}

std::string column_text(sqlite3_stmt* s, int col) {
    const auto* p = sqlite3_column_text(s, col);
    return p ? std::string(reinterpret_cast<const char*>(p)) : std::string();
}

std::optional<int> nonzero(int v) { return v == 0 ? std::nullopt : std::optional<int>(v); }

void fill_dims(StaticRow& row, const ais::Dimensions& d) {
    row.dim_bow = nonzero(d.bow);
    row.dim_stern = nonzero(d.stern);
    row.dim_port = nonzero(d.port);
    row.dim_starboard = nonzero(d.starboard);
}

std::string format_eta(const ais::Eta& eta) {
    if (eta.month < 1 || eta.month > 12 || eta.day < 1 || eta.day > 31) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02d-%02dT%02d:%02d", eta.month, eta.day, eta.hour, eta.minute);
    return buf;
}

// Mode of the non-null values; ties go to the value seen most recently.
template <typename T>
class ModeCounter {
public:
    void add(const std::optional<T>& v, std::int64_t time, std::size_t seq) {
        if (!v) return;
        auto& e = counts_[*v];
        ++e.count;
        e.last = {time, seq};
    }
    std::optional<T> best() const {
        std::optional<T> out;
        const Entry* best = nullptr;
        for (const auto& [value, e] : counts_) {
            if (!best || e.count > best->count || (e.count == best->count && e.last > best->last)) {
                best = &e;
                out = value;
            }
        }
        return out;
    }

private:
    struct Entry {
        std::size_t count = 0;
        std::pair<std::int64_t, std::size_t> last{};
    };
    std::map<T, Entry> counts_;
};

std::optional<std::string> text_opt(std::string s) {
    if (s.empty()) return std::nullopt;
    return s;
}

}  // namespace

IngestReport& IngestReport::operator+=(const IngestReport& o) {
    dynamic_rows += o.dynamic_rows;
    static_rows += o.static_rows;
    duplicates_skipped += o.duplicates_skipped;
    unsupported_skipped += o.unsupported_skipped;
    invalid_skipped += o.invalid_skipped;
    messages_stored += o.messages_stored;
    return *this;
}

std::string dynamic_table(int month) { return "ais_" + month_suffix(month) + "_dynamic"; }
std::string static_table(int month) { return "ais_" + month_suffix(month) + "_static"; }
std::string aggregate_table(int month) { return "static_" + month_suffix(month) + "_aggregate"; }

std::optional<DynamicRow> to_dynamic_row(const ais::DecodedMessage& msg) {
    DynamicRow row;
    row.mmsi = msg.mmsi;
    row.time = msg.timestamp;
    row.source = msg.source;
    if (const auto* a = std::get_if<ais::PositionReportA>(&msg.body)) {
        if (!a->lon || !a->lat) return std::nullopt;
        row.lon = *a->lon;
        row.lat = *a->lat;
        row.sog = a->sog;
        row.cog = a->cog;
        row.heading = a->heading;
        row.nav_status = a->nav_status;
        return row;
    }
    if (const auto* b = std::get_if<ais::PositionReportB>(&msg.body)) {
        if (!b->lon || !b->lat) return std::nullopt;
        row.lon = *b->lon;
        row.lat = *b->lat;
        row.sog = b->sog;
        row.cog = b->cog;
        row.heading = b->heading;
        return row;
    }
    return std::nullopt;
}

std::optional<StaticRow> to_static_row(const ais::DecodedMessage& msg) {
    StaticRow row;
    row.mmsi = msg.mmsi;
    row.time = msg.timestamp;
    row.source = msg.source;
    if (const auto* s = std::get_if<ais::StaticVoyage>(&msg.body)) {
        if (s->imo != 0) row.imo = s->imo;
        row.callsign = s->callsign;
        row.ship_name = s->ship_name;
        row.ship_type = nonzero(s->ship_type);
        fill_dims(row, s->dims);
        if (s->draught > 0.0) row.draught = s->draught;
        row.destination = s->destination;
        row.eta = format_eta(s->eta);
        return row;
    }
    if (const auto* s = std::get_if<ais::StaticDataReport>(&msg.body)) {
        if (s->part == 0) {
            row.ship_name = s->ship_name;
        } else {
            row.ship_type = nonzero(s->ship_type);
            row.callsign = s->callsign;
            fill_dims(row, s->dims);
        }
        return row;
    }
    if (const auto* b = std::get_if<ais::PositionReportB>(&msg.body); b && b->extension) {
        row.ship_name = b->extension->ship_name;
        row.ship_type = nonzero(b->extension->ship_type);
        fill_dims(row, b->extension->dims);
        return row;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::optional<DynamicRow> RowCursor::next() {
    if (!stmt_) return std::nullopt;
    for (;;) {
        const int rc = sqlite3_step(stmt_.get());
        if (rc == SQLITE_DONE) {
            stmt_.reset();
            return std::nullopt;
        }
        if (rc != SQLITE_ROW) {
            const std::string msg = sqlite3_errmsg(sqlite3_db_handle(stmt_.get()));
            stmt_.reset();
            throw StorageError("scan failed: " + msg);
        }
        sqlite3_stmt* s = stmt_.get();
        DynamicRow row;
        row.mmsi = static_cast<std::uint32_t>(sqlite3_column_int64(s, 0));
        if (residual_mmsis_ && !residual_mmsis_->contains(row.mmsi)) continue;
        row.time = sqlite3_column_int64(s, 1);
        row.lon = sqlite3_column_double(s, 2);
        row.lat = sqlite3_column_double(s, 3);
        row.sog = column_opt<double>(s, 4);
        row.cog = column_opt<double>(s, 5);
        row.heading = column_opt<int>(s, 6);
        row.nav_status = column_opt<int>(s, 7);
        row.source = column_text(s, 8);
        return row;
    }
}

// ---------------------------------------------------------------------------

StorageHandle StorageHandle::open(const std::filesystem::path& location, BackendKind kind,
                                  OpenMode mode) {
    StorageHandle h;
    h.kind_ = kind;
    h.mode_ = mode;
    h.location_ = location;
    const int flags = mode == OpenMode::ReadOnly ? SQLITE_OPEN_READONLY
                                                 : SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE;
    if (sqlite3_open_v2(location.string().c_str(), &h.db_, flags, nullptr) != SQLITE_OK) {
        const std::string msg = h.db_ ? sqlite3_errmsg(h.db_) : "out of memory";
        throw StorageError("cannot open store " + location.string() + ": " + msg);
    }
    sqlite3_busy_timeout(h.db_, 10000);
    const int version = h.schema_version();
    if (version > kSchemaVersion) {
        throw StorageError("store schema version " + std::to_string(version) +
                           " is newer than supported version " + std::to_string(kSchemaVersion));
    }
    if (mode == OpenMode::ReadWrite) h.init_schema();
    return h;
}

StorageHandle::StorageHandle(StorageHandle&& o) noexcept
    : db_(std::exchange(o.db_, nullptr)),
      kind_(o.kind_),
      mode_(o.mode_),
      location_(std::move(o.location_)),
      known_dynamic_(std::move(o.known_dynamic_)),
      known_static_(std::move(o.known_static_)) {}

StorageHandle& StorageHandle::operator=(StorageHandle&& o) noexcept {
    if (this != &o) {
        if (db_) sqlite3_close_v2(db_);
        db_ = std::exchange(o.db_, nullptr);
        kind_ = o.kind_;
        mode_ = o.mode_;
        location_ = std::move(o.location_);
        known_dynamic_ = std::move(o.known_dynamic_);
        known_static_ = std::move(o.known_static_);
    }
    return *this;
}

StorageHandle::~StorageHandle() {
    if (db_) sqlite3_close_v2(db_);
}

void StorageHandle::exec(const std::string& sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw StorageError(msg + " [" + sql.substr(0, 80) + "]");
    }
}

Stmt StorageHandle::prepare(const std::string& sql) const {
    sqlite3_stmt* s = nullptr;
    if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &s, nullptr) != SQLITE_OK) {
        throw StorageError(std::string(sqlite3_errmsg(db_)) + " [" + sql.substr(0, 80) + "]");
    }
    return Stmt(s);
}

bool StorageHandle::table_exists(const std::string& name) const {
    auto s = prepare("SELECT 1 FROM sqlite_master WHERE type='table' AND name=?1");
    sqlite3_bind_text(s.get(), 1, name.c_str(), -1, SQLITE_TRANSIENT);
    return sqlite3_step(s.get()) == SQLITE_ROW;
}

int StorageHandle::schema_version() const {
    if (!table_exists("aiskit_meta")) return 0;
    auto s = prepare("SELECT value FROM aiskit_meta WHERE key='schema_version'");
    if (sqlite3_step(s.get()) != SQLITE_ROW) return 0;
    return sqlite3_column_int(s.get(), 0);
}

void StorageHandle::init_schema() {
    exec("CREATE TABLE IF NOT EXISTS aiskit_meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)");
    exec("INSERT OR IGNORE INTO aiskit_meta VALUES ('schema_version', '" +
         std::to_string(kSchemaVersion) + "')");
    if (!table_exists("coarsetype_ref")) {
        exec("BEGIN");
        exec("CREATE TABLE coarsetype_ref (coarse_type INTEGER PRIMARY KEY, coarse_type_txt TEXT NOT NULL)");
        auto s = prepare("INSERT INTO coarsetype_ref VALUES (?1, ?2)");
        for (int code = 0; code < 256; ++code) {
            const auto name = ship_type_name(code);
            sqlite3_bind_int(s.get(), 1, code);
            sqlite3_bind_text(s.get(), 2, name.data(), static_cast<int>(name.size()), SQLITE_TRANSIENT);
            sqlite3_step(s.get());
            sqlite3_reset(s.get());
        }
        exec("COMMIT");
    }
}

void StorageHandle::ensure_dynamic(int month) {
    if (known_dynamic_.contains(month)) return;
    const std::string t = dynamic_table(month);
    exec("CREATE TABLE IF NOT EXISTS " + t +
         " (mmsi INTEGER NOT NULL, time INTEGER NOT NULL, longitude REAL NOT NULL,"
         " latitude REAL NOT NULL, sog REAL, cog REAL, heading INTEGER, nav_status INTEGER,"
         " source TEXT NOT NULL DEFAULT '',"
         " PRIMARY KEY (mmsi, time, longitude, latitude)) WITHOUT ROWID");
    exec("CREATE INDEX IF NOT EXISTS idx_" + t + "_time_lon_lat ON " + t +
         " (time, longitude, latitude)");
    known_dynamic_.insert(month);
}

void StorageHandle::ensure_static(int month) {
    if (known_static_.contains(month)) return;
    const std::string t = static_table(month);
    exec("CREATE TABLE IF NOT EXISTS " + t +
         " (mmsi INTEGER NOT NULL, time INTEGER NOT NULL, imo INTEGER, callsign TEXT,"
         " ship_name TEXT, ship_type INTEGER, dim_bow INTEGER, dim_stern INTEGER,"
         " dim_port INTEGER, dim_star INTEGER, draught REAL, destination TEXT, eta TEXT,"
         " source TEXT NOT NULL DEFAULT '')");
    exec("CREATE INDEX IF NOT EXISTS idx_" + t + "_mmsi_time ON " + t + " (mmsi, time)");
    known_static_.insert(month);
}

IngestReport StorageHandle::insert_messages(std::span<const ais::DecodedMessage> batch) {
    if (read_only()) throw StorageError("store opened read-only");
    IngestReport report;
    if (batch.empty()) return report;

    std::map<int, Stmt> dyn_stmts;
    std::map<int, Stmt> static_stmts;
    auto dyn_stmt = [&](int month) -> sqlite3_stmt* {
        auto it = dyn_stmts.find(month);
        if (it == dyn_stmts.end()) {
            ensure_dynamic(month);
            it = dyn_stmts.emplace(month, prepare("INSERT OR IGNORE INTO " + dynamic_table(month) +
                                                  " VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9)")).first;
        }
        return it->second.get();
    };
    auto static_stmt = [&](int month) -> sqlite3_stmt* {
        auto it = static_stmts.find(month);
        if (it == static_stmts.end()) {
            ensure_static(month);
            it = static_stmts.emplace(month, prepare("INSERT INTO " + static_table(month) +
                                                     " VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9,?10,?11,?12,?13,?14)")).first;
        }
        return it->second.get();
    };
    auto step = [&](sqlite3_stmt* s) {
        const int rc = sqlite3_step(s);
        sqlite3_reset(s);
        sqlite3_clear_bindings(s);
        if (rc != SQLITE_DONE) throw StorageError(std::string("insert failed: ") + sqlite3_errmsg(db_));
    };
    auto insert_static = [&](const StaticRow& r) {
        sqlite3_stmt* s = static_stmt(month_of(r.time));
        sqlite3_bind_int64(s, 1, r.mmsi);
        sqlite3_bind_int64(s, 2, r.time);
        bind_opt(s, 3, r.imo);
        bind_text(s, 4, r.callsign, true);
        bind_text(s, 5, r.ship_name, true);
        bind_opt(s, 6, r.ship_type);
        bind_opt(s, 7, r.dim_bow);
        bind_opt(s, 8, r.dim_stern);
        bind_opt(s, 9, r.dim_port);
        bind_opt(s, 10, r.dim_starboard);
        bind_opt(s, 11, r.draught);
        bind_text(s, 12, r.destination, true);
        bind_text(s, 13, r.eta, true);
        bind_text(s, 14, r.source, false);
        step(s);
        ++report.static_rows;
    };

    exec("BEGIN IMMEDIATE");
    try {
        for (const auto& msg : batch) {
            if (!msg.supported()) {
                ++report.unsupported_skipped;
                continue;
            }
            if (msg.is_position()) {
                const auto row = to_dynamic_row(msg);
                if (!row) {
                    ++report.invalid_skipped;
                    continue;
                }
                sqlite3_stmt* s = dyn_stmt(month_of(row->time));
                sqlite3_bind_int64(s, 1, row->mmsi);
                sqlite3_bind_int64(s, 2, row->time);
                sqlite3_bind_double(s, 3, row->lon);
                sqlite3_bind_double(s, 4, row->lat);
                bind_opt(s, 5, row->sog);
                bind_opt(s, 6, row->cog);
                bind_opt(s, 7, row->heading);
                bind_opt(s, 8, row->nav_status);
                bind_text(s, 9, row->source, false);
                step(s);
                if (sqlite3_changes(db_) == 0) {
                    ++report.duplicates_skipped;
                    continue;
                }
                ++report.dynamic_rows;
                ++report.messages_stored;
                // Type 19 also carries static fields.
                if (auto st = to_static_row(msg)) insert_static(*st);
                continue;
            }
            if (auto st = to_static_row(msg)) {
                insert_static(*st);
                ++report.messages_stored;
            }
        }
        dyn_stmts.clear();
        static_stmts.clear();
        exec("COMMIT");
    } catch (...) {
        dyn_stmts.clear();
        static_stmts.clear();
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        // Partitions created inside the failed transaction are gone again.
        known_dynamic_.clear();
        known_static_.clear();
        throw;
    }
    return report;
}

std::size_t StorageHandle::aggregate_statics(int month) {
    if (read_only()) throw StorageError("store opened read-only");
    struct Acc {
        ModeCounter<std::string> name, callsign;
        ModeCounter<int> type, bow, stern, port, star;
        ModeCounter<std::uint32_t> imo;
        ModeCounter<double> draught;
    };
    std::map<std::uint32_t, Acc> acc;
    if (table_exists(static_table(month))) {
        auto s = prepare("SELECT mmsi, time, imo, callsign, ship_name, ship_type, dim_bow, dim_stern,"
                         " dim_port, dim_star, draught FROM " + static_table(month) +
                         " ORDER BY mmsi, time");
        std::size_t seq = 0;
        while (sqlite3_step(s.get()) == SQLITE_ROW) {
            sqlite3_stmt* q = s.get();
            auto& a = acc[static_cast<std::uint32_t>(sqlite3_column_int64(q, 0))];
            const std::int64_t t = sqlite3_column_int64(q, 1);
            ++seq;
            a.imo.add(column_opt<std::uint32_t>(q, 2), t, seq);
            a.callsign.add(text_opt(column_text(q, 3)), t, seq);
            a.name.add(text_opt(column_text(q, 4)), t, seq);
            a.type.add(column_opt<int>(q, 5), t, seq);
            a.bow.add(column_opt<int>(q, 6), t, seq);
            a.stern.add(column_opt<int>(q, 7), t, seq);
            a.port.add(column_opt<int>(q, 8), t, seq);
            a.star.add(column_opt<int>(q, 9), t, seq);
            a.draught.add(column_opt<double>(q, 10), t, seq);
        }
    }

    const std::string t = aggregate_table(month);
    exec("BEGIN IMMEDIATE");
    try {
        exec("DROP TABLE IF EXISTS " + t);
        exec("CREATE TABLE " + t +
             " (mmsi INTEGER PRIMARY KEY, ship_name TEXT, ship_type INTEGER, imo INTEGER,"
             " callsign TEXT, dim_bow INTEGER, dim_stern INTEGER, dim_port INTEGER,"
             " dim_star INTEGER, draught REAL)");
        auto ins = prepare("INSERT INTO " + t + " VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9,?10)");
        sqlite3_stmt* s = ins.get();
        for (const auto& [mmsi, a] : acc) {
            sqlite3_bind_int64(s, 1, mmsi);
            bind_text(s, 2, a.name.best().value_or(""), true);
            bind_opt(s, 3, a.type.best());
            bind_opt(s, 4, a.imo.best());
            bind_text(s, 5, a.callsign.best().value_or(""), true);
            bind_opt(s, 6, a.bow.best());
            bind_opt(s, 7, a.stern.best());
            bind_opt(s, 8, a.port.best());
            bind_opt(s, 9, a.star.best());
            bind_opt(s, 10, a.draught.best());
            if (sqlite3_step(s) != SQLITE_DONE) throw StorageError(sqlite3_errmsg(db_));
            sqlite3_reset(s);
        }
        ins.reset();
        exec("COMMIT");
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        throw;
    }
    return acc.size();
}

std::vector<int> StorageHandle::list_partitions() const {
    std::set<int> months;
    auto s = prepare("SELECT name FROM sqlite_master WHERE type='table' AND name LIKE 'ais\\_%' ESCAPE '\\'");
    while (sqlite3_step(s.get()) == SQLITE_ROW) {
        const std::string name = column_text(s.get(), 0);
        int month = 0;
        char kind[16] = {};
        if (std::sscanf(name.c_str(), "ais_%6d_%15s", &month, kind) == 2 &&
            (std::string(kind) == "dynamic" || std::string(kind) == "static")) {
            months.insert(month);
        }
    }
    return {months.begin(), months.end()};
}

RowCursor StorageHandle::scan(std::span<const int> months, const ScanFilter& filter) const {
    if (months.empty()) throw ContractViolation("scan needs at least one month");
    constexpr std::size_t kMaxInlineMmsis = 512;

    std::string where;
    auto add = [&](const std::string& clause) { where += (where.empty() ? " WHERE " : " AND ") + clause; };
    if (filter.start) add("time >= ?1");
    if (filter.end) add("time <= ?2");
    if (filter.bbox) {
        add("latitude BETWEEN ?5 AND ?6");
        add(filter.bbox->wraps() ? "(longitude >= ?3 OR longitude <= ?4)" : "longitude BETWEEN ?3 AND ?4");
    }
    const bool inline_mmsis = filter.mmsis && filter.mmsis->size() <= kMaxInlineMmsis;
    if (inline_mmsis) {
        std::string list;
        for (auto m : *filter.mmsis) list += (list.empty() ? "" : ",") + std::to_string(m);
        add("mmsi IN (" + list + ")");
    }

    std::string sql;
    for (int month : months) {
        if (!table_exists(dynamic_table(month))) continue;
        if (!sql.empty()) sql += " UNION ALL ";
        sql += "SELECT mmsi, time, longitude, latitude, sog, cog, heading, nav_status, source FROM " +
               dynamic_table(month) + where;
    }
    RowCursor cursor;
    if (sql.empty()) return cursor;
    sql += " ORDER BY 1, 2, 3, 4";

    cursor.stmt_ = prepare(sql);
    sqlite3_stmt* s = cursor.stmt_.get();
    if (filter.start) sqlite3_bind_int64(s, 1, *filter.start);
    if (filter.end) sqlite3_bind_int64(s, 2, *filter.end);
    if (filter.bbox) {
        sqlite3_bind_double(s, 3, filter.bbox->xmin);
        sqlite3_bind_double(s, 4, filter.bbox->xmax);
        sqlite3_bind_double(s, 5, filter.bbox->ymin);
        sqlite3_bind_double(s, 6, filter.bbox->ymax);
    }
    if (filter.mmsis && !inline_mmsis) cursor.residual_mmsis_ = filter.mmsis;
    return cursor;
}

std::vector<DynamicRow> StorageHandle::scan_all(std::span<const int> months, const ScanFilter& filter) const {
    std::vector<DynamicRow> out;
    if (months.empty()) return out;
    auto cursor = scan(months, filter);
    while (auto row = cursor.next()) out.push_back(std::move(*row));
    return out;
}

std::vector<StaticRow> StorageHandle::static_rows(int month) const {
    std::vector<StaticRow> out;
    if (!table_exists(static_table(month))) return out;
    auto s = prepare("SELECT mmsi, time, imo, callsign, ship_name, ship_type, dim_bow, dim_stern,"
                     " dim_port, dim_star, draught, destination, eta, source FROM " +
                     static_table(month) + " ORDER BY mmsi, time");
    while (sqlite3_step(s.get()) == SQLITE_ROW) {
        sqlite3_stmt* q = s.get();
        StaticRow r;
        r.mmsi = static_cast<std::uint32_t>(sqlite3_column_int64(q, 0));
        r.time = sqlite3_column_int64(q, 1);
        r.imo = column_opt<std::uint32_t>(q, 2);
        r.callsign = column_text(q, 3);
        r.ship_name = column_text(q, 4);
        r.ship_type = column_opt<int>(q, 5);
        r.dim_bow = column_opt<int>(q, 6);
        r.dim_stern = column_opt<int>(q, 7);
        r.dim_port = column_opt<int>(q, 8);
        r.dim_starboard = column_opt<int>(q, 9);
        r.draught = column_opt<double>(q, 10);
        r.destination = column_text(q, 11);
        r.eta = column_text(q, 12);
        r.source = column_text(q, 13);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

AggregateRow read_aggregate(sqlite3_stmt* q) {
    AggregateRow r;
    r.mmsi = static_cast<std::uint32_t>(sqlite3_column_int64(q, 0));
    r.ship_name = column_text(q, 1);
    r.ship_type = column_opt<int>(q, 2);
    r.imo = column_opt<std::uint32_t>(q, 3);
    r.callsign = column_text(q, 4);
    r.dim_bow = column_opt<int>(q, 5);
    r.dim_stern = column_opt<int>(q, 6);
    r.dim_port = column_opt<int>(q, 7);
    r.dim_starboard = column_opt<int>(q, 8);
    r.draught = column_opt<double>(q, 9);
    return r;
}

}  // namespace

std::vector<AggregateRow> StorageHandle::aggregate_rows(int month) const {
    std::vector<AggregateRow> out;
    if (!table_exists(aggregate_table(month))) return out;
    auto s = prepare("SELECT * FROM " + aggregate_table(month) + " ORDER BY mmsi");
    while (sqlite3_step(s.get()) == SQLITE_ROW) out.push_back(read_aggregate(s.get()));
    return out;
}

std::optional<AggregateRow> StorageHandle::vessel(std::uint32_t mmsi) const {
    const auto months = list_partitions();
    for (auto it = months.rbegin(); it != months.rend(); ++it) {
        if (!table_exists(aggregate_table(*it))) continue;
        auto s = prepare("SELECT * FROM " + aggregate_table(*it) + " WHERE mmsi = ?1");
        sqlite3_bind_int64(s.get(), 1, mmsi);
        if (sqlite3_step(s.get()) == SQLITE_ROW) return read_aggregate(s.get());
    }
    return std::nullopt;
}

std::vector<PartitionSummary> StorageHandle::summary() const {
    std::vector<PartitionSummary> out;
    auto count = [&](const std::string& table) -> std::uint64_t {
        if (!table_exists(table)) return 0;
        auto s = prepare("SELECT COUNT(*) FROM " + table);
        sqlite3_step(s.get());
        return static_cast<std::uint64_t>(sqlite3_column_int64(s.get(), 0));
    };
    for (int month : list_partitions()) {
        out.push_back({month, count(dynamic_table(month)), count(static_table(month)),
                       count(aggregate_table(month))});
    }
    return out;
}

}  // namespace aiskit::store
