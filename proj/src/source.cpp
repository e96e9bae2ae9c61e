#include <cctype>
#include <fstream>
#include <sstream>

#include "aiskit/csv_schema.hpp"
#include "aiskit/decoder.hpp"
#include "aiskit/error.hpp"
#include "aiskit/zip.hpp"

namespace aiskit::ais {
namespace {

bool has_extension(const std::string& name, std::string_view ext) {
    if (name.size() < ext.size()) return false;
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const char c = name[name.size() - ext.size() + i];
        if (std::tolower(static_cast<unsigned char>(c)) != ext[i]) return false;
    }
    return true;
}

// CSV rows become class A (nav_status present) or class B position reports.
DecodedMessage message_from_row(const DynamicRow& row) {
    DecodedMessage m;
    m.mmsi = row.mmsi;
    m.timestamp = row.time;
    m.source = row.source;
    if (row.nav_status) {
        m.message_type = 1;
        m.body = PositionReportA{row.lon, row.lat, row.sog, row.cog, row.heading, *row.nav_status};
    } else {
        m.message_type = 18;
        m.body = PositionReportB{row.lon, row.lat, row.sog, row.cog, row.heading, std::nullopt};
    }
    return m;
}

}  // namespace

SourceFormat parse_source_format(std::string_view tag) {
    if (tag == "nm4") return SourceFormat::Nm4;
    if (tag == "csv") return SourceFormat::Csv;
    if (tag == "zip") return SourceFormat::Zip;
    throw FormatError("unknown source format '" + std::string(tag) + "' (expected nm4, csv or zip)");
}

SourceFormat source_format_for(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    if (has_extension(name, ".csv")) return SourceFormat::Csv;
    if (has_extension(name, ".zip")) return SourceFormat::Zip;
    return SourceFormat::Nm4;
}

struct SourceReader::Impl {
    std::optional<zip::Archive> archive;
    std::size_t next_entry = 0;

    std::unique_ptr<std::istream> in;
    bool csv = false;
    bool header_pending = false;
    std::optional<csv::DynamicColumns> columns;

    LineDecoder decoder;
    std::uint64_t csv_lines = 0;
    std::uint64_t csv_malformed = 0;
    std::uint64_t csv_messages = 0;
    bool finished = false;

    explicit Impl(Clock clock) : decoder(std::move(clock)) {}

    void open_stream(std::unique_ptr<std::istream> stream, bool is_csv) {
        in = std::move(stream);
        csv = is_csv;
        header_pending = is_csv;
        columns.reset();
    }

    bool advance_entry() {
        if (!archive) return false;
        while (next_entry < archive->entries().size()) {
            const auto& entry = archive->entries()[next_entry++];
            std::string content;
            try {
                content = archive->read(entry);
            } catch (const FormatError&) {
                ++csv_malformed;  // unreadable member: count and move on
                continue;
            }
            open_stream(std::make_unique<std::istringstream>(std::move(content)),
                        has_extension(entry.name, ".csv"));
            return true;
        }
        return false;
    }

    std::optional<DecodedMessage> next() {
        std::string line;
        for (;;) {
            if (!in || !std::getline(*in, line)) {
                in.reset();
                if (advance_entry()) continue;
                if (!finished) {
                    decoder.finish();
                    finished = true;
                }
                return std::nullopt;
            }
            if (!csv) {
                if (auto msg = decoder.feed(line)) return msg;
                continue;
            }
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (header_pending) {
                header_pending = false;
                try {
                    columns.emplace(line);
                } catch (const FormatError&) {
                    ++csv_malformed;
                    in.reset();  // no usable header: skip this member
                }
                continue;
            }
            ++csv_lines;
            try {
                DecodedMessage m = message_from_row(columns->parse(line));
                ++csv_messages;
                return m;
            } catch (const FormatError&) {
                ++csv_malformed;
            }
        }
    }
};

SourceReader::SourceReader(const std::filesystem::path& path, SourceFormat format, Clock clock)
    : impl_(std::make_unique<Impl>(std::move(clock))) {
    if (format == SourceFormat::Zip) {
        impl_->archive.emplace(path);
        return;
    }
    auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file) throw FormatError("cannot read " + path.string());
    impl_->open_stream(std::move(file), format == SourceFormat::Csv);
}

SourceReader::~SourceReader() = default;
SourceReader::SourceReader(SourceReader&&) noexcept = default;
SourceReader& SourceReader::operator=(SourceReader&&) noexcept = default;

std::optional<DecodedMessage> SourceReader::next() { return impl_->next(); }

SourceStats SourceReader::stats() const {
    const LineStats& s = impl_->decoder.stats();
    return {s.lines + impl_->csv_lines, s.malformed + impl_->csv_malformed,
            s.messages + impl_->csv_messages};
}

std::vector<DecodedMessage> decode_source(const std::filesystem::path& path, SourceFormat format,
                                          Clock clock) {
    SourceReader reader(path, format, std::move(clock));
    std::vector<DecodedMessage> out;
    while (auto m = reader.next()) out.push_back(std::move(*m));
    return out;
}

}  // namespace aiskit::ais
