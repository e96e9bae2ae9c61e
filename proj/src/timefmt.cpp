#include "aiskit/timefmt.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "aiskit/error.hpp"

namespace aiskit {
namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    const char* first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
}

[[noreturn]] void bad_time(std::string_view text) {
    throw FormatError("unrecognised time '" + std::string(text) + "'");
}

}  // namespace

std::string epoch_to_text(std::int64_t seconds) {
    const sys_seconds tp{std::chrono::seconds{seconds}};
    const sys_days day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::int64_t text_to_epoch(std::string_view text) {
    if (text.empty()) bad_time(text);
    if (text.find('-', 1) == std::string_view::npos) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) bad_time(text);
        return v;
    }

    std::string_view s = text;
    if (s.back() == 'Z') s.remove_suffix(1);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, mo) ||
        s[7] != '-' || !read_int(s, 8, 2, d)) {
        bad_time(text);
    }
    if (s.size() > 10) {
        if ((s[10] != 'T' && s[10] != ' ') || s.size() < 16 || !read_int(s, 11, 2, h) ||
            s[13] != ':' || !read_int(s, 14, 2, mi)) {
            bad_time(text);
        }
        if (s.size() > 16) {
            if (s.size() != 19 || s[16] != ':' || !read_int(s, 17, 2, sec)) bad_time(text);
        }
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) bad_time(text);
    const sys_seconds tp = sys_days{ymd} + hours{h} + minutes{mi} + std::chrono::seconds{sec};
    return tp.time_since_epoch().count();
}

int month_of(std::int64_t seconds) {
    const sys_days day = floor<days>(sys_seconds{std::chrono::seconds{seconds}});
    const year_month_day ymd{day};
    return static_cast<int>(ymd.year()) * 100 + static_cast<int>(static_cast<unsigned>(ymd.month()));
}

std::int64_t month_start(int yyyymm) {
    const year_month_day ymd{year{yyyymm / 100}, month{static_cast<unsigned>(yyyymm % 100)}, day{1}};
    return sys_seconds{sys_days{ymd}}.time_since_epoch().count();
}

std::int64_t month_end(int yyyymm) {
    const year_month_day ymd{year{yyyymm / 100}, month{static_cast<unsigned>(yyyymm % 100)}, day{1}};
    return sys_seconds{sys_days{ymd + months{1}}}.time_since_epoch().count();
}

}  // namespace aiskit
