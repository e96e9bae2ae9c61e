#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace aiskit {

/// "1970-01-01T00:00:00Z" style UTC text at second resolution.
std::string epoch_to_text(std::int64_t seconds);

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" with optional trailing 'Z'
/// (a space may replace 'T'), or a bare integer of unix seconds.
/// Throws FormatError on anything else.
std::int64_t text_to_epoch(std::string_view text);

/// Calendar month key YYYYMM of a unix time (UTC).
int month_of(std::int64_t seconds);
/// First second of the month `yyyymm`, and of the month after it.
std::int64_t month_start(int yyyymm);
std::int64_t month_end(int yyyymm);

}  // namespace aiskit
