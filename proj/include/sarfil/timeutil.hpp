#pragma once

#include <cstdint>
#include <string>

namespace sarfil {

// All timestamps are UTC seconds since the Unix epoch.

// Parses "YYYY-MM-DDTHH:MM:SS" with optional trailing 'Z' ('T' may be a
// space). Throws DataError on malformed input.
std::int64_t parse_iso_utc(const std::string& text);

std::string format_iso_utc(std::int64_t t_utc);

// Hour stamps, e.g. for the hourly binned series.
inline std::int64_t hour_of(std::int64_t t_utc) {
    // Unix epoch is hour-aligned; negative times are not used here.
    return t_utc >= 0 ? t_utc / 3600 : (t_utc - 3599) / 3600;
}
inline std::int64_t hour_to_utc(std::int64_t hour) { return hour * 3600; }
std::string format_iso_hour(std::int64_t hour);

// UTC calendar date as days since epoch.
std::int64_t day_of(std::int64_t t_utc);
int year_of(std::int64_t t_utc);

// Inclusive month-day season window, start <= end within one year.
bool in_season(std::int64_t t_utc, int start_month, int start_day,
               int end_month, int end_day);

} // namespace sarfil
