#include "sarfil/timeutil.hpp"

#include <chrono>
#include <cstdio>

#include "sarfil/error.hpp"

namespace sarfil {

namespace ch = std::chrono;

namespace {

bool all_digits(const std::string& s, std::size_t pos, std::size_t n) {
    if (pos + n > s.size()) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (s[pos + i] < '0' || s[pos + i] > '9') return false;
    return true;
}

int num(const std::string& s, std::size_t pos, std::size_t n) {
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) v = v * 10 + (s[pos + i] - '0');
    return v;
}

} // namespace

std::int64_t parse_iso_utc(const std::string& text) {
    // YYYY-MM-DDTHH:MM:SS[Z]
    const std::string& s = text;
    bool ok = s.size() >= 19 && all_digits(s, 0, 4) && s[4] == '-' &&
              all_digits(s, 5, 2) && s[7] == '-' && all_digits(s, 8, 2) &&
              (s[10] == 'T' || s[10] == ' ') && all_digits(s, 11, 2) &&
              s[13] == ':' && all_digits(s, 14, 2) && s[16] == ':' &&
              all_digits(s, 17, 2);
    if (ok) {
        std::size_t rest = 19;
        if (rest < s.size() && s[rest] == 'Z') ++rest;
        ok = rest == s.size();
    }
    if (!ok) throw DataError("bad ISO-8601 UTC timestamp: '" + text + "'");

    const int y = num(s, 0, 4), mo = num(s, 5, 2), d = num(s, 8, 2);
    const int hh = num(s, 11, 2), mi = num(s, 14, 2), ss = num(s, 17, 2);
    ch::year_month_day ymd{ch::year{y}, ch::month{unsigned(mo)}, ch::day{unsigned(d)}};
    if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60)
        throw DataError("bad calendar date or time: '" + text + "'");
    const auto days = ch::sys_days{ymd}.time_since_epoch();
    return ch::duration_cast<ch::seconds>(days).count() + hh * 3600 + mi * 60 + ss;
}

std::string format_iso_utc(std::int64_t t_utc) {
    const std::int64_t d = day_of(t_utc);
    std::int64_t sec = t_utc - d * 86400;
    ch::year_month_day ymd{ch::sys_days{ch::days{d}}};
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  int(sec / 3600), int((sec % 3600) / 60), int(sec % 60));
    return buf;
}

std::string format_iso_hour(std::int64_t hour) {
    return format_iso_utc(hour_to_utc(hour));
}

std::int64_t day_of(std::int64_t t_utc) {
    return t_utc >= 0 ? t_utc / 86400 : (t_utc - 86399) / 86400;
}

int year_of(std::int64_t t_utc) {
    ch::year_month_day ymd{ch::sys_days{ch::days{day_of(t_utc)}}};
    return int(ymd.year());
}

bool in_season(std::int64_t t_utc, int start_month, int start_day,
               int end_month, int end_day) {
    ch::year_month_day ymd{ch::sys_days{ch::days{day_of(t_utc)}}};
    const int md = int(unsigned(ymd.month())) * 100 + int(unsigned(ymd.day()));
    const int lo = start_month * 100 + start_day;
    const int hi = end_month * 100 + end_day;
    return md >= lo && md <= hi;
}

} // namespace sarfil
