#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace tsf {

/// Days since 1970-01-01 for a proleptic Gregorian date.
/// Howard Hinnant's days_from_civil algorithm.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 +
                         static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) -
           719468;
}

inline std::int64_t hours_from_civil(int y, int m, int d, int hour) {
    return days_from_civil(y, m, d) * 24 + hour;
}

/// Inverse of days_from_civil.
inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

/// Epoch hour -> "YYYY-MM-DDTHH:00" (ISO-8601, hour precision).
inline std::string format_hour_iso(std::int64_t epoch_hour) {
    std::int64_t days = epoch_hour / 24;
    int hour = static_cast<int>(epoch_hour % 24);
    if (hour < 0) {
        hour += 24;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00", y, m, d, hour);
    return buf;
}

/// Parses "YYYY-MM-DDTHH:MM" (a space is accepted instead of 'T', the
/// minutes part may be omitted). Returns false on malformed input.
inline bool parse_hour_iso(const std::string& text, std::int64_t& epoch_hour) {
    int y = 0, m = 0, d = 0, h = 0, min = 0;
    const int n = std::sscanf(text.c_str(), "%d-%d-%d%*1[T ]%d:%d", &y, &m, &d, &h, &min);
    if (n < 4) return false;
    if (m < 1 || m > 12 || d < 1 || d > 31 || h < 0 || h > 23) return false;
    epoch_hour = hours_from_civil(y, m, d, h);
    return true;
}

}  // namespace tsf
