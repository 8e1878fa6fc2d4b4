#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "carbcast/errors.hpp"

namespace carbcast {

/// Calendar date, serialized as ISO-8601 YYYY-MM-DD.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01 (civil-calendar algorithm, proleptic Gregorian).
    long to_days() const {
        long y = year;
        const unsigned m = static_cast<unsigned>(month);
        const unsigned d = static_cast<unsigned>(day);
        y -= m <= 2;
        const long era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<long>(doe) - 719468;
    }

    static Date from_days(long z) {
        z += 719468;
        const long era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long y = static_cast<long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
    }

    Date plus_days(long n) const { return from_days(to_days() + n); }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    static bool is_leap(int y) {
        return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    }

    static int days_in_month(int y, int m) {
        static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        if (m == 2 && is_leap(y)) return 29;
        return lengths[m - 1];
    }

    static Date parse(std::string_view text) {
        auto fail = [&] { throw ParseError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD"); };
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
        Date d;
        auto read = [&](std::string_view part, int& out) {
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
            if (ec != std::errc{} || ptr != part.data() + part.size()) fail();
        };
        read(text.substr(0, 4), d.year);
        read(text.substr(5, 2), d.month);
        read(text.substr(8, 2), d.day);
        if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) fail();
        return d;
    }
};

} // namespace carbcast
