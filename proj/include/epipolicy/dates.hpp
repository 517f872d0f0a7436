#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "epipolicy/errors.hpp"

namespace epipolicy {

// Calendar day stored as a serial day count (days since 1970-01-01).
// Civil conversions use the algorithms from Howard Hinnant's chrono notes,
// valid over the whole proleptic Gregorian calendar.
class Date {
  public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t serial) : serial_(serial) {}

    static constexpr Date from_ymd(int y, int m, int d) {
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date(era * 146097 + static_cast<std::int32_t>(doe) - 719468);
    }

    struct Ymd {
        int year;
        int month;
        int day;
    };

    constexpr Ymd ymd() const {
        std::int32_t z = serial_ + 719468;
        const std::int32_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const int y = static_cast<int>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
    }

    // Parses strict "YYYY-MM-DD".
    static Date parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw ParseError("bad date '" + std::string(text) + "': expected YYYY-MM-DD");
        }
        auto field = [&](std::size_t pos, std::size_t len) {
            int value = 0;
            const char* first = text.data() + pos;
            auto [ptr, ec] = std::from_chars(first, first + len, value);
            if (ec != std::errc() || ptr != first + len) {
                throw ParseError("bad date '" + std::string(text) + "': non-numeric field");
            }
            return value;
        };
        const int y = field(0, 4);
        const int m = field(5, 2);
        const int d = field(8, 2);
        if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
            throw ParseError("bad date '" + std::string(text) + "': no such calendar day");
        }
        return from_ymd(y, m, d);
    }

    std::string to_string() const {
        const Ymd c = ymd();
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.year, c.month, c.day);
        return std::string(buf);
    }

    constexpr std::int32_t serial() const { return serial_; }

    constexpr Date operator+(int days) const { return Date(serial_ + days); }
    constexpr Date operator-(int days) const { return Date(serial_ - days); }
    constexpr int operator-(Date other) const { return serial_ - other.serial_; }
    Date& operator++() {
        ++serial_;
        return *this;
    }

    constexpr auto operator<=>(const Date&) const = default;

    static constexpr bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

    static constexpr int days_in_month(int y, int m) {
        constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : lengths[m - 1];
    }

  private:
    std::int32_t serial_ = 0;
};

}  // namespace epipolicy
