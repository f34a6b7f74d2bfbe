#include "aicarbon/timeutil.h"

#include <fmt/format.h>

#include <charconv>
#include <chrono>
#include <cmath>

namespace aicarbon {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out)
{
    if (pos + len > text.size()) {
        return false;
    }
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc() && ptr == text.data() + pos + len;
}

}

std::optional<EpochSeconds> parse_rfc3339(std::string_view text)
{
    using namespace std::chrono;

    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (text.size() < 20 || !read_int(text, 0, 4, year) || text[4] != '-' || !read_int(text, 5, 2, month) || text[7] != '-' ||
        !read_int(text, 8, 2, day) || (text[10] != 'T' && text[10] != 't' && text[10] != ' ') || !read_int(text, 11, 2, hour) ||
        text[13] != ':' || !read_int(text, 14, 2, minute) || text[16] != ':' || !read_int(text, 17, 2, second)) {
        return std::nullopt;
    }

    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
        return std::nullopt;
    }

    std::size_t pos = 19;
    double fraction = 0.0;
    if (text[pos] == '.') {
        std::size_t end = pos + 1;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') {
            ++end;
        }
        if (end == pos + 1) {
            return std::nullopt;
        }
        fraction = std::stod(std::string(text.substr(pos, end - pos)));
        pos = end;
    }

    if (pos >= text.size()) {
        return std::nullopt;
    }

    std::int64_t offset = 0;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        int oh = 0, om = 0;
        if (!read_int(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' || !read_int(text, pos + 4, 2, om)) {
            return std::nullopt;
        }
        offset = (text[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != text.size()) {
        return std::nullopt;
    }

    const auto days = sys_days(ymd).time_since_epoch().count();
    const auto seconds = static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second - offset;
    return seconds + static_cast<std::int64_t>(std::llround(fraction));
}

std::string format_rfc3339(EpochSeconds t)
{
    using namespace std::chrono;

    auto days = t >= 0 ? t / 86400 : (t - 86399) / 86400;
    auto rem = t - days * 86400;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), rem / 3600, (rem % 3600) / 60,
                       rem % 60);
}

std::optional<EpochSeconds> snap_to_grid(EpochSeconds t, std::int64_t gridSeconds, std::int64_t toleranceSeconds)
{
    auto lower = t >= 0 ? (t / gridSeconds) * gridSeconds : ((t - gridSeconds + 1) / gridSeconds) * gridSeconds;
    auto upper = lower + gridSeconds;
    if (t - lower <= toleranceSeconds) {
        return lower;
    }
    if (upper - t <= toleranceSeconds) {
        return upper;
    }
    return std::nullopt;
}

}
