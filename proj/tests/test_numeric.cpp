#include "aicarbon/csv.h"
#include "aicarbon/numeric.h"
#include "aicarbon/timeutil.h"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace aicarbon;

TEST_CASE("ExactSum survives catastrophic cancellation")
{
    ExactSum s;
    for (double x : {1e100, 1.0, -1e100}) {
        s += x;
    }
    CHECK(s.value() == 1.0);

    std::vector<double> tenths(10, 0.1);
    CHECK(exact_sum(tenths) == 1.0);

    // correctly rounded: 1 + 2^-53 + 2^-53 is exactly 1 + 2^-52
    std::vector<double> ties = {1.0, 0x1p-53, 0x1p-53};
    CHECK(exact_sum(ties) == 1.0 + 0x1p-52);
}

TEST_CASE("ExactSum is order independent and mergeable")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(-20, 20);
    std::vector<double> values;
    for (int i = 0; i < 2000; ++i) {
        values.push_back(std::ldexp(mag(rng), static_cast<int>(mag(rng))));
    }
    const double reference = exact_sum(values);
    for (int round = 0; round < 10; ++round) {
        std::shuffle(values.begin(), values.end(), rng);
        CHECK(exact_sum(values) == reference);

        ExactSum left;
        ExactSum right;
        for (std::size_t i = 0; i < values.size(); ++i) {
            (i % 3 == 0 ? left : right) += values[i];
        }
        left.merge(right);
        CHECK(left.value() == reference);
    }
}

TEST_CASE("lifetime constants")
{
    CHECK(lifetime_hours(6) == 52596.0);
    CHECK(lifetime_seconds(6) == 189345600.0);
    CHECK(relative_difference(0, 0) == 0.0);
    CHECK(relative_difference(100, 99) == doctest::Approx(0.01));
}

TEST_CASE("RFC 3339 parsing")
{
    CHECK(parse_rfc3339("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_rfc3339("2024-10-01T00:05:00Z") == 1727741100);
    CHECK(parse_rfc3339("2024-10-01T02:05:00+02:00") == 1727741100);
    CHECK(parse_rfc3339("2024-09-30T23:35:00-00:30") == 1727741100);
    CHECK(parse_rfc3339("2024-10-01T00:05:00.000Z") == 1727741100);
    CHECK_FALSE(parse_rfc3339("2024-13-01T00:00:00Z"));
    CHECK_FALSE(parse_rfc3339("2024-10-01 00:00:00"));
    CHECK_FALSE(parse_rfc3339("yesterday"));
    CHECK_FALSE(parse_rfc3339(""));
    CHECK(format_rfc3339(1727741100) == "2024-10-01T00:05:00Z");
}

TEST_CASE("snapping to the five-minute grid")
{
    CHECK(snap_to_grid(603, 300, 5) == 600);
    CHECK(snap_to_grid(597, 300, 5) == 600);
    CHECK(snap_to_grid(605, 300, 5) == 600);
    CHECK_FALSE(snap_to_grid(606, 300, 5));
    CHECK_FALSE(snap_to_grid(750, 300, 5));
    CHECK(snap_to_grid(-2, 300, 5) == 0);
}

TEST_CASE("CSV field handling")
{
    CHECK(csv::split_line("a,b,,d") == std::vector<std::string>{"a", "b", "", "d"});
    CHECK(csv::split_line(R"("x,y","say ""hi""",z)") == std::vector<std::string>{"x,y", R"(say "hi")", "z"});
    CHECK(csv::parse_double(" 1.5 ") == 1.5);
    CHECK(csv::parse_double("1e18") == 1e18);
    CHECK_FALSE(csv::parse_double("1.5x"));
    CHECK_FALSE(csv::parse_double(""));
    CHECK_FALSE(csv::parse_double("nan"));
}
