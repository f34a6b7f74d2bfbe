#pragma once

#include <span>
#include <vector>

namespace aicarbon {

inline constexpr double kHoursPerYear = 8766.0; // 365.25 days
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kIntervalSeconds = 300.0;
inline constexpr double kFlopsPerExaflop = 1e18;
inline constexpr double kJoulesPerKwh = 3.6e6;
inline constexpr double kGramsPerKg = 1000.0;

constexpr double lifetime_hours(double lifetimeYears) noexcept
{
    return lifetimeYears * kHoursPerYear;
}

constexpr double lifetime_seconds(double lifetimeYears) noexcept
{
    return lifetime_hours(lifetimeYears) * kSecondsPerHour;
}

/// Floating point accumulator that keeps the exact running sum as a list of
/// non-overlapping partials (Shewchuk). value() is the correctly rounded sum,
/// so the result does not depend on the order in which terms were added and
/// two accumulators can be merged without loss.
class ExactSum
{
public:
    ExactSum() = default;

    void add(double x);
    void merge(const ExactSum& other);

    ExactSum& operator+=(double x)
    {
        add(x);
        return *this;
    }

    double value() const;

private:
    std::vector<double> _partials;
};

double exact_sum(std::span<const double> values);

/// |a - b| / max(|a|, |b|), 0 when both are 0.
double relative_difference(double a, double b) noexcept;

}
