#include "aicarbon/numeric.h"

#include <algorithm>
#include <cmath>

namespace aicarbon {

void ExactSum::add(double x)
{
    std::size_t kept = 0;
    for (double y : _partials) {
        if (std::fabs(x) < std::fabs(y)) {
            std::swap(x, y);
        }
        const double hi = x + y;
        const double lo = y - (hi - x);
        if (lo != 0.0) {
            _partials[kept++] = lo;
        }
        x = hi;
    }
    _partials.resize(kept);
    _partials.push_back(x);
}

void ExactSum::merge(const ExactSum& other)
{
    for (double p : other._partials) {
        add(p);
    }
}

double ExactSum::value() const
{
    if (_partials.empty()) {
        return 0.0;
    }

    // Partials are non-overlapping and increasing in magnitude. Sum from the top
    // and stop once the remaining partials cannot change the result, then fix
    // up round-half-even ties (same scheme as Python's math.fsum).
    auto n = _partials.size();
    double hi = _partials[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = _partials[--n];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) {
            break;
        }
    }
    if (n > 0 && ((lo < 0.0 && _partials[n - 1] < 0.0) || (lo > 0.0 && _partials[n - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        const double yr = x - hi;
        if (y == yr) {
            hi = x;
        }
    }
    return hi;
}

double exact_sum(std::span<const double> values)
{
    ExactSum acc;
    for (double v : values) {
        acc.add(v);
    }
    return acc.value();
}

double relative_difference(double a, double b) noexcept
{
    const double scale = std::max(std::fabs(a), std::fabs(b));
    if (scale == 0.0) {
        return 0.0;
    }
    return std::fabs(a - b) / scale;
}

}
