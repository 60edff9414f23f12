#pragma once

#include <algorithm>
#include <cmath>

namespace laplace {

// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    double clamp(double x) const { return std::min(std::max(x, lo), hi); }
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }
};

} // namespace laplace
