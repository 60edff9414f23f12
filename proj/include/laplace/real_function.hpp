#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "laplace/interval.hpp"

namespace laplace {

// Optional structural knowledge about a function that quadrature can exploit.
// Smooth functions need none of this; the adaptive engine then behaves like a
// plain Gauss-Kronrod subdivider.
class FunctionStructure {
public:
    virtual ~FunctionStructure() = default;

    // Interior points of (lo, hi) where smoothness breaks (piece boundaries,
    // kernel concentration points). The engine seeds panel boundaries there.
    virtual void append_breakpoints(double lo, double hi, std::vector<double>& out) const {
        (void)lo;
        (void)hi;
        (void)out;
    }

    // Upper bound for |integral of f over any subinterval of [lo, hi]|, valid
    // no matter how wildly f oscillates inside. nullopt = no bound known.
    // This is what lets the engine accept a panel whose oscillation it cannot
    // resolve: the true contribution is certified small even though pointwise
    // samples are not.
    virtual std::optional<double> cancellation_bound(double lo, double hi) const {
        (void)lo;
        (void)hi;
        return std::nullopt;
    }
};

// An evaluable real-valued map on a closed interval. The universal input
// abstraction of the toolkit.
struct RealFunction {
    Interval domain;
    std::function<double(double)> eval;
    std::shared_ptr<const FunctionStructure> structure; // may be null

    double operator()(double x) const { return eval(x); }
};

inline RealFunction make_function(double lo, double hi, std::function<double(double)> f) {
    return RealFunction{Interval{lo, hi}, std::move(f), nullptr};
}

inline RealFunction make_function(double lo, double hi, std::function<double(double)> f,
                                  std::shared_ptr<const FunctionStructure> s) {
    return RealFunction{Interval{lo, hi}, std::move(f), std::move(s)};
}

} // namespace laplace
