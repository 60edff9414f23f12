#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "laplace/errors.hpp"
#include "laplace/real_function.hpp"

namespace laplace::quad {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0; // >= 0, same units as value
    std::int64_t evaluations = 0;    // >= 1
};

enum class Side { plus, minus };

struct Options {
    // Extra interior panel boundaries, on top of whatever f.structure supplies.
    std::vector<double> forced_breakpoints;
    // Panels per call before ToleranceNotMet. Bounds runtime on adversarial
    // oscillatory integrands.
    std::int64_t panel_cap = 1'000'000;
};

// Definite integral of f over [a, b] to absolute tolerance tol.
// Adaptive G7/K15 pairs with recursive bisection; per-panel error is
// |K15 - G7| and panels are refined worst-first until the summed estimate
// drops below tol. Structure-certified panels (see FunctionStructure) are
// accepted with value 0 and their cancellation bound as error.
QuadratureResult integrate(const RealFunction& f, double a, double b, double tol);
QuadratureResult integrate(const RealFunction& f, double a, double b, double tol,
                           const Options& opt);

// s^power * integral over [0, delta] of exp(-s t) f(x +/- t) dt, to absolute
// tolerance tol on the scaled result. No f(x) shift is applied; callers
// compose shifts. Initial panels follow a geometric grid anchored at t = 1/s
// so the decay of the weight and the oscillation of f are both resolved.
QuadratureResult exp_weighted(const RealFunction& f, double x, Side side, double s,
                              double delta, int power, double tol);
QuadratureResult exp_weighted(const RealFunction& f, double x, Side side, double s,
                              double delta, int power, double tol, const Options& opt);

} // namespace laplace::quad
