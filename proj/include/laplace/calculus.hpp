#pragma once

#include <vector>

#include "laplace/laplace_deriv.hpp"
#include "laplace/quadrature.hpp"
#include "laplace/real_function.hpp"

namespace laplace::calc {

// A continuous primitive F with its anchor point. F(x) - F(base) is the
// integral of the underlying (possibly wildly non-Riemann) integrand from
// base to x; that difference is the only thing the operations below consume.
struct Primitive {
    RealFunction F;
    double base = 0.0;

    double increment(double x) const { return F.eval(x) - F.eval(base); }
};

// F(x) - F(base): the integral of the derivative data behind F.
double ftc_integral(const Primitive& F, double x);

struct AlexiewiczNorm {
    double value = 0.0;
    double argmax_x = 0.0;
};

// sup over the domain of |F(x) - F(base)|: 4097-point grid scan with
// golden-section refinement around the grid argmax until the bracket is
// narrower than tol.
AlexiewiczNorm alexiewicz_norm(const Primitive& F, double tol);

// Largest grid jump of f on an n-point grid; a cheap modulus-of-continuity
// surrogate for validating primitives.
double continuity_modulus(const RealFunction& f, int grid_points);

// F(b) G(b) - integral of F(x) g(x), for g of bounded variation (caller
// asserts) and G the anchored primitive of g; equals the integral of f G.
double integrate_by_parts(const Primitive& F, const RealFunction& g, double tol);

// Limit of F(c) - F(base) along c = b - (b - base) 2^-k, classified with the
// same trailing-window rules as the s-grid estimators.
deriv::LimitEstimate hake_limit(const Primitive& F, double b, double tol);

// xi with integral(f g) = f(xi) integral(g), for continuous f and g >= 0.
// Returns the leftmost bracketed root of f - target; returns a when the mass
// of g is below tol.
double mean_value_xi_first(const RealFunction& f, const RealFunction& g, double a, double b,
                           double tol);

// xi with integral(f G) = G(a) [F(xi)-F(a)] + G(b) [F(b)-F(xi)], for g of one
// sign given by its primitive G; f enters through its primitive F only (the
// f G integral is computed as a Riemann-Stieltjes integral of G against F).
double mean_value_xi_second(const Primitive& F, const Primitive& G, double a, double b,
                            double tol);

// Riemann-Stieltjes integral of G against dF over [a, b]: midpoint sums with
// one Richardson extrapolation, refined until stable within tol.
double stieltjes_integral(const RealFunction& G, const RealFunction& F, double a, double b,
                          double tol);

struct TaylorResult {
    double polynomial_value = 0.0;
    double remainder = 0.0;
    double bound = 0.0; // |x-a|^n / n! times the Alexiewicz norm of the last derivative
};

// Degree-n Taylor expansion of f at a evaluated at x, with the integral
// remainder 1/n! * integral of ld_next(t) (x-t)^n and its norm bound.
// f_derivs = (f, f', ..., f^(n)); ld_next supplies the (n+1)-st derivative
// data. Verifies the hypothesis f^(n)(x) - f^(n)(a) = integral(ld_next), spot
// checks the derivative chain by finite differences, and checks the computed
// identity f(x) = polynomial + remainder; failures raise ConsistencyError.
TaylorResult taylor(const std::vector<RealFunction>& f_derivs, const RealFunction& ld_next,
                    double a, double x, double tol);

// Anchored primitive of f on [a, b] built from cumulative quadrature on a
// knot grid; eval cost is one short adaptive integral past the last knot.
Primitive make_primitive(const RealFunction& f, double a, double b, double tol,
                         int knots = 1024);

} // namespace laplace::calc
