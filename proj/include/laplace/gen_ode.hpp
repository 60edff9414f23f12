#pragma once

#include <functional>
#include <span>
#include <vector>

#include "laplace/interval.hpp"
#include "laplace/real_function.hpp"

namespace laplace::ode {

// First-order system with its contraction data: the right side, the initial
// state at t0, and a nonnegative integrable majorant v of the state-Lipschitz
// constant on the domain interval. Optional per-component forcing terms
// depend on t only and are integrated once, structure-aware, outside the
// fixed-point loop.
struct IvpSystem {
    int dimension = 1;
    std::function<void(double, std::span<const double>, std::span<double>)> rhs;
    double t0 = 0.0;
    std::vector<double> alpha;
    RealFunction lipschitz_weight;
    Interval domain;
    std::vector<RealFunction> forcing; // empty, or one entry per component
};

// Largest a (bisected to tol) with both one-sided integrals of v over
// [t0, t0 +- a] at most 1/2 and [t0-a, t0+a] inside the domain interval.
double contraction_step(const RealFunction& v, double t0, const Interval& domain, double tol);

struct PicardSolution {
    double step = 0.0;                           // half-width a of the solved interval
    std::vector<double> grid;                    // sample times on [t0-a, t0+a]
    std::vector<std::vector<double>> trajectory; // trajectory[j][i] = x_i(grid[j])
    int iterations = 0;
    double final_delta = 0.0;                    // sup-norm change of the last iterate
    std::vector<double> deltas;                  // sup-norm change per iteration
    double continuity_residual = 0.0;            // spot-check of the composed right side

    // Piecewise-cubic interpolation between grid samples.
    double value(double t, int component) const;
};

// Fixed-point iteration x -> alpha + integral of rhs(s, x(s)) from t0, on the
// contraction step, starting from the constant alpha. Iterates live on a
// uniform grid with piecewise-cubic interpolation; integrals go through the
// adaptive quadrature on the interpolant. Stops when the sup-norm change is
// at most tol; MaxIterExceeded otherwise.
PicardSolution picard_solve(const IvpSystem& sys, int grid_points, double tol, int max_iter);

// Variant with a caller-supplied starting iterate (for uniqueness probes).
PicardSolution picard_solve_from(const IvpSystem& sys, int grid_points, double tol, int max_iter,
                                 const std::function<double(double, int)>& initial);

// x^(n) = f(t, x, x', ..., x^(n-1)) with x^(k)(t0) = alphas[k].
struct HigherOrderIvp {
    int order = 1;
    std::function<double(double, std::span<const double>)> f;
    double t0 = 0.0;
    std::vector<double> alphas;
    RealFunction lipschitz_weight; // majorant for f in the state variables
    Interval domain;
};

// Chained first-order reduction: x_i' = x_{i+1} for i < n, with f feeding the
// last component. The chain rows are 1-Lipschitz in the sup norm, so the
// system majorant is max(v, 1).
IvpSystem reduce_higher_order(const HigherOrderIvp& problem);

// Classical continuation: re-anchor at the step ends and repeat until the
// requested span is covered (or the leg limit is hit). Legs are returned in
// time order, each a full contraction-step solution.
std::vector<PicardSolution> picard_continuation(const IvpSystem& sys, const Interval& span,
                                                int grid_points, double tol, int max_iter,
                                                int max_legs = 64);

} // namespace laplace::ode
