#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "laplace/quadrature.hpp"
#include "laplace/real_function.hpp"

namespace laplace::deriv {

// Evaluation scales s_k = s0 * ratio^k, k = 0 .. count-1, discretizing the
// s -> infinity limits.
struct SGrid {
    double s0 = 4.0;
    double ratio = 2.0;
    int count = 24;

    bool valid() const { return s0 > 0.0 && ratio > 1.0 && count >= 4; }
    double at(int k) const;
    static SGrid defaults() { return SGrid{}; }
};

enum class LimitClass {
    Converged,
    DivergedPositive,
    DivergedNegative,
    Oscillating,
    Inconclusive,
};

// Result of extrapolating a sequence of samples to its limit. `value` is
// meaningful only when classification == Converged.
struct LimitEstimate {
    double value = 0.0;
    LimitClass classification = LimitClass::Inconclusive;
    double tail_spread = 0.0; // max - min over the trailing window
    std::vector<std::pair<double, double>> samples; // (parameter, value)

    bool converged() const { return classification == LimitClass::Converged; }
};

struct TwoSided {
    LimitEstimate plus;
    LimitEstimate minus;
};

// Trailing-window classifier shared by the s-grid estimators and the Hake
// limit. Window = last ceil(n/3) samples. Converged iff spread <= tol;
// Diverged iff the window is monotone and escapes the divergence threshold;
// Oscillating iff successive differences change sign >= 3 times with
// spread > tol; otherwise Inconclusive.
LimitEstimate classify_tail(std::vector<std::pair<double, double>> samples, double tol,
                            double divergence_threshold = 1e6);

// Laplace continuity value: s * int_0^delta exp(-s t) f(x +/- t) dt on the
// s-grid, classified per side. delta is clipped to the room available on each
// side; a side with no room comes back Inconclusive with no samples.
TwoSided ld0(const RealFunction& f, double x, double delta, const SGrid& grid, double tol);

// Laplace derivative estimate: s^2 * int_0^delta exp(-s t) [f(x +/- t) - f(x)] dt,
// with the minus side negated so both sides target the same limit.
TwoSided ld1(const RealFunction& f, double x, double delta, const SGrid& grid, double tol);

// Finite-grid surrogates of the upper/lower derivates: min/max of the ld1
// samples over the trailing half of the s-grid, per side.
struct Derivates {
    double lower_plus, upper_plus;
    double lower_minus, upper_minus;
};
Derivates derivates(const RealFunction& f, double x, double delta, const SGrid& grid);

// Merges a two-sided estimate: Converged when both sides converged and agree
// within tol, the common value being their mean.
LimitEstimate combine(const TwoSided& sides, double tol);

// f is Laplace continuous at x when both ld0 sides converge, agree within
// tol, and equal f(x) within tol.
bool laplace_continuous(const RealFunction& f, double x, double delta, const SGrid& grid,
                        double tol);

} // namespace laplace::deriv
