#include "laplace/gen_ode.hpp"

#include <algorithm>
#include <cmath>

#include "laplace/errors.hpp"
#include "laplace/laplace_deriv.hpp"
#include "laplace/quadrature.hpp"

namespace laplace::ode {
namespace {

// Catmull-Rom interpolation on a uniform grid (one-sided tangents at the
// ends). Good enough that the quadrature, not the interpolant, limits the
// fixed-point accuracy at the grid sizes used here.
double cubic_interp(const std::vector<double>& grid, const std::vector<std::vector<double>>& traj,
                    double t, int comp) {
    const std::size_t m = grid.size();
    if (m == 1) return traj[0][comp];
    const double lo = grid.front(), hi = grid.back();
    const double h = (hi - lo) / static_cast<double>(m - 1);
    double pos = (t - lo) / h;
    auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(m) - 2);
    double tau = pos - static_cast<double>(j);

    auto y = [&](std::ptrdiff_t k) {
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(m) - 1);
        return traj[static_cast<std::size_t>(k)][comp];
    };
    double y0 = y(j), y1 = y(j + 1);
    double m0 = (j == 0) ? y1 - y0 : 0.5 * (y1 - y(j - 1));
    double m1 = (j + 2 >= static_cast<std::ptrdiff_t>(m)) ? y1 - y0 : 0.5 * (y(j + 2) - y0);
    double t2 = tau * tau, t3 = t2 * tau;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + tau) * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * m1;
}

struct Workspace {
    const IvpSystem& sys;
    const std::vector<double>& grid;
    const std::vector<std::vector<double>>& traj;

    double rhs_component(double s, int comp) const {
        const int n = sys.dimension;
        std::vector<double> state(n), out(n);
        for (int i = 0; i < n; ++i) state[i] = cubic_interp(grid, traj, s, i);
        sys.rhs(s, state, out);
        return out[comp];
    }
};

} // namespace

double contraction_step(const RealFunction& v, double t0, const Interval& domain, double tol) {
    if (!(tol > 0.0)) throw DomainError("contraction_step: tol must be > 0");
    if (!domain.contains(t0)) throw DomainError("contraction_step: t0 outside the interval");
    double a_max = std::min(t0 - domain.lo, domain.hi - t0);
    if (!(a_max > 0.0)) throw DegenerateStep("contraction_step: t0 is not interior");

    // Escalating tolerance ladder: huge weights push the quadrature roundoff
    // floor above a fixed tolerance, but any integral that cannot be pinned
    // to within 0.1 is far beyond the 1/2 threshold anyway.
    auto weight_integral = [&](double lo, double hi) {
        for (double qtol : {1e-12, 1e-9, 1e-6, 1e-3, 1e-1}) {
            try {
                return quad::integrate(v, lo, hi, qtol).value;
            } catch (const ToleranceNotMet&) {
            }
        }
        return std::numeric_limits<double>::infinity();
    };
    auto admissible = [&](double a) {
        if (weight_integral(t0, t0 + a) > 0.5) return false;
        return weight_integral(t0 - a, t0) <= 0.5;
    };
    if (admissible(a_max)) return a_max;
    double lo = 0.0, hi = a_max;
    for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        (admissible(mid) ? lo : hi) = mid;
    }
    if (!(lo >= tol))
        throw DegenerateStep("contraction_step: weight too large near t0 (step below tol)");
    return lo;
}

double PicardSolution::value(double t, int component) const {
    return cubic_interp(grid, trajectory, t, component);
}

PicardSolution picard_solve_from(const IvpSystem& sys, int grid_points, double tol, int max_iter,
                                 const std::function<double(double, int)>& initial) {
    const int n = sys.dimension;
    if (n < 1 || static_cast<int>(sys.alpha.size()) != n)
        throw DomainError("picard_solve: dimension/alpha mismatch");
    if (!sys.forcing.empty() && static_cast<int>(sys.forcing.size()) != n)
        throw DomainError("picard_solve: forcing must have one entry per component");
    if (!(tol > 0.0)) throw DomainError("picard_solve: tol must be > 0");
    if (grid_points < 5) grid_points = 5;
    if (grid_points % 2 == 0) ++grid_points;

    PicardSolution sol;
    sol.step = contraction_step(sys.lipschitz_weight, sys.t0, sys.domain, 1e-12);
    const int m = grid_points;
    const int center = (m - 1) / 2;
    const double h = 2.0 * sol.step / (m - 1);
    sol.grid.resize(m);
    for (int j = 0; j < m; ++j) sol.grid[j] = sys.t0 + (j - center) * h;
    sol.grid[center] = sys.t0;

    // Forcing terms depend on t only: integrate them once, structure-aware.
    std::vector<std::vector<double>> forcing_prefix(m, std::vector<double>(n, 0.0));
    if (!sys.forcing.empty()) {
        double ftol = tol / (8.0 * m);
        for (int i = 0; i < n; ++i) {
            for (int j = center + 1; j < m; ++j)
                forcing_prefix[j][i] =
                    forcing_prefix[j - 1][i] +
                    quad::integrate(sys.forcing[i], sol.grid[j - 1], sol.grid[j], ftol).value;
            for (int j = center - 1; j >= 0; --j)
                forcing_prefix[j][i] =
                    forcing_prefix[j + 1][i] -
                    quad::integrate(sys.forcing[i], sol.grid[j], sol.grid[j + 1], ftol).value;
        }
    }

    sol.trajectory.assign(m, std::vector<double>(n));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            sol.trajectory[j][i] = initial ? initial(sol.grid[j], i) : sys.alpha[i];

    const double seg_tol = tol / (8.0 * m);
    std::vector<std::vector<double>> next(m, std::vector<double>(n));
    for (int iter = 1; iter <= max_iter; ++iter) {
        Workspace ws{sys, sol.grid, sol.trajectory};
        for (int i = 0; i < n; ++i) {
            auto integrand = make_function(sol.grid.front(), sol.grid.back(),
                                           [&ws, i](double s) { return ws.rhs_component(s, i); });
            next[center][i] = sys.alpha[i];
            double acc = 0.0;
            for (int j = center + 1; j < m; ++j) {
                acc += quad::integrate(integrand, sol.grid[j - 1], sol.grid[j], seg_tol).value;
                next[j][i] = sys.alpha[i] + forcing_prefix[j][i] + acc;
            }
            acc = 0.0;
            for (int j = center - 1; j >= 0; --j) {
                acc -= quad::integrate(integrand, sol.grid[j], sol.grid[j + 1], seg_tol).value;
                next[j][i] = sys.alpha[i] + forcing_prefix[j][i] + acc;
            }
        }
        double delta = 0.0;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i)
                delta = std::max(delta, std::abs(next[j][i] - sol.trajectory[j][i]));
        sol.trajectory.swap(next);
        sol.deltas.push_back(delta);
        sol.iterations = iter;
        sol.final_delta = delta;

        // Geometric contraction at rate 1/2 (the step was chosen for it);
        // checked away from the quadrature noise floor.
        if (iter >= 3) {
            double prev = sol.deltas[iter - 2];
            if (prev > std::max(10.0 * tol, 1e-12) && delta > 0.55 * prev)
                throw NumericsError("picard_solve: contraction ratio " +
                                    std::to_string(delta / prev) + " exceeds 1/2 + slack");
        }
        if (delta <= tol) break;
    }
    if (sol.final_delta > tol)
        throw MaxIterExceeded("picard_solve: no convergence in " + std::to_string(max_iter) +
                              " iterations (last delta " + std::to_string(sol.final_delta) + ")");

    // Spot-check that the composed right side is Laplace continuous rather
    // than assuming it: its ld0 value should match its pointwise value.
    {
        Workspace ws{sys, sol.grid, sol.trajectory};
        deriv::SGrid probe{4.0, 2.0, 12};
        double worst = 0.0;
        for (double frac : {-0.37, 0.41}) {
            double tstar = sys.t0 + frac * sol.step;
            for (int i = 0; i < n; ++i) {
                auto composed = make_function(sol.grid.front(), sol.grid.back(),
                                              [&ws, i](double s) { return ws.rhs_component(s, i); });
                auto two = deriv::ld0(composed, tstar, 0.2 * sol.step, probe, 1e-2);
                auto c = deriv::combine(two, 1e-2);
                if (c.converged())
                    worst = std::max(worst, std::abs(c.value - ws.rhs_component(tstar, i)));
                else
                    worst = std::max(worst, c.tail_spread);
            }
        }
        sol.continuity_residual = worst;
    }
    return sol;
}

PicardSolution picard_solve(const IvpSystem& sys, int grid_points, double tol, int max_iter) {
    return picard_solve_from(sys, grid_points, tol, max_iter, nullptr);
}

IvpSystem reduce_higher_order(const HigherOrderIvp& problem) {
    const int n = problem.order;
    if (n < 1) throw DomainError("reduce_higher_order: order must be >= 1");
    if (static_cast<int>(problem.alphas.size()) != n)
        throw DomainError("reduce_higher_order: need one initial value per order");

    IvpSystem sys;
    sys.dimension = n;
    sys.t0 = problem.t0;
    sys.alpha = problem.alphas;
    sys.domain = problem.domain;
    auto f = problem.f;
    sys.rhs = [n, f](double t, std::span<const double> x, std::span<double> out) {
        for (int i = 0; i + 1 < n; ++i) out[i] = x[i + 1];
        out[n - 1] = f(t, x);
    };
    // Chain rows are 1-Lipschitz in the sup norm; the last row carries f's
    // majorant.
    auto v = problem.lipschitz_weight;
    sys.lipschitz_weight = make_function(v.domain.lo, v.domain.hi, [v](double s) {
        return std::max(1.0, v.eval(s));
    });
    return sys;
}

std::vector<PicardSolution> picard_continuation(const IvpSystem& sys, const Interval& span,
                                                int grid_points, double tol, int max_iter,
                                                int max_legs) {
    if (!span.valid() || !sys.domain.contains(span))
        throw DomainError("picard_continuation: span must lie inside the system domain");

    std::vector<PicardSolution> right, left;
    auto advance = [&](double direction, std::vector<PicardSolution>& out) {
        IvpSystem cur = sys;
        double reached = sys.t0;
        while (static_cast<int>(out.size() + right.size() + left.size()) < max_legs) {
            if (direction > 0 && reached >= span.hi) break;
            if (direction < 0 && reached <= span.lo) break;
            PicardSolution leg = picard_solve(cur, grid_points, tol, max_iter);
            double end = cur.t0 + direction * leg.step;
            std::vector<double> end_state(cur.dimension);
            for (int i = 0; i < cur.dimension; ++i) end_state[i] = leg.value(end, i);
            out.push_back(std::move(leg));
            reached = end;
            cur.t0 = end;
            cur.alpha = end_state;
            double room = (direction > 0) ? sys.domain.hi - end : end - sys.domain.lo;
            if (room <= tol) break;
        }
    };
    advance(+1.0, right);
    advance(-1.0, left);

    std::vector<PicardSolution> out;
    out.reserve(left.size() + right.size());
    for (auto it = left.rbegin(); it != left.rend(); ++it) out.push_back(std::move(*it));
    for (auto& leg : right) out.push_back(std::move(leg));
    return out;
}

} // namespace laplace::ode
