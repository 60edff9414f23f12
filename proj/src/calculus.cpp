#include "laplace/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "laplace/errors.hpp"

namespace laplace::calc {
namespace {

double oriented_integral(const RealFunction& f, double a, double x, double tol) {
    if (x >= a) return quad::integrate(f, a, x, tol).value;
    return -quad::integrate(f, x, a, tol).value;
}

// Leftmost zero of h on [a, b]: exact grid hits first, then bisection of the
// first sign change. Returns nullopt when h never crosses.
std::optional<double> leftmost_root(const std::function<double(double)>& h, double a, double b,
                                    double tol, double zero_scale) {
    const int m = 1024;
    double prev_x = a, prev_v = h(a);
    if (std::abs(prev_v) <= zero_scale) return a;
    for (int i = 1; i <= m; ++i) {
        double x = a + (b - a) * static_cast<double>(i) / m;
        double v = h(x);
        if (std::abs(v) <= zero_scale) return x;
        if (prev_v * v < 0.0) {
            double lo = prev_x, hi = x, vlo = prev_v;
            for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
                double mid = 0.5 * (lo + hi);
                double vm = h(mid);
                if (vm == 0.0) return mid;
                if (vlo * vm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    vlo = vm;
                }
            }
            return 0.5 * (lo + hi);
        }
        prev_x = x;
        prev_v = v;
    }
    return std::nullopt;
}

} // namespace

double ftc_integral(const Primitive& F, double x) {
    if (!F.F.domain.contains(x) || !F.F.domain.contains(F.base))
        throw DomainError("ftc_integral: point outside the primitive's domain");
    return F.F.eval(x) - F.F.eval(F.base);
}

AlexiewiczNorm alexiewicz_norm(const Primitive& F, double tol) {
    if (!(tol > 0.0)) throw DomainError("alexiewicz_norm: tol must be > 0");
    const double a = F.F.domain.lo, b = F.F.domain.hi;
    const double fbase = F.F.eval(F.base);
    auto g = [&](double x) { return std::abs(F.F.eval(x) - fbase); };

    const int n = 4097;
    double best = -1.0, best_x = a;
    for (int i = 0; i < n; ++i) {
        double x = a + (b - a) * static_cast<double>(i) / (n - 1);
        double v = g(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    // golden-section refinement inside the bracketing grid cells
    double step = (b - a) / (n - 1);
    double lo = std::max(a, best_x - step), hi = std::min(b, best_x + step);
    const double inv_phi = 0.6180339887498948482;
    double x1 = hi - (hi - lo) * inv_phi, x2 = lo + (hi - lo) * inv_phi;
    double f1 = g(x1), f2 = g(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = g(x1);
        }
    }
    double xm = 0.5 * (lo + hi);
    double vm = g(xm);
    if (vm < best) {
        vm = best;
        xm = best_x;
    }
    return AlexiewiczNorm{vm, xm};
}

double continuity_modulus(const RealFunction& f, int grid_points) {
    if (grid_points < 2) throw DomainError("continuity_modulus: need at least 2 points");
    double a = f.domain.lo, b = f.domain.hi;
    double prev = f.eval(a), worst = 0.0;
    for (int i = 1; i < grid_points; ++i) {
        double v = f.eval(a + (b - a) * static_cast<double>(i) / (grid_points - 1));
        worst = std::max(worst, std::abs(v - prev));
        prev = v;
    }
    return worst;
}

double integrate_by_parts(const Primitive& F, const RealFunction& g, double tol) {
    if (!(tol > 0.0)) throw DomainError("integrate_by_parts: tol must be > 0");
    const double a = F.base;
    const double b = std::min(F.F.domain.hi, g.domain.hi);
    if (!(b > a)) throw DomainError("integrate_by_parts: empty interval");
    double Gb = quad::integrate(g, a, b, tol / 3.0).value;
    const double fbase = F.F.eval(F.base);
    auto integrand = make_function(a, b, [&F, &g, fbase](double x) {
        return (F.F.eval(x) - fbase) * g.eval(x);
    });
    double cross = quad::integrate(integrand, a, b, tol / 3.0).value;
    return (F.F.eval(b) - fbase) * Gb - cross;
}

deriv::LimitEstimate hake_limit(const Primitive& F, double b, double tol) {
    if (!(tol > 0.0)) throw DomainError("hake_limit: tol must be > 0");
    const double a = F.base;
    if (!(b > a)) throw DomainError("hake_limit: b must exceed the anchor");
    const double fbase = F.F.eval(a);
    std::vector<std::pair<double, double>> samples;
    double prev_c = a;
    for (int k = 1; k <= 48; ++k) {
        double c = b - (b - a) * std::ldexp(1.0, -k);
        if (!(c > prev_c) || !(c < b)) break;
        samples.emplace_back(c, F.F.eval(c) - fbase);
        prev_c = c;
    }
    return deriv::classify_tail(std::move(samples), tol);
}

double mean_value_xi_first(const RealFunction& f, const RealFunction& g, double a, double b,
                           double tol) {
    if (!(tol > 0.0)) throw DomainError("mean_value_xi_first: tol must be > 0");
    if (!(b > a)) throw DomainError("mean_value_xi_first: empty interval");
    double qtol = std::max(1e-12, tol * 1e-3);
    double mass = quad::integrate(g, a, b, qtol).value;
    if (std::abs(mass) <= tol) return a; // zero mass: any xi works, rule picks a
    auto fg = make_function(a, b, [&](double x) { return f.eval(x) * g.eval(x); });
    double target = quad::integrate(fg, a, b, qtol).value / mass;
    auto h = [&](double x) { return f.eval(x) - target; };
    double zero_scale = 1e-12 * (1.0 + std::abs(target));
    auto root = leftmost_root(h, a, b, std::min(tol, 1e-12), zero_scale);
    if (!root)
        throw NoRootBracketed("mean_value_xi_first: f never crosses its weighted mean " +
                              std::to_string(target) + " on the scan grid");
    return *root;
}

double stieltjes_integral(const RealFunction& G, const RealFunction& F, double a, double b,
                          double tol) {
    if (!(b >= a)) throw DomainError("stieltjes_integral: requires a <= b");
    if (a == b) return 0.0;
    auto midpoint_sum = [&](int m) {
        double s = 0.0;
        double prev_f = F.eval(a);
        for (int i = 1; i <= m; ++i) {
            double x = a + (b - a) * static_cast<double>(i) / m;
            double fx = F.eval(x);
            s += G.eval(a + (b - a) * (i - 0.5) / m) * (fx - prev_f);
            prev_f = fx;
        }
        return s;
    };
    int m = 128;
    double s1 = midpoint_sum(m), s2 = midpoint_sum(2 * m);
    double rich_prev = (4.0 * s2 - s1) / 3.0;
    for (int round = 0; round < 10; ++round) {
        m *= 2;
        s1 = s2;
        s2 = midpoint_sum(2 * m);
        double rich = (4.0 * s2 - s1) / 3.0;
        if (std::abs(rich - rich_prev) <= tol) return rich;
        rich_prev = rich;
    }
    return rich_prev;
}

double mean_value_xi_second(const Primitive& F, const Primitive& G, double a, double b,
                            double tol) {
    if (!(tol > 0.0)) throw DomainError("mean_value_xi_second: tol must be > 0");
    if (!(b > a)) throw DomainError("mean_value_xi_second: empty interval");
    double qtol = std::max(1e-12, tol * 1e-3);
    double J = stieltjes_integral(G.F, F.F, a, b, qtol);
    double Ga = G.F.eval(a), Gb = G.F.eval(b);
    double Fa = F.F.eval(a), Fb = F.F.eval(b);
    auto h = [&](double xi) {
        double Fxi = F.F.eval(xi);
        return Ga * (Fxi - Fa) + Gb * (Fb - Fxi) - J;
    };
    double scale = std::abs(J) + std::abs(Gb * (Fb - Fa)) + std::abs(Ga * (Fb - Fa));
    auto root = leftmost_root(h, a, b, std::min(tol, 1e-12), 1e-12 * (1.0 + scale));
    if (!root)
        throw NoRootBracketed("mean_value_xi_second: mean value identity has no bracketed root");
    return *root;
}

TaylorResult taylor(const std::vector<RealFunction>& f_derivs, const RealFunction& ld_next,
                    double a, double x, double tol) {
    if (f_derivs.empty()) throw DomainError("taylor: need at least f itself");
    if (!(tol > 0.0)) throw DomainError("taylor: tol must be > 0");
    const int n = static_cast<int>(f_derivs.size()) - 1;

    // Spot-check the derivative chain by central differences at a few points.
    {
        double lo = std::min(a, x), hi = std::max(a, x);
        double hstep = std::max(1e-6, (hi - lo) * 1e-6);
        for (int k = 0; k < n; ++k) {
            for (double frac : {0.21, 0.5, 0.83}) {
                double t = lo + (hi - lo) * frac;
                if (t - hstep < f_derivs[k].domain.lo || t + hstep > f_derivs[k].domain.hi)
                    continue;
                double fd =
                    (f_derivs[k].eval(t + hstep) - f_derivs[k].eval(t - hstep)) / (2.0 * hstep);
                double ref = f_derivs[k + 1].eval(t);
                if (std::abs(fd - ref) > 1e-3 * (1.0 + std::abs(ref)))
                    throw ConsistencyError(
                        "taylor: derivative list inconsistent at order " + std::to_string(k + 1) +
                        " (finite difference " + std::to_string(fd) + " vs supplied " +
                        std::to_string(ref) + ")");
            }
        }
    }

    double qtol = std::max(1e-14, tol * 0.1);

    // Hypothesis: the last supplied derivative is the primitive of ld_next.
    double lhs = f_derivs[n].eval(x) - f_derivs[n].eval(a);
    double rhs = oriented_integral(ld_next, a, x, qtol);
    if (std::abs(lhs - rhs) > tol * (1.0 + std::abs(lhs)))
        throw ConsistencyError("taylor: f^(n) increment " + std::to_string(lhs) +
                               " does not match the integral of the next derivative " +
                               std::to_string(rhs));

    TaylorResult out;
    double factorial = 1.0, power = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            factorial *= k;
            power *= (x - a);
        }
        out.polynomial_value += f_derivs[k].eval(a) * power / factorial;
    }

    auto integrand = make_function(std::min(a, x), std::max(a, x), [&ld_next, x, n](double t) {
        return ld_next.eval(t) * std::pow(x - t, n);
    });
    out.remainder = oriented_integral(integrand, a, x, qtol) / factorial;

    Primitive ld_primitive = make_primitive(ld_next, std::min(a, x), std::max(a, x), qtol);
    ld_primitive.base = a;
    out.bound = std::pow(std::abs(x - a), n) / factorial *
                alexiewicz_norm(ld_primitive, std::min(tol, 1e-9)).value;

    double fx = f_derivs[0].eval(x);
    if (std::abs(fx - (out.polynomial_value + out.remainder)) > tol * (1.0 + std::abs(fx)))
        throw ConsistencyError("taylor: expansion identity violated beyond tolerance");
    if (out.remainder > out.bound + tol)
        throw ConsistencyError("taylor: remainder exceeds its norm bound");
    return out;
}

Primitive make_primitive(const RealFunction& f, double a, double b, double tol, int knots) {
    if (!(b > a)) throw DomainError("make_primitive: empty interval");
    if (knots < 2) throw DomainError("make_primitive: need at least 2 knots");
    double seg_tol = tol / knots;
    auto prefix = std::make_shared<std::vector<double>>();
    prefix->reserve(knots + 1);
    prefix->push_back(0.0);
    for (int i = 1; i <= knots; ++i) {
        double lo = a + (b - a) * static_cast<double>(i - 1) / knots;
        double hi = a + (b - a) * static_cast<double>(i) / knots;
        prefix->push_back(prefix->back() + quad::integrate(f, lo, hi, seg_tol).value);
    }
    auto fcopy = f;
    RealFunction F;
    F.domain = Interval{a, b};
    F.eval = [prefix, fcopy, a, b, knots, seg_tol](double y) {
        double pos = (y - a) / (b - a) * knots;
        int i = std::clamp(static_cast<int>(pos), 0, knots);
        double knot = a + (b - a) * static_cast<double>(i) / knots;
        double partial = (y == knot) ? 0.0
                         : (y > knot)
                             ? quad::integrate(fcopy, knot, y, seg_tol).value
                             : -quad::integrate(fcopy, y, knot, seg_tol).value;
        return (*prefix)[i] + partial;
    };
    return Primitive{F, a};
}

} // namespace laplace::calc
