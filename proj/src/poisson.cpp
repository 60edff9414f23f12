#include "laplace/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "laplace/errors.hpp"
#include "laplace/quadrature.hpp"

namespace laplace::poisson {
namespace {

constexpr double kPi = 3.141592653589793238462643;

void check_radius(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError("poisson: r must lie in [0, 1)");
}

} // namespace

double poisson_kernel(double r, double phi) {
    check_radius(r);
    double denom = 1.0 - 2.0 * r * std::cos(phi) + r * r;
    return (1.0 - r * r) / denom;
}

double poisson_integral(const RealFunction& Gf, double r, double theta, double tol) {
    check_radius(r);
    if (!(tol > 0.0)) throw DomainError("poisson_integral: tol must be > 0");
    auto integrand = make_function(-kPi, kPi, [&Gf, r, theta](double t) {
        return Gf.eval(t) * poisson_kernel(r, theta - t);
    });
    quad::Options opt;
    // The kernel concentrates its mass at t = theta (mod 2 pi) on the scale
    // 1 - r; force panel boundaries there and at the neighbouring multiples.
    double width = 1.0 - r;
    for (double peak : {theta, theta - 2.0 * kPi, theta + 2.0 * kPi}) {
        for (int k = -8; k <= 8; ++k) {
            double t = peak + k * width;
            if (t > -kPi && t < kPi) opt.forced_breakpoints.push_back(t);
        }
    }
    auto q = quad::integrate(integrand, -kPi, kPi, tol * 2.0 * kPi, opt);
    return q.value / (2.0 * kPi);
}

double harmonicity_residual(const RealFunction& Gf, double r, double theta, double h) {
    if (!(h > 0.0)) throw DomainError("harmonicity_residual: h must be > 0");
    if (!(r - h > 0.0) || !(r + h < 1.0))
        throw DomainError("harmonicity_residual: stencil leaves (0, 1)");
    const double tol = 1e-12;
    double c = poisson_integral(Gf, r, theta, tol);
    double rp = poisson_integral(Gf, r + h, theta, tol);
    double rm = poisson_integral(Gf, r - h, theta, tol);
    double tp = poisson_integral(Gf, r, theta + h, tol);
    double tm = poisson_integral(Gf, r, theta - h, tol);
    double f_rr = (rp - 2.0 * c + rm) / (h * h);
    double f_r = (rp - rm) / (2.0 * h);
    double f_tt = (tp - 2.0 * c + tm) / (h * h);
    return std::abs(f_rr + f_r / r + f_tt / (r * r));
}

std::vector<BoundaryDistance> boundary_convergence(const RealFunction& Gf,
                                                   const calc::Primitive& Gf_primitive,
                                                   const std::vector<double>& r_list,
                                                   double tol) {
    if (!(tol > 0.0)) throw DomainError("boundary_convergence: tol must be > 0");
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        check_radius(r_list[i]);
        if (i > 0 && !(r_list[i] > r_list[i - 1]))
            throw DomainError("boundary_convergence: r_list must be increasing");
    }
    double gf_norm = calc::alexiewicz_norm(Gf_primitive, tol * 1e-2).value;
    double inner_tol = std::max(tol * 1e-2, 1e-11);

    std::vector<BoundaryDistance> out;
    out.reserve(r_list.size());
    for (double r : r_list) {
        auto fr = make_function(-kPi, kPi, [&Gf, r, inner_tol](double th) {
            return poisson_integral(Gf, r, th, inner_tol);
        });
        calc::Primitive fr_prim = calc::make_primitive(fr, -kPi, kPi, inner_tol, 512);
        double fr_norm = calc::alexiewicz_norm(fr_prim, tol * 1e-2).value;
        if (fr_norm > gf_norm + tol)
            throw NumericsError("boundary_convergence: norm contraction violated at r = " +
                                std::to_string(r));

        // primitive of F_r - Gf, anchored at -pi
        const double gf_base = Gf_primitive.F.eval(Gf_primitive.base);
        auto frp = fr_prim;
        auto gfp = Gf_primitive;
        RealFunction diff;
        diff.domain = Interval{-kPi, kPi};
        diff.eval = [frp, gfp, gf_base](double th) {
            return frp.F.eval(th) - (gfp.F.eval(th) - gf_base);
        };
        double dist = calc::alexiewicz_norm(calc::Primitive{diff, -kPi}, tol * 1e-2).value;
        out.push_back(BoundaryDistance{r, dist, fr_norm});
    }
    return out;
}

} // namespace laplace::poisson
