#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "laplace/calculus.hpp"
#include "laplace/svc.hpp"

using namespace laplace;
using calc::Primitive;

namespace {

RealFunction fn(double lo, double hi, std::function<double(double)> f) {
    return make_function(lo, hi, std::move(f));
}

Primitive prim(double lo, double hi, double base, std::function<double(double)> F) {
    return Primitive{fn(lo, hi, std::move(F)), base};
}

} // namespace

TEST_CASE("ftc_integral: direct increments") {
    auto P = prim(-3, 3, 0, [](double x) { return x * x; });
    CHECK(calc::ftc_integral(P, 2.0) == 4.0);
    CHECK(calc::ftc_integral(P, -2.0) == 4.0);

    auto S = prim(0, 4, 0, [](double x) { return std::sin(x); });
    CHECK(std::abs(calc::ftc_integral(S, M_PI)) <= 1e-15);

    // additivity over adjacent intervals holds exactly by construction
    for (double c : {0.3, 1.1, 2.9}) {
        double whole = calc::ftc_integral(P, 3.0);
        double split = calc::ftc_integral(P, c) + (P.F.eval(3.0) - P.F.eval(c));
        CHECK(whole == split);
    }

    CHECK_THROWS_AS(calc::ftc_integral(P, 5.0), DomainError);
}

TEST_CASE("ftc_integral: pathological primitive evaluates its own increments") {
    svc::PathologicalFunction pf(10);
    Primitive P{pf.as_real_function(), 0.0};
    CHECK(calc::ftc_integral(P, 7.0 / 16.0) == pf.eval(7.0 / 16.0));
    CHECK(calc::ftc_integral(P, 0.375) == 0.0);
}

TEST_CASE("alexiewicz_norm: closed forms") {
    // f = 1 on [0,1]: F(x) = x, norm 1 at x = 1
    auto P = prim(0, 1, 0, [](double x) { return x; });
    auto n1 = calc::alexiewicz_norm(P, 1e-9);
    CHECK(n1.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(n1.argmax_x == doctest::Approx(1.0).epsilon(1e-6));

    // f = sin on [0, 2pi]: F(x) = 1 - cos x, norm 2 at x = pi
    auto S = prim(0, 2 * M_PI, 0, [](double x) { return 1.0 - std::cos(x); });
    auto n2 = calc::alexiewicz_norm(S, 1e-9);
    CHECK(n2.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(n2.argmax_x == doctest::Approx(M_PI).epsilon(1e-4));

    auto Z = prim(0, 1, 0, [](double) { return 0.0; });
    CHECK(calc::alexiewicz_norm(Z, 1e-9).value == 0.0);
}

TEST_CASE("alexiewicz_norm: dominated by the L1 norm on random smooth functions") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        double c1 = u(rng), c2 = u(rng), w = 1.0 + std::abs(u(rng));
        auto h = [c1, c2, w](double x) { return c1 * std::sin(w * x) + c2 * std::cos(2.0 * x); };
        auto H = calc::make_primitive(fn(0, 3, h), 0, 3, 1e-10);
        double alex = calc::alexiewicz_norm(H, 1e-8).value;
        double l1 = quad::integrate(fn(0, 3, [h](double x) { return std::abs(h(x)); }), 0, 3,
                                    1e-10)
                        .value;
        CHECK(alex <= l1 + 1e-6);
    }
}

TEST_CASE("integrate_by_parts: closed forms") {
    // f = cos, g = 1 on [0, pi/2]: F = sin, G(x) = x -> pi/2 - 1
    auto F = prim(0, M_PI / 2, 0, [](double x) { return std::sin(x); });
    auto one = fn(0, M_PI / 2, [](double) { return 1.0; });
    CHECK(calc::integrate_by_parts(F, one, 1e-10) ==
          doctest::Approx(M_PI / 2 - 1.0).epsilon(1e-10));

    auto zero = fn(0, M_PI / 2, [](double) { return 0.0; });
    CHECK(calc::integrate_by_parts(F, zero, 1e-10) == 0.0);

    auto Fzero = prim(0, M_PI / 2, 0, [](double) { return 7.5; }); // constant primitive: f = 0
    CHECK(std::abs(calc::integrate_by_parts(Fzero, one, 1e-10)) <= 1e-10);
}

TEST_CASE("hake_limit: classification of one-sided limits") {
    // f = 1/sqrt(x) on (0, 1]: F(c) = 2 sqrt(c) -> 2
    auto F = prim(0, 1, 0, [](double c) { return 2.0 * std::sqrt(c); });
    auto e = calc::hake_limit(F, 1.0, 1e-8);
    CHECK(e.converged());
    CHECK(e.value == doctest::Approx(2.0).epsilon(1e-8));

    // bounded oscillation without a limit
    auto O = prim(0, 1, 0, [](double c) { return std::sin(1.0 / (1.0 - c)); });
    auto eo = calc::hake_limit(O, 1.0, 1e-6);
    CHECK(eo.classification == deriv::LimitClass::Oscillating);

    auto C = prim(0, 1, 0, [](double) { return 5.0; });
    auto ec = calc::hake_limit(C, 1.0, 1e-12);
    CHECK(ec.converged());
    CHECK(ec.value == 0.0);
}

TEST_CASE("mean_value_xi_first: examples and identity") {
    auto id = fn(0, 1, [](double x) { return x; });
    auto one = fn(0, 1, [](double) { return 1.0; });
    double xi = calc::mean_value_xi_first(id, one, 0, 1, 1e-12);
    CHECK(xi == doctest::Approx(0.5).epsilon(1e-9));

    auto c7 = fn(0, 1, [](double) { return 7.0; });
    CHECK(calc::mean_value_xi_first(c7, one, 0, 1, 1e-10) == 0.0);

    auto gz = fn(0, 1, [](double) { return 0.0; });
    CHECK(calc::mean_value_xi_first(id, gz, 0, 1, 1e-10) == 0.0);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int rep = 0; rep < 10; ++rep) {
        double c1 = u(rng), c2 = u(rng), c3 = u(rng);
        auto f = fn(0, 2, [c1, c2](double x) { return c1 * std::sin(2.0 * x) + c2 * x; });
        auto g = fn(0, 2, [c3](double x) {
            double q = c3 * std::cos(x) + 1.2;
            return q * q;
        });
        double x2 = calc::mean_value_xi_first(f, g, 0, 2, 1e-12);
        double ifg = quad::integrate(
                         fn(0, 2, [&](double x) { return f.eval(x) * g.eval(x); }), 0, 2, 1e-12)
                         .value;
        double ig = quad::integrate(g, 0, 2, 1e-12).value;
        CHECK(std::abs(ifg - f.eval(x2) * ig) <= 1e-8);
    }
}

TEST_CASE("mean_value_xi_second: examples and identity") {
    // f = 1, g = 1 on [0,1]: F(x) = x, G(x) = x, integral f G = 1/2 -> xi = 1/2
    auto F = prim(0, 1, 0, [](double x) { return x; });
    auto G = prim(0, 1, 0, [](double x) { return x; });
    CHECK(calc::mean_value_xi_second(F, G, 0, 1, 1e-10) == doctest::Approx(0.5).epsilon(1e-6));

    auto Fz = prim(0, 1, 0, [](double) { return 3.0; }); // f = 0
    CHECK(calc::mean_value_xi_second(Fz, G, 0, 1, 1e-10) == 0.0);

    auto Gz = prim(0, 1, 0, [](double) { return 0.0; }); // g = 0, G = 0
    CHECK(calc::mean_value_xi_second(F, Gz, 0, 1, 1e-10) == 0.0);

    // identity check on a smooth pair: f = cos (F = sin), g = exp (G = exp)
    auto Fc = prim(0, 1.5, 0, [](double x) { return std::sin(x); });
    auto Ge = prim(0, 1.5, 0, [](double x) { return std::exp(x); });
    double xi = calc::mean_value_xi_second(Fc, Ge, 0, 1.5, 1e-12);
    double J = calc::stieltjes_integral(Ge.F, Fc.F, 0, 1.5, 1e-12);
    double lhs = Ge.F.eval(0.0) * (std::sin(xi) - 0.0) + Ge.F.eval(1.5) * (std::sin(1.5) - std::sin(xi));
    CHECK(std::abs(lhs - J) <= 1e-8);
    // and the Stieltjes route agrees with ordinary quadrature of f G
    double direct = quad::integrate(
                        fn(0, 1.5, [](double x) { return std::cos(x) * std::exp(x); }), 0, 1.5,
                        1e-12)
                        .value;
    CHECK(J == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("taylor: exponential at degree 2") {
    std::vector<RealFunction> derivs = {
        fn(0, 1, [](double x) { return std::exp(x); }),
        fn(0, 1, [](double x) { return std::exp(x); }),
        fn(0, 1, [](double x) { return std::exp(x); }),
    };
    auto ld3 = fn(0, 1, [](double x) { return std::exp(x); });
    auto r = calc::taylor(derivs, ld3, 0.0, 1.0, 1e-8);
    CHECK(r.polynomial_value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(r.remainder == doctest::Approx(std::exp(1.0) - 2.5).epsilon(1e-9));
    CHECK(r.bound == doctest::Approx((std::exp(1.0) - 1.0) / 2.0).epsilon(1e-6));
    CHECK(std::abs(r.remainder) <= r.bound + 1e-8);
}

TEST_CASE("taylor: degree 0 reduces to the plain increment") {
    std::vector<RealFunction> derivs = {fn(0, 2, [](double x) { return std::cos(x); })};
    auto ld1 = fn(0, 2, [](double x) { return -std::sin(x); });
    auto r = calc::taylor(derivs, ld1, 0.3, 1.7, 1e-8);
    CHECK(r.polynomial_value == doctest::Approx(std::cos(0.3)).epsilon(1e-12));
    CHECK(r.remainder == doctest::Approx(std::cos(1.7) - std::cos(0.3)).epsilon(1e-8));
}

TEST_CASE("taylor: randomized remainder bound") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.1, 1.0);
    for (int n = 1; n <= 5; ++n) {
        double x = ux(rng);
        std::vector<RealFunction> derivs;
        for (int k = 0; k <= n; ++k) {
            derivs.push_back(fn(0, 1, [k](double t) {
                // derivatives of sin(t): cycle sin, cos, -sin, -cos
                switch (k % 4) {
                    case 0: return std::sin(t);
                    case 1: return std::cos(t);
                    case 2: return -std::sin(t);
                    default: return -std::cos(t);
                }
            }));
        }
        int k = (n + 1) % 4;
        auto ld = fn(0, 1, [k](double t) {
            switch (k) {
                case 0: return std::sin(t);
                case 1: return std::cos(t);
                case 2: return -std::sin(t);
                default: return -std::cos(t);
            }
        });
        auto r = calc::taylor(derivs, ld, 0.0, x, 1e-8);
        CHECK(std::abs(std::sin(x) - r.polynomial_value - r.remainder) <= 1e-8);
        CHECK(std::abs(r.remainder) <= r.bound + 1e-8);
    }
}

TEST_CASE("taylor: inconsistent inputs are rejected") {
    std::vector<RealFunction> bad = {
        fn(0, 1, [](double x) { return std::exp(x); }),
        fn(0, 1, [](double x) { return std::cos(x); }), // not exp'
    };
    auto ld = fn(0, 1, [](double x) { return std::exp(x); });
    CHECK_THROWS_AS(calc::taylor(bad, ld, 0.0, 0.9, 1e-8), ConsistencyError);

    std::vector<RealFunction> good = {fn(0, 1, [](double x) { return std::exp(x); }),
                                      fn(0, 1, [](double x) { return std::exp(x); })};
    auto wrong_ld = fn(0, 1, [](double) { return 0.0; });
    CHECK_THROWS_AS(calc::taylor(good, wrong_ld, 0.0, 0.9, 1e-8), ConsistencyError);
}

TEST_CASE("quadrature monotonicity: pointwise ordered integrands stay ordered") {
    auto f = fn(0, 1, [](double x) { return std::sin(3.0 * x); });
    auto h = fn(0, 1, [](double x) { return std::sin(3.0 * x) + 0.1 + 0.05 * x; });
    double fi = quad::integrate(f, 0, 1, 1e-10).value;
    double hi = quad::integrate(h, 0, 1, 1e-10).value;
    CHECK(fi <= hi + 1e-10);
}

TEST_CASE("ftc round-trip: integrating ld1 estimates recovers the primitive") {
    auto F = fn(-1, 2, [](double t) { return std::sin(t); });
    deriv::SGrid grid{4.0, 2.0, 14};
    auto integrand = fn(0, 0.8, [&](double t) {
        auto c = deriv::combine(deriv::ld1(F, t, 0.2, grid, 1e-3), 1e-3);
        return c.value;
    });
    double got = quad::integrate(integrand, 0, 0.8, 1e-4).value;
    CHECK(std::abs(got - (std::sin(0.8) - std::sin(0.0))) <= 1e-3);
}

TEST_CASE("make_primitive: matches closed-form antiderivatives") {
    auto f = fn(0, 2, [](double x) { return std::cos(3.0 * x); });
    auto P = calc::make_primitive(f, 0, 2, 1e-10);
    for (double x : {0.0, 0.37, 1.0, 1.618, 2.0}) {
        CHECK(calc::ftc_integral(P, x) == doctest::Approx(std::sin(3.0 * x) / 3.0).epsilon(1e-8));
    }
    CHECK(calc::continuity_modulus(P.F, 257) <= 0.03);
}
