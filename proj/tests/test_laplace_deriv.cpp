#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "laplace/laplace_deriv.hpp"

using namespace laplace;
using deriv::LimitClass;
using deriv::SGrid;

namespace {

RealFunction fn(double lo, double hi, std::function<double(double)> f) {
    return make_function(lo, hi, std::move(f));
}

// Brute-force surrogate for the one-sided derivates: extremes of the
// difference quotients over a dyadic h-grid. Independent of the s-grid path.
struct QuotientRange {
    double lo, hi;
};
QuotientRange quotient_range(const std::function<double(double)>& f, double x, double sign) {
    double qlo = std::numeric_limits<double>::infinity(), qhi = -qlo;
    for (int j = 4; j <= 20; ++j) {
        double h = std::ldexp(1.0, -j);
        double q = (f(x + sign * h) - f(x)) / (sign * h);
        qlo = std::min(qlo, q);
        qhi = std::max(qhi, q);
    }
    return {qlo, qhi};
}

} // namespace

TEST_CASE("classify_tail: rules") {
    std::vector<std::pair<double, double>> conv;
    for (int k = 0; k < 12; ++k) conv.emplace_back(k, 3.0 + std::pow(0.5, k));
    auto e = deriv::classify_tail(conv, 1e-2);
    CHECK(e.classification == LimitClass::Converged);
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(e.tail_spread <= 1e-2);

    std::vector<std::pair<double, double>> div;
    for (int k = 0; k < 12; ++k) div.emplace_back(k, std::exp(k * 2.0));
    e = deriv::classify_tail(div, 1e-2);
    CHECK(e.classification == LimitClass::DivergedPositive);

    for (auto& p : div) p.second = -p.second;
    e = deriv::classify_tail(div, 1e-2);
    CHECK(e.classification == LimitClass::DivergedNegative);

    std::vector<std::pair<double, double>> osc;
    for (int k = 0; k < 18; ++k) osc.emplace_back(k, (k % 2) ? 1.0 : -1.0);
    e = deriv::classify_tail(osc, 1e-2);
    CHECK(e.classification == LimitClass::Oscillating);

    std::vector<std::pair<double, double>> slow;
    for (int k = 0; k < 18; ++k) slow.emplace_back(k, 1.0 / (1.0 + k));
    e = deriv::classify_tail(slow, 1e-6);
    CHECK(e.classification == LimitClass::Inconclusive);
}

TEST_CASE("ld0: continuity value recovers f(x) for continuous f") {
    auto f = fn(-1, 1, [](double t) { return std::cos(t); });
    SGrid g{4.0, 2.0, 20};
    auto t = deriv::ld0(f, 0.3, 0.5, g, 1e-4);
    CHECK(t.plus.converged());
    CHECK(t.minus.converged());
    CHECK(t.plus.value == doctest::Approx(std::cos(0.3)).epsilon(1e-4));
    CHECK(t.minus.value == doctest::Approx(std::cos(0.3)).epsilon(1e-4));
    CHECK(deriv::laplace_continuous(f, 0.3, 0.5, g, 1e-3));
}

TEST_CASE("ld0: constants are exact in the limit") {
    auto f = fn(-1, 1, [](double) { return 2.5; });
    auto t = deriv::ld0(f, 0.0, 0.25, SGrid{4, 2, 18}, 1e-6);
    CHECK(t.plus.converged());
    CHECK(t.plus.value == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(t.minus.value == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("ld0: step function has one-sided values") {
    double x0 = 0.2;
    auto f = fn(-1, 1, [x0](double t) { return t < x0 ? 0.0 : 1.0; });
    auto t = deriv::ld0(f, x0, 0.5, SGrid{4, 2, 20}, 1e-5);
    CHECK(t.plus.converged());
    CHECK(t.minus.converged());
    CHECK(t.plus.value == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(t.minus.value) <= 1e-5);
    CHECK_FALSE(deriv::laplace_continuous(f, x0, 0.5, SGrid{4, 2, 20}, 1e-3));
}

TEST_CASE("ld1: smooth functions match the classical derivative") {
    SGrid g = SGrid::defaults();
    auto sq = fn(-2, 3, [](double t) { return t * t; });
    auto t = deriv::ld1(sq, 1.0, 0.25, g, 1e-4);
    auto c = deriv::combine(t, 1e-4);
    CHECK(c.converged());
    CHECK(c.value == doctest::Approx(2.0).epsilon(1e-5));

    auto f = fn(-2, 3, [](double t) { return std::sin(t); });
    for (double x : {-0.7, 0.0, 1.3}) {
        auto est = deriv::combine(deriv::ld1(f, x, 0.25, g, 1e-4), 1e-4);
        CHECK(est.converged());
        CHECK(est.value == doctest::Approx(std::cos(x)).epsilon(1e-5));
    }
}

TEST_CASE("ld1: constants have zero derivative") {
    auto f = fn(-1, 1, [](double) { return 7.0; });
    auto c = deriv::combine(deriv::ld1(f, 0.1, 0.25, SGrid{4, 2, 16}, 1e-8), 1e-8);
    CHECK(c.converged());
    CHECK(std::abs(c.value) <= 1e-8);
}

TEST_CASE("ld1: delta-independence on the smooth set") {
    SGrid g = SGrid::defaults();
    double tol = 1e-5;
    std::vector<std::function<double(double)>> fs = {
        [](double t) { return std::sin(t); },
        [](double t) { return std::exp(t); },
        [](double t) { return t * t; },
    };
    for (const auto& fe : fs) {
        auto f = fn(-3, 3, fe);
        for (double x : {-0.4, 0.55}) {
            auto a = deriv::combine(deriv::ld1(f, x, 0.1, g, tol), tol);
            auto b = deriv::combine(deriv::ld1(f, x, 0.7, g, tol), tol);
            REQUIRE(a.converged());
            REQUIRE(b.converged());
            CHECK(std::abs(a.value - b.value) <= 10.0 * tol);
        }
    }
}

TEST_CASE("ld1: linearity on converged inputs") {
    SGrid g = SGrid::defaults();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto f = fn(-2, 2, [](double t) { return std::sin(2.0 * t); });
    auto h = fn(-2, 2, [](double t) { return std::exp(-t); });
    for (int rep = 0; rep < 4; ++rep) {
        double alpha = u(rng), beta = u(rng);
        auto combo = fn(-2, 2, [alpha, beta](double t) {
            return alpha * std::sin(2.0 * t) + beta * std::exp(-t);
        });
        double x = 0.3;
        double tol = 1e-4;
        auto l = deriv::combine(deriv::ld1(combo, x, 0.25, g, tol), tol);
        auto lf = deriv::combine(deriv::ld1(f, x, 0.25, g, tol), tol);
        auto lh = deriv::combine(deriv::ld1(h, x, 0.25, g, tol), tol);
        REQUIRE(l.converged());
        CHECK(std::abs(l.value - (alpha * lf.value + beta * lh.value)) <=
              tol * (2.0 + std::abs(alpha) + std::abs(beta)));
    }
}

TEST_CASE("derivates: smooth case collapses to the derivative") {
    auto f = fn(-2, 2, [](double t) { return std::exp(t); });
    auto d = deriv::derivates(f, 0.5, 0.25, SGrid::defaults());
    double fp = std::exp(0.5);
    CHECK(d.lower_plus <= d.upper_plus);
    CHECK(d.lower_minus <= d.upper_minus);
    CHECK(d.lower_plus == doctest::Approx(fp).epsilon(1e-4));
    CHECK(d.upper_minus == doctest::Approx(fp).epsilon(1e-4));
}

TEST_CASE("derivates: |x| at 0 separates the sides") {
    auto f = fn(-1, 1, [](double t) { return std::abs(t); });
    auto d = deriv::derivates(f, 0.0, 0.25, SGrid::defaults());
    CHECK(d.lower_plus == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(d.upper_plus == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(d.lower_minus == doctest::Approx(-1.0).epsilon(1e-4));
    CHECK(d.upper_minus == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("derivates: sandwiched by brute-force difference-quotient extremes") {
    // Mixed set: smooth, kink, and a mildly wiggly function.
    std::vector<std::function<double(double)>> fs = {
        [](double t) { return std::sin(3.0 * t); },
        [](double t) { return std::abs(t - 0.1) + 0.5 * t; },
        [](double t) { return t * t * std::sin(5.0 * t); },
    };
    for (const auto& fe : fs) {
        auto f = fn(-2, 2, fe);
        for (double x : {0.0, 0.4}) {
            auto d = deriv::derivates(f, x, 0.25, SGrid::defaults());
            auto qp = quotient_range(fe, x, +1.0);
            auto qm = quotient_range(fe, x, -1.0);
            double slack = 1e-3 + 0.05 * (qp.hi - qp.lo + qm.hi - qm.lo);
            CHECK(d.lower_plus >= qp.lo - slack);
            CHECK(d.upper_plus <= qp.hi + slack);
            CHECK(d.lower_minus >= qm.lo - slack);
            CHECK(d.upper_minus <= qm.hi + slack);
        }
    }
}

TEST_CASE("ld0/ld1: domain handling") {
    auto f = fn(0, 1, [](double t) { return t; });
    CHECK_THROWS_AS(deriv::ld1(f, 0.5, 0.25, SGrid{0.0, 2.0, 10}, 1e-6), DomainError);
    // x at the left endpoint: only the plus side is available.
    auto t = deriv::ld1(f, 0.0, 0.25, SGrid{4, 2, 18}, 1e-6);
    CHECK(t.plus.converged());
    CHECK(t.plus.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(t.minus.samples.empty());
    auto c = deriv::combine(t, 1e-6);
    CHECK(c.converged()); // one-sided fallback
}
