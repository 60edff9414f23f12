#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mpfr.h>

#include <cmath>
#include <random>

#include "laplace/laplace_deriv.hpp"
#include "laplace/svc.hpp"

using namespace laplace;
using svc::Dyadic;
using svc::SvcModel;

namespace {

// Independent high-precision sin for spot-checking oscillation values.
double mpfr_sin_of(double arg) {
    mpfr_t v;
    mpfr_init2(v, 256);
    mpfr_set_d(v, arg, MPFR_RNDN);
    mpfr_sin(v, v, MPFR_RNDN);
    double r = mpfr_get_d(v, MPFR_RNDN);
    mpfr_clear(v);
    return r;
}

} // namespace

TEST_CASE("dyadic: exact arithmetic and formatting") {
    Dyadic a(3, 3); // 3/8
    CHECK(a.to_double() == 0.375);
    CHECK(a.to_fraction_string() == "3/8");
    Dyadic b(5, 3); // 5/8
    CHECK((a + b).to_double() == 1.0);
    CHECK((b - a).to_fraction_string() == "1/4");
    CHECK((a * b).to_fraction_string() == "15/64");
    CHECK(a < b);
    CHECK(Dyadic::from_double(0.375) == a);
    CHECK(Dyadic::from_double(1.0).to_fraction_string() == "1");

    // magnitude shortcut: wildly different scales compare without overflow
    Dyadic tiny = Dyadic::from_double(std::ldexp(1.0, -900));
    CHECK(tiny < a);
    CHECK(a > tiny);
    CHECK(tiny.sign() == 1);
}

TEST_CASE("svc: depth-1 model matches the hand construction") {
    SvcModel m(1);
    auto c0 = m.component(1, 0);
    auto c1 = m.component(1, 1);
    CHECK(c0.lo.to_fraction_string() == "0");
    CHECK(c0.hi.to_fraction_string() == "3/8");
    CHECK(c1.lo.to_fraction_string() == "5/8");
    CHECK(c1.hi.to_fraction_string() == "1");
    auto g = m.gap(1, 0);
    CHECK(g.lo.to_fraction_string() == "3/8");
    CHECK(g.hi.to_fraction_string() == "5/8");
    CHECK((g.hi - g.lo) == SvcModel::gap_length(1));
    CHECK(SvcModel::gap_length(1).to_fraction_string() == "1/4");
}

TEST_CASE("svc: exact closed forms at every level") {
    SvcModel m(12);
    for (int n = 0; n <= 12; ++n) {
        Dyadic len = SvcModel::component_length(n);
        // (2^n + 1) / 2^(2n+1)
        CHECK(len == Dyadic((svc::int128(1) << n) + 1, 2 * n + 1));
        // measure = count * length = (1 + 2^-n)/2
        Dyadic measure = SvcModel::level_measure(n);
        CHECK(measure == Dyadic(svc::int128(SvcModel::component_count(n)), 0) * len);
        CHECK(measure == (Dyadic(1, 0) + Dyadic(1, n)).half());
        if (n >= 1) CHECK(SvcModel::gap_length(n) == Dyadic(1, 2 * n));
    }
    // every enumerated component at a sampled level has the closed-form length
    for (std::uint64_t k = 0; k < SvcModel::component_count(10); k += 37) {
        auto c = m.component(10, k);
        CHECK((c.hi - c.lo) == SvcModel::component_length(10));
    }
}

TEST_CASE("svc: construction guards") {
    CHECK_THROWS_AS(SvcModel(0), DepthTooLarge);
    CHECK_THROWS_AS(SvcModel(41), DepthTooLarge);
    SvcModel m(3);
    CHECK_THROWS_AS(m.component(4, 0), DomainError);
    CHECK_THROWS_AS(m.gap(1, 1), DomainError);
    CHECK_THROWS_AS(m.locate(1.5), DomainError);
}

TEST_CASE("svc: locate") {
    SvcModel m(8);
    auto l = m.locate(0.5);
    CHECK(l.kind == SvcModel::Location::Kind::InGap);
    CHECK(l.level == 1);

    l = m.locate(0.0);
    CHECK(l.kind == SvcModel::Location::Kind::InComponent);
    CHECK(l.index == 0);

    l = m.locate(1.0);
    CHECK(l.kind == SvcModel::Location::Kind::InComponent);

    l = m.locate(0.375);
    CHECK(l.kind == SvcModel::Location::Kind::Boundary);
    CHECK(l.level == 1);

    // deep-depth dyadic path agrees with the double path
    SvcModel deep(30);
    for (double x : {0.0, 0.1234, 0.375, 0.4999, 0.5, 0.625, 0.77, 1.0}) {
        auto a = m.locate(x);
        auto b = deep.locate(x);
        if (a.kind == SvcModel::Location::Kind::InGap) {
            CHECK(b.kind == a.kind);
            CHECK(b.level == a.level);
            CHECK(b.index == a.index);
        }
    }
}

TEST_CASE("svc: gap catalog enumeration is ordered and complete") {
    SvcModel m(6);
    std::vector<SvcModel::Gap> gaps;
    m.for_each_gap(6, [&](const SvcModel::Gap& g) { gaps.push_back(g); });
    std::size_t expect = 0;
    for (int n = 1; n <= 6; ++n) expect += SvcModel::component_count(n - 1);
    CHECK(gaps.size() == expect); // 2^6 - 1
    for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i - 1].hi < gaps[i].lo);
    // total removed length at level n is 2^(n-1) * 4^-n = 2^-(n+1)
    double removed = 0.0;
    for (const auto& g : gaps) removed += (g.hi - g.lo).to_double();
    double expect_removed = 0.0;
    for (int n = 1; n <= 6; ++n) expect_removed += std::ldexp(1.0, -(n + 1));
    CHECK(removed == doctest::Approx(expect_removed).epsilon(1e-15));

    std::vector<SvcModel::Gap> window;
    m.for_each_gap_in(0.3, 0.7, 6, [&](const SvcModel::Gap& g) { window.push_back(g); });
    CHECK(!window.empty());
    for (const auto& g : window) {
        CHECK(g.lo.to_double() <= 0.7 + 1e-12);
        CHECK(g.hi.to_double() >= 0.3 - 1e-12);
    }
}

TEST_CASE("pathological: values at and around gap endpoints") {
    svc::PathologicalFunction pf(10);
    const auto& m = pf.model();
    auto g = m.gap(1, 0); // (3/8, 5/8)
    CHECK(pf.eval(0.375) == 0.0);
    CHECK(pf.eval(0.625) == 0.0);
    CHECK(pf.eval(0.0) == 0.0);
    CHECK(pf.eval(1.0) == 0.0);

    // x = 7/16: offset 1/16 from the gap's left endpoint;
    // phase (1/16)^(-7/4) = 2^7 = 128 exactly.
    double expect = std::pow(1.0 / 16.0, 0.25) * mpfr_sin_of(128.0);
    CHECK(pf.eval(7.0 / 16.0) == doctest::Approx(expect).epsilon(1e-14));

    // certified set points evaluate to zero
    for (const auto& p : svc::component_endpoints(m, 4)) CHECK(pf.eval(p.approx) == 0.0);

    CHECK(pf.truncation_bound() == doctest::Approx(std::pow(0.5 * std::ldexp(1.0, -20), 0.25)));
    (void)g;
}

TEST_CASE("pathological: continuity probe at gap endpoints") {
    // At an endpoint the function vanishes and the envelope gives the exact
    // modulus of continuity: |f(x0 +/- h)| <= h^(1/4).
    svc::PathologicalFunction pf(12);
    const auto& m = pf.model();
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> lvl(1, 5);
    for (int rep = 0; rep < 8; ++rep) {
        int n = lvl(rng);
        std::uniform_int_distribution<std::uint64_t> pick(0, SvcModel::component_count(n - 1) - 1);
        auto g = m.gap(n, pick(rng));
        for (double x0 : {g.lo.to_double(), g.hi.to_double()}) {
            CHECK(pf.eval(x0) == 0.0);
            for (int j = 8; j <= 20; ++j) {
                double h = std::ldexp(1.0, -2 * j);
                double dev = std::max(std::abs(pf.eval(std::min(x0 + h, 1.0))),
                                      std::abs(pf.eval(std::max(x0 - h, 0.0))));
                CHECK(dev <= std::pow(h, 0.25) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("pathological: continuity probe at interior gap points") {
    // Away from the endpoints the modulus is governed by the local phase
    // derivative; shrink h well below the local wavelength and the deviation
    // must collapse.
    svc::PathologicalFunction pf(12);
    const auto& m = pf.model();
    for (int n : {1, 2, 3}) {
        auto g = m.gap(n, 0);
        double a = g.lo.to_double(), b = g.hi.to_double();
        double c = a + 0.5 * (b - a);
        for (double frac : {0.5, 0.31}) {
            double x0 = a + frac * (c - a);
            double fx0 = pf.eval(x0);
            double offset = x0 - a;
            double phase_rate = 1.75 * std::pow(offset, -2.75);
            double h = 0.01 / phase_rate;
            double dev = std::max(std::abs(pf.eval(x0 + h) - fx0), std::abs(pf.eval(x0 - h) - fx0));
            CHECK(dev <= 0.05 * std::pow(offset, 0.25) + 1e-12);
        }
    }
}

TEST_CASE("pathological: witness pairs sit in the middle quarter with exact phases") {
    svc::PathologicalFunction pf(20);
    const auto& m = pf.model();
    auto pts = svc::component_endpoints(m, 2);
    for (const auto& a : pts) {
        for (int n : {2, 3, 5, 8}) {
            svc::WitnessPair wp;
            try {
                wp = pf.witness_pair(a, n);
            } catch (const NoWitnessAtDepth&) {
                continue;
            }
            double L = (wp.gap.hi - wp.gap.lo).to_double();
            CHECK(wp.gap.level >= n + 1);
            CHECK(wp.gap.level <= 2 * n);
            // both inside the middle quarter of the gap (closed at double
            // resolution: deep levels have the admissible phase multiples
            // within one ulp of the quarter boundary)
            CHECK(wp.u_offset >= 0.25 * L * (1.0 - 1e-12));
            CHECK(wp.u_offset <= 0.5 * L * (1.0 + 1e-12));
            CHECK(wp.v_offset >= 0.25 * L * (1.0 - 1e-12));
            CHECK(wp.v_offset <= 0.5 * L * (1.0 + 1e-12));
            CHECK(wp.u_offset <= wp.v_offset);
            // Pointwise spot-check of the closed-form identities is only
            // meaningful while one ulp of position moves the phase by far
            // less than a radian: rounding u = x0 + offset costs about
            // ulp(x0)/offset in relative offset, amplified by the phase.
            double phase = std::pow(0.25 * L, -1.75);
            double phase_err = phase * 2e-16 * (wp.u / wp.u_offset + 2.0);
            if (phase_err < 1e-4) {
                CHECK(pf.eval(wp.u) ==
                      doctest::Approx(std::pow(wp.u_offset, 0.25)).epsilon(1e-4));
                CHECK(std::abs(pf.eval(wp.v)) <= 1e-4 * std::pow(wp.v_offset, 0.25) + 1e-12);
            }
        }
    }
}

TEST_CASE("pathological: difference quotients diverge along u and vanish along v") {
    svc::PathologicalFunction pf(24);
    auto pts = svc::component_endpoints(pf.model(), 3);
    int diverged = 0;
    for (const auto& a : pts) {
        auto qs = pf.difference_quotients(a, 12);
        REQUIRE(!qs.empty());
        double best = 0.0;
        for (const auto& q : qs) {
            CHECK(q.quotient_v == 0.0);
            CHECK(q.quotient_u >= q.lower_bound * (1.0 - 1e-12));
            best = std::max(best, q.quotient_u);
        }
        if (best > 1e3) ++diverged;
    }
    // every tested base point exhibits a quotient beyond 10^3 within depth 24
    CHECK(diverged == static_cast<int>(pts.size()));
}

TEST_CASE("pathological: ld1 vanishes at certified points (smoke)") {
    auto pf = svc::PathologicalFunction(12);
    RealFunction f = pf.as_real_function();
    deriv::SGrid grid{4.0, 2.0, 18};
    for (double x : {0.375, 0.625}) {
        auto two = deriv::ld1(f, x, 0.05, grid, 0.05);
        auto c = deriv::combine(two, 0.1);
        CHECK(c.converged());
        CHECK(std::abs(c.value) <= 0.1);
    }
}
