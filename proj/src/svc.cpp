#include "laplace/svc.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

namespace laplace::svc {
namespace {

struct DoublePair {
    double hi, lo;
};

// Exact difference of two doubles (Knuth two-sum).
DoublePair two_diff(double a, double b) {
    double s = a - b;
    double bb = a - s;
    double err = (a - (s + bb)) + (bb - b);
    return {s, err};
}

// Component length as a double; exact for level <= 26.
double component_length_d(int level) {
    return std::ldexp(static_cast<double>((std::uint64_t{1} << level) + 1), -(2 * level + 1));
}

// sin(u^(-7/4)) for an exact dyadic offset u, in 320-bit arithmetic. Covers
// phases up to ~2^140 (depth 40) with plenty of margin; mpfr_sin performs its
// own internal argument reduction.
double sin_inverse_phase_mpfr(const Dyadic& u) {
    struct Ctx {
        mpfr_t val, expo, aux;
        Ctx() {
            mpfr_init2(val, 320);
            mpfr_init2(expo, 64);
            mpfr_init2(aux, 320);
            mpfr_set_d(expo, -1.75, MPFR_RNDN);
        }
        ~Ctx() {
            mpfr_clear(val);
            mpfr_clear(expo);
            mpfr_clear(aux);
        }
    };
    thread_local Ctx ctx;
    auto n = static_cast<unsigned __int128>(u.num()); // u > 0 here
    auto hi = static_cast<std::uint64_t>(n >> 64);
    auto lo = static_cast<std::uint64_t>(n);
    mpfr_set_uj(ctx.val, hi, MPFR_RNDN);
    mpfr_mul_2ui(ctx.val, ctx.val, 64, MPFR_RNDN);
    mpfr_set_uj(ctx.aux, lo, MPFR_RNDN);
    mpfr_add(ctx.val, ctx.val, ctx.aux, MPFR_RNDN);
    mpfr_mul_2si(ctx.val, ctx.val, -u.exp2(), MPFR_RNDN); // exact
    mpfr_pow(ctx.val, ctx.val, ctx.expo, MPFR_RNDN);
    mpfr_sin(ctx.val, ctx.val, MPFR_RNDN);
    return mpfr_get_d(ctx.val, MPFR_RNDN);
}

// Oscillation value envelope * sin(phase) for offset u given as an exact
// double pair; `exact` supplies the offset when the phase needs extended
// precision (beyond 2^26 the double pow loses the phase).
double oscillation_value(DoublePair u, const std::function<Dyadic()>& exact) {
    if (!(u.hi > 0.0)) return 0.0;
    double envelope = std::pow(u.hi, 0.25);
    double phase = std::pow(u.hi, -1.75);
    if (phase < 0x1p26) {
        double corrected = phase * (1.0 - 1.75 * (u.lo / u.hi));
        return envelope * std::sin(corrected);
    }
    return envelope * sin_inverse_phase_mpfr(exact());
}

struct LocateDetail {
    SvcModel::Location loc;
    double gap_lo = 0.0, gap_hi = 0.0; // filled when kind != InComponent
};

} // namespace

SvcModel::SvcModel(int depth) : depth_(depth) {
    if (depth < 1 || depth > kMaxDepth)
        throw DepthTooLarge("svc depth must be in [1, " + std::to_string(kMaxDepth) + "], got " +
                            std::to_string(depth));
}

Dyadic SvcModel::component_length(int level) {
    dy_check(level >= 0 && level <= kMaxDepth, "component_length level");
    return Dyadic((static_cast<int128>(1) << level) + 1, 2 * level + 1);
}

Dyadic SvcModel::gap_length(int level) {
    dy_check(level >= 1 && level <= kMaxDepth, "gap_length level");
    return Dyadic(1, 2 * level);
}

Dyadic SvcModel::level_measure(int level) {
    dy_check(level >= 0 && level <= kMaxDepth, "level_measure level");
    int128 count = static_cast<int128>(1) << level;
    return Dyadic(count * (count + 1), 2 * level + 1);
}

std::uint64_t SvcModel::component_count(int level) {
    dy_check(level >= 0 && level < 63, "component_count level");
    return std::uint64_t{1} << level;
}

SvcModel::Component SvcModel::component(int level, std::uint64_t index) const {
    if (level < 0 || level > depth_ || index >= component_count(level))
        throw DomainError("svc component: level/index out of range");
    Dyadic left(0);
    for (int j = 1; j <= level; ++j) {
        bool right = (index >> (level - j)) & 1U;
        if (right) left = left + (component_length(j - 1) - component_length(j));
    }
    return Component{left, left + component_length(level), level, index};
}

SvcModel::Gap SvcModel::gap(int level, std::uint64_t index) const {
    if (level < 1 || level > depth_ || index >= component_count(level - 1))
        throw DomainError("svc gap: level/index out of range");
    Component parent = component(level - 1, index);
    Dyadic mid = parent.lo + component_length(level - 1).half();
    Dyadic half_gap = Dyadic::one_over_pow2(2 * level + 1);
    return Gap{mid - half_gap, mid + half_gap, level, index};
}

namespace {

// Shared tree walk: at depth <= 26 every endpoint involved is an exact
// double, so the fast path never rounds.
LocateDetail locate_double_walk(int depth, double x) {
    double left = 0.0;
    std::uint64_t idx = 0;
    for (int m = 0; m < depth; ++m) {
        int n = m + 1;
        double len = component_length_d(m);
        double half_gap = std::ldexp(1.0, -(2 * n + 1));
        double mid = left + 0.5 * len;
        double glo = mid - half_gap, ghi = mid + half_gap;
        if (x == glo || x == ghi)
            return {{SvcModel::Location::Kind::Boundary, n, idx}, glo, ghi};
        if (x > glo && x < ghi) return {{SvcModel::Location::Kind::InGap, n, idx}, glo, ghi};
        if (x < glo) {
            idx = 2 * idx;
        } else {
            left += len - component_length_d(n);
            idx = 2 * idx + 1;
        }
    }
    return {{SvcModel::Location::Kind::InComponent, depth, idx}, 0.0, 0.0};
}

LocateDetail locate_dyadic_walk(int depth, double x) {
    Dyadic xd = Dyadic::from_double(x);
    Dyadic left(0);
    std::uint64_t idx = 0;
    for (int m = 0; m < depth; ++m) {
        int n = m + 1;
        Dyadic len = SvcModel::component_length(m);
        Dyadic mid = left + len.half();
        Dyadic half_gap = Dyadic::one_over_pow2(2 * n + 1);
        Dyadic glo = mid - half_gap, ghi = mid + half_gap;
        int clo = Dyadic::cmp(xd, glo), chi = Dyadic::cmp(xd, ghi);
        if (clo == 0 || chi == 0)
            return {{SvcModel::Location::Kind::Boundary, n, idx}, glo.to_double(), ghi.to_double()};
        if (clo > 0 && chi < 0)
            return {{SvcModel::Location::Kind::InGap, n, idx}, glo.to_double(), ghi.to_double()};
        if (clo < 0) {
            idx = 2 * idx;
        } else {
            left = left + (len - SvcModel::component_length(n));
            idx = 2 * idx + 1;
        }
    }
    return {{SvcModel::Location::Kind::InComponent, depth, idx}, 0.0, 0.0};
}

LocateDetail locate_detail(int depth, double x) {
    if (depth <= 26) return locate_double_walk(depth, x);
    return locate_dyadic_walk(depth, x);
}

} // namespace

SvcModel::Location SvcModel::locate(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("svc locate: x outside [0, 1]");
    return locate_detail(depth_, x).loc;
}

void SvcModel::for_each_gap_in(double lo, double hi, int max_level,
                               const std::function<void(const Gap&)>& fn) const {
    if (!(hi >= lo)) return;
    max_level = std::min(max_level, depth_);
    if (max_level < 1) return;
    double widen = 4e-16 * (std::abs(lo) + std::abs(hi) + 1.0);
    double qlo = lo - widen, qhi = hi + widen;

    // In-order walk emits gaps sorted by position across levels.
    struct Walker {
        const SvcModel& m;
        int max_level;
        double qlo, qhi;
        const std::function<void(const Gap&)>& fn;

        void visit(int level, std::uint64_t idx, const Dyadic& left) {
            if (level >= max_level) return;
            int n = level + 1;
            Dyadic len = component_length(level);
            Dyadic mid = left + len.half();
            Dyadic half_gap = Dyadic::one_over_pow2(2 * n + 1);
            Gap g{mid - half_gap, mid + half_gap, n, idx};
            double glo = g.lo.to_double(), ghi = g.hi.to_double();
            double right_start = left.to_double() + (len.to_double() - component_length_d(n));
            if (glo > qlo) // left child [left, glo] can intersect the query
                if (left.to_double() <= qhi && glo >= qlo) visit(n, 2 * idx, left);
            if (glo <= qhi && ghi >= qlo) fn(g);
            if (right_start <= qhi && right_start + component_length_d(n) >= qlo)
                visit(n, 2 * idx + 1, left + (len - component_length(n)));
        }
    };
    Walker w{*this, max_level, qlo, qhi, fn};
    w.visit(0, 0, Dyadic(0));
}

void SvcModel::for_each_gap(int max_level, const std::function<void(const Gap&)>& fn) const {
    for_each_gap_in(0.0, 1.0, max_level, fn);
}

std::vector<SPoint> component_endpoints(const SvcModel& model, int level) {
    if (level < 0 || level > model.depth() || level > 22)
        throw DomainError("component_endpoints: level out of range");
    std::vector<SPoint> pts;
    pts.reserve(2 * SvcModel::component_count(level));
    for (std::uint64_t k = 0; k < SvcModel::component_count(level); ++k) {
        auto c = model.component(level, k);
        pts.push_back(SPoint{c.lo, c.lo.to_double()});
        pts.push_back(SPoint{c.hi, c.hi.to_double()});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Pathological function

namespace {

// Breakpoints and cancellation bounds for the oscillatory gap function. The
// bounds come from the cubic antiderivative envelope: on the left half of a
// gap, |integral of the oscillation over any subinterval of (a, a+u]| is at
// most (8/7) u^3, mirrored on the right half.
class PathologicalStructure : public FunctionStructure {
public:
    explicit PathologicalStructure(std::shared_ptr<const SvcModel> m) : model_(std::move(m)) {}

    void append_breakpoints(double lo, double hi, std::vector<double>& out) const override {
        if (!(hi > lo)) return;
        double min_len = (hi - lo) * 0x1p-10;
        int max_level = 1;
        while (max_level < model_->depth() && std::ldexp(1.0, -2 * (max_level + 1)) >= min_len)
            ++max_level;
        model_->for_each_gap_in(lo, hi, max_level, [&](const SvcModel::Gap& g) {
            double a = g.lo.to_double(), b = g.hi.to_double();
            double c = a + 0.5 * (b - a);
            for (double t : {a, c, b})
                if (t > lo && t < hi) out.push_back(t);
        });
    }

    std::optional<double> cancellation_bound(double lo, double hi) const override {
        if (!(hi > lo)) return 0.0;
        lo = std::max(lo, 0.0);
        hi = std::min(hi, 1.0);
        if (!(hi > lo)) return 0.0;

        LocateDetail dlo = locate_detail(model_->depth(), lo);
        if (dlo.loc.kind == SvcModel::Location::Kind::InGap && hi <= dlo.gap_hi)
            return within_gap(dlo.gap_lo, dlo.gap_hi, lo, hi);

        double total = 0.0;
        if (dlo.loc.kind == SvcModel::Location::Kind::InGap)
            total += within_gap(dlo.gap_lo, dlo.gap_hi, lo, dlo.gap_hi);
        LocateDetail dhi = locate_detail(model_->depth(), hi);
        if (dhi.loc.kind == SvcModel::Location::Kind::InGap)
            total += within_gap(dhi.gap_lo, dhi.gap_hi, dhi.gap_lo, hi);

        // Gaps whose interior meets (lo, hi), excluding the two boundary gaps
        // already accounted as partial pieces: each contributes at most
        // (16/7) (gap/2)^3 = (2/7) 4^(-3n). Shallow levels are enumerated
        // exactly; deep levels (beyond ~64 gaps across the width) use the
        // arithmetic overcount "one gap per component of the parent level,
        // pitch-limited", whose +2 slack is negligible at that depth.
        double width = hi - lo;
        int n_enum = 1;
        while (n_enum < model_->depth() && width * std::ldexp(1.0, n_enum) <= 64.0) ++n_enum;
        model_->for_each_gap_in(lo, hi, n_enum, [&](const SvcModel::Gap& g) {
            if (!(g.lo.to_double() < hi && g.hi.to_double() > lo)) return;
            if (dlo.loc.kind == SvcModel::Location::Kind::InGap && g.level == dlo.loc.level &&
                g.index == dlo.loc.index)
                return;
            if (dhi.loc.kind == SvcModel::Location::Kind::InGap && g.level == dhi.loc.level &&
                g.index == dhi.loc.index)
                return;
            total += (2.0 / 7.0) * std::ldexp(1.0, -6 * g.level);
        });
        for (int n = n_enum + 1; n <= model_->depth(); ++n) {
            double pitch = component_length_d(n - 1);
            double count = std::min(std::ldexp(1.0, n - 1), width / pitch + 2.0);
            double term = (2.0 / 7.0) * std::ldexp(1.0, -6 * n) * count;
            total += term;
            if (term < 1e-300) break;
        }
        return total * (1.0 + 1e-9);
    }

private:
    static double within_gap(double a, double b, double alpha, double beta) {
        double c = a + 0.5 * (b - a);
        double u;
        if (beta <= c)
            u = beta - a;
        else if (alpha >= c)
            u = b - alpha;
        else {
            double h = 0.5 * (b - a);
            return (16.0 / 7.0) * h * h * h * (1.0 + 1e-9);
        }
        u = std::max(u, 0.0);
        return (8.0 / 7.0) * u * u * u * (1.0 + 1e-9);
    }

    std::shared_ptr<const SvcModel> model_;
};

} // namespace

PathologicalFunction::PathologicalFunction(std::shared_ptr<const SvcModel> model)
    : model_(std::move(model)) {
    if (!model_) throw DomainError("pathological function: null model");
}

double PathologicalFunction::truncation_bound() const {
    return std::pow(0.5 * std::ldexp(1.0, -2 * model_->depth()), 0.25);
}

double PathologicalFunction::eval(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("pathological eval: x outside [0, 1]");
    LocateDetail d = locate_detail(model_->depth(), x);
    if (d.loc.kind != SvcModel::Location::Kind::InGap) return 0.0;

    const bool exact_doubles = model_->depth() <= 26;
    double mid = d.gap_lo + 0.5 * (d.gap_hi - d.gap_lo);
    if (x <= mid) {
        DoublePair u = two_diff(x, d.gap_lo);
        if (!exact_doubles) {
            Dyadic g_lo = model_->gap(d.loc.level, d.loc.index).lo;
            u.lo -= (g_lo - Dyadic::from_double(d.gap_lo)).to_double();
            return oscillation_value(
                u, [&] { return Dyadic::from_double(x) - g_lo; });
        }
        return oscillation_value(u, [&] { return Dyadic::from_double(x - d.gap_lo); });
    }
    DoublePair u = two_diff(d.gap_hi, x);
    if (!exact_doubles) {
        Dyadic g_hi = model_->gap(d.loc.level, d.loc.index).hi;
        u.lo += (g_hi - Dyadic::from_double(d.gap_hi)).to_double();
        return oscillation_value(u, [&] { return g_hi - Dyadic::from_double(x); });
    }
    return oscillation_value(u, [&] { return Dyadic::from_double(d.gap_hi - x); });
}

RealFunction PathologicalFunction::as_real_function() const {
    auto self = *this;
    return make_function(
        0.0, 1.0, [self](double x) { return self.eval(x); },
        std::make_shared<PathologicalStructure>(model_));
}

WitnessPair PathologicalFunction::witness_pair(const SPoint& a, int n) const {
    if (n < 2) throw DomainError("witness_pair: level must be >= 2");
    if (2 * n > model_->depth())
        throw NoWitnessAtDepth("witness_pair: depth " + std::to_string(model_->depth()) +
                               " cannot exhibit level " + std::to_string(n));

    Dyadic off_lo = Dyadic::one_over_pow2(2 * (n + 1));          // 4^-(n+1)
    Dyadic off_hi = Dyadic(5, 0) * off_lo;                       // 5 * 4^-(n+1)

    for (WitnessSide side : {WitnessSide::plus, WitnessSide::minus}) {
        Dyadic wlo = (side == WitnessSide::plus) ? a.exact + off_lo : a.exact - off_hi;
        Dyadic whi = (side == WitnessSide::plus) ? a.exact + off_hi : a.exact - off_lo;
        if (wlo.sign() < 0 || Dyadic(1, 0) < whi) continue;

        std::optional<SvcModel::Gap> found;
        model_->for_each_gap_in(wlo.to_double(), whi.to_double(), 2 * n,
                                [&](const SvcModel::Gap& g) {
                                    if (found) return;
                                    if (g.level >= n + 1 && wlo <= g.lo && g.hi <= whi) found = g;
                                });
        if (!found) continue;

        const SvcModel::Gap& g = *found;
        long double half = 0.5L * (g.hi - g.lo).to_double();
        long double quarter = 0.5L * half;
        long double phi_far = powl(half, -1.75L);     // phase at the gap midpoint
        long double phi_near = powl(quarter, -1.75L); // phase at the quarter point
        const long double two_pi = 6.283185307179586476925286766559L;
        const long double half_pi = 1.5707963267948966192313216916398L;
        long double l = floorl(phi_far / two_pi) + 1.0L;
        if (!(two_pi * l + half_pi < phi_near))
            throw NoWitnessAtDepth("witness_pair: no admissible phase multiple (unexpected)");

        WitnessPair wp;
        wp.u_offset = static_cast<double>(powl(two_pi * l + half_pi, -4.0L / 7.0L));
        wp.v_offset = static_cast<double>(powl(two_pi * l, -4.0L / 7.0L));
        wp.gap = g;
        wp.side = side;
        wp.level_n = n;
        if (side == WitnessSide::plus) {
            wp.u = g.lo.to_double() + wp.u_offset;
            wp.v = g.lo.to_double() + wp.v_offset;
        } else {
            wp.u = g.hi.to_double() - wp.u_offset;
            wp.v = g.hi.to_double() - wp.v_offset;
        }
        return wp;
    }
    throw NoWitnessAtDepth("witness_pair: level " + std::to_string(n) +
                           " exhibits no gap in either window at this depth");
}

std::vector<QuotientSample> PathologicalFunction::difference_quotients(const SPoint& a,
                                                                       int n_max) const {
    std::vector<QuotientSample> out;
    for (int n = 2; n <= n_max; ++n) {
        if (2 * n > model_->depth()) break;
        WitnessPair wp;
        try {
            wp = witness_pair(a, n);
        } catch (const NoWitnessAtDepth&) {
            continue;
        }
        double base = (wp.side == WitnessSide::plus) ? (wp.gap.lo - a.exact).to_double()
                                                     : (a.exact - wp.gap.hi).to_double();
        QuotientSample q;
        q.level_n = n;
        q.plus_side = wp.side == WitnessSide::plus;
        // f(u) = u_offset^(1/4) exactly (the phase is an odd multiple of
        // pi/2 by construction) and f(a) = 0, so the quotient is closed-form.
        q.quotient_u = std::pow(wp.u_offset, 0.25) / (base + wp.u_offset);
        q.quotient_v = 0.0;
        q.lower_bound = std::exp2(n + 1.5) / 5.0;
        out.push_back(q);
    }
    if (out.empty())
        throw NoWitnessAtDepth("difference_quotients: no witness exhibitable at this depth");
    return out;
}

} // namespace laplace::svc
