#include "laplace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <vector>

namespace laplace::quad {
namespace {

// G7/K15 abscissae and weights on [-1, 1]. Gauss weights are zero at the
// Kronrod-only nodes.
constexpr int kNodeCount = 15;
constexpr double kNode[kNodeCount] = {
    0.0000000000000000000000000,
    +0.2077849550078984676006894, -0.2077849550078984676006894,
    +0.4058451513773971669066064, -0.4058451513773971669066064,
    +0.5860872354676911302941448, -0.5860872354676911302941448,
    +0.7415311855993944398638648, -0.7415311855993944398638648,
    +0.8648644233597690727897128, -0.8648644233597690727897128,
    +0.9491079123427585245261897, -0.9491079123427585245261897,
    +0.9914553711208126392068547, -0.9914553711208126392068547,
};
constexpr double kWeightK[kNodeCount] = {
    0.2094821410847278280129992,
    0.2044329400752988924141620, 0.2044329400752988924141620,
    0.1903505780647854099132564, 0.1903505780647854099132564,
    0.1690047266392679028265834, 0.1690047266392679028265834,
    0.1406532597155259187451896, 0.1406532597155259187451896,
    0.1047900103222501838398763, 0.1047900103222501838398763,
    0.0630920926299785532907007, 0.0630920926299785532907007,
    0.0229353220105292249637320, 0.0229353220105292249637320,
};
constexpr double kWeightG[kNodeCount] = {
    0.4179591836734693877551020,
    0.0, 0.0,
    0.3818300505051189449503698, 0.3818300505051189449503698,
    0.0, 0.0,
    0.2797053914892766679014678, 0.2797053914892766679014678,
    0.0, 0.0,
    0.1294849661688696932706114, 0.1294849661688696932706114,
    0.0, 0.0,
};

struct NeumaierSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double total() const { return s + c; }
};

using BoundFn = std::function<std::optional<double>(double, double)>;

struct Panel {
    double lo, hi;
    double value;     // contribution used in the total
    double error;     // min(|K15 - G7|, cancellation bound)
    double bound_value = std::numeric_limits<double>::infinity(); // certificate, if known
    std::int64_t first_child = -1; // children sit at first_child, first_child + 1
    bool alive = true;
    bool frozen = false;     // bisection cannot improve this panel
    bool from_bound = false; // error comes from the cancellation certificate
    bool at_floor = false;   // error pinned at the roundoff floor
};

struct HeapEntry {
    double error;
    std::int64_t seq;
    std::size_t idx;
    bool operator<(const HeapEntry& o) const {
        if (error != o.error) return error < o.error;
        return seq > o.seq; // older first among equals
    }
};

struct Engine {
    const std::function<double(double)>& g;
    const BoundFn& bound;
    double global_lo, global_hi;
    std::int64_t evals = 0;

    double eval_node(double x, double panel_width) {
        double y = g(x);
        ++evals;
        if (std::isfinite(y)) return y;
        // One inward nudge before failing; supports integrable endpoint
        // singularities at the integration limits.
        double mid = 0.5 * (global_lo + global_hi);
        double xn = x + (x < mid ? 1.0 : -1.0) * panel_width * 1e-12;
        y = g(xn);
        ++evals;
        if (std::isfinite(y)) return y;
        throw NonFiniteEvaluation(x);
    }

    // Fills value/error of p. Uses the cancellation certificate when it is
    // sharper than the Gauss-Kronrod discrepancy, or cheap enough to skip
    // evaluation entirely.
    void assess(Panel& p, double skip_eval_threshold) {
        std::optional<double> b = bound ? bound(p.lo, p.hi) : std::nullopt;
        if (b) p.bound_value = *b;
        if (b && *b <= skip_eval_threshold) {
            p.value = 0.0;
            p.error = *b;
            p.from_bound = true;
            return;
        }
        double c = 0.5 * (p.lo + p.hi);
        double h = 0.5 * (p.hi - p.lo);
        double y[kNodeCount];
        double accK = 0.0, accG = 0.0, accAbs = 0.0;
        for (int i = 0; i < kNodeCount; ++i) {
            y[i] = eval_node(c + h * kNode[i], p.hi - p.lo);
            accK += kWeightK[i] * y[i];
            accG += kWeightG[i] * y[i];
            accAbs += kWeightK[i] * std::abs(y[i]);
        }
        double k15 = accK * h;
        double g7 = accG * h;
        // The raw |K15 - G7| discrepancy can agree by accident on panels whose
        // oscillation the rule cannot resolve. Scale it against the panel's
        // mean absolute deviation so such panels keep a large estimate.
        double mean = accK * 0.5;
        double resasc = 0.0;
        for (int i = 0; i < kNodeCount; ++i) resasc += kWeightK[i] * std::abs(y[i] - mean);
        resasc *= h;
        double resabs = accAbs * h;
        double gk_err = std::abs(k15 - g7);
        if (resasc != 0.0 && gk_err != 0.0)
            gk_err = resasc * std::min(1.0, std::pow(200.0 * gk_err / resasc, 1.5));
        constexpr double eps = std::numeric_limits<double>::epsilon();
        double floor = 50.0 * eps * resabs;
        bool at_floor = gk_err < floor;
        gk_err = std::max(gk_err, floor);
        if (b && *b < gk_err) {
            p.value = 0.0;
            p.error = *b;
            p.from_bound = true;
            p.at_floor = false;
        } else {
            p.value = k15;
            p.error = gk_err;
            p.from_bound = false;
            p.at_floor = at_floor;
        }
    }
};

QuadratureResult adaptive_core(const std::function<double(double)>& g, double a, double b,
                               double tol, std::vector<double> breakpoints,
                               const BoundFn& bound, std::int64_t cap) {
    Engine eng{g, bound, a, b};
    if (a == b) {
        eng.eval_node(a, 0.0);
        return QuadratureResult{0.0, 0.0, eng.evals};
    }

    // Seed panels at forced breakpoints.
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double t : breakpoints) {
        if (t > cuts.back() + (b - a) * 1e-14 && t < b - (b - a) * 1e-14) cuts.push_back(t);
    }
    cuts.push_back(b);

    std::vector<Panel> panels;
    panels.reserve(1024);
    std::priority_queue<HeapEntry> heap;
    std::int64_t seq = 0;
    double skip_threshold = tol * 0x1p-12;

    auto commit_panel = [&](const Panel& p) {
        panels.push_back(p);
        heap.push(HeapEntry{p.error, seq++, panels.size() - 1});
    };
    auto push_panel = [&](double lo, double hi) {
        Panel p{lo, hi, 0.0, 0.0};
        eng.assess(p, skip_threshold);
        commit_panel(p);
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) push_panel(cuts[i], cuts[i + 1]);

    auto leaf_total = [&]() {
        NeumaierSum s;
        for (const Panel& p : panels)
            if (p.alive) s.add(p.error);
        return s.total();
    };

    // Per-panel certificate bounds double-count boundary terms along a chain
    // of adjacent panels; one bound query for a whole contiguous run is valid
    // (the bounds cover arbitrary subintervals) and much sharper. Where the
    // union bound wins, the run's claimed value is 0 and the bound is the
    // error, which is sound panel-values discarded included.
    struct Accounting {
        double value;
        double error;
    };
    // Per-panel certificate bounds double-count boundary terms, so a cascade
    // of certified panels can sum far above the certificate of its union.
    // The refinement tree supplies the natural hierarchy: every interior node
    // kept the bound it was assessed with as a leaf, and
    //   cost(node) = min(own bound, cost(left) + cost(right))
    // re-accounts each subtree by one union certificate wherever that is
    // sharper. Where a node's bound wins, the subtree's claimed value is 0,
    // which the bound covers.
    const std::size_t seed_count = cuts.size() - 1;
    auto merged_accounting = [&]() {
        std::vector<double> cerr(panels.size()), cval(panels.size());
        for (std::size_t i = panels.size(); i-- > 0;) {
            const Panel& p = panels[i];
            if (p.alive) {
                cerr[i] = p.error;
                cval[i] = p.value;
            } else {
                auto c = static_cast<std::size_t>(p.first_child);
                double sum_err = cerr[c] + cerr[c + 1];
                if (p.bound_value < sum_err) {
                    cerr[i] = p.bound_value;
                    cval[i] = 0.0;
                } else {
                    cerr[i] = sum_err;
                    cval[i] = cval[c] + cval[c + 1];
                }
            }
        }
        NeumaierSum value, err;
        for (std::size_t i = 0; i < seed_count; ++i) {
            err.add(cerr[i]);
            value.add(cval[i]);
        }
        return Accounting{value.total(), err.total()};
    };

    auto leaf_accounting = [&]() {
        NeumaierSum value, err;
        for (const Panel& p : panels) {
            if (!p.alive) continue;
            value.add(p.value);
            err.add(p.error);
        }
        return Accounting{value.total(), err.total()};
    };

    // Freeze subtrees whose active ancestor certificate already covers them:
    // once the raw leaf sum has fanned far beyond a small covering bound,
    // further splitting in there cannot move the merged total. Subtrees still
    // within reach of their covering bound keep refining (their resolution
    // may yet beat it).
    auto coverage_freeze = [&]() {
        std::vector<double> cerr(panels.size()), rsum(panels.size());
        for (std::size_t i = panels.size(); i-- > 0;) {
            const Panel& p = panels[i];
            if (p.alive) {
                cerr[i] = rsum[i] = p.error;
            } else {
                auto c = static_cast<std::size_t>(p.first_child);
                rsum[i] = rsum[c] + rsum[c + 1];
                cerr[i] = std::min(p.bound_value, cerr[c] + cerr[c + 1]);
            }
        }
        std::vector<std::pair<std::size_t, bool>> stack;
        for (std::size_t i = 0; i < seed_count; ++i) stack.emplace_back(i, false);
        while (!stack.empty()) {
            auto [i, zone] = stack.back();
            stack.pop_back();
            Panel& p = panels[i];
            if (p.alive) {
                if (zone) p.frozen = true;
                continue;
            }
            auto c = static_cast<std::size_t>(p.first_child);
            bool z = zone;
            if (!z && p.bound_value < cerr[c] + cerr[c + 1] &&
                rsum[i] > 8.0 * p.bound_value && p.bound_value <= tol / 32.0)
                z = true;
            stack.emplace_back(c, z);
            stack.emplace_back(c + 1, z);
        }
    };

    auto finish = [&]() {
        Accounting leaf = leaf_accounting();
        if (!bound) return QuadratureResult{leaf.value, leaf.error,
                                            std::max<std::int64_t>(eng.evals, 1)};
        Accounting merged = merged_accounting();
        const Accounting& best = (merged.error < leaf.error) ? merged : leaf;
        return QuadratureResult{best.value, best.error, std::max<std::int64_t>(eng.evals, 1)};
    };
    auto best_total = [&]() {
        double t = leaf_total();
        if (bound) t = std::min(t, merged_accounting().error);
        return t;
    };

    double running = leaf_total();
    if (running <= tol) return finish();
    std::int64_t ops_since_check = 0;

    for (;;) {
        if (ops_since_check > 256 + static_cast<std::int64_t>(panels.size() / 16)) {
            ops_since_check = 0;
            running = leaf_total();
            if (running <= tol || best_total() <= tol) return finish();
            if (bound) coverage_freeze();
        }
        if (heap.empty()) {
            double total = best_total();
            if (total <= tol) return finish();
            throw ToleranceNotMet("quadrature: no refinable panels left, error estimate " +
                                      std::to_string(total) + " > tol " + std::to_string(tol),
                                  total);
        }
        if (static_cast<std::int64_t>(panels.size()) + 2 > cap) {
            double total = best_total();
            if (total <= tol) return finish();
            if (std::getenv("LAPLACE_QUAD_DEBUG")) {
                std::vector<double> cerr(panels.size());
                for (std::size_t i = panels.size(); i-- > 0;) {
                    const Panel& q = panels[i];
                    if (q.alive) {
                        cerr[i] = q.error;
                    } else {
                        auto c = static_cast<std::size_t>(q.first_child);
                        cerr[i] = std::min(q.bound_value, cerr[c] + cerr[c + 1]);
                    }
                }
                // panel counts per seed region
                std::vector<std::int64_t> count(seed_count, 0);
                std::vector<std::int64_t> owner(panels.size(), -1);
                for (std::size_t i = 0; i < seed_count; ++i) owner[i] = static_cast<std::int64_t>(i);
                for (std::size_t i = 0; i < panels.size(); ++i) {
                    if (owner[i] < 0) continue;
                    const Panel& q = panels[i];
                    if (q.alive) ++count[owner[i]];
                    if (q.first_child >= 0) {
                        owner[q.first_child] = owner[i];
                        owner[q.first_child + 1] = owner[i];
                    }
                }
                std::fprintf(stderr, "quad debug: total %.3e, tol %.3e, %zu seeds\n", total, tol,
                             seed_count);
                for (std::size_t i = 0; i < seed_count; ++i)
                    std::fprintf(stderr, "  seed [%.10g, %.10g] cost %.3e panels %lld\n",
                                 panels[i].lo, panels[i].hi, cerr[i],
                                 static_cast<long long>(count[i]));
            }
            throw ToleranceNotMet("quadrature: panel cap " + std::to_string(cap) +
                                      " reached with error estimate " + std::to_string(total),
                                  total);
        }
        HeapEntry top = heap.top();
        heap.pop();
        Panel& p = panels[top.idx];
        if (!p.alive || p.frozen || top.error != p.error) continue;
        if (p.bound_value <= tol * 0x1p-12) {
            p.frozen = true; // certified negligible; splitting only fans panels
            continue;
        }

        double mid = 0.5 * (p.lo + p.hi);
        if (!(mid > p.lo && mid < p.hi)) {
            p.frozen = true; // width at the resolution of double
            continue;
        }
        Panel left{p.lo, mid, 0.0, 0.0};
        Panel right{mid, p.hi, 0.0, 0.0};
        eng.assess(left, skip_threshold);
        eng.assess(right, skip_threshold);
        // The roundoff floor splits into two floors of the same total:
        // refining such a panel cannot help, so pin it where it is.
        if (p.at_floor && left.error + right.error >= p.error * (1.0 - 1e-9)) {
            p.frozen = true;
            ++ops_since_check;
            continue;
        }
        double old_err = p.error;
        p.alive = false;
        p.first_child = static_cast<std::int64_t>(panels.size());
        commit_panel(left);
        commit_panel(right);
        running += left.error + right.error - old_err;
        ++ops_since_check;
        if (running <= tol) {
            double exact = leaf_total();
            if (exact <= tol) return finish();
            running = exact;
        }
    }
}

void check_common(double tol) {
    if (!(tol > 0.0)) throw DomainError("quadrature: tol must be > 0");
}

void check_range(const RealFunction& f, double lo, double hi) {
    double slack = 1e-9 * (std::abs(lo) + std::abs(hi) + 1.0);
    if (!(lo <= hi)) throw DomainError("quadrature: requires a <= b");
    if (lo < f.domain.lo - slack || hi > f.domain.hi + slack)
        throw DomainError("quadrature: [a, b] not inside the function domain");
}

} // namespace

QuadratureResult integrate(const RealFunction& f, double a, double b, double tol) {
    return integrate(f, a, b, tol, Options{});
}

QuadratureResult integrate(const RealFunction& f, double a, double b, double tol,
                           const Options& opt) {
    check_common(tol);
    check_range(f, a, b);
    std::vector<double> brk = opt.forced_breakpoints;
    if (f.structure) f.structure->append_breakpoints(a, b, brk);
    BoundFn bound;
    if (f.structure) {
        auto fs = f.structure;
        bound = [fs](double lo, double hi) { return fs->cancellation_bound(lo, hi); };
    }
    return adaptive_core(f.eval, a, b, tol, std::move(brk), bound, opt.panel_cap);
}

QuadratureResult exp_weighted(const RealFunction& f, double x, Side side, double s, double delta,
                              int power, double tol) {
    return exp_weighted(f, x, side, s, delta, power, tol, Options{});
}

QuadratureResult exp_weighted(const RealFunction& f, double x, Side side, double s, double delta,
                              int power, double tol, const Options& opt) {
    check_common(tol);
    if (!(s > 0.0)) throw DomainError("exp_weighted: s must be > 0");
    if (!(delta > 0.0)) throw DomainError("exp_weighted: delta must be > 0");
    if (power != 1 && power != 2) throw DomainError("exp_weighted: power must be 1 or 2");
    const double sigma = (side == Side::plus) ? 1.0 : -1.0;
    if (side == Side::plus)
        check_range(f, x, x + delta);
    else
        check_range(f, x - delta, x);

    const double scale = (power == 1) ? s : s * s;
    auto g = [&f, x, s, sigma](double t) { return std::exp(-s * t) * f.eval(x + sigma * t); };

    // Geometric grid anchored at t = 1/s: the weight concentrates its mass on
    // t of order 1/s, so panels must be fine there even before refinement.
    std::vector<double> brk = opt.forced_breakpoints;
    double t_min = std::min(delta, 1.0 / s) * 0x1p-8;
    for (double t = delta * 0.5; t > t_min; t *= 0.5) brk.push_back(t);

    if (f.structure) {
        std::vector<double> fb;
        if (side == Side::plus)
            f.structure->append_breakpoints(x, x + delta, fb);
        else
            f.structure->append_breakpoints(x - delta, x, fb);
        for (double u : fb) {
            double t = sigma * (u - x);
            if (t > 0.0 && t < delta) brk.push_back(t);
        }
    }

    BoundFn bound;
    if (f.structure) {
        auto fs = f.structure;
        bound = [fs, x, s, sigma](double t1, double t2) -> std::optional<double> {
            double u1 = (sigma > 0) ? x + t1 : x - t2;
            double u2 = (sigma > 0) ? x + t2 : x - t1;
            std::optional<double> bf = fs->cancellation_bound(u1, u2);
            if (!bf) return std::nullopt;
            // For a positive decreasing weight w: |int w f| <= w(t1) * sup |int f|
            // over subintervals (integration by parts, total variation of w).
            return std::exp(-s * t1) * (*bf);
        };
    }

    QuadratureResult r = adaptive_core(g, 0.0, delta, tol / scale, std::move(brk), bound,
                                       opt.panel_cap);
    r.value *= scale;
    r.abs_error_estimate *= scale;
    return r;
}

} // namespace laplace::quad
