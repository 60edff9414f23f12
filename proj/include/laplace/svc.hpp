#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "laplace/dyadic.hpp"
#include "laplace/errors.hpp"
#include "laplace/real_function.hpp"

namespace laplace::svc {

// Finite-depth model of the fat Cantor set obtained by removing middle
// intervals of length 4^-n at stage n. Component intervals and gaps are
// generated lazily from closed forms in exact dyadic arithmetic; nothing of
// size 2^depth is ever materialized.
class SvcModel {
public:
    static constexpr int kMaxDepth = 40;

    explicit SvcModel(int depth);
    int depth() const { return depth_; }

    // Exact closed forms, valid for any level within the cap.
    static Dyadic component_length(int level);          // (2^n + 1) / 2^(2n+1)
    static Dyadic gap_length(int level);                // 1 / 4^n
    static Dyadic level_measure(int level);             // (2^n + 1) / 2^(n+1)
    static std::uint64_t component_count(int level);    // 2^n

    // Component interval k (0-based, left to right) of the level-n set.
    struct Component {
        Dyadic lo, hi;
        int level;
        std::uint64_t index;
    };
    Component component(int level, std::uint64_t index) const;

    // Open interval removed at `level` from parent component (level-1, index).
    struct Gap {
        Dyadic lo, hi;
        int level;
        std::uint64_t index;
        Dyadic mid() const { return (lo + hi).half(); }
    };
    Gap gap(int level, std::uint64_t index) const;

    struct Location {
        enum class Kind { InGap, InComponent, Boundary };
        Kind kind;
        int level;            // gap level (InGap/Boundary) or depth (InComponent)
        std::uint64_t index;  // gap or component index at that level
    };
    // Point location for x in [0, 1]. InComponent means membership in the set
    // is undecided beyond this model's depth.
    Location locate(double x) const;

    // Gaps of level <= max_level whose closure intersects [lo, hi], in
    // left-to-right position order.
    void for_each_gap_in(double lo, double hi, int max_level,
                         const std::function<void(const Gap&)>& fn) const;
    // Entire catalog to max_level, ordered by position.
    void for_each_gap(int max_level, const std::function<void(const Gap&)>& fn) const;

private:
    int depth_;
};

inline SvcModel build_svc(int depth) { return SvcModel(depth); }

// A point certified to lie in the set: an endpoint of some component
// interval (endpoints are never removed).
struct SPoint {
    Dyadic exact;
    double approx; // rounded value, for display and floating-point work
};

// Endpoints of all level-`level` components, deduplicated, ascending.
std::vector<SPoint> component_endpoints(const SvcModel& model, int level);

enum class WitnessSide { plus, minus };

// A pair of points inside one gap at which the oscillation attains its
// envelope (phase = (4l+1) pi/2, so sin = 1) and its zero (phase = 2 l pi).
struct WitnessPair {
    double u, v;
    double u_offset; // u - gap.lo (plus side) or gap.hi - u (minus side)
    double v_offset;
    SvcModel::Gap gap;
    WitnessSide side;
    int level_n; // gap was found among levels n+1 .. 2n near the base point
};

struct QuotientSample {
    int level_n;
    double quotient_u; // |f(u) - f(a)| / |u - a|, via the closed form
    double quotient_v; // exactly 0
    bool plus_side;
    double lower_bound; // 2^(n + 3/2) / 5, the growth floor for quotient_u
};

// The continuous function that oscillates on every gap and vanishes on the
// set: (x-a)^(1/4) sin (x-a)^(-7/4) on the left half of each gap, mirrored on
// the right half, 0 elsewhere.
class PathologicalFunction {
public:
    explicit PathologicalFunction(std::shared_ptr<const SvcModel> model);
    explicit PathologicalFunction(int depth)
        : PathologicalFunction(std::make_shared<SvcModel>(depth)) {}

    const SvcModel& model() const { return *model_; }

    // Pointwise value for x in [0, 1]. Points undecided at this depth give 0;
    // the dropped gaps are shorter than 4^-depth, so the pointwise error is
    // at most (4^-depth / 2)^(1/4).
    double eval(double x) const;
    double truncation_bound() const;

    // View as a RealFunction on [0, 1] carrying breakpoints at gap endpoints
    // and cancellation bounds from the cubic antiderivative envelope.
    RealFunction as_real_function() const;

    // Witness pair for base point a at level n >= 2: searches both mirrored
    // windows [a + 4^-(n+1), a + 5 * 4^-(n+1)] for a gap of level n+1 .. 2n
    // fully inside, then picks the smallest integer l landing both phase
    // points in the middle quarter of the gap.
    WitnessPair witness_pair(const SPoint& a, int n) const;

    // Difference quotients along the witness sequence, levels 2 .. n_max.
    // Levels where neither window exhibits a gap at this depth are skipped.
    std::vector<QuotientSample> difference_quotients(const SPoint& a, int n_max) const;

private:
    std::shared_ptr<const SvcModel> model_;
};

inline double eval_f(const PathologicalFunction& pf, double x) { return pf.eval(x); }

} // namespace laplace::svc
