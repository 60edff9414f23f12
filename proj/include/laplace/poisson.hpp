#pragma once

#include <vector>

#include "laplace/calculus.hpp"
#include "laplace/real_function.hpp"

namespace laplace::poisson {

// (1 - r^2) / (1 - 2 r cos(phi) + r^2), for 0 <= r < 1.
double poisson_kernel(double r, double phi);

// Harmonic extension of boundary data Gf on [-pi, pi] to the point (r, theta)
// of the unit disk: (1/2pi) * integral of Gf(t) P_r(theta - t). Panels are
// forced at theta +- k (1 - r), the kernel's concentration scale.
double poisson_integral(const RealFunction& Gf, double r, double theta, double tol);

// |Laplacian of the extension| at (r, theta) by central second differences
// with step h, using the polar form (d_rr + d_r / r + d_tt / r^2).
double harmonicity_residual(const RealFunction& Gf, double r, double theta, double h);

struct BoundaryDistance {
    double r;
    double alexiewicz_distance; // ||F_r - Gf|| via the difference's primitive
    double fr_norm;             // ||F_r||
};

// For each r in the increasing list, the Alexiewicz-norm distance of the
// disk function F_r to the boundary data, plus the norm contraction check
// ||F_r|| <= ||Gf|| + tol (violations throw).
std::vector<BoundaryDistance> boundary_convergence(const RealFunction& Gf,
                                                   const calc::Primitive& Gf_primitive,
                                                   const std::vector<double>& r_list, double tol);

} // namespace laplace::poisson
