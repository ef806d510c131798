#pragma once

#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ncap/geometry.hpp"
#include "ncap/interaction.hpp"
#include "ncap/kernels.hpp"

namespace ncap {

// Principal-value nonlocal mean curvature
//     H(x) = p.v. integral of (1_{E^c} - 1_E)(y) K(x - y) dy,  x on the boundary.
//
// Analytic shapes: opposite rays are paired, so the cancellation inside the
// exclusion ball is exact and a half-plane evaluates to zero identically. The
// remaining cutoff bias (near-tangent directions whose chord is shorter than
// delta) vanishes like delta^(1-s); two radii delta1 > delta2 feed a Richardson
// step of that order, and their disagreement is reported as a convergence
// diagnostic.
//
// Grid shapes: a total-least-squares line through the 5 nearest boundary-cell
// centers defines the interface direction at the queried cell; inside B_delta
// of the projected point the set is modeled by that half-plane (contributing
// zero), outside it cells are summed at their midpoints, and the plane beyond
// the lattice window is added as an exact exterior integral.

struct AnalyticDisk {
    double r = 1.0;  // E = {|y| < r}
};
struct AnalyticHalfPlane {};  // E = {y2 > 0}
struct AnalyticCone {
    double theta = 0.0;  // E = wedge of polar angles (0, theta)
};

struct CurvatureQuery {
    std::variant<AnalyticDisk, AnalyticHalfPlane, AnalyticCone, GridSet> shape;
    Eigen::Vector2d point{0.0, 0.0};  // on the boundary (1e-12 for analytic shapes)
    Kernel kernel = Kernel::fractional(0.5);
    double delta1 = 0.25;  // outer exclusion radius
    double delta2 = 0.125;  // inner exclusion radius, delta1 > delta2 > 0 (>= 2h on grids)
    double pv_gap_cap = std::numeric_limits<double>::infinity();  // finite: error on stall
    bool complement = false;  // evaluate for the complement set instead
};

struct NmcResult {
    double value = 0.0;   // Richardson-extrapolated principal value
    double coarse = 0.0;  // value at delta1
    double fine = 0.0;    // value at delta2
    double pv_gap = 0.0;  // |coarse - fine|
};

NmcResult nmc_detail(const CurvatureQuery& q);
double nmc(const CurvatureQuery& q);

// H(x) - (1 - sigma) * integral over the container complement of K(x - .).
// The queried point must lie inside the container.
double shifted_nmc(const CurvatureQuery& q, const Container& container, double sigma);

// Boundary cells of E at wall distance above the band, suitable for the
// Euler-Lagrange residual. band < 0 selects the default max(2h, eps/8).
std::vector<Eigen::Vector2i> interior_boundary_cells(const GridSet& E, const Container& container,
                                                     const Kernel& k, double band = -1.0);

// Per-cell values of  H - (1 - sigma) * wall term + g  on the sampled interior
// boundary cells; at a minimizer these share one constant, so the mean
// estimates the volume multiplier and the spread measures the defect.
struct ElResidualReport {
    std::vector<double> values;
    double mean = 0.0;
    double spread = 0.0;  // max - min
};

ElResidualReport el_residual(const GridSet& E, const Container& container, double sigma,
                             const Kernel& k, const ScalarField& g,
                             const std::vector<Eigen::Vector2i>& points);

}  // namespace ncap
