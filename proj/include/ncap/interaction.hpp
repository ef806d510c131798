#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ncap/geometry.hpp"
#include "ncap/kernels.hpp"

namespace ncap {

// Worker budget for the pairwise sums. Results are byte-identical for any
// count: work is split into per-cell partials that are always reduced in the
// same fixed tree order.
void set_thread_count(int n);
int thread_count();

// Deterministic pairwise tree reduction (row-major partials in, one double
// out); the only summation order used for energy accumulation.
double tree_sum(std::span<const double> v);

// Runs fn(i) for i in [0, n), partitioned over the worker budget. fn must
// write only to slot i of shared outputs.
void parallel_for(long n, const std::function<void(long)>& fn);

struct EnergyBreakdown {
    double liquid_air = 0.0;   // I(E, E^c within the container)
    double liquid_solid = 0.0; // I(E, complement of the container)
    double potential = 0.0;    // integral of g over E
    double sigma = 0.0;
    double total = 0.0;        // liquid_air + sigma*liquid_solid + potential
};

// Cell-pair interaction weights by lattice offset: entry (dx, dy) holds the
// quadrature of K(x - y) over a pair of h-cells whose centers differ by
// (dx*h, dy*h), measure h^4 included. Far pairs (center distance > 3h) use the
// midpoint value; near pairs are refined by recursive subdivision of both
// cells (2x2 each) until the pair value settles to rel_tol, edge-adjacent
// pairs at least twice, depth capped at 12. The (0,0) entry is 0 (disjointness
// makes it unreachable).
class PairTable {
public:
    PairTable(const Kernel& k, double h, int max_dx, int max_dy, double rel_tol);
    double at(int dx, int dy) const {
        return table_[static_cast<size_t>(dy < 0 ? -dy : dy) * stride_ + (dx < 0 ? -dx : dx)];
    }
    double h() const { return h_; }

private:
    size_t stride_;
    double h_;
    std::vector<double> table_;
};

// Integral of K(x - .) over outer \ inner along full-circle rays; both regions
// convex and containing x, so each ray contributes one radial segment
// [inner exit, outer exit). This is the exact tail used wherever grid sums
// hand off to unbounded or off-lattice regions.
double exterior_shell(const Eigen::Vector2d& x, const ConvexRegion& inner,
                      const ConvexRegion& outer, const Kernel& k, double rel_tol = 1e-11);

// Directions where a region's boundary has corners or tangencies as seen from
// x: quadrature breakpoints for angular sweeps.
std::vector<double> region_break_angles(const Eigen::Vector2d& x, const ConvexRegion& region);

// double integral of K(x-y) over x in E, y in F; E, F disjoint cell sets on
// the same lattice.
double interaction(const GridSet& E, const GridSet& F, const Kernel& k, double tol = 1e-8);

// P(E) = I(E, E^c): grid sum against the complement within the window disk B_R
// (origin-centered) plus the per-cell complement-of-disk tail
// 2*pi*radial(R - |x|, inf), the documented upper closure of the window.
double perimeter(const GridSet& E, const Kernel& k, double window_radius, double tol = 1e-8);

// P(E; A) = I(EA, E^c A) + I(EA, E^c A^c) + I(E^c A, E A^c), complements taken
// within the lattice window.
double relative_perimeter(const GridSet& E, const GridSet& A, const Kernel& k, double tol = 1e-8);

// Integral of K(x - .) over the complement of the container.
double wall_potential(const Eigen::Vector2d& x, const Container& container, const Kernel& k,
                      double rel_tol = 1e-11);

using ScalarField = std::function<double(const Eigen::Vector2d&)>;

// Full capillarity energy of E inside the container: grid pair sums within
// the window disk B_R, exact convex tails beyond it, wall potential per cell.
// window_radius = inf is allowed for truncated kernels (the lattice window
// then bounds the pair sums).
EnergyBreakdown capillarity_energy(const GridSet& E, const Container& container, double sigma,
                                   const Kernel& k, const ScalarField& g, double window_radius,
                                   double tol = 1e-8);

} // namespace ncap
