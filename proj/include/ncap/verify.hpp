#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ncap/curvature.hpp"
#include "ncap/geometry.hpp"
#include "ncap/kernels.hpp"

namespace ncap {

struct CaseResult {
    std::string name;
    std::vector<std::pair<std::string, double>> values;  // inputs and computed values
    double threshold = 0.0;
    bool passed = false;
};

struct VerificationReport {
    std::string suite;
    std::vector<CaseResult> cases;
    bool passed = true;  // conjunction of the case flags

    void add(CaseResult c) {
        passed = passed && c.passed;
        cases.push_back(std::move(c));
    }
};

// kappa_n = (1/2) * integral of |e . w| over the unit sphere S^{n-1}.
// The scaled perimeters (1-s) P_s converge to kappa_n times the classical
// perimeter; kappa(2) = 2 and kappa(3) = pi.
double kappa(int n);

// Same integral with the reference direction tilted by `tilt` radians (away
// from the x-axis for n = 2, away from the z-axis for n = 3). Rotation
// invariance makes the value independent of the tilt; the tilted integrand
// takes a genuinely different shape, so agreement is a real check.
double kappa_directional(int n, double tilt);

// Fractional perimeter of the disk B_R, no grid involved: integrates the
// exit-distance profile rho(phi) of interior points, with a power
// substitution absorbing the boundary blow-up.
double disk_fractional_perimeter(double radius, double s);

// The same quantity through the boundary-pair identity
//   P_s(E) = (1/s^2) * closed double integral of |x-y|^{-s} <nu(x), nu(y)>
// over the boundary. An independent route used to cross-check the first.
double disk_fractional_perimeter_pairs(double radius, double s);

// Half-disk of radius r seated on the wall of the upper half-plane
// H = {y > 0}: interaction with the lower half-plane (closed form through
// Gamma functions) and with the complementary part of H (boundary-pair
// route for the full fractional perimeter, minus the wall part).
double half_disk_wall_interaction(double radius, double s);
double half_disk_air_interaction(double radius, double s);

struct GammaRow {
    double s = 0.0;
    double scaled = 0.0;  // (1 - s) times the fractional quantity
};

struct GammaStudy {
    std::vector<GammaRow> rows;
    double extrapolated = 0.0;  // linear in (1-s) through the two largest s
    double target = 0.0;        // kappa_2 times the classical length
    double rel_error = 0.0;     // |extrapolated - target| / |target|
};

// Scaled fractional perimeter across s_list with extrapolation to s = 1.
// The analytic disk is integrated exactly; a grid set is summed cellwise
// inside the window, and its classical target is the staircase boundary
// length of the raster (that is what the cell union converges to).
GammaStudy gamma_limit_study(const std::variant<AnalyticDisk, GridSet>& body,
                             const std::vector<double>& s_list, double window_radius);

// The capillarity split for the half-disk on the wall of H = {y > 0}:
// the air part targets kappa_2 * (pi r), the wall part kappa_2 * (2 r).
struct GammaSplit {
    GammaStudy air;
    GammaStudy wall;
};
GammaSplit gamma_limit_half_disk(double radius, const std::vector<double>& s_list);

// Checks I(Z, Z^c within H) >= I(Z, complement of H) for H = {y > 0}: once
// for the given set and for `trials` seeded random blobs. Grid sums cover
// the lattice rectangle; everything beyond it is integrated exactly.
VerificationReport half_space_inequality(const GridSet& Z, double s, int trials,
                                         std::uint64_t seed = 0);

struct RatioReport {
    double ratio = 0.0;       // P_s(G) / |G|^{(2-s)/2}
    double ball_ratio = 0.0;  // same ratio for the equal-count nearest-origin ball
    double volume = 0.0;
    bool passed = false;  // ratio >= ball_ratio * 0.98
};

// Fractional isoperimetric check against a discretization-consistent
// baseline: the comparison ball is rasterized at the same spacing with the
// same cell count, so the grid bias cancels from the verdict.
RatioReport isoperimetric_check(const GridSet& G, double s, double window_radius);

// The cells of the comparison ball: the `count` lattice cells nearest the
// origin at spacing h (ties broken row-major). Exposed so callers can build
// the baseline set directly.
GridSet nearest_ball_raster(double h, long count);

// Seeded connected random set: uniform frontier growth from a random start
// cell. With upper_half_only, growth is restricted to centers with y > 0.
GridSet random_blob(const Lattice& lat, long cells, std::uint64_t seed,
                    bool upper_half_only = false);

// suite is one of young, gamma, halfspace, isoperimetric, curvature, or all.
std::vector<VerificationReport> run_verification(const std::string& suite,
                                                 std::uint64_t seed = 0);

const std::vector<std::string>& suite_names();

}  // namespace ncap
