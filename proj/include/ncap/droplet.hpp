#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ncap/geometry.hpp"
#include "ncap/interaction.hpp"
#include "ncap/kernels.hpp"

namespace ncap {

// Volume-constrained pixel-exchange minimization of the capillarity energy.
// Every proposal removes one boundary cell of the droplet and adds one empty
// cell adjacent to it, so the cell count is conserved exactly. The move cost
// comes from a maintained field u(c) = sum over droplet cells y of T[c - y]
// (T the cell-pair table) plus precomputed per-cell statics, and is audited
// against a full energy recomputation every ten sweeps.

struct Greedy {
    long max_sweeps = 200;  // stops earlier once a full sweep accepts nothing
};

struct Anneal {
    double t0 = 0.0;  // <= 0: calibrated to 10% of the median |dE| of a 200-proposal pre-pass
    double cooling = 0.95;  // per-sweep temperature factor, in (0, 1)
    long sweeps = 200;
};

using Schedule = std::variant<Greedy, Anneal>;

struct HalfDiskOnWall {};  // half-disk footprint seated on the container wall
struct RandomBlob {};      // seeded random connected growth
struct FromFile {
    std::string path;  // GridSet text file on the configured lattice
};

using InitSpec = std::variant<HalfDiskOnWall, RandomBlob, FromFile>;

// Affine potential g(x) = gx*x + gy*y + c.
struct FieldSpec {
    double gx = 0.0, gy = 0.0, c = 0.0;
    ScalarField field() const;
};

struct MinimizeConfig {
    Container container;
    Lattice grid{1, 1, 1.0, {0.0, 0.0}};
    Kernel kernel = Kernel::fractional(0.5);
    double sigma = 0.0;
    long volume_cells = 0;
    FieldSpec g;
    Schedule schedule = Greedy{};
    std::uint64_t seed = 0;
    InitSpec init = HalfDiskOnWall{};
    // Pair sums run over the lattice window intersected with this disk; the
    // air beyond it enters through exact exterior integrals. An untruncated
    // kernel requires a finite window.
    double window_radius = std::numeric_limits<double>::infinity();
};

// Strict parse of the config JSON; keys mirror the MinimizeConfig field names.
MinimizeConfig parse_minimize_config(const std::string& json_text);

struct SweepRecord {
    long sweep = 0;
    double energy = 0.0;  // running total after the sweep
    double acceptance_rate = 0.0;
};

struct MinimizeTrace {
    std::vector<SweepRecord> records;
    GridSet final_set{Lattice(1, 1, 1.0, {0.0, 0.0})};
    EnergyBreakdown final_energy;
};

// Deterministic for a fixed config (thread count changes nothing). Throws
// std::logic_error if an audit finds the incremental energy drifting from the
// full recomputation beyond 1e-9 relative.
MinimizeTrace minimize(const MinimizeConfig& config);

// Interior angle between a fitted interface line and the wall, one estimate
// per wall-contact component. The fit runs through interface cells (occupied
// with an empty lateral neighbor) whose wall distance lies in the band;
// band = {-1, -1} selects the default [3h, 20h].
struct ContactAngle {
    double angle = 0.0;        // radians, in (0, pi)
    double uncertainty = 0.0;  // angular scale of the fit scatter
    int cells = 0;             // interface cells entering the fit
    Eigen::Vector2d foot{0.0, 0.0};  // wall location of the contact component
};

std::vector<ContactAngle> measure_contact_angle(const GridSet& E, const Container& container,
                                                Eigen::Vector2d band = {-1.0, -1.0});

// |E intersect B_r(x)| / r^2 over boundary cells x: density bounds diagnostic.
struct DensityReport {
    std::vector<double> radii;
    std::vector<double> min_ratio;
    std::vector<double> max_ratio;
};

DensityReport density_diagnostic(const GridSet& E, const std::vector<double>& radii);

}  // namespace ncap
