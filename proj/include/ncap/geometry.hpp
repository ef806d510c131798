#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ncap {

// ---------------------------------------------------------------------------
// Convex regions and ray tracing.
//
// Every analytic integral in the toolkit reduces to polar sweeps of the form
// "integrate the radial kernel weight over {t : x + t w inside R}" with R an
// intersection of half-planes and at most one disk. That intersection is
// convex, so the inside set along any ray is a single parameter interval.
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool empty() const { return !(hi > lo); }
    double length() const { return empty() ? 0.0 : hi - lo; }
};

struct ConvexRegion {
    struct HalfPlane {
        Eigen::Vector2d n;  // constraint n.dot(x) <= c
        double c;
    };
    std::vector<HalfPlane> planes;
    bool has_disk = false;
    Eigen::Vector2d disk_center{0.0, 0.0};
    double disk_radius = 0.0;

    ConvexRegion& add_halfplane(const Eigen::Vector2d& n, double c);
    ConvexRegion& set_disk(const Eigen::Vector2d& center, double radius);

    bool contains(const Eigen::Vector2d& p) const;
    // {t >= 0 : p + t w inside}, w unit length. Convexity makes this a single
    // interval; an empty result has lo >= hi.
    Interval ray(const Eigen::Vector2d& p, const Eigen::Vector2d& w) const;

    static ConvexRegion whole_plane() { return {}; }
};

// ---------------------------------------------------------------------------
// Uniform lattice and binary pixel sets.
// ---------------------------------------------------------------------------

struct Lattice {
    int nx = 0, ny = 0;
    double h = 0.0;
    Eigen::Vector2d origin{0.0, 0.0};  // lower-left corner of cell (0,0)

    Lattice() = default;
    Lattice(int nx, int ny, double h, const Eigen::Vector2d& origin);

    Eigen::Vector2d center(int ix, int iy) const {
        return {origin.x() + (ix + 0.5) * h, origin.y() + (iy + 0.5) * h};
    }
    bool in_range(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
    long cell_count() const { return static_cast<long>(nx) * ny; }
    Eigen::Vector2d max_corner() const { return origin + h * Eigen::Vector2d(nx, ny); }
    // Closed rectangle spanned by the lattice, as a ray-traceable region.
    ConvexRegion region() const;
    bool operator==(const Lattice& o) const {
        return nx == o.nx && ny == o.ny && h == o.h && origin == o.origin;
    }
};

struct GridSet {
    Lattice lat;
    std::vector<uint8_t> mask;  // row-major, index iy*nx + ix

    GridSet() = default;
    explicit GridSet(const Lattice& lat) : lat(lat), mask(lat.cell_count(), 0) {}

    bool occupied(int ix, int iy) const { return mask[static_cast<size_t>(iy) * lat.nx + ix] != 0; }
    void set(int ix, int iy, bool v) { mask[static_cast<size_t>(iy) * lat.nx + ix] = v ? 1 : 0; }
    long count() const;
    double volume() const { return count() * lat.h * lat.h; }
    bool empty_mask() const { return count() == 0; }

    // Occupancy with out-of-range cells reading as empty: grid sets represent
    // bounded E, everything beyond the lattice window is exterior.
    bool occupied_clamped(int ix, int iy) const {
        return lat.in_range(ix, iy) && occupied(ix, iy);
    }

    GridSet complement_in_rect() const;
    bool operator==(const GridSet& o) const { return lat == o.lat && mask == o.mask; }
};

// Text round-trip, bit-exact: header "nx ny h ox oy" with %.17g reals, then ny
// rows of nx characters ('1' occupied, '0' empty), row 0 (bottom) first.
void save_gridset(const GridSet& g, std::ostream& os);
void save_gridset(const GridSet& g, const std::string& path);
GridSet load_gridset(std::istream& is);
GridSet load_gridset(const std::string& path);

// Copies g onto a congruent lattice (same h, integer cell offset) that
// contains g's window entirely.
GridSet embed(const GridSet& g, const Lattice& big);

// Smallest lattice congruent to ref that covers both ref's window and the
// disk B_R centered at the origin.
Lattice covering_lattice(const Lattice& ref, double R);

struct BoundaryCell {
    int ix, iy;
    Eigen::Vector2d center;
    Eigen::Vector2d normal;  // unit average of outward 4-neighbor directions
    bool degenerate;         // opposite outward directions cancelled; normal = 0
};

// Occupied cells with at least one unoccupied 4-neighbor (cells beyond the
// lattice window count as unoccupied).
std::vector<BoundaryCell> boundary_cells(const GridSet& g);
// The mirror set: unoccupied in-window cells adjacent to an occupied cell.
std::vector<BoundaryCell> exterior_boundary_cells(const GridSet& g);

// ---------------------------------------------------------------------------
// Analytic shapes and rasterization.
// ---------------------------------------------------------------------------

using Shape = std::function<bool(const Eigen::Vector2d&)>;

Shape shape_disk(const Eigen::Vector2d& center, double r);
// {p : n.dot(p) >= c}
Shape shape_halfplane(const Eigen::Vector2d& n, double c);
Shape shape_box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);
Shape shape_union(Shape a, Shape b);
Shape shape_intersection(Shape a, Shape b);
Shape shape_difference(Shape a, Shape b);

// Midpoint rasterization: a cell is occupied iff its center is inside.
GridSet rasterize(const Shape& shape, const Lattice& lat);

// ---------------------------------------------------------------------------
// Containers: the vessel holding the droplet.
// ---------------------------------------------------------------------------

struct Container {
    enum class Kind { HalfPlane, Box, Disk };
    Kind kind = Kind::HalfPlane;

    // HalfPlane: {p : p[axis] > coord} when positive_side, else {p[axis] < coord}
    int axis = 1;
    bool positive_side = true;
    double coord = 0.0;
    // Box
    Eigen::Vector2d lo{0, 0}, hi{0, 0};
    // Disk
    Eigen::Vector2d center{0, 0};
    double radius = 0.0;

    static Container halfplane(int axis, bool positive_side, double coord);
    static Container box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);
    static Container disk(const Eigen::Vector2d& center, double radius);
    // "halfplane:y>0", "halfplane:x<2", "box:x0,y0,x1,y1", "disk:cx,cy,r"
    static Container parse(const std::string& text);
    std::string to_string() const;

    bool contains(const Eigen::Vector2d& p) const { return wall_distance(p) > 0.0; }
    // Signed distance to the wall, positive inside.
    double wall_distance(const Eigen::Vector2d& p) const;
    ConvexRegion region() const;
};

// ---------------------------------------------------------------------------
// The cone family behind the contact-angle analysis.
//
// All regions are described by half-open polar-angle intervals (lower bound
// included) so membership is deterministic on the measure-zero edges:
//   J     [0, theta)                    the droplet wedge
//   Jstar [theta, 2 theta)              J reflected across the theta-line
//   L     [2 theta, pi)                 rest of the upper half-plane
//   M     [-pi, 2 theta - pi)           lower sector not mirroring L
//   U     [-pi/2 - theta, -pi/2 + theta)   downward cone, |x1| < |x2| tan(theta)
//   Gamma alias of U (the same set enters as integration domain)
//   H     [0, pi)                       upper half-plane
//   Hc    complement of H
// L, M, U require theta < pi/2; J, H work for any theta in (0, pi).
// ---------------------------------------------------------------------------

enum class ConeRegion { J, Jstar, L, M, U, Gamma, H, Hc };

struct ConeGeometry {
    double theta;

    explicit ConeGeometry(double theta);
    // Marker point e(theta) = (cos theta, sin theta), on the reflection line.
    Eigen::Vector2d edge_point() const { return {std::cos(theta), std::sin(theta)}; }
    // Reflection across the line through the origin at angle theta.
    Eigen::Vector2d reflect(const Eigen::Vector2d& p) const;

    bool member(ConeRegion region, const Eigen::Vector2d& x) const;
    // Ray-traceable open cone (boundaries are null sets for integration).
    // Defined for J, L, M, U/Gamma, H, Hc.
    ConvexRegion region(ConeRegion region) const;
};

} // namespace ncap
