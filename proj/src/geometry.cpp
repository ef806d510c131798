#include "ncap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ncap {

// ---------------------------------------------------------------------------
// ConvexRegion
// ---------------------------------------------------------------------------

ConvexRegion& ConvexRegion::add_halfplane(const Eigen::Vector2d& n, double c) {
    planes.push_back({n, c});
    return *this;
}

ConvexRegion& ConvexRegion::set_disk(const Eigen::Vector2d& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("region disk radius must be positive");
    has_disk = true;
    disk_center = center;
    disk_radius = radius;
    return *this;
}

bool ConvexRegion::contains(const Eigen::Vector2d& p) const {
    for (const auto& hp : planes)
        if (!(hp.n.dot(p) <= hp.c)) return false;
    if (has_disk && !((p - disk_center).squaredNorm() <= disk_radius * disk_radius)) return false;
    return true;
}

Interval ConvexRegion::ray(const Eigen::Vector2d& p, const Eigen::Vector2d& w) const {
    Interval iv;
    for (const auto& hp : planes) {
        const double nw = hp.n.dot(w);
        const double slack = hp.c - hp.n.dot(p);
        if (nw > 0.0)
            iv.hi = std::min(iv.hi, slack / nw);
        else if (nw < 0.0)
            iv.lo = std::max(iv.lo, slack / nw);
        else if (slack < 0.0)
            return {0.0, 0.0};
        if (iv.empty()) return {0.0, 0.0};
    }
    if (has_disk) {
        // t^2 + 2 b t + c0 <= 0 along the unit ray; roots via the q-form so a
        // root near zero is not lost to cancellation.
        const Eigen::Vector2d d = p - disk_center;
        const double b = w.dot(d);
        const double c0 = d.squaredNorm() - disk_radius * disk_radius;
        const double disc = b * b - c0;
        if (disc <= 0.0) return {0.0, 0.0};
        const double sq = std::sqrt(disc);
        double r1, r2;
        if (b == 0.0) {
            r1 = -sq;
            r2 = sq;
        } else {
            const double q = -(b + std::copysign(sq, b));
            r1 = q;
            r2 = c0 / q;
        }
        iv.lo = std::max(iv.lo, std::min(r1, r2));
        iv.hi = std::min(iv.hi, std::max(r1, r2));
        if (iv.empty()) return {0.0, 0.0};
    }
    return iv;
}

// ---------------------------------------------------------------------------
// Lattice / GridSet
// ---------------------------------------------------------------------------

Lattice::Lattice(int nx, int ny, double h, const Eigen::Vector2d& origin)
    : nx(nx), ny(ny), h(h), origin(origin) {
    if (nx < 1 || ny < 1 || !(h > 0.0) || !origin.allFinite())
        throw std::invalid_argument("degenerate lattice: need nx, ny >= 1 and h > 0");
}

ConvexRegion Lattice::region() const {
    ConvexRegion r;
    const Eigen::Vector2d hi = max_corner();
    r.add_halfplane({-1.0, 0.0}, -origin.x());
    r.add_halfplane({1.0, 0.0}, hi.x());
    r.add_halfplane({0.0, -1.0}, -origin.y());
    r.add_halfplane({0.0, 1.0}, hi.y());
    return r;
}

long GridSet::count() const {
    long c = 0;
    for (uint8_t v : mask) c += v != 0;
    return c;
}

GridSet GridSet::complement_in_rect() const {
    GridSet out(lat);
    for (size_t i = 0; i < mask.size(); ++i) out.mask[i] = mask[i] ? 0 : 1;
    return out;
}

void save_gridset(const GridSet& g, std::ostream& os) {
    char head[160];
    std::snprintf(head, sizeof head, "%d %d %.17g %.17g %.17g\n", g.lat.nx, g.lat.ny, g.lat.h,
                  g.lat.origin.x(), g.lat.origin.y());
    os << head;
    std::string row(g.lat.nx, '0');
    for (int iy = 0; iy < g.lat.ny; ++iy) {
        for (int ix = 0; ix < g.lat.nx; ++ix) row[ix] = g.occupied(ix, iy) ? '1' : '0';
        os << row << '\n';
    }
}

void save_gridset(const GridSet& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_gridset(g, f);
    if (!f.good()) throw std::runtime_error("write failed: " + path);
}

GridSet load_gridset(std::istream& is) {
    int nx = 0, ny = 0;
    double h = 0.0, ox = 0.0, oy = 0.0;
    if (!(is >> nx >> ny >> h >> ox >> oy))
        throw std::runtime_error("grid set header unreadable");
    std::string line;
    std::getline(is, line);  // consume end of header line
    GridSet g(Lattice(nx, ny, h, {ox, oy}));
    for (int iy = 0; iy < ny; ++iy) {
        if (!std::getline(is, line)) throw std::runtime_error("grid set rows truncated");
        if (static_cast<int>(line.size()) != nx)
            throw std::runtime_error("grid set row has wrong length");
        for (int ix = 0; ix < nx; ++ix) {
            if (line[ix] != '0' && line[ix] != '1')
                throw std::runtime_error("grid set row has characters other than 0/1");
            g.set(ix, iy, line[ix] == '1');
        }
    }
    return g;
}

GridSet load_gridset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_gridset(f);
}

GridSet embed(const GridSet& g, const Lattice& big) {
    if (big.h != g.lat.h) throw std::invalid_argument("embed: lattice spacings differ");
    const Eigen::Vector2d off = (g.lat.origin - big.origin) / big.h;
    const long kx = std::lround(off.x()), ky = std::lround(off.y());
    if (std::abs(off.x() - kx) > 1e-9 || std::abs(off.y() - ky) > 1e-9)
        throw std::invalid_argument("embed: lattices are not offset by whole cells");
    if (kx < 0 || ky < 0 || kx + g.lat.nx > big.nx || ky + g.lat.ny > big.ny)
        throw std::invalid_argument("embed: target lattice does not contain the source window");
    GridSet out(big);
    for (int iy = 0; iy < g.lat.ny; ++iy)
        for (int ix = 0; ix < g.lat.nx; ++ix)
            if (g.occupied(ix, iy)) out.set(static_cast<int>(ix + kx), static_cast<int>(iy + ky), true);
    return out;
}

Lattice covering_lattice(const Lattice& ref, double R) {
    if (!(R > 0.0) || !std::isfinite(R))
        throw std::invalid_argument("covering_lattice: need a finite positive radius");
    const double h = ref.h;
    // Index range (relative to ref) whose cells can intersect B_R or ref's own
    // window.
    const long ix_lo = std::min<long>(0, static_cast<long>(std::floor((-R - ref.origin.x()) / h)) - 1);
    const long iy_lo = std::min<long>(0, static_cast<long>(std::floor((-R - ref.origin.y()) / h)) - 1);
    const long ix_hi = std::max<long>(ref.nx, static_cast<long>(std::ceil((R - ref.origin.x()) / h)) + 1);
    const long iy_hi = std::max<long>(ref.ny, static_cast<long>(std::ceil((R - ref.origin.y()) / h)) + 1);
    return Lattice(static_cast<int>(ix_hi - ix_lo), static_cast<int>(iy_hi - iy_lo), h,
                   ref.origin + h * Eigen::Vector2d(static_cast<double>(ix_lo), static_cast<double>(iy_lo)));
}

static const int kNbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

std::vector<BoundaryCell> boundary_cells(const GridSet& g) {
    std::vector<BoundaryCell> out;
    for (int iy = 0; iy < g.lat.ny; ++iy)
        for (int ix = 0; ix < g.lat.nx; ++ix) {
            if (!g.occupied(ix, iy)) continue;
            Eigen::Vector2d dir(0.0, 0.0);
            int exposed = 0;
            for (const auto& d : kNbr)
                if (!g.occupied_clamped(ix + d[0], iy + d[1])) {
                    dir += Eigen::Vector2d(d[0], d[1]);
                    ++exposed;
                }
            if (exposed == 0) continue;
            const bool degenerate = dir.isZero(0.0);
            out.push_back({ix, iy, g.lat.center(ix, iy),
                           degenerate ? Eigen::Vector2d(0.0, 0.0) : dir.normalized(), degenerate});
        }
    return out;
}

std::vector<BoundaryCell> exterior_boundary_cells(const GridSet& g) {
    std::vector<BoundaryCell> out;
    for (int iy = 0; iy < g.lat.ny; ++iy)
        for (int ix = 0; ix < g.lat.nx; ++ix) {
            if (g.occupied(ix, iy)) continue;
            Eigen::Vector2d dir(0.0, 0.0);
            int touching = 0;
            for (const auto& d : kNbr)
                if (g.occupied_clamped(ix + d[0], iy + d[1])) {
                    dir -= Eigen::Vector2d(d[0], d[1]);
                    ++touching;
                }
            if (touching == 0) continue;
            const bool degenerate = dir.isZero(0.0);
            out.push_back({ix, iy, g.lat.center(ix, iy),
                           degenerate ? Eigen::Vector2d(0.0, 0.0) : dir.normalized(), degenerate});
        }
    return out;
}

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

Shape shape_disk(const Eigen::Vector2d& center, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("disk radius must be positive");
    return [center, r2 = r * r](const Eigen::Vector2d& p) {
        return (p - center).squaredNorm() <= r2;
    };
}

Shape shape_halfplane(const Eigen::Vector2d& n, double c) {
    if (n.isZero(0.0)) throw std::invalid_argument("halfplane normal must be nonzero");
    return [n, c](const Eigen::Vector2d& p) { return n.dot(p) >= c; };
}

Shape shape_box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    if (!(lo.x() < hi.x() && lo.y() < hi.y()))
        throw std::invalid_argument("box bounds must satisfy lo < hi");
    return [lo, hi](const Eigen::Vector2d& p) {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
    };
}

Shape shape_union(Shape a, Shape b) {
    return [a = std::move(a), b = std::move(b)](const Eigen::Vector2d& p) { return a(p) || b(p); };
}

Shape shape_intersection(Shape a, Shape b) {
    return [a = std::move(a), b = std::move(b)](const Eigen::Vector2d& p) { return a(p) && b(p); };
}

Shape shape_difference(Shape a, Shape b) {
    return [a = std::move(a), b = std::move(b)](const Eigen::Vector2d& p) { return a(p) && !b(p); };
}

GridSet rasterize(const Shape& shape, const Lattice& lat) {
    GridSet g(lat);
    for (int iy = 0; iy < lat.ny; ++iy)
        for (int ix = 0; ix < lat.nx; ++ix)
            if (shape(lat.center(ix, iy))) g.set(ix, iy, true);
    return g;
}

// ---------------------------------------------------------------------------
// Container
// ---------------------------------------------------------------------------

Container Container::halfplane(int axis, bool positive_side, double coord) {
    if (axis != 0 && axis != 1) throw std::invalid_argument("halfplane axis must be 0 or 1");
    Container c;
    c.kind = Kind::HalfPlane;
    c.axis = axis;
    c.positive_side = positive_side;
    c.coord = coord;
    return c;
}

Container Container::box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    if (!(lo.x() < hi.x() && lo.y() < hi.y()))
        throw std::invalid_argument("container box bounds must satisfy lo < hi");
    Container c;
    c.kind = Kind::Box;
    c.lo = lo;
    c.hi = hi;
    return c;
}

Container Container::disk(const Eigen::Vector2d& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("container disk radius must be positive");
    Container c;
    c.kind = Kind::Disk;
    c.center = center;
    c.radius = radius;
    return c;
}

Container Container::parse(const std::string& text) {
    auto fail = [&] { throw std::invalid_argument("unrecognized container spec: " + text); };
    const auto colon = text.find(':');
    if (colon == std::string::npos) fail();
    const std::string head = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);

    auto parse_floats = [&](int want) {
        std::vector<double> v;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            size_t used = 0;
            try {
                v.push_back(std::stod(item, &used));
            } catch (const std::exception&) {
                fail();
            }
            if (used != item.size()) fail();
        }
        if (static_cast<int>(v.size()) != want) fail();
        return v;
    };

    if (head == "halfplane") {
        const auto cmp = args.find_first_of("<>");
        if (cmp == std::string::npos || cmp != 1) fail();
        const char ax = args[0];
        if (ax != 'x' && ax != 'y') fail();
        double coord = 0.0;
        size_t used = 0;
        try {
            coord = std::stod(args.substr(cmp + 1), &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != args.size() - cmp - 1) fail();
        return halfplane(ax == 'x' ? 0 : 1, args[cmp] == '>', coord);
    }
    if (head == "box") {
        const auto v = parse_floats(4);
        return box({v[0], v[1]}, {v[2], v[3]});
    }
    if (head == "disk") {
        const auto v = parse_floats(3);
        return disk({v[0], v[1]}, v[2]);
    }
    fail();
    return {};
}

std::string Container::to_string() const {
    char buf[200];
    switch (kind) {
        case Kind::HalfPlane:
            std::snprintf(buf, sizeof buf, "halfplane:%c%c%.17g", axis == 0 ? 'x' : 'y',
                          positive_side ? '>' : '<', coord);
            break;
        case Kind::Box:
            std::snprintf(buf, sizeof buf, "box:%.17g,%.17g,%.17g,%.17g", lo.x(), lo.y(), hi.x(),
                          hi.y());
            break;
        case Kind::Disk:
            std::snprintf(buf, sizeof buf, "disk:%.17g,%.17g,%.17g", center.x(), center.y(),
                          radius);
            break;
    }
    return buf;
}

double Container::wall_distance(const Eigen::Vector2d& p) const {
    switch (kind) {
        case Kind::HalfPlane:
            return positive_side ? p[axis] - coord : coord - p[axis];
        case Kind::Box:
            return std::min(std::min(p.x() - lo.x(), hi.x() - p.x()),
                            std::min(p.y() - lo.y(), hi.y() - p.y()));
        case Kind::Disk:
            return radius - (p - center).norm();
    }
    return 0.0;
}

ConvexRegion Container::region() const {
    ConvexRegion r;
    switch (kind) {
        case Kind::HalfPlane: {
            Eigen::Vector2d n(0.0, 0.0);
            n[axis] = positive_side ? -1.0 : 1.0;
            r.add_halfplane(n, positive_side ? -coord : coord);
            break;
        }
        case Kind::Box:
            r.add_halfplane({-1.0, 0.0}, -lo.x());
            r.add_halfplane({1.0, 0.0}, hi.x());
            r.add_halfplane({0.0, -1.0}, -lo.y());
            r.add_halfplane({0.0, 1.0}, hi.y());
            break;
        case Kind::Disk:
            r.set_disk(center, radius);
            break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// ConeGeometry
// ---------------------------------------------------------------------------

ConeGeometry::ConeGeometry(double theta) : theta(theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi))
        throw std::invalid_argument("cone opening angle must lie in (0, pi)");
}

Eigen::Vector2d ConeGeometry::reflect(const Eigen::Vector2d& p) const {
    const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
    return {c * p.x() + s * p.y(), s * p.x() - c * p.y()};
}

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Membership in the half-open angular interval [lo, lo + len) on the circle.
bool angular_in(double phi, double lo, double len) {
    double d = std::fmod(phi - lo, kTwoPi);
    if (d < 0.0) d += kTwoPi;
    return d < len;
}
} // namespace

bool ConeGeometry::member(ConeRegion region, const Eigen::Vector2d& x) const {
    const double pi = std::numbers::pi;
    const bool narrow = theta < pi / 2.0;
    const double phi = std::atan2(x.y(), x.x());
    switch (region) {
        case ConeRegion::J:
            return angular_in(phi, 0.0, theta);
        case ConeRegion::Jstar:
            return angular_in(phi, theta, theta);
        case ConeRegion::L:
            if (!narrow) throw std::domain_error("region L needs opening angle < pi/2");
            return angular_in(phi, 2.0 * theta, pi - 2.0 * theta);
        case ConeRegion::M:
            if (!narrow) throw std::domain_error("region M needs opening angle < pi/2");
            return angular_in(phi, -pi, 2.0 * theta);
        case ConeRegion::U:
        case ConeRegion::Gamma:
            if (!narrow) throw std::domain_error("region U needs opening angle < pi/2");
            return angular_in(phi, -pi / 2.0 - theta, 2.0 * theta);
        case ConeRegion::H:
            return angular_in(phi, 0.0, pi);
        case ConeRegion::Hc:
            return angular_in(phi, pi, pi);
    }
    return false;
}

ConvexRegion ConeGeometry::region(ConeRegion region) const {
    const bool narrow = theta < std::numbers::pi / 2.0;
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    const double c2 = std::cos(2.0 * theta), s2 = std::sin(2.0 * theta);
    ConvexRegion r;
    switch (region) {
        case ConeRegion::J:
            // polar angle in (0, theta): above the x-axis, below the theta-ray
            r.add_halfplane({0.0, -1.0}, 0.0);
            r.add_halfplane({-s1, c1}, 0.0);
            return r;
        case ConeRegion::Jstar:
            // polar angle in (theta, 2 theta)
            r.add_halfplane({s1, -c1}, 0.0);
            r.add_halfplane({-s2, c2}, 0.0);
            return r;
        case ConeRegion::L:
            if (!narrow) throw std::domain_error("region L needs opening angle < pi/2");
            r.add_halfplane({0.0, -1.0}, 0.0);
            r.add_halfplane({s2, -c2}, 0.0);
            return r;
        case ConeRegion::M:
            if (!narrow) throw std::domain_error("region M needs opening angle < pi/2");
            r.add_halfplane({0.0, 1.0}, 0.0);
            r.add_halfplane({s2, -c2}, 0.0);
            return r;
        case ConeRegion::U:
        case ConeRegion::Gamma:
            if (!narrow) throw std::domain_error("region U needs opening angle < pi/2");
            r.add_halfplane({c1, s1}, 0.0);
            r.add_halfplane({-c1, s1}, 0.0);
            return r;
        case ConeRegion::H:
            r.add_halfplane({0.0, -1.0}, 0.0);
            return r;
        case ConeRegion::Hc:
            r.add_halfplane({0.0, 1.0}, 0.0);
            return r;
    }
    return r;
}

} // namespace ncap
