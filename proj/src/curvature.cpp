#include "ncap/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ncap/quadrature.hpp"

namespace ncap {

namespace {

constexpr double kPi = std::numbers::pi;

// Signed radial content of one ray from x, outside the exclusion radius:
// +1 on the exterior pieces, -1 on the in-set chord [lo, hi].
double ray_content(const ConvexRegion& region, const Eigen::Vector2d& x, const Kernel& k,
                   double delta, double phi) {
    const Eigen::Vector2d w(std::cos(phi), std::sin(phi));
    Interval iv = region.ray(x, w);
    if (iv.empty()) iv = {0.0, 0.0};
    return k.radial(delta, iv.lo) - k.radial(std::max(delta, iv.lo), iv.hi) +
           k.radial(std::max(delta, iv.hi), std::numeric_limits<double>::infinity());
}

// PV integral for a convex analytic set. Opposite rays are evaluated together,
// so symmetric contributions cancel pointwise (a half-plane gives exactly 0).
double analytic_pv(const ConvexRegion& region, const Eigen::Vector2d& x, const Kernel& k,
                   double delta) {
    std::vector<double> breaks{0.0, kPi};
    for (double b : region_break_angles(x, region)) {
        double m = std::fmod(b, kPi);
        if (m < 0.0) m += kPi;
        breaks.push_back(m);
    }
    const int extra = k.family == Kernel::Family::TruncatedFractional ? 32 : 16;
    for (int i = 1; i < extra; ++i) breaks.push_back(kPi * i / extra);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double p, double q) { return std::abs(p - q) < 1e-12; }),
                 breaks.end());

    auto f = [&](double phi) {
        return ray_content(region, x, k, delta, phi) +
               ray_content(region, x, k, delta, phi + kPi);
    };
    return integrate(f, std::span<const double>(breaks.data(), breaks.size()), {1e-12, 0.0, 4000});
}

struct GridAnchor {
    GridSet set;              // the working set (complement already applied)
    Eigen::Vector2d xstar;    // PV center: queried cell center projected on the fit
    double shell_sign = 1.0;  // sign of everything beyond the lattice window
};

GridAnchor grid_anchor(const GridSet& E, const Eigen::Vector2d& p, bool complement) {
    GridAnchor a{complement ? E.complement_in_rect() : E, {0.0, 0.0},
                 complement ? -1.0 : 1.0};
    const Lattice& lat = a.set.lat;

    const int ix = static_cast<int>(std::floor((p.x() - lat.origin.x()) / lat.h));
    const int iy = static_cast<int>(std::floor((p.y() - lat.origin.y()) / lat.h));
    if (!lat.in_range(ix, iy))
        throw std::domain_error("curvature: queried point lies outside the lattice window");

    const auto bcells = boundary_cells(a.set);
    const BoundaryCell* b0 = nullptr;
    for (const auto& bc : bcells)
        if (bc.ix == ix && bc.iy == iy) {
            b0 = &bc;
            break;
        }
    if (!b0) throw std::domain_error("curvature: queried point is not in a boundary cell");
    if (b0->degenerate)
        throw std::domain_error("curvature: boundary orientation is ambiguous at the queried cell");
    if (bcells.size() < 2)
        throw std::domain_error("curvature: too few boundary cells for a line fit");

    // 5 nearest boundary centers (the cell itself included), deterministic ties.
    std::vector<size_t> order(bcells.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        const double di = (bcells[i].center - b0->center).squaredNorm();
        const double dj = (bcells[j].center - b0->center).squaredNorm();
        if (di != dj) return di < dj;
        return bcells[i].iy * lat.nx + bcells[i].ix < bcells[j].iy * lat.nx + bcells[j].ix;
    });
    const size_t m = std::min<size_t>(5, order.size());

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < m; ++i) mean += bcells[order[i]].center;
    mean /= static_cast<double>(m);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (size_t i = 0; i < m; ++i) {
        const Eigen::Vector2d d = bcells[order[i]].center - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    Eigen::Vector2d normal = es.eigenvectors().col(0);  // least-variance direction
    const double side = normal.dot(b0->normal);
    if (side == 0.0)
        throw std::domain_error("curvature: boundary orientation is ambiguous at the queried cell");
    if (side < 0.0) normal = -normal;

    a.xstar = b0->center - normal * (b0->center - mean).dot(normal);
    return a;
}

// Cells summed at midpoints outside the exclusion ball; inside it the fitted
// half-plane model contributes zero by symmetry.
double grid_pv(const GridAnchor& a, const Kernel& k, double delta) {
    const Lattice& lat = a.set.lat;
    const double h2 = lat.h * lat.h;
    std::vector<double> part(lat.cell_count(), 0.0);
    parallel_for(lat.cell_count(), [&](long i) {
        const int ix = static_cast<int>(i % lat.nx), iy = static_cast<int>(i / lat.nx);
        const Eigen::Vector2d c = lat.center(ix, iy);
        const double d = (c - a.xstar).norm();
        if (d <= delta) return;
        part[i] = (a.set.mask[i] ? -1.0 : 1.0) * h2 * k.eval_radius(d);
    });
    const double cells = tree_sum(part);
    const double shell =
        exterior_shell(a.xstar, lat.region(), ConvexRegion::whole_plane(), k, 1e-11);
    return cells + a.shell_sign * shell;
}

ConvexRegion disk_region(double r) {
    ConvexRegion reg;
    reg.set_disk({0.0, 0.0}, r);
    return reg;
}

ConvexRegion upper_halfplane() {
    ConvexRegion reg;
    reg.add_halfplane({0.0, -1.0}, 0.0);
    return reg;
}

bool on_ray(const Eigen::Vector2d& p, double angle) {
    const Eigen::Vector2d u(std::cos(angle), std::sin(angle));
    const double along = p.dot(u);
    return along > 1e-12 && (p - along * u).norm() <= 1e-12;
}

}  // namespace

NmcResult nmc_detail(const CurvatureQuery& q) {
    const Kernel& k = q.kernel;
    if (k.n != 2) throw std::invalid_argument("curvature needs a planar kernel (n = 2)");
    if (!(q.delta2 > 0.0) || !(q.delta1 > q.delta2))
        throw std::invalid_argument("exclusion radii must satisfy delta1 > delta2 > 0");

    double v1 = 0.0, v2 = 0.0;

    if (const auto* grid = std::get_if<GridSet>(&q.shape)) {
        if (!(q.delta2 >= 2.0 * grid->lat.h))
            throw std::invalid_argument("grid curvature needs delta2 >= 2h");
        const GridAnchor a = grid_anchor(*grid, q.point, q.complement);
        v1 = grid_pv(a, k, q.delta1);
        v2 = grid_pv(a, k, q.delta2);
    } else {
        ConvexRegion region;
        if (const auto* disk = std::get_if<AnalyticDisk>(&q.shape)) {
            if (!(disk->r > 0.0)) throw std::invalid_argument("disk radius must be positive");
            if (std::abs(q.point.norm() - disk->r) > 1e-12)
                throw std::domain_error("curvature: point is not on the circle");
            if (!(q.delta1 <= disk->r))
                throw std::invalid_argument("delta1 exceeds the disk feature size");
            region = disk_region(disk->r);
        } else if (std::holds_alternative<AnalyticHalfPlane>(q.shape)) {
            if (std::abs(q.point.y()) > 1e-12)
                throw std::domain_error("curvature: point is not on the half-plane edge");
            region = upper_halfplane();
        } else {
            const auto& cone = std::get<AnalyticCone>(q.shape);
            const ConeGeometry geom(cone.theta);  // validates theta
            if (!on_ray(q.point, 0.0) && !on_ray(q.point, cone.theta))
                throw std::domain_error("curvature: point is not on a cone edge");
            if (!(q.delta1 <= q.point.norm()))
                throw std::invalid_argument("delta1 exceeds the distance to the cone apex");
            region = geom.region(ConeRegion::J);
        }
        v1 = analytic_pv(region, q.point, k, q.delta1);
        v2 = analytic_pv(region, q.point, k, q.delta2);
        if (q.complement) {
            // The complement integrand is the pointwise negative along every ray.
            v1 = -v1;
            v2 = -v2;
        }
    }

    NmcResult res;
    res.coarse = v1;
    res.fine = v2;
    res.pv_gap = std::abs(v1 - v2);
    if (!(res.pv_gap <= q.pv_gap_cap))
        throw std::runtime_error("curvature: principal value failed to converge (gap above cap)");
    // Cutoff bias scales like delta^(1-s).
    const double order = 1.0 - k.s;
    res.value = v2 + (v2 - v1) / (std::pow(q.delta1 / q.delta2, order) - 1.0);
    return res;
}

double nmc(const CurvatureQuery& q) { return nmc_detail(q).value; }

double shifted_nmc(const CurvatureQuery& q, const Container& container, double sigma) {
    if (!(container.wall_distance(q.point) > 0.0))
        throw std::domain_error("shifted curvature: point must lie inside the container");
    const double wall = wall_potential(q.point, container, q.kernel);
    return nmc_detail(q).value - (1.0 - sigma) * wall;
}

std::vector<Eigen::Vector2i> interior_boundary_cells(const GridSet& E, const Container& container,
                                                     const Kernel& k, double band) {
    if (band < 0.0) {
        band = 2.0 * E.lat.h;
        if (k.family == Kernel::Family::TruncatedFractional)
            band = std::max(band, k.eps / 8.0);
    }
    std::vector<Eigen::Vector2i> out;
    for (const auto& bc : boundary_cells(E))
        if (container.wall_distance(bc.center) > band) out.emplace_back(bc.ix, bc.iy);
    return out;
}

ElResidualReport el_residual(const GridSet& E, const Container& container, double sigma,
                             const Kernel& k, const ScalarField& g,
                             const std::vector<Eigen::Vector2i>& points) {
    if (points.empty())
        throw std::domain_error("el_residual: no interior boundary cells to sample");

    std::vector<uint8_t> is_boundary(E.lat.cell_count(), 0);
    for (const auto& bc : boundary_cells(E))
        is_boundary[static_cast<size_t>(bc.iy) * E.lat.nx + bc.ix] = 1;

    const double h = E.lat.h;
    ElResidualReport rep;
    for (const auto& c : points) {
        if (!E.lat.in_range(c.x(), c.y()) ||
            !is_boundary[static_cast<size_t>(c.y()) * E.lat.nx + c.x()])
            throw std::domain_error("el_residual: sampled cell is not a boundary cell");
        const Eigen::Vector2d x = E.lat.center(c.x(), c.y());
        if (!(container.wall_distance(x) > 0.0))
            throw std::domain_error("el_residual: sampled cell lies outside the container");

        CurvatureQuery q;
        q.shape = E;
        q.point = x;
        q.kernel = k;
        q.delta1 = 12.0 * h;
        q.delta2 = 6.0 * h;
        const double H = nmc_detail(q).value;
        const double wall = wall_potential(x, container, k);
        rep.values.push_back(H - (1.0 - sigma) * wall + g(x));
    }

    double lo = rep.values.front(), hi = rep.values.front(), sum = 0.0;
    for (double v : rep.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    rep.mean = sum / static_cast<double>(rep.values.size());
    rep.spread = hi - lo;
    return rep;
}

}  // namespace ncap
