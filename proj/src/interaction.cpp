#include "ncap/interaction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ncap/quadrature.hpp"

namespace ncap {

// ---------------------------------------------------------------------------
// Deterministic execution helpers
// ---------------------------------------------------------------------------

static std::atomic<int> g_threads{1};

void set_thread_count(int n) {
    if (n < 1) throw std::invalid_argument("thread count must be >= 1");
    g_threads.store(n);
}

int thread_count() { return g_threads.load(); }

double tree_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return tree_sum(v.first(half)) + tree_sum(v.subspan(half));
}

void parallel_for(long n, const std::function<void(long)>& fn) {
    const int workers = std::min<long>(thread_count(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
        const long lo = n * t / workers, hi = n * (t + 1) / workers;
        pool.emplace_back([&fn, lo, hi] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Cell-pair quadrature
// ---------------------------------------------------------------------------

namespace {

struct PairQuad {
    const Kernel& k;
    double tol;
    bool truncated;
    double eps;

    // Integral of K over two square cells of side w whose centers differ by
    // (dx, dy). Midpoint estimate vs the 16-subpair refinement decides whether
    // to recurse.
    double run(double dx, double dy, double w, int depth, int min_depth) const {
        const double dist = std::hypot(dx, dy);
        const double w4 = w * w * w * w;
        const double coarse = dist > 0.0 ? k.eval_radius(dist) * w4 : 0.0;

        const double q = 0.25 * w, sw = 0.5 * w;
        double sub[16][2];
        int m = 0;
        for (double ax : {-q, q})
            for (double ay : {-q, q})
                for (double bx : {-q, q})
                    for (double by : {-q, q}) {
                        sub[m][0] = dx + bx - ax;
                        sub[m][1] = dy + by - ay;
                        ++m;
                    }
        const double sw4 = sw * sw * sw * sw;
        double fine = 0.0;
        for (auto& o : sub) {
            const double d = std::hypot(o[0], o[1]);
            fine += d > 0.0 ? k.eval_radius(d) * sw4 : 0.0;
        }
        if (depth >= 12) return fine;

        // A pair whose distance range brackets the truncation radius has a
        // kink inside it; keep splitting those a few extra levels.
        const bool straddle = truncated && std::abs(dist - eps) <= 1.5 * w;
        const bool force = depth < min_depth || (straddle && depth < 6) || dist <= 0.0;
        if (!force && std::abs(fine - coarse) <= tol * std::abs(fine)) return fine;

        double sum = 0.0;
        for (auto& o : sub) sum += run(o[0], o[1], sw, depth + 1, min_depth);
        return sum;
    }
};

} // namespace

PairTable::PairTable(const Kernel& k, double h, int max_dx, int max_dy, double rel_tol) {
    if (k.n != 2) throw std::invalid_argument("pair table needs a planar kernel");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("pair quadrature tolerance must be positive");
    if (max_dx < 0 || max_dy < 0) throw std::invalid_argument("pair table extents must be >= 0");
    stride_ = static_cast<size_t>(max_dx) + 1;
    h_ = h;
    table_.assign(stride_ * (static_cast<size_t>(max_dy) + 1), 0.0);

    const PairQuad pq{k, rel_tol, k.family == Kernel::Family::TruncatedFractional, k.eps};
    const long total = static_cast<long>(table_.size());
    parallel_for(total, [&](long idx) {
        const int dy = static_cast<int>(idx / stride_);
        const int dx = static_cast<int>(idx % stride_);
        if (dx == 0 && dy == 0) return;  // same cell: unreachable under disjointness
        const double cd = h * std::hypot(dx, dy);
        if (cd > 3.0 * h) {
            table_[idx] = k.eval_radius(cd) * h * h * h * h;
        } else {
            const int min_depth = std::max(dx, dy) <= 1 ? 2 : 1;
            table_[idx] = pq.run(dx * h, dy * h, h, 0, min_depth);
        }
    });
}

// ---------------------------------------------------------------------------
// Angular sweeps with exact radial segments
// ---------------------------------------------------------------------------

std::vector<double> region_break_angles(const Eigen::Vector2d& x, const ConvexRegion& region) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> raw;
    auto add_point = [&](const Eigen::Vector2d& p) {
        const Eigen::Vector2d d = p - x;
        if (d.squaredNorm() > 0.0) raw.push_back(std::atan2(d.y(), d.x()));
    };

    const auto& pl = region.planes;
    for (size_t i = 0; i < pl.size(); ++i) {
        // Directions parallel to each wall (exit distance kinks there).
        const double a = std::atan2(pl[i].n.x(), -pl[i].n.y());
        raw.push_back(a);
        raw.push_back(a + std::numbers::pi);
        // Wall-wall corners.
        for (size_t j = i + 1; j < pl.size(); ++j) {
            const double det = pl[i].n.x() * pl[j].n.y() - pl[i].n.y() * pl[j].n.x();
            if (std::abs(det) < 1e-14) continue;
            const Eigen::Vector2d v(
                (pl[i].c * pl[j].n.y() - pl[j].c * pl[i].n.y()) / det,
                (pl[i].n.x() * pl[j].c - pl[j].n.x() * pl[i].c) / det);
            add_point(v);
        }
        // Wall-circle crossings.
        if (region.has_disk) {
            const double nn = pl[i].n.norm();
            const Eigen::Vector2d n = pl[i].n / nn;
            const double c = pl[i].c / nn;
            const double d = c - n.dot(region.disk_center);
            if (std::abs(d) < region.disk_radius) {
                const double half = std::sqrt(region.disk_radius * region.disk_radius - d * d);
                const Eigen::Vector2d foot = region.disk_center + d * n;
                const Eigen::Vector2d t(-n.y(), n.x());
                add_point(foot + half * t);
                add_point(foot - half * t);
            }
        }
    }

    std::vector<double> out{0.0, two_pi};
    for (double a : raw) {
        double b = std::fmod(a, two_pi);
        if (b < 0.0) b += two_pi;
        out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double p, double q) { return std::abs(p - q) < 1e-12; }),
              out.end());
    if (out.back() < two_pi) out.push_back(two_pi);
    return out;
}

static void merge_breaks(std::vector<double>& pts, int extra) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int i = 1; i < extra; ++i) pts.push_back(two_pi * i / extra);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double p, double q) { return std::abs(p - q) < 1e-12; }),
              pts.end());
}

double exterior_shell(const Eigen::Vector2d& x, const ConvexRegion& inner,
                      const ConvexRegion& outer, const Kernel& k, double rel_tol) {
    if (k.n != 2) throw std::invalid_argument("exterior_shell needs a planar kernel");
    if (!inner.contains(x)) throw std::domain_error("exterior_shell: point must lie inside the inner region");

    auto breaks = region_break_angles(x, inner);
    {
        auto ob = region_break_angles(x, outer);
        breaks.insert(breaks.end(), ob.begin(), ob.end());
    }
    // Truncated kernels switch off mid-ray; uniform extra slices keep narrow
    // active windows visible to the adaptive pass.
    merge_breaks(breaks, k.family == Kernel::Family::TruncatedFractional ? 32 : 8);

    auto f = [&](double phi) {
        const Eigen::Vector2d w(std::cos(phi), std::sin(phi));
        const double t_in = inner.ray(x, w).hi;
        const double t_out = outer.ray(x, w).hi;
        return k.radial(std::min(t_in, t_out), t_out);
    };
    return integrate(f, std::span<const double>(breaks.data(), breaks.size()),
                     {rel_tol, 0.0, 4000});
}

double wall_potential(const Eigen::Vector2d& x, const Container& container, const Kernel& k,
                      double rel_tol) {
    if (!(container.wall_distance(x) > 0.0))
        throw std::domain_error("wall_potential: point must lie inside the container");
    return exterior_shell(x, container.region(), ConvexRegion::whole_plane(), k, rel_tol);
}

// ---------------------------------------------------------------------------
// Grid interactions
// ---------------------------------------------------------------------------

namespace {

std::vector<long> occupied_indices(const GridSet& g) {
    std::vector<long> out;
    out.reserve(g.count());
    const long total = g.lat.cell_count();
    for (long i = 0; i < total; ++i)
        if (g.mask[i]) out.push_back(i);
    return out;
}

// Pairwise grid sum: per-x-cell partials in row-major order, tree-reduced.
double pair_sum(const GridSet& E, const GridSet& F, const PairTable& T) {
    const auto ecells = occupied_indices(E);
    const auto fcells = occupied_indices(F);
    if (ecells.empty() || fcells.empty()) return 0.0;
    const int nx = E.lat.nx;
    std::vector<double> partials(ecells.size(), 0.0);
    parallel_for(static_cast<long>(ecells.size()), [&](long i) {
        const int xi = static_cast<int>(ecells[i] % nx), yi = static_cast<int>(ecells[i] / nx);
        double acc = 0.0;
        for (long f : fcells)
            acc += T.at(static_cast<int>(f % nx) - xi, static_cast<int>(f / nx) - yi);
        partials[i] = acc;
    });
    return tree_sum(partials);
}

void check_planar(const Kernel& k) {
    if (k.n != 2) throw std::invalid_argument("grid energies need a planar kernel (n = 2)");
}

} // namespace

double interaction(const GridSet& E, const GridSet& F, const Kernel& k, double tol) {
    check_planar(k);
    if (!(E.lat == F.lat)) throw std::invalid_argument("interaction: sets live on different lattices");
    if (!(tol > 0.0)) throw std::invalid_argument("interaction: tolerance must be positive");
    for (size_t i = 0; i < E.mask.size(); ++i)
        if (E.mask[i] && F.mask[i]) throw std::domain_error("interaction: sets overlap");
    if (E.empty_mask() || F.empty_mask()) return 0.0;
    const PairTable T(k, E.lat.h, E.lat.nx - 1, E.lat.ny - 1, tol);
    return pair_sum(E, F, T);
}

double perimeter(const GridSet& E, const Kernel& k, double window_radius, double tol) {
    check_planar(k);
    if (!(tol > 0.0)) throw std::invalid_argument("perimeter: tolerance must be positive");
    if (!(window_radius > 0.0) || !std::isfinite(window_radius))
        throw std::invalid_argument("perimeter: window radius must be finite and positive");
    if (E.empty_mask()) return 0.0;

    const Lattice big = covering_lattice(E.lat, window_radius);
    const GridSet Eb = embed(E, big);
    const auto ecells = occupied_indices(Eb);
    for (long i : ecells) {
        const Eigen::Vector2d c = big.center(static_cast<int>(i % big.nx), static_cast<int>(i / big.nx));
        if (!(c.norm() < window_radius))
            throw std::domain_error("perimeter: set not inside the window disk");
    }

    GridSet air(big);
    for (int iy = 0; iy < big.ny; ++iy)
        for (int ix = 0; ix < big.nx; ++ix)
            if (!Eb.occupied(ix, iy) && big.center(ix, iy).norm() < window_radius)
                air.set(ix, iy, true);

    const PairTable T(k, big.h, big.nx - 1, big.ny - 1, tol);
    const double grid_part = pair_sum(Eb, air, T);

    const double h2 = big.h * big.h;
    std::vector<double> tail(ecells.size(), 0.0);
    parallel_for(static_cast<long>(ecells.size()), [&](long i) {
        const Eigen::Vector2d c =
            big.center(static_cast<int>(ecells[i] % big.nx), static_cast<int>(ecells[i] / big.nx));
        tail[i] = h2 * 2.0 * std::numbers::pi * k.radial(window_radius - c.norm(),
                                                         std::numeric_limits<double>::infinity());
    });
    return grid_part + tree_sum(tail);
}

double relative_perimeter(const GridSet& E, const GridSet& A, const Kernel& k, double tol) {
    check_planar(k);
    if (!(E.lat == A.lat))
        throw std::invalid_argument("relative_perimeter: sets live on different lattices");
    GridSet EA(E.lat), EcA(E.lat), EAc(E.lat), EcAc(E.lat);
    for (size_t i = 0; i < E.mask.size(); ++i) {
        const bool e = E.mask[i] != 0, a = A.mask[i] != 0;
        EA.mask[i] = e && a;
        EcA.mask[i] = !e && a;
        EAc.mask[i] = e && !a;
        EcAc.mask[i] = !e && !a;
    }
    const PairTable T(k, E.lat.h, E.lat.nx - 1, E.lat.ny - 1, tol);
    return pair_sum(EA, EcA, T) + pair_sum(EA, EcAc, T) + pair_sum(EcA, EAc, T);
}

EnergyBreakdown capillarity_energy(const GridSet& E, const Container& container, double sigma,
                                   const Kernel& k, const ScalarField& g, double window_radius,
                                   double tol) {
    check_planar(k);
    if (!(std::abs(sigma) < 1.0))
        throw std::invalid_argument("capillarity_energy: sigma must lie in (-1, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("capillarity_energy: tolerance must be positive");
    if (!(window_radius > 0.0))
        throw std::invalid_argument("capillarity_energy: window radius must be positive");

    const Lattice& lat = E.lat;
    const bool finite_window = std::isfinite(window_radius);
    const auto ecells = occupied_indices(E);
    for (long i : ecells) {
        const Eigen::Vector2d c = lat.center(static_cast<int>(i % lat.nx), static_cast<int>(i / lat.nx));
        if (!(container.wall_distance(c) > 0.0))
            throw std::domain_error("capillarity_energy: set leaves the container");
        if (finite_window && !(c.norm() < window_radius))
            throw std::domain_error("capillarity_energy: set leaves the window disk");
    }

    EnergyBreakdown out;
    out.sigma = sigma;
    if (ecells.empty()) return out;

    // Pair-summed air: container cells inside the window, not in E.
    GridSet air(lat);
    for (int iy = 0; iy < lat.ny; ++iy)
        for (int ix = 0; ix < lat.nx; ++ix) {
            if (E.occupied(ix, iy)) continue;
            const Eigen::Vector2d c = lat.center(ix, iy);
            if (!(container.wall_distance(c) > 0.0)) continue;
            if (finite_window && !(c.norm() < window_radius)) continue;
            air.set(ix, iy, true);
        }

    const PairTable T(k, lat.h, lat.nx - 1, lat.ny - 1, tol);
    const double grid_air = pair_sum(E, air, T);

    // Air beyond the pair-summed window: exact convex shell per liquid cell.
    ConvexRegion inner = lat.region();
    if (finite_window) inner.set_disk({0.0, 0.0}, window_radius);
    const ConvexRegion omega = container.region();
    const double h2 = lat.h * lat.h;

    std::vector<double> shell(ecells.size(), 0.0), wall(ecells.size(), 0.0), pot(ecells.size(), 0.0);
    parallel_for(static_cast<long>(ecells.size()), [&](long i) {
        const Eigen::Vector2d c =
            lat.center(static_cast<int>(ecells[i] % lat.nx), static_cast<int>(ecells[i] / lat.nx));
        shell[i] = h2 * exterior_shell(c, inner, omega, k);
        wall[i] = h2 * wall_potential(c, container, k);
        pot[i] = h2 * g(c);
    });

    out.liquid_air = grid_air + tree_sum(shell);
    out.liquid_solid = tree_sum(wall);
    out.potential = tree_sum(pot);
    out.total = out.liquid_air + sigma * out.liquid_solid + out.potential;
    return out;
}

} // namespace ncap
