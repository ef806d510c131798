#include "ncap/droplet.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "ncap/detail/indexed_set.hpp"

namespace ncap {

namespace {

using detail::IndexedSet;
using nlohmann::json;

constexpr int kNbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

// Uniform in [0, 1) with a pinned bit recipe, so traces do not depend on the
// standard library's distribution internals.
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct Wall {
    Eigen::Vector2d point;   // on the wall line
    Eigen::Vector2d along;   // unit, axis-aligned
    Eigen::Vector2d inward;  // unit, into the container
};

std::vector<Wall> container_walls(const Container& c) {
    switch (c.kind) {
        case Container::Kind::HalfPlane: {
            Eigen::Vector2d inward = Eigen::Vector2d::Zero();
            inward[c.axis] = c.positive_side ? 1.0 : -1.0;
            Eigen::Vector2d along = Eigen::Vector2d::Zero();
            along[1 - c.axis] = 1.0;
            Eigen::Vector2d point = Eigen::Vector2d::Zero();
            point[c.axis] = c.coord;
            return {{point, along, inward}};
        }
        case Container::Kind::Box:
            // Bottom first: it is the preferred seat for initial droplets.
            return {{{c.lo.x(), c.lo.y()}, {1.0, 0.0}, {0.0, 1.0}},
                    {{c.lo.x(), c.hi.y()}, {1.0, 0.0}, {0.0, -1.0}},
                    {{c.lo.x(), c.lo.y()}, {0.0, 1.0}, {1.0, 0.0}},
                    {{c.hi.x(), c.lo.y()}, {0.0, 1.0}, {-1.0, 0.0}}};
        case Container::Kind::Disk:
            return {};
    }
    return {};
}

struct Mover {
    const MinimizeConfig& cfg;
    Lattice lat;
    long n = 0;
    std::vector<uint8_t> cand, occ;
    std::vector<long> cand_list;
    std::vector<double> u, G, stat;
    PairTable T;
    IndexedSet interface_, frontier;
    double pair_energy = 0.0, static_energy = 0.0;
    long count = 0;

    explicit Mover(const MinimizeConfig& c)
        : cfg(c),
          lat(c.grid),
          n(c.grid.cell_count()),
          cand(n, 0),
          occ(n, 0),
          u(n, 0.0),
          G(n, 0.0),
          stat(n, 0.0),
          T(c.kernel, c.grid.h, c.grid.nx - 1, c.grid.ny - 1, 1e-8),
          interface_(n),
          frontier(n) {}

    long id(int ix, int iy) const { return static_cast<long>(iy) * lat.nx + ix; }
    Eigen::Vector2d center(long c) const {
        return lat.center(static_cast<int>(c % lat.nx), static_cast<int>(c / lat.nx));
    }

    double table(long a, long b) const {
        return T.at(static_cast<int>(b % lat.nx) - static_cast<int>(a % lat.nx),
                    static_cast<int>(b / lat.nx) - static_cast<int>(a / lat.nx));
    }

    void build_static_fields() {
        const bool finite = std::isfinite(cfg.window_radius);
        for (int iy = 0; iy < lat.ny; ++iy)
            for (int ix = 0; ix < lat.nx; ++ix) {
                const Eigen::Vector2d x = lat.center(ix, iy);
                if (!(cfg.container.wall_distance(x) > 0.0)) continue;
                if (finite && !(x.norm() < cfg.window_radius)) continue;
                cand[id(ix, iy)] = 1;
                cand_list.push_back(id(ix, iy));
            }

        ConvexRegion inner = lat.region();
        if (finite) inner.set_disk({0.0, 0.0}, cfg.window_radius);
        const ConvexRegion omega = cfg.container.region();
        const double h2 = lat.h * lat.h;
        const ScalarField g = cfg.g.field();

        parallel_for(static_cast<long>(cand_list.size()), [&](long i) {
            const long c = cand_list[i];
            const Eigen::Vector2d x = center(c);
            const double airtail = exterior_shell(x, inner, omega, cfg.kernel);
            const double wall = wall_potential(x, cfg.container, cfg.kernel);
            stat[c] = h2 * (airtail + cfg.sigma * wall + g(x));
        });
        parallel_for(static_cast<long>(cand_list.size()), [&](long i) {
            const long c = cand_list[i];
            double acc = 0.0;
            for (long y : cand_list) acc += table(c, y);
            G[c] = acc;
        });
    }

    void refresh_membership(long c) {
        const int ix = static_cast<int>(c % lat.nx), iy = static_cast<int>(c / lat.nx);
        bool has_empty_nbr = false, has_occ_nbr = false;
        for (auto& d : kNbr) {
            const int jx = ix + d[0], jy = iy + d[1];
            const bool in = lat.in_range(jx, jy);
            const bool o = in && occ[id(jx, jy)];
            has_empty_nbr |= !o;
            has_occ_nbr |= o;
        }
        if (occ[c] && has_empty_nbr)
            interface_.insert(c);
        else
            interface_.erase(c);
        if (!occ[c] && cand[c] && has_occ_nbr)
            frontier.insert(c);
        else
            frontier.erase(c);
    }

    void refresh_around(long c) {
        refresh_membership(c);
        const int ix = static_cast<int>(c % lat.nx), iy = static_cast<int>(c / lat.nx);
        for (auto& d : kNbr) {
            const int jx = ix + d[0], jy = iy + d[1];
            if (lat.in_range(jx, jy)) refresh_membership(id(jx, jy));
        }
    }

    void seed_set(const std::vector<long>& cells) {
        for (long c : cells) {
            occ[c] = 1;
            ++count;
        }
        parallel_for(static_cast<long>(cand_list.size()), [&](long i) {
            const long c = cand_list[i];
            double acc = 0.0;
            for (long y : cells) acc += table(c, y);
            u[c] = acc;
        });
        std::vector<double> pair_part(cells.size(), 0.0), stat_part(cells.size(), 0.0);
        for (size_t i = 0; i < cells.size(); ++i) {
            pair_part[i] = G[cells[i]] - u[cells[i]];
            stat_part[i] = stat[cells[i]];
        }
        pair_energy = tree_sum(pair_part);
        static_energy = tree_sum(stat_part);
        for (long c = 0; c < n; ++c)
            if (occ[c] || cand[c]) refresh_membership(c);
    }

    double delta_energy(long a, long b) const {
        return (G[b] - G[a]) - 2.0 * u[b] + 2.0 * u[a] + 2.0 * table(a, b) + stat[b] - stat[a];
    }

    void apply(long a, long b, double dE) {
        occ[a] = 0;
        occ[b] = 1;
        pair_energy += dE - (stat[b] - stat[a]);
        static_energy += stat[b] - stat[a];
        parallel_for(static_cast<long>(cand_list.size()), [&](long i) {
            const long c = cand_list[i];
            u[c] += table(c, b) - table(c, a);
        });
        refresh_around(a);
        refresh_around(b);
    }

    double running_energy() const { return pair_energy + static_energy; }

    GridSet snapshot() const {
        GridSet s(lat);
        for (long c = 0; c < n; ++c)
            if (occ[c]) s.mask[c] = 1;
        return s;
    }

    EnergyBreakdown audit() const {
        const EnergyBreakdown full = capillarity_energy(snapshot(), cfg.container, cfg.sigma,
                                                        cfg.kernel, cfg.g.field(),
                                                        cfg.window_radius, 1e-8);
        const double err = std::abs(full.total - running_energy());
        if (err > 1e-9 * std::max(1.0, std::abs(full.total)))
            throw std::logic_error("minimize: incremental energy drifted from full recomputation");
        return full;
    }
};

std::vector<long> initial_cells(const Mover& m, const MinimizeConfig& cfg,
                                std::mt19937_64& rng) {
    const long want = cfg.volume_cells;

    if (std::holds_alternative<FromFile>(cfg.init)) {
        const auto& ff = std::get<FromFile>(cfg.init);
        const GridSet loaded = load_gridset(ff.path);
        if (!(loaded.lat == cfg.grid))
            throw std::invalid_argument("initial-state file uses a different lattice");
        if (loaded.count() != want)
            throw std::invalid_argument("initial-state file does not match volume_cells");
        std::vector<long> cells;
        for (long c = 0; c < m.n; ++c)
            if (loaded.mask[c]) {
                if (!m.cand[c])
                    throw std::invalid_argument("initial-state file leaves the container or window");
                cells.push_back(c);
            }
        return cells;
    }

    if (std::holds_alternative<HalfDiskOnWall>(cfg.init)) {
        const auto walls = container_walls(cfg.container);
        if (walls.empty())
            throw std::invalid_argument("half-disk initial state needs a flat container wall");
        const Wall& wall = walls.front();
        Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
        for (long c : m.cand_list) centroid += m.center(c);
        centroid /= static_cast<double>(m.cand_list.size());
        const Eigen::Vector2d anchor =
            wall.point + wall.along * (centroid - wall.point).dot(wall.along);

        std::vector<long> order = m.cand_list;
        std::sort(order.begin(), order.end(), [&](long a, long b) {
            const double da = (m.center(a) - anchor).squaredNorm();
            const double db = (m.center(b) - anchor).squaredNorm();
            if (da != db) return da < db;
            return a < b;
        });
        return {order.begin(), order.begin() + want};
    }

    // RandomBlob: connected growth from the most central candidate cell.
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (long c : m.cand_list) centroid += m.center(c);
    centroid /= static_cast<double>(m.cand_list.size());
    long start = m.cand_list.front();
    double best = std::numeric_limits<double>::infinity();
    for (long c : m.cand_list) {
        const double d = (m.center(c) - centroid).squaredNorm();
        if (d < best) {
            best = d;
            start = c;
        }
    }

    std::vector<uint8_t> in(m.n, 0);
    IndexedSet growth(m.n);
    std::vector<long> cells;
    auto add = [&](long c) {
        in[c] = 1;
        cells.push_back(c);
        growth.erase(c);
        const int ix = static_cast<int>(c % m.lat.nx), iy = static_cast<int>(c / m.lat.nx);
        for (auto& d : kNbr) {
            const int jx = ix + d[0], jy = iy + d[1];
            if (!m.lat.in_range(jx, jy)) continue;
            const long j = m.id(jx, jy);
            if (!in[j] && m.cand[j]) growth.insert(j);
        }
    };
    add(start);
    while (static_cast<long>(cells.size()) < want) {
        if (growth.size() == 0)
            throw std::invalid_argument("random blob cannot reach the requested volume");
        add(growth.at(static_cast<long>(rng() % growth.size())));
    }
    return cells;
}

}  // namespace

ScalarField FieldSpec::field() const {
    const double ax = gx, ay = gy, a0 = c;
    return [ax, ay, a0](const Eigen::Vector2d& p) { return ax * p.x() + ay * p.y() + a0; };
}

MinimizeTrace minimize(const MinimizeConfig& cfg) {
    if (cfg.kernel.n != 2) throw std::invalid_argument("minimize needs a planar kernel");
    if (!(std::abs(cfg.sigma) < 1.0))
        throw std::invalid_argument("minimize: sigma must lie in (-1, 1)");
    if (cfg.kernel.family != Kernel::Family::TruncatedFractional &&
        !std::isfinite(cfg.window_radius))
        throw std::invalid_argument(
            "minimize: an untruncated kernel needs a finite window_radius");
    if (std::isfinite(cfg.window_radius) && !(cfg.window_radius > 0.0))
        throw std::invalid_argument("minimize: window_radius must be positive");

    long max_sweeps = 0;
    const Anneal* anneal = std::get_if<Anneal>(&cfg.schedule);
    if (anneal) {
        if (!(anneal->cooling > 0.0 && anneal->cooling < 1.0))
            throw std::invalid_argument("minimize: cooling factor must lie in (0, 1)");
        if (anneal->sweeps < 1) throw std::invalid_argument("minimize: sweeps must be >= 1");
        max_sweeps = anneal->sweeps;
    } else {
        max_sweeps = std::get<Greedy>(cfg.schedule).max_sweeps;
        if (max_sweeps < 1) throw std::invalid_argument("minimize: max_sweeps must be >= 1");
    }

    Mover m(cfg);
    m.build_static_fields();
    if (cfg.volume_cells < 1 || cfg.volume_cells > static_cast<long>(m.cand_list.size()))
        throw std::invalid_argument("minimize: volume_cells infeasible for this container/grid");

    std::mt19937_64 rng(cfg.seed);
    m.seed_set(initial_cells(m, cfg, rng));

    double temperature = 0.0;
    if (anneal) {
        temperature = anneal->t0;
        if (!(temperature > 0.0)) {
            // Calibration pre-pass; its draws are part of the deterministic stream.
            std::vector<double> mags;
            for (int i = 0; i < 200 && m.interface_.size() > 0 && m.frontier.size() > 0; ++i) {
                const long a = m.interface_.at(static_cast<long>(rng() % m.interface_.size()));
                const long b = m.frontier.at(static_cast<long>(rng() % m.frontier.size()));
                mags.push_back(std::abs(m.delta_energy(a, b)));
            }
            if (!mags.empty()) {
                std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
                temperature = 0.1 * mags[mags.size() / 2];
            }
            if (!(temperature > 0.0)) temperature = 1e-12;
        }
    }

    MinimizeTrace trace;
    bool audited = false;
    for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
        const long proposals = std::max<long>(1, m.interface_.size());
        long accepted = 0;
        for (long i = 0; i < proposals; ++i) {
            if (m.interface_.size() == 0 || m.frontier.size() == 0) break;
            const long a = m.interface_.at(static_cast<long>(rng() % m.interface_.size()));
            const long b = m.frontier.at(static_cast<long>(rng() % m.frontier.size()));
            const double dE = m.delta_energy(a, b);
            bool accept = false;
            if (anneal)
                accept = dE <= 0.0 || uniform01(rng) < std::exp(-dE / temperature);
            else
                accept = dE < 0.0;
            if (accept) {
                m.apply(a, b, dE);
                ++accepted;
            }
        }
        if (m.count != cfg.volume_cells)
            throw std::logic_error("minimize: volume constraint violated");
        trace.records.push_back({sweep, m.running_energy(),
                                 static_cast<double>(accepted) / static_cast<double>(proposals)});

        audited = false;
        if (sweep % 10 == 0) {
            m.audit();
            audited = true;
        }
        if (anneal)
            temperature *= anneal->cooling;
        else if (accepted == 0)
            break;
    }

    trace.final_energy = m.audit();
    (void)audited;
    trace.final_set = m.snapshot();
    return trace;
}

std::vector<ContactAngle> measure_contact_angle(const GridSet& E, const Container& container,
                                                Eigen::Vector2d band) {
    const double h = E.lat.h;
    if (band.x() < 0.0) band = {3.0 * h, 20.0 * h};
    if (!(band.x() < band.y())) throw std::invalid_argument("contact band must be increasing");

    const auto walls = container_walls(container);
    if (walls.empty())
        throw std::domain_error("contact angle measurement needs a flat container wall");

    std::vector<ContactAngle> out;
    for (const Wall& wall : walls) {
        // Cells of the wall-adjacent row, projected to along-wall coordinates.
        std::vector<double> contact_s;
        for (int iy = 0; iy < E.lat.ny; ++iy)
            for (int ix = 0; ix < E.lat.nx; ++ix) {
                if (!E.occupied(ix, iy)) continue;
                const Eigen::Vector2d c = E.lat.center(ix, iy);
                const double d = (c - wall.point).dot(wall.inward);
                if (d > 0.0 && d < 1.5 * h) contact_s.push_back((c - wall.point).dot(wall.along));
            }
        if (contact_s.empty()) continue;
        std::sort(contact_s.begin(), contact_s.end());

        // Split the contact row into components on along-wall gaps.
        std::vector<std::pair<double, double>> comps;
        double lo = contact_s.front(), hi = contact_s.front();
        for (double s : contact_s) {
            if (s - hi > 1.5 * h) {
                comps.emplace_back(lo, hi);
                lo = s;
            }
            hi = s;
        }
        comps.emplace_back(lo, hi);

        const int ax = static_cast<int>(std::lround(wall.along.x()));
        const int ay = static_cast<int>(std::lround(wall.along.y()));

        for (const auto& [smin, smax] : comps) {
            const double mid = 0.5 * (smin + smax);
            for (int flank = 0; flank < 2; ++flank) {
                const int side = flank == 0 ? -1 : 1;  // side of the empty lateral neighbor
                std::vector<Eigen::Vector2d> pts;
                for (int iy = 0; iy < E.lat.ny; ++iy)
                    for (int ix = 0; ix < E.lat.nx; ++ix) {
                        if (!E.occupied(ix, iy)) continue;
                        if (E.occupied_clamped(ix + side * ax, iy + side * ay)) continue;
                        const Eigen::Vector2d c = E.lat.center(ix, iy);
                        const double d = (c - wall.point).dot(wall.inward);
                        if (d < band.x() || d > band.y()) continue;
                        const double s = (c - wall.point).dot(wall.along);
                        if (side < 0 ? (s < smin - 2.0 * band.y() || s > mid)
                                     : (s <= mid || s > smax + 2.0 * band.y()))
                            continue;
                        pts.push_back(c);
                    }
                if (pts.size() < 4)
                    throw std::runtime_error(
                        "contact angle: insufficient data, fewer than 4 interface cells in band");

                Eigen::Vector2d mean = Eigen::Vector2d::Zero();
                for (const auto& p : pts) mean += p;
                mean /= static_cast<double>(pts.size());
                Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
                for (const auto& p : pts) {
                    const Eigen::Vector2d d = p - mean;
                    cov += d * d.transpose();
                }
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
                Eigen::Vector2d tangent = es.eigenvectors().col(1);
                if (tangent.dot(wall.inward) < 0.0) tangent = -tangent;

                const Eigen::Vector2d into = (flank == 0 ? 1.0 : -1.0) * wall.along;
                ContactAngle ca;
                ca.angle = std::atan2(tangent.dot(wall.inward), tangent.dot(into));
                const double m = static_cast<double>(pts.size());
                ca.uncertainty = std::atan2(std::sqrt(es.eigenvalues()(0) / m),
                                            std::sqrt(es.eigenvalues()(1) / m));
                ca.cells = static_cast<int>(pts.size());
                ca.foot = wall.point + wall.along * (flank == 0 ? smin : smax);
                out.push_back(ca);
            }
        }
    }
    if (out.empty()) throw std::domain_error("contact angle: droplet does not touch the wall");
    return out;
}

DensityReport density_diagnostic(const GridSet& E, const std::vector<double>& radii) {
    const auto bcells = boundary_cells(E);
    if (bcells.empty()) throw std::domain_error("density diagnostic: empty boundary");
    const double h = E.lat.h;
    for (double r : radii)
        if (!(r >= 3.0 * h))
            throw std::invalid_argument("density diagnostic: radii must be >= 3h");

    std::vector<Eigen::Vector2d> occ;
    for (int iy = 0; iy < E.lat.ny; ++iy)
        for (int ix = 0; ix < E.lat.nx; ++ix)
            if (E.occupied(ix, iy)) occ.push_back(E.lat.center(ix, iy));

    DensityReport rep;
    for (double r : radii) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& bc : bcells) {
            long inside = 0;
            for (const auto& c : occ)
                if ((c - bc.center).norm() < r) ++inside;
            const double ratio = static_cast<double>(inside) * h * h / (r * r);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        rep.radii.push_back(r);
        rep.min_ratio.push_back(lo);
        rep.max_ratio.push_back(hi);
    }
    return rep;
}

MinimizeConfig parse_minimize_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    auto check_keys = [](const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (const char* k : allowed) ok |= it.key() == k;
            if (!ok)
                throw std::invalid_argument(std::string("config: unknown key '") + it.key() +
                                            "' in " + where);
        }
    };

    try {
        check_keys(j,
                   {"container", "grid", "kernel", "sigma", "volume_cells", "g", "schedule",
                    "seed", "init", "window_radius"},
                   "the top-level object");

        MinimizeConfig cfg;
        cfg.container = Container::parse(j.at("container").get<std::string>());

        const json& gj = j.at("grid");
        check_keys(gj, {"nx", "ny", "h", "origin"}, "grid");
        const auto origin = gj.at("origin");
        if (!origin.is_array() || origin.size() != 2)
            throw std::invalid_argument("config: grid.origin must be [x, y]");
        cfg.grid = Lattice(gj.at("nx").get<int>(), gj.at("ny").get<int>(),
                           gj.at("h").get<double>(),
                           {origin[0].get<double>(), origin[1].get<double>()});

        cfg.kernel = Kernel::parse(j.at("kernel").get<std::string>(), 2);
        cfg.sigma = j.at("sigma").get<double>();
        cfg.volume_cells = j.at("volume_cells").get<long>();
        cfg.seed = j.at("seed").get<std::uint64_t>();

        if (j.contains("g")) {
            const json& gf = j["g"];
            check_keys(gf, {"gx", "gy", "const"}, "g");
            cfg.g.gx = gf.value("gx", 0.0);
            cfg.g.gy = gf.value("gy", 0.0);
            cfg.g.c = gf.value("const", 0.0);
        }

        const json& sj = j.at("schedule");
        const std::string stype = sj.at("type").get<std::string>();
        if (stype == "greedy") {
            check_keys(sj, {"type", "max_sweeps"}, "schedule");
            Greedy g;
            g.max_sweeps = sj.value("max_sweeps", g.max_sweeps);
            cfg.schedule = g;
        } else if (stype == "anneal") {
            check_keys(sj, {"type", "t0", "cooling", "sweeps"}, "schedule");
            Anneal a;
            a.t0 = sj.value("t0", a.t0);
            a.cooling = sj.value("cooling", a.cooling);
            a.sweeps = sj.value("sweeps", a.sweeps);
            cfg.schedule = a;
        } else {
            throw std::invalid_argument("config: schedule.type must be greedy or anneal");
        }

        const json& ij = j.at("init");
        const std::string itype = ij.at("type").get<std::string>();
        if (itype == "half_disk_on_wall") {
            check_keys(ij, {"type"}, "init");
            cfg.init = HalfDiskOnWall{};
        } else if (itype == "random_blob") {
            check_keys(ij, {"type"}, "init");
            cfg.init = RandomBlob{};
        } else if (itype == "from_file") {
            check_keys(ij, {"type", "path"}, "init");
            cfg.init = FromFile{ij.at("path").get<std::string>()};
        } else {
            throw std::invalid_argument(
                "config: init.type must be half_disk_on_wall, random_blob, or from_file");
        }

        if (j.contains("window_radius")) cfg.window_radius = j["window_radius"].get<double>();
        return cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

}  // namespace ncap
