#include "ncap/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ncap/curvature.hpp"
#include "ncap/droplet.hpp"
#include "ncap/interaction.hpp"
#include "ncap/verify.hpp"
#include "ncap/younglaw.hpp"

namespace ncap {

namespace {

constexpr double kPi = std::numbers::pi;

// Every number printed by the tool goes through here: 17 significant digits,
// so regression diffs are meaningful.
std::string num17(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

double to_double(const std::string& text) {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("bad number: " + text);
    return v;
}

std::vector<double> split_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

FieldSpec parse_field(const std::string& text) {
    FieldSpec f;
    if (text.rfind("const:", 0) == 0) {
        f.c = to_double(text.substr(6));
        return f;
    }
    if (text.rfind("linear:", 0) == 0) {
        std::stringstream ss(text.substr(7));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.rfind("gx=", 0) == 0)
                f.gx = to_double(item.substr(3));
            else if (item.rfind("gy=", 0) == 0)
                f.gy = to_double(item.substr(3));
            else if (item.rfind("c=", 0) == 0)
                f.c = to_double(item.substr(2));
            else
                throw std::invalid_argument("bad potential term: " + item);
        }
        return f;
    }
    throw std::invalid_argument(
        "potential must be const:<v> or linear:gx=<v>,gy=<v>,c=<v>");
}

std::filesystem::path resolve(const std::string& out_dir, const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_absolute() || out_dir.empty()) return p;
    return std::filesystem::path(out_dir) / p;
}

std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot open output file: " + p.string());
    return f;
}

struct YoungArgs {
    double s = 0.0, sigma = 0.0, tol = 1e-10;
    std::string method = "reduction";
};

int do_young(const YoungArgs& a, std::ostream& out) {
    const AngleSolution sol = solve_theta(a.s, a.sigma, a.tol, parse_method(a.method));
    out << "{\"theta_rad\":" << num17(sol.theta)
        << ",\"theta_deg\":" << num17(sol.theta * 180.0 / kPi)
        << ",\"cos_pi_minus_theta\":" << num17(std::cos(kPi - sol.theta))
        << ",\"residual\":" << num17(sol.residual)
        << ",\"method\":\"" << method_name(sol.method) << "\"}\n";
    return 0;
}

struct YoungTableArgs {
    std::string s_list, sigma_list, out_path, method = "reduction";
    double tol = 1e-10;
};

int do_young_table(const YoungTableArgs& a, const std::string& out_dir, std::ostream& out) {
    const AngleMethod method = parse_method(a.method);
    std::ostringstream csv;
    csv << "s,sigma,theta_rad,theta_deg,residual\n";
    for (double s : split_list(a.s_list))
        for (double sigma : split_list(a.sigma_list)) {
            const AngleSolution sol = solve_theta(s, sigma, a.tol, method);
            csv << num17(s) << ',' << num17(sigma) << ',' << num17(sol.theta) << ','
                << num17(sol.theta * 180.0 / kPi) << ',' << num17(sol.residual) << '\n';
        }
    if (a.out_path.empty()) {
        out << csv.str();
    } else {
        open_out(resolve(out_dir, a.out_path)) << csv.str();
    }
    return 0;
}

struct EnergyArgs {
    std::string set_path, container, kernel, g = "const:0";
    double sigma = 0.0;
    double window = std::numeric_limits<double>::infinity();
};

int do_energy(const EnergyArgs& a, std::ostream& out) {
    const GridSet E = load_gridset(a.set_path);
    const EnergyBreakdown b =
        capillarity_energy(E, Container::parse(a.container), a.sigma,
                           Kernel::parse(a.kernel, 2), parse_field(a.g).field(), a.window);
    out << "{\"liquid_air\":" << num17(b.liquid_air)
        << ",\"liquid_solid\":" << num17(b.liquid_solid)
        << ",\"potential\":" << num17(b.potential) << ",\"sigma\":" << num17(b.sigma)
        << ",\"total\":" << num17(b.total) << "}\n";
    return 0;
}

struct CurvatureArgs {
    std::string shape, kernel;
    int points = 16;
    double delta1 = 0.0, delta2 = 0.0;  // 0: per-shape default
};

int do_curvature(const CurvatureArgs& a, std::ostream& out) {
    if (a.points < 1) throw std::invalid_argument("point count must be positive");
    CurvatureQuery base;
    base.kernel = Kernel::parse(a.kernel, 2);
    std::vector<Eigen::Vector2d> pts;

    if (a.shape.rfind("disk:r=", 0) == 0) {
        const double r = to_double(a.shape.substr(7));
        base.shape = AnalyticDisk{r};
        base.delta1 = r / 8.0;
        base.delta2 = r / 16.0;
        for (int i = 0; i < a.points; ++i) {
            const double t = 2.0 * kPi * i / a.points;
            pts.push_back({r * std::cos(t), r * std::sin(t)});
        }
    } else if (a.shape == "halfplane") {
        base.shape = AnalyticHalfPlane{};
        base.delta1 = 0.25;
        base.delta2 = 0.125;
        for (int i = 0; i < a.points; ++i)
            pts.push_back({a.points == 1 ? 0.0 : -2.0 + 4.0 * i / (a.points - 1), 0.0});
    } else if (a.shape.rfind("grid:", 0) == 0) {
        const GridSet E = load_gridset(a.shape.substr(5));
        const auto cells = boundary_cells(E);
        if (cells.empty()) throw std::invalid_argument("grid set has no boundary cells");
        base.delta1 = 4.0 * E.lat.h;
        base.delta2 = 2.0 * E.lat.h;
        const int n = std::min<int>(a.points, static_cast<int>(cells.size()));
        for (int i = 0; i < n; ++i)
            pts.push_back(cells[static_cast<size_t>(i) * cells.size() / n].center);
        base.shape = E;
    } else {
        throw std::invalid_argument(
            "shape must be disk:r=<v>, halfplane, or grid:<path>");
    }

    if (a.delta1 > 0.0) base.delta1 = a.delta1;
    if (a.delta2 > 0.0) base.delta2 = a.delta2;

    out << "point_index,x,y,nmc,delta1,delta2,pv_gap\n";
    for (size_t i = 0; i < pts.size(); ++i) {
        CurvatureQuery q = base;
        q.point = pts[i];
        const NmcResult r = nmc_detail(q);
        out << i << ',' << num17(pts[i].x()) << ',' << num17(pts[i].y()) << ','
            << num17(r.value) << ',' << num17(q.delta1) << ',' << num17(q.delta2) << ','
            << num17(r.pv_gap) << '\n';
    }
    return 0;
}

int do_minimize(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config file: " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const MinimizeConfig cfg = parse_minimize_config(buf.str());
    const MinimizeTrace tr = minimize(cfg);

    save_gridset(tr.final_set, resolve(out_dir, "mask.txt").string());

    auto trace = open_out(resolve(out_dir, "trace.csv"));
    trace << "sweep,energy,acceptance_rate\n";
    for (const auto& rec : tr.records)
        trace << rec.sweep << ',' << num17(rec.energy) << ',' << num17(rec.acceptance_rate)
              << '\n';

    std::string angles_json = "[";
    std::string angle_error;
    try {
        const auto angles = measure_contact_angle(tr.final_set, cfg.container);
        for (size_t i = 0; i < angles.size(); ++i) {
            const ContactAngle& c = angles[i];
            angles_json += std::string(i ? "," : "") + "{\"angle_rad\":" + num17(c.angle) +
                           ",\"angle_deg\":" + num17(c.angle * 180.0 / kPi) +
                           ",\"uncertainty\":" + num17(c.uncertainty) +
                           ",\"cells\":" + std::to_string(c.cells) +
                           ",\"foot_x\":" + num17(c.foot.x()) +
                           ",\"foot_y\":" + num17(c.foot.y()) + "}";
        }
    } catch (const std::exception& e) {
        angle_error = e.what();
    }
    angles_json += "]";

    const EnergyBreakdown& b = tr.final_energy;
    auto summary = open_out(resolve(out_dir, "summary.json"));
    summary << "{\"energy\":{\"liquid_air\":" << num17(b.liquid_air)
            << ",\"liquid_solid\":" << num17(b.liquid_solid)
            << ",\"potential\":" << num17(b.potential) << ",\"sigma\":" << num17(b.sigma)
            << ",\"total\":" << num17(b.total) << "},\"contact_angles\":" << angles_json;
    if (!angle_error.empty()) summary << ",\"contact_angle_error\":\"" << angle_error << "\"";
    summary << "}\n";
    return 0;
}

struct VerifyArgs {
    std::string suite;
    std::uint64_t seed = 0;
};

int do_verify(const VerifyArgs& a, const std::string& out_dir, std::ostream& out) {
    const auto reports = run_verification(a.suite, a.seed);
    bool all_pass = true;

    std::string json = "{\"suite\":\"" + a.suite + "\",\"reports\":[";
    for (size_t ri = 0; ri < reports.size(); ++ri) {
        const VerificationReport& rep = reports[ri];
        all_pass = all_pass && rep.passed;
        out << "suite " << rep.suite << ": " << (rep.passed ? "PASS" : "FAIL") << '\n';
        json += std::string(ri ? "," : "") + "{\"suite\":\"" + rep.suite +
                "\",\"passed\":" + (rep.passed ? "true" : "false") + ",\"cases\":[";
        for (size_t ci = 0; ci < rep.cases.size(); ++ci) {
            const CaseResult& c = rep.cases[ci];
            out << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name;
            json += std::string(ci ? "," : "") + "{\"name\":\"" + c.name +
                    "\",\"passed\":" + (c.passed ? "true" : "false") +
                    ",\"threshold\":" + num17(c.threshold) + ",\"values\":{";
            for (size_t vi = 0; vi < c.values.size(); ++vi) {
                out << ' ' << c.values[vi].first << '=' << num17(c.values[vi].second);
                json += std::string(vi ? "," : "") + "\"" + c.values[vi].first +
                        "\":" + num17(c.values[vi].second);
            }
            out << " (threshold " << num17(c.threshold) << ")\n";
            json += "}}";
        }
        json += "]}";
    }
    json += std::string("],\"passed\":") + (all_pass ? "true" : "false") + "}\n";

    open_out(resolve(out_dir, "verify_" + a.suite + ".json")) << json;
    out << "overall: " << (all_pass ? "PASS" : "FAIL") << '\n';
    return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << "error: no arguments\n";
        return 2;
    }

    CLI::App app{"nonlocal capillarity toolkit"};
    app.require_subcommand(1);
    int threads = 1;
    std::string out_dir;
    app.add_option("--threads", threads, "worker threads (never changes output bytes)");
    app.add_option("--out-dir", out_dir, "directory for file outputs");

    YoungArgs ya;
    auto* young = app.add_subcommand("young", "contact angle for one (s, sigma)");
    young->fallthrough();
    young->add_option("--s", ya.s, "fractional order in (0, 1)")->required();
    young->add_option("--sigma", ya.sigma, "relative adhesion in (-1, 1)")->required();
    young->add_option("--method", ya.method, "reduction, direct, or ratio");
    young->add_option("--tol", ya.tol, "bisection width target");

    YoungTableArgs ta;
    auto* table = app.add_subcommand("young-table", "contact angle table over two lists");
    table->fallthrough();
    table->add_option("--s-list", ta.s_list, "comma-separated orders")->required();
    table->add_option("--sigma-list", ta.sigma_list, "comma-separated adhesions")->required();
    table->add_option("--out", ta.out_path, "CSV output path (stdout if omitted)");
    table->add_option("--method", ta.method, "reduction, direct, or ratio");
    table->add_option("--tol", ta.tol, "bisection width target");

    EnergyArgs ea;
    auto* energy = app.add_subcommand("energy", "capillarity energy of a grid set");
    energy->fallthrough();
    energy->add_option("--set", ea.set_path, "grid set text file")->required();
    energy->add_option("--container", ea.container, "halfplane:…, box:…, or disk:…")
        ->required();
    energy->add_option("--sigma", ea.sigma, "relative adhesion in (-1, 1)")->required();
    energy->add_option("--kernel", ea.kernel, "fractional:s=… or truncated:s=…,eps=…")
        ->required();
    energy->add_option("--g", ea.g, "potential, const:<v> or linear:gx=,gy=,c=");
    energy->add_option("--window", ea.window, "finite accounting window radius");

    CurvatureArgs ca;
    auto* curv = app.add_subcommand("curvature", "nonlocal mean curvature along a boundary");
    curv->fallthrough();
    curv->add_option("--shape", ca.shape, "disk:r=<v>, halfplane, or grid:<path>")->required();
    curv->add_option("--kernel", ca.kernel, "fractional:s=… or truncated:s=…,eps=…")
        ->required();
    curv->add_option("--points", ca.points, "number of boundary sample points");
    curv->add_option("--delta1", ca.delta1, "outer exclusion radius (default per shape)");
    curv->add_option("--delta2", ca.delta2, "inner exclusion radius (default per shape)");

    std::string config_path;
    auto* mini = app.add_subcommand("minimize", "volume-constrained droplet descent");
    mini->fallthrough();
    mini->add_option("--config", config_path, "JSON configuration file")->required();

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->fallthrough();
    verify->add_option("--suite", va.suite,
                       "all, young, gamma, halfspace, isoperimetric, or curvature")
        ->required();
    verify->add_option("--seed", va.seed, "seed for randomized trials");

    try {
        std::vector<const char*> argv;
        argv.reserve(args.size());
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (threads < 1) throw std::invalid_argument("--threads must be at least 1");
        set_thread_count(threads);
        if (young->parsed()) return do_young(ya, out);
        if (table->parsed()) return do_young_table(ta, out_dir, out);
        if (energy->parsed()) return do_energy(ea, out);
        if (curv->parsed()) return do_curvature(ca, out);
        if (mini->parsed()) return do_minimize(config_path, out_dir);
        if (verify->parsed()) return do_verify(va, out_dir, out);
        err << "error: no subcommand\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int run_cli(const std::vector<std::string>& args) {
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace ncap
