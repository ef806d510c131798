#include "ncap/younglaw.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "ncap/geometry.hpp"
#include "ncap/interaction.hpp"
#include "ncap/kernels.hpp"
#include "ncap/quadrature.hpp"

namespace ncap {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_order(double s, bool allow_one) {
    if (allow_one ? (s > 0.0 && s <= 1.0) : (s > 0.0 && s < 1.0)) return;
    throw std::invalid_argument(allow_one ? "fractional order s must lie in (0, 1]"
                                          : "fractional order s must lie in (0, 1)");
}

void check_profile_angle(double t) {
    if (!(t > 0.0) || !(t <= kHalfPi))
        throw std::domain_error("profile angle must lie in (0, pi/2]");
}

// Integral of the blow-up kernel |x - z|^-(2+s) over a convex wedge that does
// not contain x, excluding B_delta(x). The ray content is exact, so only the
// angular integral is numerical.
double wedge_integral(const Eigen::Vector2d& x, const ConvexRegion& region, double s,
                      double delta) {
    const Kernel k = Kernel::fractional(s, 2);
    auto breaks = region_break_angles(x, region);
    auto f = [&](double phi) {
        const Eigen::Vector2d w(std::cos(phi), std::sin(phi));
        const Interval iv = region.ray(x, w);
        if (iv.empty()) return 0.0;
        const double lo = std::max(iv.lo, delta);
        return k.radial(lo, iv.hi);
    };
    return integrate(f, std::span<const double>(breaks.data(), breaks.size()), {1e-12, 0.0, 4000});
}

}  // namespace

std::string method_name(AngleMethod m) {
    switch (m) {
        case AngleMethod::Reduction: return "reduction";
        case AngleMethod::DirectCone: return "direct";
        case AngleMethod::RatioForm: return "ratio";
    }
    throw std::logic_error("unknown angle method");
}

AngleMethod parse_method(const std::string& name) {
    if (name == "reduction") return AngleMethod::Reduction;
    if (name == "direct") return AngleMethod::DirectCone;
    if (name == "ratio") return AngleMethod::RatioForm;
    throw std::invalid_argument("unknown angle method '" + name +
                                "' (expected reduction, direct, or ratio)");
}

double inner_profile(double t, double s) {
    check_profile_angle(t);
    check_order(s, true);
    const double c = std::cos(t);
    const double sn2 = std::sin(t) * std::sin(t);
    const double U = c + 4.0;
    const double p = 0.5 * (2.0 + s);

    const double head = integrate(
        [&](double u) { return (u - c) * std::pow(u * u + sn2, -p); }, c, U, {1e-13, 0.0, 4000});
    const double tail_linear = (1.0 / s) * std::pow(U * U + sn2, -0.5 * s);
    const double tail_const = c * integrate(
        [&](double v) { return std::pow(v, s) * std::pow(1.0 + sn2 * v * v, -p); }, 0.0, 1.0 / U,
        {1e-13, 0.0, 4000});
    return head + tail_linear - tail_const;
}

double inner_profile_sine_form(double t, double s) {
    check_profile_angle(t);
    check_order(s, true);
    const double c = std::cos(t);
    const double sine_power = integrate(
        [&](double psi) { return std::pow(std::sin(psi), s); }, 0.0, t, {1e-13, 0.0, 4000});
    return 1.0 / s - c * std::pow(std::sin(t), -(1.0 + s)) * sine_power;
}

double cone_integral(double theta, double s) {
    check_profile_angle(theta);
    check_order(s, true);
    return 2.0 * integrate([&](double t) { return inner_profile(t, s); }, 0.0, theta,
                           {1e-12, 0.0, 4000});
}

double young_residual(double theta, double s, double sigma) {
    check_profile_angle(theta);
    check_order(s, true);
    if (sigma > 0.0)
        throw std::domain_error("young_residual handles sigma <= 0; mirror positive sigma first");
    if (!(sigma > -1.0)) throw std::domain_error("sigma must lie in (-1, 0]");
    return std::pow(std::sin(theta), s) * cone_integral(theta, s) -
           (1.0 + sigma) * cone_integral(kHalfPi, s);
}

double cone_a(double theta, double s) {
    if (!(theta > 0.0) || !(theta < kHalfPi))
        throw std::domain_error("cone angle must lie in (0, pi/2)");
    check_order(s, true);
    const ConeGeometry geom(theta);
    return wedge_integral({0.0, 1.0}, geom.region(ConeRegion::U), s, 0.0);
}

double cone_b(double theta, double s) {
    if (!(theta > 0.0) || !(theta < kHalfPi))
        throw std::domain_error("cone angle must lie in (0, pi/2)");
    check_order(s, true);
    const ConeGeometry geom(theta);
    return wedge_integral(geom.edge_point(), geom.region(ConeRegion::L), s, 0.0);
}

double direct_cone_residual(double theta, double s, double sigma, double delta) {
    if (!(theta > 0.0) || !(theta < kHalfPi))
        throw std::domain_error("cone angle must lie in (0, pi/2)");
    check_order(s, true);
    if (!(sigma > -1.0) || !(sigma < 0.0)) throw std::domain_error("sigma must lie in (-1, 0)");
    const double clearance = std::sin(theta);  // dist from e(theta) to both wedges
    if (!(delta >= 0.0) || !(delta < clearance))
        throw std::domain_error("exclusion radius must stay below the singularity clearance");

    const ConeGeometry geom(theta);
    const Eigen::Vector2d e = geom.edge_point();
    const double far = wedge_integral(e, geom.region(ConeRegion::L), s, delta);
    const double wall = wedge_integral(e, geom.region(ConeRegion::Hc), s, delta);
    return far + sigma * wall;
}

AngleSolution solve_theta(double s, double sigma, double tol, AngleMethod method) {
    check_order(s, false);
    if (!(std::abs(sigma) <= 1.0 - 1e-6))
        throw std::invalid_argument("|sigma| too close to 1: the contact angle degenerates");
    if (!(tol > 0.0)) throw std::invalid_argument("angle tolerance must be positive");

    if (sigma > 0.0) {
        AngleSolution sol = solve_theta(s, -sigma, tol, method);
        sol.sigma = sigma;
        sol.theta = std::numbers::pi - sol.theta;
        return sol;
    }

    AngleSolution sol;
    sol.s = s;
    sol.sigma = sigma;
    sol.method = method;

    // sigma = 0 forces an empty far wedge in every formulation, so the root is
    // pi/2 exactly; only the reduction residual is defined there, and bisection
    // on it would crawl to the same endpoint.
    if (sigma == 0.0 && method != AngleMethod::Reduction) {
        sol.theta = kHalfPi;
        return sol;
    }

    long evals = 0;
    // Normalized residual: the defect divided by the magnitude of the balanced
    // terms, so tolerances compare across methods.
    std::function<double(double)> residual;
    bool increasing = true;
    switch (method) {
        case AngleMethod::Reduction: {
            const double g_half = cone_integral(kHalfPi, s);
            ++evals;
            residual = [&, g_half](double th) {
                ++evals;
                const double g = cone_integral(th, s);
                return (std::pow(std::sin(th), s) * g - (1.0 + sigma) * g_half) / g_half;
            };
            increasing = true;
            break;
        }
        case AngleMethod::DirectCone: {
            residual = [&](double th) {
                evals += 2;
                const ConeGeometry geom(th);
                const Eigen::Vector2d e = geom.edge_point();
                const double delta = 0.5 * std::sin(th);
                const double far = wedge_integral(e, geom.region(ConeRegion::L), s, delta);
                const double wall = wedge_integral(e, geom.region(ConeRegion::Hc), s, delta);
                return (far + sigma * wall) / (far - sigma * wall);
            };
            increasing = false;
            break;
        }
        case AngleMethod::RatioForm: {
            // a/b = -(1 + 1/sigma) cross-multiplied to sigma*a + (1+sigma)*b = 0,
            // which stays defined as sigma -> 0.
            residual = [&](double th) {
                evals += 2;
                const double a = cone_a(th, s);
                const double b = cone_b(th, s);
                return (sigma * a + (1.0 + sigma) * b) / (-sigma * a + (1.0 + sigma) * b);
            };
            increasing = false;
            break;
        }
    }

    // Endpoint signs are known analytically, so only midpoints are evaluated:
    // theta = 0+ and pi/2 stay out of the quadrature entirely.
    double lo = 0.0, hi = kHalfPi;
    const double width_goal = std::max(tol, 1e-14);
    int guard = 0;
    while (hi - lo > width_goal && ++guard < 200) {
        const double mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        const bool left_of_root = increasing ? (r < 0.0) : (r > 0.0);
        (left_of_root ? lo : hi) = mid;
    }
    sol.theta = 0.5 * (lo + hi);
    if (sol.theta >= kHalfPi) sol.theta = std::nextafter(kHalfPi, 0.0);
    sol.residual = residual(sol.theta);
    sol.evaluations = evals;
    return sol;
}

DimensionReductionReport dimension_reduction_check(double s, const std::vector<double>& ell) {
    check_order(s, true);
    DimensionReductionReport rep;
    rep.s = s;
    rep.ell = ell;
    const double p = 0.5 * (3.0 + s);

    auto slab = [&](double l) {
        if (!(l > 0.0)) throw std::invalid_argument("slab width must be positive");
        const double W = std::max(4.0 * l, 4.0);
        const double head = integrate(
            [&](double w) { return std::pow(l * l + w * w, -p); }, 0.0, W, {1e-13, 0.0, 4000});
        const double tail = integrate(
            [&](double v) { return std::pow(v, 1.0 + s) * std::pow(1.0 + l * l * v * v, -p); },
            0.0, 1.0 / W, {1e-13, 0.0, 4000});
        return 2.0 * (head + tail);
    };

    rep.reference = slab(1.0);
    for (double l : ell) rep.scaled.push_back(std::pow(l, 2.0 + s) * slab(l));
    for (double v : rep.scaled)
        rep.max_rel_deviation =
            std::max(rep.max_rel_deviation, std::abs(v - rep.reference) / rep.reference);
    return rep;
}

}  // namespace ncap
