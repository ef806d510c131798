#pragma once

#include <string>
#include <vector>

namespace ncap {

// Contact-angle solver for the planar blow-up cone balance. The production
// equation is the 1D reduction
//     R(theta) = (sin theta)^s * G(theta, s) - (1 + sigma) * G(pi/2, s),
// whose unique root in (0, pi/2] is theta(s, sigma) for sigma <= 0; positive
// sigma goes through the mirror identity theta(s, sigma) = pi - theta(s, -sigma).
// Two independent formulations (a wedge-balance residual evaluated at the
// contact point, and a ratio of two wedge integrals) are kept as
// cross-validation routes and never share quadrature code with the reduction.

struct AngleSolution {
    enum class Method { Reduction, DirectCone, RatioForm };

    double theta = 0.0;  // radians, in (0, pi)
    double s = 0.0;
    double sigma = 0.0;
    double residual = 0.0;  // final residual, normalized by the equation scale
    Method method = Method::Reduction;
    long evaluations = 0;  // outer quadrature invocations during the solve
};

using AngleMethod = AngleSolution::Method;

std::string method_name(AngleMethod m);
AngleMethod parse_method(const std::string& name);

// A(t, s) = integral_0^inf r dr / (r^2 + 2 r cos t + 1)^((2+s)/2), t in (0, pi/2].
// Computed after the shift u = r + cos t with an exact far-field tail.
// s = 1 is admitted here (and in cone_integral) for closed-form limit checks.
double inner_profile(double t, double s);

// Same value through the incomplete sine-power reduction
//     A = 1/s - cos t * (sin t)^-(1+s) * integral_0^t (sin psi)^s dpsi.
// Independent evaluation path, used for cross-checks only.
double inner_profile_sine_form(double t, double s);

// G(theta, s) = 2 * integral_0^theta A(t, s) dt, theta in (0, pi/2].
double cone_integral(double theta, double s);

// Reduction residual R(theta); strictly increasing in theta with
// R(0+) = -(1+sigma) G(pi/2,s) < 0 and R(pi/2) = -sigma G(pi/2,s) >= 0.
// Defined for sigma in (-1, 0]; positive sigma must go through the mirror
// identity first (domain error here).
double young_residual(double theta, double s, double sigma);

// Wedge integrals of the blow-up kernel |z|^-(2+s):
//   cone_a: over U_theta, singularity shifted to (0, 1);
//   cone_b: over L_theta, singularity shifted to the contact point e(theta).
// Both by angular sweep with exact radial segments; theta in (0, pi/2).
double cone_a(double theta, double s);
double cone_b(double theta, double s);

// Balance residual at the contact point e(theta):
//     integral over L_theta of |e - z|^-(2+s)  +  sigma * same over {x2 < 0},
// excluding the ball B_delta(e(theta)). The integrand is regular at distance
// sin(theta) from e(theta), so any delta below that leaves the value
// unchanged; larger delta is a domain error. Requires sigma in (-1, 0).
double direct_cone_residual(double theta, double s, double sigma, double delta);

// Root solve. For sigma <= 0, bisection over (0, pi/2] on the residual of the
// chosen formulation (bracket width <= tol at exit); sigma > 0 mirrors the
// solve at -sigma. |sigma| must stay below 1 - 1e-6 or the angle degenerates
// (config error). The reported residual is normalized by the magnitude of the
// balanced terms at the root, so it is dimensionless across methods.
AngleSolution solve_theta(double s, double sigma, double tol = 1e-10,
                          AngleMethod method = AngleMethod::Reduction);

// Reduction of the ambient dimension in the angle equation: the scaled slab
// integral ell^(2+s) * integral_R dw / (ell^2 + w^2)^((3+s)/2) must not depend
// on ell, and equals integral_R (1 + v^2)^-((3+s)/2) dv.
struct DimensionReductionReport {
    double s = 0.0;
    std::vector<double> ell;
    std::vector<double> scaled;    // one scaled slab integral per ell
    double reference = 0.0;        // the ell-free 1D integral
    double max_rel_deviation = 0.0;  // worst |scaled - reference| / reference
};

DimensionReductionReport dimension_reduction_check(double s, const std::vector<double>& ell);

}  // namespace ncap
