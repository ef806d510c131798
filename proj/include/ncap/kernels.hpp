#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <span>
#include <string>

namespace ncap {

// Radial pair-interaction kernel. Two families:
//   Fractional            K(z) = |z|^-(n+s)
//   TruncatedFractional   K(z) = |z|^-(n+s) for 0 < |z| < eps, else 0
// lambda is the declared class constant for the two-sided comparability bound
// (metadata consumed by validate_class, not by evaluation).
struct Kernel {
    enum class Family { Fractional, TruncatedFractional };

    Family family = Family::Fractional;
    double s = 0.5;
    double eps = std::numeric_limits<double>::infinity();
    int n = 2;
    double lambda = 1.0;

    static Kernel fractional(double s, int n = 2, double lambda = 1.0);
    static Kernel truncated(double s, double eps, int n = 2, double lambda = 1.0);
    static Kernel parse(const std::string& text, int n = 2);
    std::string to_string() const;

    double eval_radius(double r) const;
    double operator()(const Eigen::Vector2d& z) const;
    double operator()(const Eigen::Vector3d& z) const;

    // Effective interaction range: eps for the truncated family, inf otherwise.
    double range() const {
        return family == Family::TruncatedFractional ? eps : std::numeric_limits<double>::infinity();
    }

    // int_a^b K(r w) r^(n-1) dr: the weight a radial segment [a,b] carries in a
    // polar integral. The exponent collapses to r^(-1-s) in every dimension.
    // Clips to the kernel range; a = 0 with b > 0 diverges and returns inf.
    double radial(double a, double b) const;
};

// Scaling limit K*(z) = lim_{r->0+} r^(n+s) K(rz) = |z|^-(n+s), the
// (-n-s)-homogeneous kernel both families blow up to.
double blow_up(const Kernel& k, const Eigen::Vector2d& z);

struct ClassCheck {
    bool passed = true;
    // Largest factor by which any sampled value strays from the pure power
    // law relative to the declared lambda envelope; 1 means the bounds are
    // tight, > 1 means a bound is violated.
    double worst_ratio = 1.0;
};

// Checks the kernel-class bounds at the sampled radii, in several directions,
// together with evenness at each sample:
//   1_(0,eps)(|z|) / (lambda |z|^(n+s))  <=  K(z)  <=  lambda / |z|^(n+s)
ClassCheck validate_class(const Kernel& k, std::span<const double> sample_radii);

// Same check for an arbitrary evaluation function (lets tests feed corrupted
// kernels that the Kernel type itself cannot represent).
ClassCheck validate_class(const std::function<double(const Eigen::Vector2d&)>& eval, double s,
                          int n, double lambda, double eps, std::span<const double> sample_radii);

} // namespace ncap
