#include "ncap/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ncap {

static void check_params(double s, int n, double lambda) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("kernel order s must lie in (0,1)");
    if (n != 2 && n != 3)
        throw std::invalid_argument("kernel dimension n must be 2 or 3");
    if (!(lambda >= 1.0))
        throw std::invalid_argument("kernel class constant lambda must be >= 1");
}

Kernel Kernel::fractional(double s, int n, double lambda) {
    check_params(s, n, lambda);
    return Kernel{Family::Fractional, s, std::numeric_limits<double>::infinity(), n, lambda};
}

Kernel Kernel::truncated(double s, double eps, int n, double lambda) {
    check_params(s, n, lambda);
    if (!(eps > 0.0))
        throw std::invalid_argument("truncation range eps must be positive");
    return Kernel{Family::TruncatedFractional, s, eps, n, lambda};
}

double Kernel::eval_radius(double r) const {
    if (!(r > 0.0)) throw std::domain_error("kernel singularity: evaluation at zero separation");
    if (family == Family::TruncatedFractional && r >= eps) return 0.0;
    return std::pow(r, -(n + s));
}

double Kernel::operator()(const Eigen::Vector2d& z) const {
    if (n != 2) throw std::domain_error("planar evaluation of a non-planar kernel");
    return eval_radius(z.norm());
}

double Kernel::operator()(const Eigen::Vector3d& z) const {
    if (n != 3) throw std::domain_error("3D evaluation of a planar kernel");
    return eval_radius(z.norm());
}

double Kernel::radial(double a, double b) const {
    if (!(a >= 0.0) || !(b >= a))
        throw std::domain_error("kernel radial segment must satisfy 0 <= a <= b");
    const double hi = std::min(b, range());
    if (hi <= a) return 0.0;
    if (a == 0.0) return std::numeric_limits<double>::infinity();
    const double upper = std::isinf(hi) ? 0.0 : std::pow(hi, -s);
    return (std::pow(a, -s) - upper) / s;
}

double blow_up(const Kernel& k, const Eigen::Vector2d& z) {
    const double r = z.norm();
    if (!(r > 0.0)) throw std::domain_error("kernel singularity: blow-up at zero separation");
    return std::pow(r, -(k.n + k.s));
}

Kernel Kernel::parse(const std::string& text, int n) {
    auto fail = [&] { throw std::invalid_argument("unrecognized kernel spec: " + text); };
    const auto colon = text.find(':');
    if (colon == std::string::npos) fail();
    const std::string head = text.substr(0, colon);

    double s = 0.0, eps = 0.0;
    bool have_s = false, have_eps = false;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) fail();
        const std::string key = item.substr(0, eq);
        size_t used = 0;
        double val = 0.0;
        try {
            val = std::stod(item.substr(eq + 1), &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != item.size() - eq - 1) fail();
        if (key == "s" && !have_s) {
            s = val;
            have_s = true;
        } else if (key == "eps" && !have_eps) {
            eps = val;
            have_eps = true;
        } else {
            fail();
        }
    }
    if (head == "fractional" && have_s && !have_eps) return fractional(s, n);
    if (head == "truncated" && have_s && have_eps) return truncated(s, eps, n);
    fail();
    return {};
}

std::string Kernel::to_string() const {
    char buf[96];
    if (family == Family::Fractional)
        std::snprintf(buf, sizeof buf, "fractional:s=%.17g", s);
    else
        std::snprintf(buf, sizeof buf, "truncated:s=%.17g,eps=%.17g", s, eps);
    return buf;
}

ClassCheck validate_class(const std::function<double(const Eigen::Vector2d&)>& eval, double s,
                          int n, double lambda, double eps, std::span<const double> sample_radii) {
    if (sample_radii.empty())
        throw std::invalid_argument("validate_class: need at least one sample radius");
    check_params(s, n, lambda);

    ClassCheck out;
    out.worst_ratio = 0.0;
    // A hair of multiplicative slack so the lambda = 1 equality case is not
    // failed on last-bit rounding.
    const double slack = 1.0 + 1e-12;
    static const double dirs[4] = {0.0, 0.9, 2.0, 4.1};

    for (double r : sample_radii) {
        if (!(r > 0.0)) throw std::invalid_argument("validate_class: radii must be positive");
        const double ref = std::pow(r, -(n + s));
        for (double phi : dirs) {
            const Eigen::Vector2d z = r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
            const double v = eval(z);
            const double v_neg = eval(-z);
            if (v != v_neg) {
                out.passed = false;
                out.worst_ratio = std::numeric_limits<double>::infinity();
                return out;
            }
            // Upper envelope everywhere; lower envelope only inside B_eps.
            double ratio = v / (lambda * ref);
            if (r < eps) {
                if (v <= 0.0)
                    ratio = std::numeric_limits<double>::infinity();
                else
                    ratio = std::max(ratio, ref / (lambda * v));
            }
            out.worst_ratio = std::max(out.worst_ratio, ratio);
            if (ratio > slack) out.passed = false;
        }
    }
    return out;
}

ClassCheck validate_class(const Kernel& k, std::span<const double> sample_radii) {
    if (k.n != 2)
        throw std::invalid_argument("validate_class samples planar directions; kernel must have n=2");
    return validate_class([&k](const Eigen::Vector2d& z) { return k(z); }, k.s, k.n, k.lambda,
                          k.range(), sample_radii);
}

} // namespace ncap
