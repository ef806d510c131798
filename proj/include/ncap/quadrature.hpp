#pragma once

#include <cmath>
#include <cstdlib>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace ncap {

// Adaptive Gauss-Kronrod 7-15 integration on finite intervals.
// Nodes/weights are the QUADPACK dqk15 constants; the error estimate is the
// QUADPACK one (scaled by the deviation integral resasc so it stays meaningful
// for integrands with large dynamic range).

namespace detail {

inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

// Gauss-7 weights aligned with the odd Kronrod nodes (indices 1,3,5) and the
// midpoint (index 7).
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

} // namespace detail

template <class F>
double gk15(F&& f, double a, double b, double& abserr) {
    using namespace detail;
    const double center = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - hlgth * gk_nodes[i]);
        fv[14 - i] = f(center + hlgth * gk_nodes[i]);
    }
    fv[7] = f(center);

    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[i] + fv[14 - i];
        resk += gk_wk[i] * pair;
        resabs += gk_wk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    resk += gk_wk[7] * fv[7];
    resabs += gk_wk[7] * std::abs(fv[7]);
    resg = gk_wg[0] * (fv[1] + fv[13]) + gk_wg[1] * (fv[3] + fv[11]) +
           gk_wg[2] * (fv[5] + fv[9]) + gk_wg[3] * fv[7];

    const double reskh = 0.5 * resk;
    double resasc = gk_wk[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += gk_wk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));

    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);

    abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        abserr = std::max(abserr, eps50 * resabs);
    return result;
}

struct QuadOptions {
    double rel_tol = 1e-12;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

// Integrates f over the consecutive intervals defined by `points` (sorted
// breakpoints), subdividing the worst interval until the summed error bound
// drops under max(abs_tol, rel_tol*|integral|). Throws if the interval budget
// runs out first.
template <class F>
double integrate(F&& f, std::span<const double> points, QuadOptions opt = {}) {
    struct Piece {
        double err, a, b, val;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    double sum = 0.0, errsum = 0.0;
    int used = 0;

    auto push = [&](double a, double b) {
        double e = 0.0;
        const double v = gk15(f, a, b, e);
        heap.push({e, a, b, v});
        sum += v;
        errsum += e;
        ++used;
    };

    if (points.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] <= points[i + 1]))
            throw std::invalid_argument("integrate: breakpoints must be sorted");
        if (points[i] < points[i + 1]) push(points[i], points[i + 1]);
    }
    if (heap.empty()) return 0.0;

    while (errsum > std::max(opt.abs_tol, opt.rel_tol * std::abs(sum))) {
        if (used + 2 > opt.max_intervals)
            throw std::runtime_error("integrate: interval budget exhausted");
        const Piece worst = heap.top();
        heap.pop();
        sum -= worst.val;
        errsum -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw std::runtime_error("integrate: interval too small to refine");
        push(worst.a, mid);
        push(mid, worst.b);
    }
    return sum;
}

template <class F>
double integrate(F&& f, double a, double b, QuadOptions opt = {}) {
    if (a == b) return 0.0;
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts, 2), opt);
}

template <class F>
double integrate(F&& f, std::initializer_list<double> points, QuadOptions opt = {}) {
    std::vector<double> pts(points);
    return integrate(std::forward<F>(f), std::span<const double>(pts.data(), pts.size()), opt);
}

} // namespace ncap
