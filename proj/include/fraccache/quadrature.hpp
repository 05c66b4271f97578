#pragma once

// Globally adaptive Gauss-Kronrod (G7,K15) quadrature. Panels are kept in
// a max-heap by error estimate and the worst one is split until the summed
// error meets the requested tolerance. Node/weight values are the standard
// QUADPACK constants (Fullerton, 80-digit arithmetic).

#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace fraccache {

class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;     // summed per-panel error estimate
    bool converged = false;
    std::size_t panels = 0; // panels evaluated in total
};

namespace detail {

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// One K15 evaluation over [a, b] with the QUADPACK error heuristic.
template <class F>
Panel gk15(const F& f, double a, double b) {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(centre);
    double resg = wg[3] * fc;
    double resk = wgk[7] * fc;
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = f(centre - dx);
        fv2[j] = f(centre + dx);
        const double fsum = fv1[j] + fv2[j];
        resk += wgk[j] * fsum;
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * fsum;
    }
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
    resasc *= std::abs(half);
    resabs *= std::abs(half);

    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double epmach = 2.220446049250313e-16;
    constexpr double uflow = 2.2250738585072014e-308;
    if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);

    return Panel{a, b, resk * half, err};
}

} // namespace detail

// Integrate f over the partition given by `points` (ascending breakpoints).
// Seeding the heap with a partition lets callers mark known boundary layers.
template <class F>
QuadResult integrate_partitioned(const F& f, std::span<const double> points,
                                 double abs_tol = 1e-10, double rel_tol = 1e-9,
                                 std::size_t max_panels = 100000) {
    QuadResult out;
    if (points.size() < 2) return QuadResult{0.0, 0.0, true, 0};

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i] < points[i + 1])) continue;
        auto p = detail::gk15(f, points[i], points[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
        ++out.panels;
    }
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
           out.panels < max_panels && !heap.empty()) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) continue; // interval at ulp resolution
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        out.panels += 2;
    }
    out.value = total;
    out.error = total_err;
    out.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return out;
}

template <class F>
QuadResult integrate_full(const F& f, double a, double b, double abs_tol = 1e-10,
                          double rel_tol = 1e-9, std::size_t max_panels = 100000) {
    const double pts[2] = {a, b};
    return integrate_partitioned(f, pts, abs_tol, rel_tol, max_panels);
}

// Convenience wrapper: value or throw.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                 double rel_tol = 1e-9) {
    auto r = integrate_full(f, a, b, abs_tol, rel_tol);
    if (!r.converged)
        throw numerical_error("quadrature did not converge (error " +
                              std::to_string(r.error) + ")");
    return r.value;
}

} // namespace fraccache
