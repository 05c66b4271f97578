#pragma once

// Closed-form and quadrature evaluation of the expected delivered quality,
// the per-content expected quality g(alpha, q), the policy objective, and
// the increment-rate curves the water-filling solver equalises.
//
// The semi-infinite channel-power integral is always truncated analytically
// at the outage threshold; the tail contributes q_max (1-alpha) e^-k exactly.
// For the disk laws the order of the radial and power integrals is swapped,
// which turns the radial factor into an incomplete-gamma closed form and
// leaves a single smooth 1-D integral.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fraccache/channel.hpp"
#include "fraccache/content.hpp"
#include "fraccache/distance.hpp"
#include "fraccache/gamma.hpp"
#include "fraccache/policy.hpp"
#include "fraccache/quadrature.hpp"

namespace fraccache {

// Internal quadrature tolerances; tighter than the public 1e-10/1e-9 scheme
// defaults so that finite-difference identities hold at 1e-6 relative.
constexpr double kAnalyticAbsTol = 3e-14;
constexpr double kAnalyticRelTol = 1e-13;

namespace detail {

// Geometric ladder of breakpoints so the first adaptive pass already
// resolves an exponential boundary layer of scale `scale` inside [a, b].
inline std::vector<double> decay_ladder(double a, double b, double scale) {
    std::vector<double> pts{a};
    if (scale > 0.0 && std::isfinite(scale)) {
        for (double p = scale / 16.0; p < b; p *= 2.0) {
            if (p > a && p < b) pts.push_back(p);
            if (pts.size() > 40) break;
        }
    }
    pts.push_back(b);
    return pts;
}

// Quality delivered when the SNR integrand variable is w = u / (r/r0)^beta;
// independent of the distance, which is what makes the swap work.
inline double quality_of_scaled_power(double w, const ContentLibrary& lib,
                                      const ChannelParams& ch) {
    return ch.bandwidth_hz * std::log2(1.0 + ch.psi * w / (ch.upsilon + 1.0)) * lib.T /
           (lib.A * kBitsPerMbit);
}

} // namespace detail

// Closed form of int_0^R e^{-l (r/r0)^beta} (2r/R^2) dr for the disk laws.
inline double uniform_disk_outage(double l, double R, double beta, double r0) {
    if (l < 0.0) throw std::domain_error("uniform_disk_outage: l must be >= 0");
    if (l == 0.0) return 1.0;
    const double s = 2.0 / beta;
    const double t = l * std::pow(R / r0, beta);
    return (r0 * r0 / (R * R)) * s * lower_incomplete_gamma(s, t) / std::pow(l, s);
}

// Same integral weighted by (r/r0)^beta; appears when the power integral is
// taken first. Equals -d/dl of the plain outage integral.
inline double uniform_disk_weighted_outage(double w, double R, double beta, double r0) {
    const double ratio = std::pow(R / r0, beta);
    if (w < 0.0) throw std::domain_error("uniform_disk_weighted_outage: w must be >= 0");
    if (w == 0.0) return 2.0 * ratio / (beta + 2.0);
    const double s = 1.0 + 2.0 / beta;
    const double t = w * ratio;
    return (2.0 * r0 * r0 / (beta * R * R)) * lower_incomplete_gamma(s, t) /
           std::pow(w, s);
}

// Generic quadrature route: int e^{-l (r/r0)^beta} f_R(r) dr over the support.
// Point masses are evaluated exactly.
inline double radial_outage_integral(double l, const DistanceModel& dist, double beta,
                                     double r0) {
    if (l < 0.0) throw std::domain_error("radial_outage_integral: l must be >= 0");
    if (dist.is_point_mass())
        return std::exp(-l * std::pow(dist.point_distance() / r0, beta));
    if (l == 0.0) return 1.0;
    const double lo = dist.min_radius();
    const double hi = dist.max_radius();
    const double decay_r = r0 * std::pow(1.0 / l, 1.0 / beta);
    auto pts = detail::decay_ladder(lo, hi, decay_r);
    auto res = integrate_partitioned(
        [&](double r) { return std::exp(-l * std::pow(r / r0, beta)) * dist.pdf(r); },
        pts, 1e-12, 1e-11);
    if (!res.converged)
        throw numerical_error("radial_outage_integral: quadrature did not converge");
    return res.value;
}

// E[min{CT/A, q_max (1-alpha)}] over channel power (and distance).
inline double expected_delivered_quality(double alpha, const DistanceModel& dist,
                                         const ContentLibrary& lib,
                                         const ChannelParams& ch) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("expected_delivered_quality: alpha must be in [0, 1]");
    if (alpha == 1.0) return 0.0;
    const double cap_q = lib.q_max * (1.0 - alpha);

    if (dist.is_point_mass()) {
        const double r = dist.point_distance();
        const double k = outage_threshold(alpha, r, lib, ch);
        auto body = [&](double u) {
            return delivered_quality(u, r, lib, ch) * std::exp(-u);
        };
        auto pts = detail::decay_ladder(0.0, k, 1.0);
        auto res = integrate_partitioned(body, pts, kAnalyticAbsTol, kAnalyticRelTol);
        if (!res.converged)
            throw numerical_error("expected_delivered_quality: quadrature did not converge");
        return res.value + cap_q * std::exp(-k);
    }

    const double l = outage_scale(alpha, lib, ch);
    if (dist.has_uniform_disk_law()) {
        const double R = dist.max_radius();
        auto body = [&](double w) {
            return detail::quality_of_scaled_power(w, lib, ch) *
                   uniform_disk_weighted_outage(w, R, ch.beta, ch.r0);
        };
        const double w_decay = std::pow(ch.r0 / R, ch.beta);
        auto pts = detail::decay_ladder(0.0, l, w_decay);
        auto res = integrate_partitioned(body, pts, kAnalyticAbsTol, kAnalyticRelTol);
        if (!res.converged)
            throw numerical_error("expected_delivered_quality: quadrature did not converge");
        return res.value + cap_q * uniform_disk_outage(l, R, ch.beta, ch.r0);
    }

    // Tabulated pdf: outer integral over the support, exact inner tail.
    auto at_r = [&](double r) {
        const double k = l * std::pow(r / ch.r0, ch.beta);
        auto body = [&](double u) {
            return delivered_quality(u, r, lib, ch) * std::exp(-u);
        };
        auto pts = detail::decay_ladder(0.0, k, 1.0);
        auto res = integrate_partitioned(body, pts, 1e-14, 1e-13);
        return res.value + cap_q * std::exp(-k);
    };
    auto outer = integrate_partitioned(
        [&](double r) { return at_r(r) * dist.pdf(r); },
        std::vector<double>{dist.min_radius(), dist.max_radius()}, 1e-12, 1e-11);
    if (!outer.converged)
        throw numerical_error("expected_delivered_quality: quadrature did not converge");
    return outer.value;
}

// g(alpha, q) = alpha q + E[min{CT/A, q_max (1-alpha)}].
inline double expected_content_quality(double alpha, double q, const DistanceModel& dist,
                                       const ContentLibrary& lib,
                                       const ChannelParams& ch) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("expected_content_quality: alpha must be in [0, 1]");
    if (alpha > 0.0 &&
        (q < lib.q_min * (1.0 - 1e-12) || q > lib.q_max * (1.0 + 1e-12)))
        throw std::domain_error("expected_content_quality: q out of [q_min, q_max]");
    return alpha * q + expected_delivered_quality(alpha, dist, lib, ch);
}

// Objective of Eq-(2) form, evaluated through the algebraic identity
// (1-alpha) min{CT/(A(1-alpha)), q_max} = min{CT/A, q_max(1-alpha)}, with the
// alpha = 1 term read as f_i q_i.
inline double policy_objective(const CachingPolicy& policy, const DistanceModel& dist,
                               const ContentLibrary& lib, const ChannelParams& ch) {
    if (policy.size() != lib.F)
        throw std::domain_error("policy_objective: policy size mismatch");
    const double usage = lib.cache_usage(policy.alpha, policy.q);
    if (usage > lib.M + 1e-9 * std::max(lib.M, 1.0))
        throw infeasible_policy(usage - lib.M);
    double total = 0.0;
    for (std::size_t i = 0; i < lib.F; ++i)
        total += lib.popularity[i] *
                 expected_content_quality(policy.alpha[i], policy.q[i], dist, lib, ch);
    return total;
}

// Shared shape W(x) of the increment rates: v_i(x) = f_i W(x), W decreasing
// from W(0) to W(q_max) = 0.
inline std::function<double(double)> increment_shape(const DistanceModel& dist,
                                                     const ContentLibrary& lib,
                                                     const ChannelParams& ch) {
    if (dist.is_point_mass()) {
        const double r = dist.point_distance();
        return [r, &lib, &ch](double x) {
            return -std::expm1(-outage_threshold(x / lib.q_max, r, lib, ch));
        };
    }
    if (dist.has_uniform_disk_law()) {
        const double R = dist.max_radius();
        return [R, &lib, &ch](double x) {
            return 1.0 - uniform_disk_outage(outage_scale(x / lib.q_max, lib, ch), R,
                                             ch.beta, ch.r0);
        };
    }
    return [&dist, &lib, &ch](double x) {
        return 1.0 -
               radial_outage_integral(outage_scale(x / lib.q_max, lib, ch), dist,
                                      ch.beta, ch.r0);
    };
}

inline double increment_rate_fixed(double x, std::size_t i, double r,
                                   const ContentLibrary& lib, const ChannelParams& ch) {
    if (i >= lib.F) throw std::domain_error("increment_rate_fixed: index out of range");
    if (x < 0.0 || x > lib.q_max * (1.0 + 1e-12))
        throw std::domain_error("increment_rate_fixed: x out of [0, q_max]");
    return lib.popularity[i] *
           -std::expm1(-outage_threshold(std::min(x / lib.q_max, 1.0), r, lib, ch));
}

inline double increment_rate_radial(double x, std::size_t i, const DistanceModel& dist,
                                    const ContentLibrary& lib, const ChannelParams& ch) {
    if (i >= lib.F) throw std::domain_error("increment_rate_radial: index out of range");
    if (x < 0.0 || x > lib.q_max * (1.0 + 1e-12))
        throw std::domain_error("increment_rate_radial: x out of [0, q_max]");
    return lib.popularity[i] * increment_shape(dist, lib, ch)(std::min(x, lib.q_max));
}

struct IncrementCurve {
    std::size_t index = 0;
    double popularity = 0.0;
    std::function<double(double)> shape; // W(x), shared across contents
    double shape_at_zero = 0.0;

    double rate(double x) const { return popularity * shape(x); }
    double rate_at_zero() const { return popularity * shape_at_zero; }
};

inline std::vector<IncrementCurve> increment_curves(const ContentLibrary& lib,
                                                    const ChannelParams& ch,
                                                    const DistanceModel& dist) {
    auto shape = increment_shape(dist, lib, ch);
    const double w0 = shape(0.0);
    std::vector<IncrementCurve> curves;
    curves.reserve(lib.F);
    for (std::size_t i = 0; i < lib.F; ++i)
        curves.push_back(IncrementCurve{i, lib.popularity[i], shape, w0});
    return curves;
}

} // namespace fraccache
