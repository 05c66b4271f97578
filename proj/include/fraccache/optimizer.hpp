#pragma once

// Water-filling solvers for the x_i = alpha_i q_i allocation, the exhaustive
// grid-search oracle, and the whole-content baseline policy.
//
// The outer bisection on the water level mu follows the textbook scheme:
// halve [0, v_1(0)] until the bracket is narrower than 1e-9 v_1(0), keep the
// feasible side. At strong-outage operating points e^-k underflows and the
// increment rates become numerically flat, so no representable mu separates
// allocations; the residual budget is then placed by a second, exact phase
// that bisects the waterline content's own allocation s and matches every
// other content to the same marginal (W(x_i) = (f_j/f_i) W(s)). All matching
// targets are scaled DOWN by popularity ratios, which keeps them inside the
// resolvable range of W even when W itself saturates at 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "fraccache/analytics.hpp"
#include "fraccache/channel.hpp"
#include "fraccache/content.hpp"
#include "fraccache/distance.hpp"
#include "fraccache/policy.hpp"

namespace fraccache {

namespace detail {

// Largest x in [0, q_max] with shape(x) >= target (shape decreasing,
// shape(q_max) = 0). Bisection to width 1e-10 q_max.
template <class Shape>
double invert_shape_bisect(const Shape& shape, double target, double q_max) {
    if (target <= 0.0) return q_max;
    if (shape(0.0) < target) return 0.0;
    double lo = 0.0, hi = q_max;
    while (hi - lo >= 1e-10 * q_max) {
        const double mid = 0.5 * (lo + hi);
        if (shape(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Closed-form inverse of W(x) = 1 - e^-k(x) for a fixed distance.
inline double invert_shape_fixed(double target, double r, const ContentLibrary& lib,
                                 const ChannelParams& ch) {
    if (target <= 0.0) return lib.q_max;
    const double k = -std::log1p(-std::min(target, 1.0)); // +inf when target == 1
    const double arg = k * ch.psi / (std::pow(r / ch.r0, ch.beta) * (ch.upsilon + 1.0));
    const double x =
        lib.q_max - lib.T * ch.bandwidth_hz / (lib.A * kBitsPerMbit) * std::log2(1.0 + arg);
    return std::clamp(x, 0.0, lib.q_max);
}

struct ShapeInverter {
    const ContentLibrary& lib;
    const ChannelParams& ch;
    const DistanceModel& dist;
    std::function<double(double)> shape;

    double operator()(double target) const {
        if (dist.is_point_mass())
            return invert_shape_fixed(target, dist.point_distance(), lib, ch);
        return invert_shape_bisect(shape, target, lib.q_max);
    }
};

} // namespace detail

// x with v_i(x) = mu, closed form. mu above v_i(0) is the caller's "leave at
// zero" branch and is rejected here; mu <= 0 saturates at q_max.
inline double invert_increment_rate_fixed(double mu, std::size_t i, double r,
                                          const ContentLibrary& lib,
                                          const ChannelParams& ch) {
    if (i >= lib.F)
        throw std::domain_error("invert_increment_rate_fixed: index out of range");
    if (mu <= 0.0) return lib.q_max;
    const double v0 = increment_rate_fixed(0.0, i, r, lib, ch);
    if (mu > v0 * (1.0 + 1e-12))
        throw std::domain_error("invert_increment_rate_fixed: mu above v_i(0)");
    return detail::invert_shape_fixed(std::min(mu / lib.popularity[i], 1.0), r, lib, ch);
}

// Bisection counterpart for radial models (no analytic inverse there).
inline double invert_increment_rate_radial(double mu, std::size_t i,
                                           const DistanceModel& dist,
                                           const ContentLibrary& lib,
                                           const ChannelParams& ch) {
    if (i >= lib.F)
        throw std::domain_error("invert_increment_rate_radial: index out of range");
    if (mu <= 0.0) return lib.q_max;
    auto shape = increment_shape(dist, lib, ch);
    const double v0 = lib.popularity[i] * shape(0.0);
    if (mu > v0 * (1.0 + 1e-12))
        throw std::domain_error("invert_increment_rate_radial: mu above v_i(0)");
    return detail::invert_shape_bisect(shape, mu / lib.popularity[i], lib.q_max);
}

inline CachingPolicy waterfill(const ContentLibrary& lib, const ChannelParams& ch,
                               const DistanceModel& dist) {
    const std::size_t F = lib.F;
    const double q_max = lib.q_max;
    const double budget = lib.M / lib.A;

    CachingPolicy policy;
    policy.alpha.assign(F, 0.0);
    policy.q.assign(F, q_max);
    policy.x.assign(F, 0.0);

    auto finish = [&](std::vector<double> x, double mu, std::size_t iters,
                      bool refined) {
        double sum = 0.0;
        for (std::size_t i = 0; i < F; ++i) {
            policy.x[i] = x[i];
            policy.alpha[i] = std::clamp(x[i] / q_max, 0.0, 1.0);
            sum += x[i];
        }
        policy.mu_star = mu;
        policy.budget_used = lib.A * sum;
        policy.stats = {iters, std::abs(sum - budget), refined};
        return policy;
    };

    // Everything fits: cache the whole library at top quality.
    if (lib.A * static_cast<double>(F) * q_max <= lib.M)
        return finish(std::vector<double>(F, q_max), 0.0, 0, false);

    auto shape = increment_shape(dist, lib, ch);
    const double w0 = shape(0.0);
    detail::ShapeInverter invert{lib, ch, dist, shape};

    const auto& f = lib.popularity;
    const double v1_0 = f[0] * w0;

    std::size_t iters = 0;
    auto alloc = [&](double mu) {
        std::vector<double> x(F, 0.0);
        for (std::size_t i = 0; i < F; ++i) {
            if (mu > f[i] * w0) continue;
            x[i] = invert(mu / f[i]);
        }
        return x;
    };
    auto total = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    };

    std::vector<double> x(F, 0.0);
    if (v1_0 > 0.0) {
        double a = 0.0, b = v1_0;
        const double eps = 1e-9 * v1_0;
        while (b - a >= eps) {
            const double mu = 0.5 * (a + b);
            if (total(alloc(mu)) > budget)
                a = mu;
            else
                b = mu;
            ++iters;
        }
        x = alloc(b);
        const double fill_tol = 1e-9 * std::max(budget, q_max);
        if (budget - total(x) <= fill_tol) return finish(std::move(x), b, iters, false);
    }

    // Waterline refinement: j* is the least-popular content that is already
    // active at this budget; bisect its allocation s directly.
    std::size_t jstar = 0;
    for (std::size_t j = 1; j < F; ++j) {
        double smin = 0.0;
        for (std::size_t i = 0; i < j; ++i) smin += invert((f[j] / f[i]) * w0);
        if (smin <= budget)
            jstar = j;
        else
            break;
    }
    auto matched = [&](double s) {
        const double ws = shape(s);
        std::vector<double> xv(F, 0.0);
        xv[jstar] = s;
        for (std::size_t i = 0; i < F; ++i) {
            if (i == jstar) continue;
            const double target = (f[jstar] / f[i]) * ws;
            if (i > jstar && target >= w0) continue;
            xv[i] = invert(target);
        }
        return xv;
    };
    double lo = 0.0, hi = q_max;
    for (int it = 0; it < 200 && hi - lo > 4e-17 * q_max; ++it) {
        const double s = 0.5 * (lo + hi);
        if (total(matched(s)) > budget)
            hi = s;
        else
            lo = s;
        ++iters;
    }
    x = matched(lo);
    return finish(std::move(x), f[jstar] * shape(lo), iters, true);
}

// Exhaustive oracle: grid over the budget simplex in x (the last coordinate
// absorbs the remainder exactly), then a q-level sweep around the best x to
// confirm top-quality dominance empirically. Exponential in F.
inline CachingPolicy brute_force_policy(const ContentLibrary& lib, const ChannelParams& ch,
                                        const DistanceModel& dist, double grid_step) {
    const std::size_t F = lib.F;
    if (F > 4)
        throw std::invalid_argument("brute_force_policy: refusing F > 4 (exponential cost)");
    if (!(grid_step > 0.0))
        throw std::domain_error("brute_force_policy: grid_step must be > 0");

    const double q_max = lib.q_max;
    const double budget = std::min(lib.M / lib.A, static_cast<double>(F) * q_max);
    const std::size_t n = std::max<std::size_t>(1, std::llround(q_max / grid_step));
    const double h = q_max / static_cast<double>(n);

    // G(x) = g(x/q_max, q_max); shared by all contents.
    std::vector<double> g_grid(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        g_grid[j] = expected_content_quality(static_cast<double>(j) * h / q_max, q_max,
                                             dist, lib, ch);
    std::map<long long, double> g_last; // keyed by the grid-sum index
    auto g_of_last = [&](long long jsum, double value) {
        auto it = g_last.find(jsum);
        if (it != g_last.end()) return it->second;
        const double g = expected_content_quality(std::clamp(value / q_max, 0.0, 1.0),
                                                  q_max, dist, lib, ch);
        g_last.emplace(jsum, g);
        return g;
    };

    std::vector<double> best_x(F, 0.0);
    double best_val = -1.0;
    std::vector<std::size_t> idx(F > 1 ? F - 1 : 0, 0);
    std::vector<double> cur(F, 0.0);

    auto consider = [&](long long jsum, double partial_sum, double partial_val) {
        const double last = budget - partial_sum;
        if (last < -1e-12 || last > q_max * (1.0 + 1e-12)) return;
        cur[F - 1] = std::clamp(last, 0.0, q_max);
        const double val = partial_val + lib.popularity[F - 1] * g_of_last(jsum, cur[F - 1]);
        if (val > best_val) {
            best_val = val;
            best_x = cur;
        }
    };

    std::function<void(std::size_t, long long, double, double)> recurse =
        [&](std::size_t d, long long jsum, double partial_sum, double partial_val) {
            if (d + 1 == F) {
                consider(jsum, partial_sum, partial_val);
                return;
            }
            for (std::size_t j = 0; j <= n; ++j) {
                const double xj = static_cast<double>(j) * h;
                if (partial_sum + xj > budget + 1e-12) break;
                cur[d] = xj;
                recurse(d + 1, jsum + static_cast<long long>(j), partial_sum + xj,
                        partial_val + lib.popularity[d] * g_grid[j]);
            }
        };
    recurse(0, 0, 0.0, 0.0);

    // q-level sweep at the best x: alpha_i = x_i / q_i must stay <= 1.
    const double q_levels[3] = {lib.q_min, 0.5 * (lib.q_min + lib.q_max), lib.q_max};
    std::vector<double> best_q(F, q_max);
    std::vector<std::size_t> combo(F, 2);
    auto eval_combo = [&]() {
        double val = 0.0;
        std::vector<double> qv(F);
        for (std::size_t i = 0; i < F; ++i) {
            qv[i] = q_levels[combo[i]];
            const double a = best_x[i] > 0.0 ? best_x[i] / qv[i] : 0.0;
            if (a > 1.0 + 1e-12) return std::pair{false, 0.0};
            val += lib.popularity[i] *
                   expected_content_quality(std::min(a, 1.0), qv[i], dist, lib, ch);
        }
        return std::pair{true, val};
    };
    std::size_t n_combos = 1;
    for (std::size_t i = 0; i < F; ++i) n_combos *= 3;
    for (std::size_t mask = 0; mask < n_combos; ++mask) {
        std::size_t m = mask;
        for (std::size_t i = 0; i < F; ++i) {
            combo[i] = m % 3;
            m /= 3;
        }
        auto [ok, val] = eval_combo();
        if (ok && val > best_val + 1e-15) {
            best_val = val;
            for (std::size_t i = 0; i < F; ++i) best_q[i] = q_levels[combo[i]];
        }
    }

    CachingPolicy policy;
    policy.q = best_q;
    policy.x = best_x;
    policy.alpha.resize(F);
    double sum = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
        policy.alpha[i] =
            best_x[i] > 0.0 ? std::min(best_x[i] / best_q[i], 1.0) : 0.0;
        policy.x[i] = policy.alpha[i] * best_q[i];
        sum += policy.x[i];
    }
    policy.mu_star = 0.0;
    policy.budget_used = lib.A * sum;
    policy.stats = {0, std::abs(sum - budget), false};
    return policy;
}

// Conventional scheme: whole contents only (alpha in {0, 1}). Caching at
// quality q beats streaming iff q exceeds the expected delivered quality of
// an uncached content, so fill by popularity at q_max and give any leftover
// to the next content when that test passes.
inline CachingPolicy baseline_whole_content(const ContentLibrary& lib,
                                            const ChannelParams& ch,
                                            const DistanceModel& dist) {
    const std::size_t F = lib.F;
    const double e_uncached = expected_delivered_quality(0.0, dist, lib, ch);

    CachingPolicy policy;
    policy.alpha.assign(F, 0.0);
    policy.q.assign(F, lib.q_max);
    policy.x.assign(F, 0.0);

    double remaining = lib.M;
    const double full_cost = lib.A * lib.q_max;
    for (std::size_t i = 0; i < F; ++i) {
        if (remaining >= full_cost * (1.0 - 1e-12)) {
            policy.alpha[i] = 1.0;
            policy.q[i] = lib.q_max;
            remaining -= full_cost;
            continue;
        }
        const double q_left = remaining / lib.A;
        if (q_left >= lib.q_min && q_left > e_uncached) {
            policy.alpha[i] = 1.0;
            policy.q[i] = std::min(q_left, lib.q_max);
        }
        break; // leftover spent (or unusable); everything less popular streams
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
        policy.x[i] = policy.alpha[i] * policy.q[i];
        sum += policy.x[i];
    }
    policy.mu_star = 0.0;
    policy.budget_used = lib.A * sum;
    return policy;
}

} // namespace fraccache
