#pragma once

// Monte Carlo validation of the analytic objective. Every trial runs on its
// own counter-based stream derived from (seed, trial index), and the
// reduction is blocked so that any execution order reproduces the same
// estimate bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fraccache/analytics.hpp"
#include "fraccache/channel.hpp"
#include "fraccache/content.hpp"
#include "fraccache/distance.hpp"
#include "fraccache/optimizer.hpp"
#include "fraccache/policy.hpp"
#include "fraccache/rng.hpp"

namespace fraccache {

struct SimEstimate {
    double mean = 0.0;      // Mbps
    double std_error = 0.0; // Mbps
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double kahan_sum(const std::vector<double>& values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

inline std::vector<double> popularity_cdf(const ContentLibrary& lib) {
    std::vector<double> cdf(lib.F);
    double acc = 0.0;
    for (std::size_t i = 0; i < lib.F; ++i) {
        acc += lib.popularity[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

} // namespace detail

// One delivery episode. Draw order: content, distance, channel power.
inline double simulate_one_trial(const CachingPolicy& policy, const DistanceModel& dist,
                                 const ContentLibrary& lib, const ChannelParams& ch,
                                 const std::vector<double>& cdf, CounterRng& rng) {
    const double pick = rng.next_double();
    const std::size_t i =
        std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin();
    const double r = dist.sample(rng);
    const double u = sample_channel_power(rng);

    const double a = policy.alpha[i];
    if (a >= 1.0) return policy.q[i];
    // alpha q + (1-alpha) min{CT/(A(1-alpha)), q_max}, written without the
    // near-singular division
    const double dq = delivered_quality(u, r, lib, ch);
    return a * policy.q[i] + std::min(dq, (1.0 - a) * lib.q_max);
}

inline SimEstimate simulate_quality(const CachingPolicy& policy, const DistanceModel& dist,
                                    const ContentLibrary& lib, const ChannelParams& ch,
                                    std::uint64_t n_trials, std::uint64_t seed) {
    if (n_trials == 0) throw std::domain_error("simulate_quality: n_trials must be >= 1");
    if (policy.size() != lib.F)
        throw std::domain_error("simulate_quality: policy size mismatch");
    const double usage = lib.cache_usage(policy.alpha, policy.q);
    if (usage > lib.M + 1e-9 * std::max(lib.M, 1.0))
        throw infeasible_policy(usage - lib.M);

    const auto cdf = detail::popularity_cdf(lib);

    constexpr std::uint64_t kBlock = 4096;
    std::vector<double> block_sum, block_sum_sq;
    block_sum.reserve(n_trials / kBlock + 1);
    block_sum_sq.reserve(n_trials / kBlock + 1);
    for (std::uint64_t start = 0; start < n_trials; start += kBlock) {
        const std::uint64_t stop = std::min(start + kBlock, n_trials);
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t t = start; t < stop; ++t) {
            CounterRng rng(seed, t);
            const double v = simulate_one_trial(policy, dist, lib, ch, cdf, rng);
            s += v;
            s2 += v * v;
        }
        block_sum.push_back(s);
        block_sum_sq.push_back(s2);
    }

    const double n = static_cast<double>(n_trials);
    const double sum = detail::kahan_sum(block_sum);
    const double sum_sq = detail::kahan_sum(block_sum_sq);
    const double mean = sum / n;
    double variance = 0.0;
    if (n_trials > 1) variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return SimEstimate{mean, std::sqrt(variance / n), n_trials, seed};
}

// Solve under one distance law, measure under another.
inline SimEstimate cross_evaluate(const DistanceModel& opt_dist,
                                  const DistanceModel& eval_dist,
                                  const ContentLibrary& lib, const ChannelParams& ch,
                                  std::uint64_t n_trials, std::uint64_t seed) {
    const CachingPolicy policy = waterfill(lib, ch, opt_dist);
    return simulate_quality(policy, eval_dist, lib, ch, n_trials, seed);
}

} // namespace fraccache
