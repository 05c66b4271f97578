#pragma once

// Content library: catalogue size, popularity law, quality-to-size map and
// the device cache budget. Units are fixed repo-wide: qualities in Mbps,
// sizes in Mbit (size = A * q with A in seconds), times in seconds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fraccache {

// f_i = i^-s / sum_j j^-s, non-increasing in i, sums to 1.
inline std::vector<double> zipf_popularity(std::size_t count, double exponent) {
    if (count == 0) throw std::domain_error("zipf_popularity: count must be >= 1");
    if (exponent < 0.0) throw std::domain_error("zipf_popularity: exponent must be >= 0");
    std::vector<double> p(count);
    for (std::size_t i = 0; i < count; ++i)
        p[i] = std::pow(static_cast<double>(i + 1), -exponent);
    const double norm = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= norm;
    return p;
}

// Normalise arbitrary positive weights into a probability vector.
inline std::vector<double> normalize_popularity(std::vector<double> weights) {
    if (weights.empty()) throw std::domain_error("normalize_popularity: empty weights");
    double norm = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::domain_error("normalize_popularity: weights must be > 0");
        norm += w;
    }
    for (double& w : weights) w /= norm;
    return weights;
}

inline double content_size(double quality_mbps, double size_coeff_s) {
    if (quality_mbps < 0.0) throw std::domain_error("content_size: quality must be >= 0");
    return size_coeff_s * quality_mbps;
}

struct ContentLibrary {
    std::size_t F = 0;              // number of contents
    std::vector<double> popularity; // non-increasing, sums to 1
    double q_min = 0.0;             // Mbps
    double q_max = 0.0;             // Mbps
    double A = 0.0;                 // s   (size = A*q Mbit)
    double T = 0.0;                 // s   (delivery deadline)
    double M = 0.0;                 // Mbit (device cache size)

    // Maps sorted position -> caller's original index. Identity when the
    // supplied popularity was already sorted.
    std::vector<std::size_t> original_index;

    ContentLibrary(std::vector<double> pop, double q_min_, double q_max_, double A_,
                   double T_, double M_)
        : F(pop.size()), q_min(q_min_), q_max(q_max_), A(A_), T(T_), M(M_) {
        if (F == 0) throw std::domain_error("ContentLibrary: need at least one content");
        if (!(q_min > 0.0) || !(q_max >= q_min))
            throw std::domain_error("ContentLibrary: require 0 < q_min <= q_max");
        if (!(A > 0.0)) throw std::domain_error("ContentLibrary: A must be > 0");
        if (!(T > 0.0)) throw std::domain_error("ContentLibrary: T must be > 0");
        if (M < 0.0) throw std::domain_error("ContentLibrary: M must be >= 0");

        double sum = 0.0;
        for (double p : pop) {
            if (!(p > 0.0))
                throw std::domain_error("ContentLibrary: popularity entries must be > 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::domain_error("ContentLibrary: popularity must sum to 1");

        original_index.resize(F);
        std::iota(original_index.begin(), original_index.end(), std::size_t{0});
        // Descending-popularity order is assumed everywhere downstream; sort
        // stably and remember the permutation so results map back.
        std::stable_sort(original_index.begin(), original_index.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a] > pop[b]; });
        popularity.resize(F);
        for (std::size_t i = 0; i < F; ++i) popularity[i] = pop[original_index[i]];
    }

    // Eq-style cache constraint: A * sum_i alpha_i q_i <= M.
    double cache_usage(const std::vector<double>& alpha, const std::vector<double>& q) const {
        double s = 0.0;
        for (std::size_t i = 0; i < F; ++i) s += alpha[i] * q[i];
        return A * s;
    }
    bool cache_feasible(const std::vector<double>& alpha, const std::vector<double>& q,
                        double slack = 1e-9) const {
        return cache_usage(alpha, q) <= M + slack * std::max(M, 1.0);
    }
};

} // namespace fraccache
