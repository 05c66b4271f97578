#pragma once

// Caching policy: per-content fraction alpha_i, quality q_i, and the product
// x_i = alpha_i q_i that makes the cache constraint linear.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fraccache {

class infeasible_policy : public std::runtime_error {
public:
    infeasible_policy(double overshoot_mbit)
        : std::runtime_error("policy exceeds the cache size by " +
                             std::to_string(overshoot_mbit) + " Mbit"),
          overshoot(overshoot_mbit) {}
    double overshoot; // Mbit above the budget
};

struct CachingPolicy {
    std::vector<double> alpha; // fractions in [0, 1]
    std::vector<double> q;     // Mbps; by convention q_max where alpha = 0
    std::vector<double> x;     // x_i = alpha_i * q_i
    double mu_star = 0.0;      // final water level (0 for non-waterfill policies)
    double budget_used = 0.0;  // Mbit

    struct SolveStats {
        std::size_t iterations = 0;
        double residual = 0.0; // |sum x_i - M/A|
        bool refined = false;  // waterline refinement engaged
    } stats;

    std::size_t size() const { return alpha.size(); }
};

inline nlohmann::json policy_to_json(const CachingPolicy& p, double objective) {
    return nlohmann::json{{"alpha", p.alpha},
                          {"q", p.q},
                          {"x", p.x},
                          {"mu_star", p.mu_star},
                          {"budget_used", p.budget_used},
                          {"objective", objective}};
}

} // namespace fraccache
