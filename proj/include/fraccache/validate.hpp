#pragma once

// Runtime oracle suite behind the `validate` subcommand: cross-checks the
// closed forms against quadrature, the solver against the grid oracle, and
// the analytic objective against Monte Carlo, on the active configuration.
// Prints one TAP-style line per check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fraccache/analytics.hpp"
#include "fraccache/config.hpp"
#include "fraccache/gamma.hpp"
#include "fraccache/optimizer.hpp"
#include "fraccache/quadrature.hpp"
#include "fraccache/rng.hpp"
#include "fraccache/simulate.hpp"

namespace fraccache {

inline int run_validation(const ExperimentConfig& cfg, std::ostream& out) {
    struct Check {
        std::string name;
        std::function<bool(std::string&)> fn;
    };

    const ContentLibrary lib = cfg.content_library();
    const ChannelParams ch = cfg.channel_params();
    const DistanceModel dist = cfg.distance_model();
    CounterRng rng(20240901);

    std::vector<Check> checks;

    checks.push_back({"zipf popularity normalised and non-increasing", [&](std::string& d) {
        auto p = zipf_popularity(cfg.F, cfg.zipf_exponent);
        double s = 0.0;
        bool mono = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            s += p[i];
            if (i > 0 && p[i] > p[i - 1] + 1e-15) mono = false;
        }
        d = "sum=" + std::to_string(s);
        return std::abs(s - 1.0) <= 1e-12 && mono;
    }});

    checks.push_back({"outage threshold solves C(k)T/A = q_max(1-alpha)", [&](std::string& d) {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const double alpha = rng.uniform(0.0, 0.999);
            const double r = rng.uniform(1.0, 120.0);
            const double k = outage_threshold(alpha, r, lib, ch);
            const double lhs = delivered_quality(k, r, lib, ch);
            const double rhs = lib.q_max * (1.0 - alpha);
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        d = "max rel err " + std::to_string(worst);
        return worst <= 1e-9;
    }});

    checks.push_back({"distance-free threshold matches k via (r/r0)^beta", [&](std::string& d) {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const double alpha = rng.uniform(0.0, 1.0);
            const double r = rng.uniform(1.0, 120.0);
            const double lhs =
                outage_scale(alpha, lib, ch) * std::pow(r / ch.r0, ch.beta);
            const double rhs = outage_threshold(alpha, r, lib, ch);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
        }
        d = "max rel err " + std::to_string(worst);
        return worst <= 1e-12;
    }});

    checks.push_back({"incomplete gamma vs quadrature and erf", [&](std::string& d) {
        const double g12 = lower_incomplete_gamma(1.0, 2.0);
        const double expect12 = -std::expm1(-2.0);
        const double ghalf = lower_incomplete_gamma(0.5, 1.7);
        const double erf_form = std::sqrt(M_PI) * std::erf(std::sqrt(1.7));
        const double g23 = lower_incomplete_gamma(2.0 / 3.0, 5.0);
        const double quad23 = integrate(
            [](double z) { return std::exp(-z) * std::pow(z, 2.0 / 3.0 - 1.0); }, 1e-300,
            5.0, 1e-12, 1e-12);
        std::ostringstream os;
        os << "g(1,2) err " << std::abs(g12 - expect12) << ", g(.5,1.7) err "
           << std::abs(ghalf - erf_form) << ", g(2/3,5) err " << std::abs(g23 - quad23);
        d = os.str();
        return std::abs(g12 - expect12) < 1e-14 && std::abs(ghalf - erf_form) < 1e-13 &&
               std::abs(g23 - quad23) < 1e-10;
    }});

    checks.push_back({"uniform-disk outage closed form vs quadrature", [&](std::string& d) {
        const DistanceModel disk{UniformDisk{1.5 * cfg.mean_distance_m}};
        double worst = 0.0;
        for (double l : {1e-6, 1e-4, 1e-2, 1.0, 10.0}) {
            const double cf = uniform_disk_outage(l, disk.max_radius(), ch.beta, ch.r0);
            const double qd = radial_outage_integral(l, disk, ch.beta, ch.r0);
            worst = std::max(worst, std::abs(cf - qd));
        }
        d = "max abs diff " + std::to_string(worst);
        return worst < 1e-8;
    }});

    checks.push_back({"derivative of g matches -q_max e^-k / -outage integral", [&](std::string& d) {
        // well-conditioned operating point for finite differences
        const ChannelParams mild(ch.psi, ch.upsilon, ch.bandwidth_hz, ch.beta, 5.0);
        const DistanceModel fixed{FixedDistance{cfg.mean_distance_m}};
        const DistanceModel disk{UniformDisk{1.5 * cfg.mean_distance_m}};
        const double h = 1e-6;
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            const double a = rng.uniform(0.01, 0.99);
            for (const DistanceModel* dm : {&fixed, &disk}) {
                const double fd = (expected_delivered_quality(a + h, *dm, lib, mild) -
                                   expected_delivered_quality(a - h, *dm, lib, mild)) /
                                  (2.0 * h);
                double analytic;
                if (dm->is_point_mass())
                    analytic = -lib.q_max * std::exp(-outage_threshold(
                                                a, dm->point_distance(), lib, mild));
                else
                    analytic = -lib.q_max * uniform_disk_outage(outage_scale(a, lib, mild),
                                                                dm->max_radius(),
                                                                mild.beta, mild.r0);
                worst = std::max(worst, std::abs(fd - analytic) / std::abs(analytic));
            }
        }
        d = "max rel err " + std::to_string(worst);
        return worst <= 1e-6;
    }});

    checks.push_back({"waterfill matches the grid oracle (F=2)", [&](std::string& d) {
        ContentLibrary small(normalize_popularity({0.7, 0.3}), lib.q_min, lib.q_max,
                             lib.A, lib.T, 0.6 * 2.0 * lib.A * lib.q_max);
        const auto wf = waterfill(small, ch, dist);
        const auto bf = brute_force_policy(small, ch, dist, 1e-3 * lib.q_max);
        const double ow = policy_objective(wf, dist, small, ch);
        const double ob = policy_objective(bf, dist, small, ch);
        d = "waterfill " + std::to_string(ow) + " vs oracle " + std::to_string(ob);
        return ow >= ob - 1e-4;
    }});

    checks.push_back({"water-level property and budget fill", [&](std::string& d) {
        const auto wf = waterfill(lib, ch, dist);
        auto curves = increment_curves(lib, ch, dist);
        const double tol = 1e-6 * curves[0].rate_at_zero();
        double worst = 0.0;
        for (std::size_t i = 0; i < lib.F; ++i) {
            if (wf.x[i] <= 0.0 || wf.x[i] >= lib.q_max) continue;
            worst = std::max(worst, std::abs(curves[i].rate(wf.x[i]) - wf.mu_star));
        }
        const bool filled = wf.stats.residual <= 1e-6 * std::max(lib.M / lib.A, 1e-12);
        d = "max |v_i - mu*| " + std::to_string(worst) + ", residual " +
            std::to_string(wf.stats.residual);
        return worst <= tol && filled;
    }});

    checks.push_back({"Monte Carlo agrees with the analytic objective", [&](std::string& d) {
        const auto wf = waterfill(lib, ch, dist);
        const std::uint64_t n = std::min<std::uint64_t>(cfg.n_trials, 200000);
        const auto est = simulate_quality(wf, dist, lib, ch, n, cfg.seed);
        const double obj = policy_objective(wf, dist, lib, ch);
        d = "objective " + std::to_string(obj) + ", mc " + std::to_string(est.mean) +
            " +- " + std::to_string(est.std_error);
        return std::abs(est.mean - obj) <= 3.0 * est.std_error + 1e-12;
    }});

    checks.push_back({"whole-content baseline never beats waterfill", [&](std::string& d) {
        const auto wf = waterfill(lib, ch, dist);
        const auto base = baseline_whole_content(lib, ch, dist);
        const double ow = policy_objective(wf, dist, lib, ch);
        const double ob = policy_objective(base, dist, lib, ch);
        d = "waterfill " + std::to_string(ow) + " vs baseline " + std::to_string(ob);
        return ow >= ob - 1e-9;
    }});

    int failures = 0;
    int idx = 0;
    for (auto& c : checks) {
        ++idx;
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        out << (ok ? "ok " : "not ok ") << idx << " - " << c.name;
        if (!detail.empty()) out << " (" << detail << ")";
        out << "\n";
        if (!ok) ++failures;
    }
    out << (failures == 0 ? "all checks passed\n"
                          : std::to_string(failures) + " check(s) failed\n");
    return failures;
}

} // namespace fraccache
