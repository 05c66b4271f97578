#include <doctest.h>

#include <cmath>

#include "fraccache/analytics.hpp"
#include "fraccache/optimizer.hpp"
#include "fraccache/simulate.hpp"

using namespace fraccache;

namespace {

ContentLibrary reference_library(double M = 5.2) {
    return ContentLibrary(zipf_popularity(20, 1.0), 0.2, 1.0, 1.0, 1.0, M);
}

ChannelParams reference_channel(double r0 = 1.0) {
    return ChannelParams::from_db(25.0, 5.0, 5.0, 3.0, r0);
}

} // namespace

TEST_CASE("fully cached policy simulates to exactly q_max") {
    auto lib = reference_library(25.0);
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    CachingPolicy full;
    full.alpha.assign(lib.F, 1.0);
    full.q.assign(lib.F, lib.q_max);
    full.x.assign(lib.F, 1.0);
    auto est = simulate_quality(full, fixed, lib, ch, 5000, 42);
    CHECK(est.mean == lib.q_max);
    CHECK(est.std_error == 0.0);
    CHECK(est.n_trials == 5000);
    CHECK(est.seed == 42);
}

TEST_CASE("vanishing SNR delivers nothing") {
    auto lib = reference_library();
    ChannelParams dead(1e-9, 3.16, 5e6, 3.0, 1.0);
    DistanceModel fixed{FixedDistance{40.0}};
    CachingPolicy none;
    none.alpha.assign(lib.F, 0.0);
    none.q.assign(lib.F, lib.q_max);
    none.x.assign(lib.F, 0.0);
    auto est = simulate_quality(none, fixed, lib, dead, 20000, 7);
    CHECK(est.mean <= 1e-6);
}

TEST_CASE("bad inputs are rejected") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    CachingPolicy full;
    full.alpha.assign(lib.F, 1.0);
    full.q.assign(lib.F, lib.q_max);
    full.x.assign(lib.F, 1.0);
    CHECK_THROWS_AS(simulate_quality(full, fixed, lib, ch, 100, 1), infeasible_policy);
    CachingPolicy ok = baseline_whole_content(lib, ch, fixed);
    CHECK_THROWS_AS(simulate_quality(ok, fixed, lib, ch, 0, 1), std::domain_error);
}

TEST_CASE("per-trial quality stays within [0, q_max]") {
    auto lib = reference_library();
    auto ch = reference_channel(1.8);
    DistanceModel disk{UniformDisk{60.0}};
    auto policy = waterfill(lib, ch, disk);
    const auto cdf = detail::popularity_cdf(lib);
    for (std::uint64_t t = 0; t < 10000; ++t) {
        CounterRng rng(99, t);
        const double v = simulate_one_trial(policy, disk, lib, ch, cdf, rng);
        CHECK(v >= 0.0);
        CHECK(v <= lib.q_max + 1e-12);
    }
}

TEST_CASE("identical seeds reproduce the estimate bit for bit") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel disk{UniformDisk{60.0}};
    auto policy = waterfill(lib, ch, disk);
    auto a = simulate_quality(policy, disk, lib, ch, 50000, 123);
    auto b = simulate_quality(policy, disk, lib, ch, 50000, 123);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    auto c = simulate_quality(policy, disk, lib, ch, 50000, 124);
    CHECK(a.mean != c.mean);
}

TEST_CASE("standard error shrinks like 1/sqrt(n)") {
    auto lib = reference_library();
    auto ch = reference_channel(1.8);
    DistanceModel fixed{FixedDistance{40.0}};
    auto policy = waterfill(lib, ch, fixed);
    auto small = simulate_quality(policy, fixed, lib, ch, 50000, 5);
    auto large = simulate_quality(policy, fixed, lib, ch, 200000, 5);
    const double ratio = large.std_error / small.std_error;
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
}

TEST_CASE("simulation agrees with the analytic objective") {
    auto lib = reference_library();
    for (double r0 : {1.0, 1.8}) {
        auto ch = reference_channel(r0);
        for (const DistanceModel& dm :
             {DistanceModel{FixedDistance{40.0}}, DistanceModel{UniformDisk{60.0}}}) {
            for (int which = 0; which < 2; ++which) {
                const CachingPolicy policy = which == 0
                                                 ? waterfill(lib, ch, dm)
                                                 : baseline_whole_content(lib, ch, dm);
                const double obj = policy_objective(policy, dm, lib, ch);
                const auto est = simulate_quality(policy, dm, lib, ch, 200000, 2024);
                CHECK(std::abs(est.mean - obj) <= 3.0 * est.std_error + 1e-12);
            }
        }
    }
}

TEST_CASE("cross evaluation") {
    auto lib = reference_library();
    auto ch = reference_channel(1.8);
    DistanceModel fixed{FixedDistance{40.0}};
    DistanceModel disk{UniformDisk{60.0}};
    DistanceModel pois{PoissonDisk{0.002, 60.0}};
    const std::uint64_t n = 200000;

    // self pair tracks its own analytic objective
    auto self_est = cross_evaluate(fixed, fixed, lib, ch, n, 31);
    const double self_obj = policy_objective(waterfill(lib, ch, fixed), fixed, lib, ch);
    CHECK(std::abs(self_est.mean - self_obj) <= 3.0 * self_est.std_error);

    // the matched policy is at least as good as the mismatched one in its
    // own environment
    auto mismatched = cross_evaluate(disk, fixed, lib, ch, n, 33);
    const double both_sigma =
        3.0 * std::sqrt(self_est.std_error * self_est.std_error +
                        mismatched.std_error * mismatched.std_error);
    CHECK(self_est.mean >= mismatched.mean - both_sigma);

    // our poisson disk has the uniform-disk radial law by construction
    auto pois_est = cross_evaluate(pois, disk, lib, ch, n, 35);
    auto disk_est = cross_evaluate(disk, disk, lib, ch, n, 36);
    const double sigma =
        3.0 * std::sqrt(pois_est.std_error * pois_est.std_error +
                        disk_est.std_error * disk_est.std_error);
    CHECK(std::abs(pois_est.mean - disk_est.mean) <= sigma);
}
