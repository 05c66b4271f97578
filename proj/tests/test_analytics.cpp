#include <doctest.h>

#include <cmath>
#include <vector>

#include "fraccache/analytics.hpp"
#include "fraccache/optimizer.hpp"
#include "fraccache/quadrature.hpp"
#include "fraccache/rng.hpp"

using namespace fraccache;

namespace {

ContentLibrary reference_library(double M = 5.2) {
    return ContentLibrary(zipf_popularity(20, 1.0), 0.2, 1.0, 1.0, 1.0, M);
}

ChannelParams reference_channel(double r0 = 1.0) {
    return ChannelParams::from_db(25.0, 5.0, 5.0, 3.0, r0);
}

// Mild operating point where e^-k stays well inside double range, used for
// the finite-difference identities.
ChannelParams mild_channel() { return reference_channel(5.0); }

} // namespace

TEST_CASE("expected delivered quality endpoints") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    DistanceModel disk{UniformDisk{60.0}};

    CHECK(expected_delivered_quality(1.0, fixed, lib, ch) == 0.0);
    CHECK(expected_delivered_quality(1.0, disk, lib, ch) == 0.0);

    // effectively infinite SNR saturates the min at q_max
    ChannelParams huge(1e12, ch.upsilon, ch.bandwidth_hz, ch.beta, ch.r0);
    CHECK(expected_delivered_quality(0.0, fixed, lib, huge) ==
          doctest::Approx(lib.q_max).epsilon(1e-6));

    CHECK_THROWS_AS(expected_delivered_quality(-0.01, fixed, lib, ch), std::domain_error);
    CHECK_THROWS_AS(expected_delivered_quality(1.01, fixed, lib, ch), std::domain_error);
}

TEST_CASE("expected delivered quality stays in [0, q_max(1-alpha)] and decreases") {
    auto lib = reference_library();
    auto ch = mild_channel();
    for (const DistanceModel& dm :
         {DistanceModel{FixedDistance{40.0}}, DistanceModel{UniformDisk{60.0}}}) {
        double prev = lib.q_max + 1.0;
        for (int j = 0; j <= 20; ++j) {
            const double a = j / 20.0;
            const double e = expected_delivered_quality(a, dm, lib, ch);
            CHECK(e >= 0.0);
            CHECK(e <= lib.q_max * (1.0 - a) + 1e-12);
            CHECK(e < prev + 1e-12);
            prev = e;
        }
    }
}

TEST_CASE("disk-law expectation matches a direct nested quadrature") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel disk{UniformDisk{60.0}};
    for (double alpha : {0.0, 0.2, 0.5, 0.9}) {
        const double got = expected_delivered_quality(alpha, disk, lib, ch);
        const double l = outage_scale(alpha, lib, ch);
        const double direct = integrate(
            [&](double r) {
                const double k = l * std::pow(r / ch.r0, ch.beta);
                double inner = lib.q_max * (1.0 - alpha) * std::exp(-k);
                if (k > 0.0)
                    inner += integrate(
                        [&](double u) {
                            return delivered_quality(u, r, lib, ch) * std::exp(-u);
                        },
                        0.0, std::min(k, 60.0), 1e-13, 1e-12);
                return inner * disk.pdf(r);
            },
            0.0, 60.0, 1e-11, 1e-10);
        CHECK(got == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("expected delivered quality matches a raw Monte Carlo over the fading") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    const double alpha = 0.5;
    const double analytic = expected_delivered_quality(alpha, fixed, lib, ch);

    const std::uint64_t n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < n; ++t) {
        CounterRng rng(424242, t);
        const double u = sample_channel_power(rng);
        const double v =
            std::min(delivered_quality(u, 40.0, lib, ch), lib.q_max * (1.0 - alpha));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double stderr_ =
        std::sqrt((sum_sq - n * mean * mean) / (n - 1.0) / double(n));
    CHECK(std::abs(mean - analytic) <= 3.0 * stderr_);
}

TEST_CASE("g endpoints") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    CHECK(expected_content_quality(1.0, lib.q_max, fixed, lib, ch) == lib.q_max);
    CHECK(expected_content_quality(0.0, 0.7, fixed, lib, ch) ==
          doctest::Approx(expected_delivered_quality(0.0, fixed, lib, ch)));
    CHECK_THROWS_AS(expected_content_quality(0.5, 0.05, fixed, lib, ch),
                    std::domain_error);
    CHECK_THROWS_AS(expected_content_quality(0.5, 1.5, fixed, lib, ch),
                    std::domain_error);
}

TEST_CASE("derivative of g in alpha at fixed x matches the closed forms") {
    auto lib = reference_library();
    auto ch = mild_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    DistanceModel disk{UniformDisk{60.0}};
    const double h = 1e-6;
    CounterRng rng(41);
    for (int t = 0; t < 40; ++t) {
        const double a = rng.uniform(0.01, 0.99);

        const double fd_fixed = (expected_delivered_quality(a + h, fixed, lib, ch) -
                                 expected_delivered_quality(a - h, fixed, lib, ch)) /
                                (2.0 * h);
        const double an_fixed =
            -lib.q_max * std::exp(-outage_threshold(a, 40.0, lib, ch));
        CHECK(std::abs(fd_fixed - an_fixed) <= 1e-6 * std::abs(an_fixed));

        const double fd_disk = (expected_delivered_quality(a + h, disk, lib, ch) -
                                expected_delivered_quality(a - h, disk, lib, ch)) /
                               (2.0 * h);
        const double an_disk =
            -lib.q_max *
            uniform_disk_outage(outage_scale(a, lib, ch), 60.0, ch.beta, ch.r0);
        CHECK(std::abs(fd_disk - an_disk) <= 1e-6 * std::abs(an_disk));
    }
}

TEST_CASE("g at fixed x is decreasing in alpha") {
    auto lib = reference_library();
    auto ch = mild_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    CounterRng rng(43);
    for (int t = 0; t < 30; ++t) {
        const double x = rng.uniform(0.05, 0.9) * lib.q_max;
        // alpha range keeping q = x/alpha inside [q_min, q_max]
        const double a_hi = std::min(1.0, x / lib.q_min);
        double a1 = rng.uniform(x / lib.q_max, a_hi);
        double a2 = rng.uniform(x / lib.q_max, a_hi);
        if (a1 > a2) std::swap(a1, a2);
        if (a2 - a1 < 1e-6) continue;
        // q = x / alpha stays within [q_min, q_max] by construction of a >= x/q_max
        const double g1 = expected_content_quality(a1, x / a1, fixed, lib, ch);
        const double g2 = expected_content_quality(a2, x / a2, fixed, lib, ch);
        CHECK(g1 > g2 - 1e-12);
    }
}

TEST_CASE("objective equals the per-content decomposition and checks feasibility") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};

    // everything cached at top quality
    ContentLibrary roomy = reference_library(25.0);
    CachingPolicy full;
    full.alpha.assign(20, 1.0);
    full.q.assign(20, 1.0);
    full.x.assign(20, 1.0);
    CHECK(policy_objective(full, fixed, roomy, ch) == doctest::Approx(1.0).epsilon(1e-12));

    // nothing cached: popularity sums to one
    CachingPolicy none;
    none.alpha.assign(20, 0.0);
    none.q.assign(20, 1.0);
    none.x.assign(20, 0.0);
    CHECK(policy_objective(none, fixed, lib, ch) ==
          doctest::Approx(expected_delivered_quality(0.0, fixed, lib, ch)).epsilon(1e-12));

    // infeasible policy reports its overshoot
    CHECK_THROWS_AS(policy_objective(full, fixed, lib, ch), infeasible_policy);
    try {
        policy_objective(full, fixed, lib, ch);
    } catch (const infeasible_policy& e) {
        CHECK(e.overshoot == doctest::Approx(20.0 - 5.2).epsilon(1e-12));
    }
}

TEST_CASE("objective matches an independent evaluation of the delivery form") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel fixed{FixedDistance{40.0}};

    // policy with assorted alpha and q < q_max entries, scaled to the budget
    CounterRng rng(51);
    CachingPolicy p;
    p.alpha.assign(lib.F, 0.0);
    p.q.assign(lib.F, lib.q_max);
    p.x.assign(lib.F, 0.0);
    double usage = 0.0;
    for (std::size_t i = 0; i < lib.F; ++i) {
        p.alpha[i] = rng.uniform(0.0, 1.0);
        p.q[i] = rng.uniform(lib.q_min, lib.q_max);
        usage += lib.A * p.alpha[i] * p.q[i];
    }
    const double scale = 0.99 * lib.M / usage;
    for (std::size_t i = 0; i < lib.F; ++i) {
        p.alpha[i] = std::min(1.0, p.alpha[i] * scale);
        p.x[i] = p.alpha[i] * p.q[i];
    }

    // Eq-(2)-style route: integrate (1-a) min{CT/(A(1-a)), q_max} directly,
    // with the min evaluated pointwise rather than split at the threshold
    double direct = 0.0;
    for (std::size_t i = 0; i < lib.F; ++i) {
        const double a = p.alpha[i];
        if (a >= 1.0) {
            direct += lib.popularity[i] * p.q[i];
            continue;
        }
        const double k = outage_threshold(a, 40.0, lib, ch);
        const double cut = std::max(k, 45.0);
        const double integral = integrate(
            [&](double u) {
                const double transcoded =
                    delivered_quality(u, 40.0, lib, ch) / (1.0 - a);
                return (1.0 - a) * std::min(transcoded, lib.q_max) * std::exp(-u);
            },
            0.0, cut, 1e-13, 1e-12);
        const double tail = (1.0 - a) * lib.q_max * std::exp(-cut);
        direct += lib.popularity[i] * (a * p.q[i] + integral + tail);
    }
    CHECK(policy_objective(p, fixed, lib, ch) ==
          doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("increment rate, fixed distance") {
    auto lib = reference_library();
    auto ch = reference_channel();
    CHECK(increment_rate_fixed(lib.q_max, 0, 40.0, lib, ch) == 0.0);
    // k(0) ~ 125, so v_i(0) is f_i to machine precision at this scale
    CHECK(increment_rate_fixed(0.0, 2, 40.0, lib, ch) ==
          doctest::Approx(lib.popularity[2]).epsilon(1e-14));
    CHECK_THROWS_AS(increment_rate_fixed(-0.1, 0, 40.0, lib, ch), std::domain_error);
    CHECK_THROWS_AS(increment_rate_fixed(1.1 * lib.q_max, 0, 40.0, lib, ch),
                    std::domain_error);
    CHECK_THROWS_AS(increment_rate_fixed(0.5, 99, 40.0, lib, ch), std::domain_error);
}

TEST_CASE("increment rate equals the derivative of g in x") {
    auto lib = reference_library();
    auto ch = mild_channel();
    DistanceModel fixed{FixedDistance{40.0}};
    DistanceModel disk{UniformDisk{60.0}};
    const double h = 1e-6;
    CounterRng rng(57);
    for (int t = 0; t < 25; ++t) {
        const double x = rng.uniform(0.01, 0.99) * lib.q_max;
        for (const DistanceModel* dm : {&fixed, &disk}) {
            auto G = [&](double xv) {
                return xv + expected_delivered_quality(xv / lib.q_max, *dm, lib, ch);
            };
            const double fd = (G(x + h) - G(x - h)) / (2.0 * h);
            const double v =
                dm->is_point_mass()
                    ? increment_rate_fixed(x, 0, dm->point_distance(), lib, ch)
                    : increment_rate_radial(x, 0, *dm, lib, ch);
            const double predicted = v / lib.popularity[0];
            CHECK(predicted > 0.0);
            CHECK(predicted < 1.0);
            CHECK(std::abs(fd - predicted) <= 1e-6 * predicted);
        }
    }
}

TEST_CASE("radial outage integral properties and closed form") {
    auto ch = reference_channel();
    DistanceModel disk{UniformDisk{60.0}};
    DistanceModel fixed{FixedDistance{40.0}};

    CHECK(radial_outage_integral(0.0, disk, 3.0, 1.0) == 1.0);
    CHECK_THROWS_AS(radial_outage_integral(-1e-9, disk, 3.0, 1.0), std::domain_error);

    // point mass degenerates to a single exponential
    CHECK(radial_outage_integral(2e-4, fixed, 3.0, 1.0) ==
          doctest::Approx(std::exp(-2e-4 * 64000.0)).epsilon(1e-12));

    // frozen independent evaluations, beta = 3, R = 60, r0 = 1
    CHECK(uniform_disk_outage(1e-4, 60.0, 3.0, 1.0) ==
          doctest::Approx(0.11639367974727526).epsilon(1e-12));
    CHECK(uniform_disk_outage(1e-2, 60.0, 3.0, 1.0) ==
          doctest::Approx(5.4025160427680187e-3).epsilon(1e-12));
    CHECK(uniform_disk_outage(1.0, 60.0, 3.0, 1.0) ==
          doctest::Approx(2.5076258137525934e-4).epsilon(1e-12));

    for (double l : {1e-4, 1e-2, 1.0}) {
        const double quad = radial_outage_integral(l, disk, 3.0, 1.0);
        const double closed = uniform_disk_outage(l, 60.0, 3.0, 1.0);
        CHECK(std::abs(quad - closed) < 1e-8);
    }

    // decreasing in l, and in R for the closed form
    double prev = 1.0;
    for (double l : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0}) {
        const double v = uniform_disk_outage(l, 60.0, 3.0, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(uniform_disk_outage(1e-3, 80.0, 3.0, 1.0) <
          uniform_disk_outage(1e-3, 60.0, 3.0, 1.0));
}

TEST_CASE("radial increment rate: two code paths agree and reduce to fixed") {
    auto lib = reference_library();
    auto ch = reference_channel();
    DistanceModel disk{UniformDisk{60.0}};
    DistanceModel fixed{FixedDistance{40.0}};
    CounterRng rng(61);

    CHECK(increment_rate_radial(lib.q_max, 0, disk, lib, ch) == 0.0);

    for (int t = 0; t < 20; ++t) {
        const double x = rng.uniform(0.0, 1.0) * lib.q_max;
        const double closed = increment_rate_radial(x, 1, disk, lib, ch);
        const double l = outage_scale(x / lib.q_max, lib, ch);
        const double generic =
            lib.popularity[1] * (1.0 - radial_outage_integral(l, disk, ch.beta, ch.r0));
        CHECK(std::abs(closed - generic) < 1e-8);

        CHECK(increment_rate_radial(x, 1, fixed, lib, ch) ==
              doctest::Approx(increment_rate_fixed(x, 1, 40.0, lib, ch)).epsilon(1e-12));
    }
}

TEST_CASE("increment curves share one shape across contents") {
    auto lib = reference_library();
    auto ch = mild_channel();
    DistanceModel disk{UniformDisk{60.0}};
    auto curves = increment_curves(lib, ch, disk);
    REQUIRE(curves.size() == lib.F);

    CHECK(curves[0].shape_at_zero == doctest::Approx(curves[0].shape(0.0)));
    for (std::size_t i = 0; i < curves.size(); ++i) {
        CHECK(curves[i].index == i);
        CHECK(curves[i].rate_at_zero() <= lib.popularity[i]);
        CHECK(curves[i].rate(lib.q_max) == 0.0);
        // v_i(x) / f_i is content-independent
        CHECK(curves[i].rate(0.4) / lib.popularity[i] ==
              doctest::Approx(curves[0].rate(0.4) / lib.popularity[0]).epsilon(1e-12));
    }
    // strictly decreasing on a grid
    for (int j = 1; j <= 10; ++j)
        CHECK(curves[0].rate(j * 0.1) < curves[0].rate((j - 1) * 0.1));
}
