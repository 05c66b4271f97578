#pragma once

// Rayleigh block-fading downlink: path loss (r/r0)^-beta, Shannon capacity
// under a fixed INR, and the outage thresholds used by the caching policy.
// One channel power u ~ Exp(1) (and one distance) is drawn per delivery
// episode; the gain is static over the deadline T.

#include <cmath>
#include <stdexcept>

#include "fraccache/content.hpp"
#include "fraccache/rng.hpp"

namespace fraccache {

constexpr double kBitsPerMbit = 1e6;

struct ChannelParams {
    double psi = 0.0;          // transmit SNR, linear
    double upsilon = 0.0;      // INR, linear
    double bandwidth_hz = 0.0; // Hz
    double beta = 0.0;         // path-loss exponent
    double r0 = 1.0;           // path-loss reference distance, m

    ChannelParams(double psi_, double upsilon_, double bandwidth_hz_, double beta_,
                  double r0_)
        : psi(psi_), upsilon(upsilon_), bandwidth_hz(bandwidth_hz_), beta(beta_), r0(r0_) {
        if (!(psi > 0.0)) throw std::domain_error("ChannelParams: psi must be > 0");
        if (upsilon < 0.0) throw std::domain_error("ChannelParams: upsilon must be >= 0");
        if (!(bandwidth_hz > 0.0))
            throw std::domain_error("ChannelParams: bandwidth must be > 0");
        if (!(beta > 0.0)) throw std::domain_error("ChannelParams: beta must be > 0");
        if (!(r0 > 0.0)) throw std::domain_error("ChannelParams: r0 must be > 0");
    }

    // dB -> linear happens exactly once, here.
    static ChannelParams from_db(double psi_db, double upsilon_db, double bandwidth_mhz,
                                 double beta, double r0_m) {
        return ChannelParams(std::pow(10.0, psi_db / 10.0),
                             std::pow(10.0, upsilon_db / 10.0), bandwidth_mhz * 1e6,
                             beta, r0_m);
    }

    double path_gain(double r) const { return std::pow(r / r0, -beta); }
};

// C(u, r) = B log2(1 + psi u / ((r/r0)^beta (upsilon+1))), bit/s.
inline double capacity(double u, double r, const ChannelParams& ch) {
    if (!(r > 0.0)) throw std::domain_error("capacity: distance must be > 0");
    if (u < 0.0) throw std::domain_error("capacity: channel power must be >= 0");
    const double snr = ch.psi * u * ch.path_gain(r) / (ch.upsilon + 1.0);
    return ch.bandwidth_hz * std::log2(1.0 + snr);
}

// Delivered quality CT/A in Mbps, the unit the rest of the library works in.
inline double delivered_quality(double u, double r, const ContentLibrary& lib,
                                const ChannelParams& ch) {
    return capacity(u, r, ch) * lib.T / (lib.A * kBitsPerMbit);
}

// Scale factor of the outage threshold that is independent of distance:
// threshold(alpha, r) = outage_scale(alpha) * (r/r0)^beta.
inline double outage_scale(double alpha, const ContentLibrary& lib,
                           const ChannelParams& ch) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("outage_scale: alpha must be in [0, 1]");
    const double expo =
        lib.A * lib.q_max * kBitsPerMbit * (1.0 - alpha) / (lib.T * ch.bandwidth_hz);
    // expm1(x ln 2) = 2^x - 1 without cancellation near alpha = 1
    return (ch.upsilon + 1.0) / ch.psi * std::expm1(expo * M_LN2);
}

// Channel power below which the uncached fraction cannot be delivered at
// full quality within the deadline: C(k)T/A = q_max (1 - alpha).
inline double outage_threshold(double alpha, double r, const ContentLibrary& lib,
                               const ChannelParams& ch) {
    if (!(r > 0.0)) throw std::domain_error("outage_threshold: distance must be > 0");
    return outage_scale(alpha, lib, ch) * std::pow(r / ch.r0, ch.beta);
}

inline double sample_channel_power(CounterRng& rng) { return rng.exponential(); }

} // namespace fraccache
