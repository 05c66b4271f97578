#pragma once

// Lower incomplete gamma, non-normalised: gamma(s, t) = int_0^t e^-z z^(s-1) dz.
// Series expansion for t < s + 1, Lentz continued fraction for the upper
// function otherwise. Both branches are standard (cf. Numerical Recipes 6.2)
// and are validated elsewhere against direct quadrature of the integrand.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraccache {

namespace detail {

inline double gamma_series(double s, double t) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= t / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    // sum * t^s e^-t; the exp underflows only when the result is ~0 anyway
    return sum * std::exp(s * std::log(t) - t);
}

// Continued fraction for the upper function Gamma(s, t), modified Lentz.
inline double upper_gamma_cf(double s, double t) {
    constexpr double tiny = 1e-300;
    double b = t + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return h * std::exp(s * std::log(t) - t);
}

} // namespace detail

inline double lower_incomplete_gamma(double s, double t) {
    if (!(s > 0.0)) throw std::domain_error("lower_incomplete_gamma: s must be > 0");
    if (t < 0.0) throw std::domain_error("lower_incomplete_gamma: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (t < s + 1.0) return detail::gamma_series(s, t);
    const double full = std::tgamma(s);
    if (t > 700.0 && t > 30.0 * s) return full; // upper tail below double range
    return full - detail::upper_gamma_cf(s, t);
}

} // namespace fraccache
