#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

// Scalar probability routines shared by the fitting, sampling, and
// forecasting code. Everything is plain double precision; the normal
// CDF is erfc-based and the quantile is a safeguarded Newton solve, so
// there are no tabulated coefficients to get subtly wrong.

namespace sixday::math {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kLnSqrt2Pi = 0.9189385332046727417803297364;  // ln sqrt(2 pi)
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;    // 1 / sqrt(2 pi)

inline double norm_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double log_norm_pdf(double z) {
    return -0.5 * z * z - kLnSqrt2Pi;
}

// Standard normal CDF. Accurate over the full double range where the
// result is representable (z down to about -37.5).
inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

// Upper tail 1 - Phi(z), computed without cancellation for large z.
inline double norm_sf(double z) {
    return 0.5 * std::erfc(z / kSqrt2);
}

// ln Phi(z); falls back to the asymptotic expansion once erfc underflows.
inline double log_norm_cdf(double z) {
    if (z > -36.0) {
        return std::log(norm_cdf(z));
    }
    // Phi(z) ~ phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6)
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return log_norm_pdf(z) - std::log(-z) + std::log(series);
}

// Inverse standard normal CDF on (0,1). Newton iteration on norm_cdf with
// a bisection bracket; converges to full precision in a handful of steps.
inline double norm_ppf(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("norm_ppf: argument must lie in (0,1)");
    }
    if (u == 0.5) return 0.0;
    // Work on the lower half for symmetric accuracy.
    const bool flipped = u > 0.5;
    const double p = flipped ? 1.0 - u : u;

    // Starting guess from the classic sqrt(-2 ln p) tail form.
    const double t = std::sqrt(-2.0 * std::log(p));
    double z = -(t - (2.30753 + 0.27061 * t) / (1.0 + t * (0.99229 + 0.04481 * t)));

    double lo = -40.0, hi = 0.5;
    for (int it = 0; it < 60; ++it) {
        const double f = norm_cdf(z) - p;
        if (f > 0.0) hi = z; else lo = z;
        const double dz = f / norm_pdf(z);
        double z_next = z - dz;
        if (!(z_next > lo && z_next < hi)) {
            z_next = 0.5 * (lo + hi);  // Newton left the bracket
        }
        if (std::abs(z_next - z) < 1e-15 * (1.0 + std::abs(z))) {
            z = z_next;
            break;
        }
        z = z_next;
    }
    return flipped ? -z : z;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x) by power series (x < a+1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction
// (x >= a+1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) {
        throw std::domain_error("gamma_q: requires a > 0, x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper-tail p-value of a chi-square statistic with dof degrees of freedom.
inline double chi2_pvalue(double chi2, int dof) {
    if (dof <= 0) throw std::domain_error("chi2_pvalue: dof must be positive");
    if (chi2 <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

}  // namespace sixday::math
