#pragma once

// Zeroth-order Bessel function (reference and piecewise approximation) and
// the complex error function family built on the Faddeeva function w(z).

#include "fastpsf/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace fastpsf {

using Complex = std::complex<double>;

namespace detail {

// Power series; used for a <= 8 where the largest term stays near 1e2.
inline double j0_series(double a)
{
    const double q = -0.25 * a * a;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && k > 2) break;
    }
    return sum;
}

// Miller backward recurrence normalized by J0 + 2*sum(J_2k) = 1.
inline double j0_miller(double a)
{
    int start = 2 * static_cast<int>((a + 40.0) / 2.0);
    double next = 0.0;     // J_{n+1}
    double current = 1e-30; // J_n
    double norm = 0.0;
    double j0 = 0.0;
    for (int n = start; n >= 1; --n) {
        const double previous = (2.0 * n / a) * current - next;
        next = current;
        current = previous; // now J_{n-1}
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * current;
        if (std::abs(current) > 1e250) {
            current *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 = current;
    norm += j0;
    return j0 / norm;
}

// Hankel asymptotic expansion; for a > 25 the smallest term is below 1e-20.
inline double j0_asymptotic(double a)
{
    double p = 0.0;
    double q = 0.0;
    double term = 1.0;
    double last = 2.0;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            const double odd = 2.0 * k - 1.0;
            term *= -(odd * odd) / (8.0 * k * a);
        }
        const double mag = std::abs(term);
        if (mag > last) break;
        last = mag;
        // P collects even orders with sign (-1)^(k/2), Q odd orders with (-1)^((k-1)/2)
        switch (k % 4) {
        case 0: p += term; break;
        case 1: q += term; break;
        case 2: p -= term; break;
        case 3: q -= term; break;
        }
        if (mag < 1e-20) break;
    }
    const double c = std::cos(a);
    const double s = std::sin(a);
    const double cos_chi = (c + s) * std::numbers::sqrt2 / 2.0;
    const double sin_chi = (s - c) * std::numbers::sqrt2 / 2.0;
    return std::sqrt(2.0 / (std::numbers::pi * a)) * (p * cos_chi - q * sin_chi);
}

} // namespace detail

/// Reference J0(a) for a >= 0, absolute error below 1e-12 on [0, 1e4].
inline double bessel_j0_ref(double a)
{
    detail::require(std::isfinite(a) && a >= 0.0, "bessel_j0_ref: argument must be finite and >= 0");
    if (a <= 8.0) return detail::j0_series(a);
    if (a <= 25.0) return detail::j0_miller(a);
    return detail::j0_asymptotic(a);
}

/// Piecewise J0 approximation: a truncated Maclaurin polynomial up to a = 1,
/// and beyond it the large-argument cosine with an amplitude linearized
/// about the operating point `alpha` plus a 1/a correction.
/// The two branches are not continuous at a = 1.
inline double bessel_j0_approx(double a, double alpha = 100.0)
{
    detail::require(std::isfinite(a) && a >= 0.0, "bessel_j0_approx: argument must be finite and >= 0");
    detail::require(std::isfinite(alpha) && alpha > 0.0, "bessel_j0_approx: alpha must be > 0");
    if (a <= 1.0) {
        const double a2 = a * a;
        return 1.0 - a2 / 4.0 + a2 * a2 / 64.0;
    }
    const double amplitude = 1.5 / std::sqrt(alpha) - 0.5 * a / (alpha * std::sqrt(alpha)) + 1.0 / a;
    return std::sqrt(2.0 / std::numbers::pi) * amplitude * std::cos(a - std::numbers::pi / 4.0);
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz), about 14 significant digits
/// everywhere (Gautschi continued fraction / Taylor scheme of Poppe & Wijers).
inline Complex faddeeva_w(Complex z)
{
    constexpr double factor = 1.12837916709551257388; // 2/sqrt(pi)
    const double xi = z.real();
    const double yi = z.imag();
    const double xabs = std::abs(xi);
    const double yabs = std::abs(yi);
    const double x = xabs / 6.3;
    const double y = yabs / 4.4;
    double qrho = x * x + y * y;
    double xquad = xabs * xabs - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;

    double u = 0.0;
    double v = 0.0;
    double u2 = 0.0;
    double v2 = 0.0;
    const bool near_origin = qrho < 0.085264;
    if (near_origin) {
        qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j;
        double ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = factor * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0;
        double h2 = 0.0;
        double qlambda = 0.0;
        int kapn = 0;
        int nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            h2 = 2.0 * h;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const bool use_taylor = h > 0.0;
        if (use_taylor) qlambda = std::pow(h2, kapn);
        double rx = 0.0;
        double ry = 0.0;
        double sx = 0.0;
        double sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            const double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (use_taylor && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (use_taylor) {
            u = factor * sx;
            v = factor * sy;
        } else {
            u = factor * rx;
            v = factor * ry;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }

    if (yi < 0.0) {
        if (near_origin) {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            const double w1 = 2.0 * std::exp(xquad);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (xi > 0.0) v = -v;
    } else if (xi < 0.0) {
        v = -v;
    }
    return {u, v};
}

/// Result of a complex error function evaluation. `clamped` is set when the
/// input lies outside |Re z|, |Im z| <= 30 or exp(-z^2) would overflow; the
/// value is then the asymptotic limit +-1 taken along the sign of Re z.
struct ErfValue {
    Complex value;
    bool clamped = false;
};

inline constexpr double kErfDomain = 30.0;

namespace detail {

inline constexpr double kExpOverflow = 700.0;

inline Complex erf_maclaurin(Complex z)
{
    const Complex z2 = z * z;
    Complex term = z;
    Complex sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z2 / static_cast<double>(n);
        const Complex add = term / (2.0 * n + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum * (2.0 / std::sqrt(std::numbers::pi));
}

// exp(-z^2) for moderate Re(-z^2).
inline Complex exp_minus_square(Complex z)
{
    const double x = z.real();
    const double y = z.imag();
    const double mag = std::exp(y * y - x * x);
    const double phase = -2.0 * x * y;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

inline void check_finite(Complex z, const char* who)
{
    require(std::isfinite(z.real()) && std::isfinite(z.imag()), std::string(who) + ": non-finite argument");
}

} // namespace detail

/// erf(z) with the clamping flag exposed.
inline ErfValue erf_complex_checked(Complex z)
{
    detail::check_finite(z, "erf_complex");
    const double x = z.real();
    const double y = z.imag();
    const double one = std::copysign(1.0, x);
    if (std::abs(x) > kErfDomain || std::abs(y) > kErfDomain) return {Complex(one, 0.0), true};

    // Evaluate in the first quadrant, then apply erf(-z) = -erf(z) and
    // erf(conj z) = conj erf(z) so both symmetries hold exactly.
    const Complex q(std::abs(x), std::abs(y));
    Complex e;
    if (std::abs(q) < 2.0) {
        e = detail::erf_maclaurin(q);
    } else {
        if (q.imag() * q.imag() - q.real() * q.real() > detail::kExpOverflow) return {Complex(one, 0.0), true};
        e = 1.0 - detail::exp_minus_square(q) * faddeeva_w(Complex(-q.imag(), q.real()));
    }
    if (std::signbit(x) != std::signbit(y)) e = std::conj(e);
    if (std::signbit(x)) e = -e;
    return {e, false};
}

inline Complex erf_complex(Complex z) { return erf_complex_checked(z).value; }

/// erfc(z) = 1 - erf(z), computed without the cancellation of 1 - erf for
/// Re z > 0. Clamps like erf_complex_checked.
inline ErfValue erfc_complex_checked(Complex z)
{
    detail::check_finite(z, "erfc_complex");
    const double x = z.real();
    const double y = z.imag();
    if (std::abs(x) > kErfDomain || std::abs(y) > kErfDomain) return {Complex(1.0 - std::copysign(1.0, x), 0.0), true};
    const Complex q(std::abs(x), std::abs(y));
    if (q.imag() * q.imag() - q.real() * q.real() > detail::kExpOverflow)
        return {Complex(1.0 - std::copysign(1.0, x), 0.0), true};
    const Complex e = detail::exp_minus_square(q) * faddeeva_w(Complex(-q.imag(), q.real()));
    if (!std::signbit(x)) return {std::signbit(y) ? std::conj(e) : e, false};
    // erfc(z) = 2 - erfc(-z), and -z has imaginary part of the opposite sign
    return {2.0 - (std::signbit(y) ? e : std::conj(e)), false};
}

inline Complex erfc_complex(Complex z) { return erfc_complex_checked(z).value; }

} // namespace fastpsf
