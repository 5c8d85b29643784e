#pragma once

// Closed-form evaluation of the Hankel diffraction integral with the
// piecewise J0 approximation substituted for J0.
//
// Inner branch (2 pi k r <= 1): the polynomial part of the approximation
// yields Gaussian moments  int r^(2n+1) exp(j nu r^2) dr,  n = 0, 1, 2.
// Outer branch: the cosine part splits into exp(+-j 2 pi k r) and yields
// oscillatory moments  int r^m exp(j (nu r^2 + gamma r)) dr,  m = 0, 1, 2,
// all reducible to the erf kernel K by completing the square.
//
// Everything is parameterized by the quadratic phase coefficient nu
// (rad/m^2); for a pure defocus pupil nu = 2 C_d / R^2.

#include "fastpsf/errors.hpp"
#include "fastpsf/parallel.hpp"
#include "fastpsf/pupil.hpp"
#include "fastpsf/radial_psf.hpp"
#include "fastpsf/special_functions.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace fastpsf {

/// |nu| * hi^2 below which Gaussian moments switch to a 4-term series in nu.
inline constexpr double kTaylorSwitch = 1e-4;
/// Upper |nu| * hi^2 for which the linear-phase series route is allowed.
inline constexpr double kSeriesRouteMaxPhase = 0.2;
/// Largest tolerated cancellation factor of the erf-route recurrences.
inline constexpr double kErfRouteMaxAmplification = 1e4;

/// Instrumentation counters; pass a pointer through ClosedFormOptions.
struct EvalStats {
    std::atomic<std::uint64_t> primitive_calls{0};
    std::atomic<std::uint64_t> k_samples{0};
};

namespace detail {

inline Complex unit_phase(double phi) { return {std::cos(phi), std::sin(phi)}; }

// e^{j b} - e^{j a} without cancellation for b close to a.
inline Complex phase_difference(double b, double a)
{
    return Complex(0.0, 2.0 * std::sin(0.5 * (b - a))) * unit_phase(0.5 * (a + b));
}

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// sum_{i > n} w^i / i!
inline Complex exp_tail(int n, Complex w)
{
    if (std::abs(w) < 2.0) {
        Complex term = 1.0;
        for (int i = 1; i <= n + 1; ++i) term *= w / static_cast<double>(i);
        Complex sum = term;
        for (int i = n + 2; i < 200; ++i) {
            term *= w / static_cast<double>(i);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    Complex partial = 1.0;
    Complex term = 1.0;
    for (int i = 1; i <= n; ++i) {
        term *= w / static_cast<double>(i);
        partial += term;
    }
    return std::exp(w) - partial;
}

// int_0^U u^n e^{j nu u} du = n! / (-j nu)^(n+1) * e^{j nu U} * tail_n(-j nu U), nu > 0
inline Complex gaussian_antiderivative(int n, double U, double nu)
{
    const Complex w(0.0, -nu * U);
    const Complex scale = factorial(n) / std::pow(Complex(0.0, -nu), n + 1);
    return scale * unit_phase(nu * U) * exp_tail(n, w);
}

inline Complex gaussian_moment_series(int n, double lo, double hi, double nu)
{
    Complex sum = 0.0;
    Complex coeff = 1.0; // (j nu)^p / p!
    for (int p = 0; p < 4; ++p) {
        const int e = 2 * n + 2 * p + 2;
        sum += coeff * ((std::pow(hi, e) - std::pow(lo, e)) / e);
        coeff *= Complex(0.0, nu) / static_cast<double>(p + 1);
    }
    return sum;
}

inline Complex gaussian_moment_exact(int n, double lo, double hi, double nu)
{
    if (nu < 0.0) return std::conj(gaussian_moment_exact(n, lo, hi, -nu));
    return 0.5 * (gaussian_antiderivative(n, hi * hi, nu) - gaussian_antiderivative(n, lo * lo, nu));
}

// int_lo^hi r^n e^{j gamma r} dr
inline Complex linear_phase_moment(int n, double lo, double hi, double gamma)
{
    const double g = std::abs(gamma) * hi;
    if (g <= 8.0) {
        Complex sum = 0.0;
        Complex coeff = 1.0; // (j gamma)^q / q!
        double hp = std::pow(hi, n + 1);
        double lp = std::pow(lo, n + 1);
        for (int q = 0; q < 200; ++q) {
            const Complex add = coeff * ((hp - lp) / (n + q + 1));
            sum += add;
            if (gamma == 0.0) break;
            if (q > g + 2.0 && std::abs(add) < 1e-18 * std::abs(sum)) break;
            coeff *= Complex(0.0, gamma) / static_cast<double>(q + 1);
            hp *= hi;
            lp *= lo;
        }
        return sum;
    }
    // e^{j gamma r} sum_i (-1)^i n!/(n-i)! r^(n-i) / (j gamma)^(i+1)
    const Complex inv = 1.0 / Complex(0.0, gamma);
    auto antiderivative = [&](double r) {
        Complex sum = 0.0;
        Complex pw = inv;
        double falling = 1.0;
        for (int i = 0; i <= n; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            sum += sign * falling * std::pow(r, n - i) * pw;
            falling *= (n - i);
            pw *= inv;
        }
        return unit_phase(gamma * r) * sum;
    };
    return antiderivative(hi) - antiderivative(lo);
}

// Expands exp(j nu r^2) in powers of nu around the linear phase; accurate
// for |nu| hi^2 <= kSeriesRouteMaxPhase.
inline Complex oscillatory_series(int m, double lo, double hi, double gamma, double nu)
{
    const double x = std::abs(nu) * hi * hi;
    int order = 3;
    while (order < 12 && std::pow(x, order + 1) / factorial(order + 1) >= 1e-17) ++order;
    Complex sum = 0.0;
    Complex coeff = 1.0;
    for (int p = 0; p <= order; ++p) {
        sum += coeff * linear_phase_moment(m + 2 * p, lo, hi, gamma);
        coeff *= Complex(0.0, nu) / static_cast<double>(p + 1);
    }
    return sum;
}

// Shared pieces of K for nu > 0: prefactor sqrt(pi) / (2 sqrt(-j nu)) and
// w evaluated on the ray exp(j pi / 4) sqrt(nu) t, t >= 0, where
// exp(-z^2) is unimodular and w never overflows.
struct KernelGeometry {
    double root;
    Complex prefactor;
    double shift; // gamma / (2 nu)

    KernelGeometry(double gamma, double nu)
        : root(std::sqrt(nu)),
          prefactor(std::sqrt(std::numbers::pi) /
                    (2.0 * root * Complex(std::numbers::sqrt2 / 2.0, -std::numbers::sqrt2 / 2.0))),
          shift(gamma / (2.0 * nu))
    {
    }

    Complex w_ray(double t) const
    {
        const double a = root * t * std::numbers::sqrt2 / 2.0;
        return faddeeva_w(Complex(a, a));
    }
};

inline Complex kernel_point(double r, double gamma, double nu)
{
    const KernelGeometry geo(gamma, nu);
    const double s = r + geo.shift;
    const Complex edge = unit_phase(-gamma * gamma / (4.0 * nu));
    const Complex here = unit_phase(nu * r * r + gamma * r);
    // erf(z) = 1 - erfc(z) for s >= 0, erfc(-z) - 1 otherwise
    if (s >= 0.0) return geo.prefactor * (edge - here * geo.w_ray(s));
    return geo.prefactor * (here * geo.w_ray(-s) - edge);
}

inline Complex kernel_difference(double lo, double hi, double gamma, double nu)
{
    const KernelGeometry geo(gamma, nu);
    const double s_lo = lo + geo.shift;
    const double s_hi = hi + geo.shift;
    const Complex ph_lo = unit_phase(nu * lo * lo + gamma * lo);
    const Complex ph_hi = unit_phase(nu * hi * hi + gamma * hi);
    if (s_lo >= 0.0) return geo.prefactor * (ph_lo * geo.w_ray(s_lo) - ph_hi * geo.w_ray(s_hi));
    if (s_hi <= 0.0) return geo.prefactor * (ph_hi * geo.w_ray(-s_hi) - ph_lo * geo.w_ray(-s_lo));
    const Complex edge = unit_phase(-gamma * gamma / (4.0 * nu));
    return geo.prefactor * (2.0 * edge - ph_hi * geo.w_ray(s_hi) - ph_lo * geo.w_ray(-s_lo));
}

inline Complex oscillatory_erf(int m, double lo, double hi, double gamma, double nu)
{
    if (nu < 0.0) return std::conj(oscillatory_erf(m, lo, hi, -gamma, -nu));
    const Complex dK = kernel_difference(lo, hi, gamma, nu);
    if (m == 0) return dK;
    const double phi_lo = nu * lo * lo + gamma * lo;
    const double phi_hi = nu * hi * hi + gamma * hi;
    const Complex jnu(0.0, nu);
    if (m == 1) return phase_difference(phi_hi, phi_lo) / (2.0 * jnu) - gamma / (2.0 * nu) * dK;
    const Complex boundary = (2.0 * nu * hi - gamma) * unit_phase(phi_hi) - (2.0 * nu * lo - gamma) * unit_phase(phi_lo);
    return boundary / (4.0 * jnu * nu) - (1.0 / (2.0 * jnu) - gamma * gamma / (4.0 * nu * nu)) * dK;
}

inline bool use_series_route(int m, double hi, double gamma, double nu)
{
    const double x = std::abs(nu) * hi * hi;
    if (x < kTaylorSwitch) return true;
    if (m == 0 || x > kSeriesRouteMaxPhase) return false;
    return std::pow((1.0 + std::abs(gamma) * hi) / x, m) > kErfRouteMaxAmplification;
}

inline Complex oscillatory_integral_gamma(int m, double lo, double hi, double gamma, double nu)
{
    if (hi <= lo) return 0.0;
    if (use_series_route(m, hi, gamma, nu)) return oscillatory_series(m, lo, hi, gamma, nu);
    return oscillatory_erf(m, lo, hi, gamma, nu);
}

inline void check_limits(double lo, double hi, const char* who)
{
    require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi >= lo, std::string(who) + ": need 0 <= lo <= hi");
}

} // namespace detail

/// int_lo^hi r^(2n+1) exp(j nu r^2) dr for n in {0, 1, 2}.
inline Complex gaussian_moment(int n, double lo, double hi, double nu)
{
    detail::require(n >= 0 && n <= 2, "gaussian_moment: n must be 0, 1 or 2");
    detail::check_limits(lo, hi, "gaussian_moment");
    detail::require(std::isfinite(nu) && std::isfinite(nu * hi * hi), "gaussian_moment: nu * hi^2 must be finite");
    if (std::abs(nu) * hi * hi < kTaylorSwitch) return detail::gaussian_moment_series(n, lo, hi, nu);
    return detail::gaussian_moment_exact(n, lo, hi, nu);
}

/// Antiderivative K(r) of exp(j (nu r^2 + 2 pi k r)), normalized so that
/// K = E * sqrt(pi)/(2 sqrt(-j nu)) * erf(sqrt(-j nu) (r + pi k / nu)) with
/// E = exp(-j (2 pi k)^2 / (4 nu)). Negative nu uses K(r,k,nu) = conj K(r,-k,-nu).
/// Rejects |nu| <= nu_min; callers near nu = 0 use oscillatory_integral.
inline Complex kernel_K(double r, double k, double nu, double nu_min = 0.0)
{
    detail::require(std::isfinite(r) && std::isfinite(k) && std::isfinite(nu), "kernel_K: non-finite argument");
    detail::require(std::abs(nu) > nu_min, "kernel_K: |nu| below nu_min, use the linear-phase fallback");
    const double gamma = 2.0 * std::numbers::pi * k;
    if (nu < 0.0) return std::conj(detail::kernel_point(r, -gamma, -nu));
    return detail::kernel_point(r, gamma, nu);
}

/// Antiderivative F_m(r, k) of r^m exp(j (nu r^2 + 2 pi k r)), m in {0, 1, 2},
/// built from K by the moment recurrences.
inline Complex oscillatory_primitive(int m, double r, double k, double nu, double nu_min = 0.0)
{
    detail::require(m >= 0 && m <= 2, "oscillatory_primitive: m must be 0, 1 or 2");
    if (nu < 0.0) return std::conj(oscillatory_primitive(m, r, -k, -nu, nu_min));
    const Complex K = kernel_K(r, k, nu, nu_min);
    if (m == 0) return K;
    const double gamma = 2.0 * std::numbers::pi * k;
    const Complex e = detail::unit_phase(nu * r * r + gamma * r);
    const Complex jnu(0.0, nu);
    if (m == 1) return e / (2.0 * jnu) - gamma / (2.0 * nu) * K;
    return (2.0 * nu * r - gamma) * e / (4.0 * jnu * nu) - (1.0 / (2.0 * jnu) - gamma * gamma / (4.0 * nu * nu)) * K;
}

/// int_lo^hi r^m exp(j (nu r^2 + 2 pi k r)) dr, m in {0, 1, 2}. Uses the erf
/// route where its recurrences are well conditioned and otherwise expands
/// exp(j nu r^2) around the linear phase.
inline Complex oscillatory_integral(int m, double lo, double hi, double k, double nu)
{
    detail::require(m >= 0 && m <= 2, "oscillatory_integral: m must be 0, 1 or 2");
    detail::check_limits(lo, hi, "oscillatory_integral");
    detail::require(std::isfinite(k) && std::isfinite(nu), "oscillatory_integral: non-finite k or nu");
    return detail::oscillatory_integral_gamma(m, lo, hi, 2.0 * std::numbers::pi * k, nu);
}

/// Branch weights c1..c6 of the six moment integrals. At k = 0 the outer
/// branch is empty and c4..c6 are returned as 0.
inline std::array<double, 6> coefficients(double k, double alpha)
{
    detail::require(std::isfinite(k) && k >= 0.0, "coefficients: k must be >= 0");
    detail::require(std::isfinite(alpha) && alpha > 0.0, "coefficients: alpha must be > 0");
    constexpr double pi = std::numbers::pi;
    const double root = std::sqrt(2.0 / pi);
    const double pk2 = pi * pi * k * k;
    std::array<double, 6> c{1.0, -pk2, pk2 * pk2 / 4.0, 0.0, 0.0, 0.0};
    if (k > 0.0) {
        c[3] = root / (2.0 * pi * k);
        c[4] = root * 1.5 / std::sqrt(alpha);
        c[5] = -root * pi * k / (alpha * std::sqrt(alpha));
    }
    return c;
}

struct ClosedFormOptions {
    double alpha = 100.0;
    /// Per-k operating point alpha = max(1, pi k R), the midpoint of the
    /// Bessel arguments actually sampled.
    bool adaptive_alpha = false;
    unsigned threads = 1;
    EvalStats* stats = nullptr;
};

/// Complex amplitude sum_i c_i h_i at one k for a piecewise quadratic pupil.
inline Complex closed_form_amplitude(const PiecewisePupil& pupil, double k, double alpha, EvalStats* stats = nullptr)
{
    constexpr double pi = std::numbers::pi;
    const auto c = coefficients(k, alpha);
    const double a0 = k > 0.0 ? 1.0 / (2.0 * pi * k) : std::numeric_limits<double>::infinity();
    const double gamma = 2.0 * pi * k;
    const Complex half_minus = 0.5 * detail::unit_phase(-pi / 4.0);
    const Complex half_plus = 0.5 * detail::unit_phase(pi / 4.0);

    Complex total = 0.0;
    std::uint64_t calls = 0;
    for (const auto& seg : pupil.segments) {
        Complex part = 0.0;
        const double f_hi = std::min(seg.r_hi, a0);
        if (f_hi > seg.r_lo) {
            part += c[0] * gaussian_moment(0, seg.r_lo, f_hi, seg.alpha);
            ++calls;
            if (k > 0.0) {
                part += c[1] * gaussian_moment(1, seg.r_lo, f_hi, seg.alpha);
                part += c[2] * gaussian_moment(2, seg.r_lo, f_hi, seg.alpha);
                calls += 2;
            }
        }
        const double g_lo = std::max(seg.r_lo, a0);
        if (seg.r_hi > g_lo) {
            for (int m = 0; m <= 2; ++m) {
                const Complex h = half_minus * detail::oscillatory_integral_gamma(m, g_lo, seg.r_hi, gamma, seg.alpha) +
                                  half_plus * detail::oscillatory_integral_gamma(m, g_lo, seg.r_hi, -gamma, seg.alpha);
                part += c[3 + m] * h;
            }
            calls += 6;
        }
        if (seg.beta != 0.0) part *= detail::unit_phase(seg.beta);
        total += part;
    }
    if (stats) {
        stats->primitive_calls += calls;
        stats->k_samples += 1;
    }
    return total;
}

/// h(k) = 4 pi^2 |sum_i c_i h_i|^2 over a piecewise quadratic pupil.
inline RadialPsf radial_psf_piecewise(const PiecewisePupil& pupil, const std::vector<double>& k_grid,
                                      const ClosedFormOptions& options = {}, PsfMeta meta = {})
{
    pupil.validate();
    validate_k_grid(k_grid);
    detail::require(options.adaptive_alpha || (std::isfinite(options.alpha) && options.alpha > 0.0),
                    "closed form: alpha must be > 0");
    const double R = pupil.radius();
    RadialPsf out;
    out.k = k_grid;
    out.h.resize(k_grid.size());
    parallel_for(k_grid.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double k = k_grid[i];
            const double alpha = options.adaptive_alpha ? std::max(1.0, std::numbers::pi * k * R) : options.alpha;
            const Complex amp = closed_form_amplitude(pupil, k, alpha, options.stats);
            out.h[i] = 4.0 * std::numbers::pi * std::numbers::pi * std::norm(amp);
        }
    });
    meta.alpha = options.adaptive_alpha ? 0.0 : options.alpha;
    meta.segments = static_cast<int>(pupil.segments.size());
    out.meta = meta;
    return out;
}

/// Pure defocus pupil exp(j 2 C_d r^2 / R^2).
inline RadialPsf radial_psf_defocus(double C_d, double R, const std::vector<double>& k_grid,
                                    const ClosedFormOptions& options = {})
{
    const AberrationState ab{C_d, 0.0, R};
    return radial_psf_piecewise(fit_piecewise_quadratic(ab, 1), k_grid, options, {"closed_form", C_d, 0.0, 0.0, 1});
}

/// Defocus + spherical pupil approximated by M quadratic-phase annuli.
inline RadialPsf radial_psf_spherical(const AberrationState& ab, int M, const std::vector<double>& k_grid,
                                      const ClosedFormOptions& options = {}, PupilFitOptions fit = {})
{
    return radial_psf_piecewise(fit_piecewise_quadratic(ab, M, fit), k_grid, options,
                                {"closed_form", ab.C_d, ab.C_s, 0.0, M});
}

} // namespace fastpsf
