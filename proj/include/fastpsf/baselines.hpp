#pragma once

// Reference simulators: direct Hankel quadrature with the exact J0, FFT
// propagation of the sampled 2D pupil, and the geometric thin-lens disk.

#include "fastpsf/errors.hpp"
#include "fastpsf/field.hpp"
#include "fastpsf/parallel.hpp"
#include "fastpsf/pupil.hpp"
#include "fastpsf/radial_psf.hpp"
#include "fastpsf/special_functions.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace fastpsf {

enum class QuadratureRule { midpoint, trapezoid };

struct QuadratureSpec {
    int n_r = 4096;
    QuadratureRule rule = QuadratureRule::midpoint;

    void validate() const { detail::require_config(n_r >= 64, "QuadratureSpec: n_r must be >= 64"); }
};

/// h(k) = |2 pi sum_i P(r_i) J0(2 pi k r_i) r_i w_i|^2, O(N n_r).
inline RadialPsf hankel_psf(const AberrationState& ab, const std::vector<double>& k_grid, QuadratureSpec q = {},
                            unsigned threads = 1)
{
    ab.validate();
    q.validate();
    validate_k_grid(k_grid);
    const double dr = ab.R / (q.rule == QuadratureRule::midpoint ? q.n_r : q.n_r - 1);
    std::vector<double> r(static_cast<std::size_t>(q.n_r));
    std::vector<Complex> weighted(r.size());
    for (int i = 0; i < q.n_r; ++i) {
        double w = dr;
        if (q.rule == QuadratureRule::midpoint) {
            r[i] = (i + 0.5) * dr;
        } else {
            r[i] = std::min(i * dr, ab.R);
            if (i == 0 || i == q.n_r - 1) w *= 0.5;
        }
        const double phi = pupil_phase(r[i], ab);
        weighted[i] = Complex(std::cos(phi), std::sin(phi)) * (r[i] * w);
    }

    RadialPsf out;
    out.k = k_grid;
    out.h.resize(k_grid.size());
    parallel_for(k_grid.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const double omega = 2.0 * std::numbers::pi * k_grid[j];
            Complex acc = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) acc += weighted[i] * bessel_j0_ref(omega * r[i]);
            out.h[j] = std::norm(2.0 * std::numbers::pi * acc);
        }
    });
    out.meta = {"hankel", ab.C_d, ab.C_s, 0.0, 0};
    return out;
}

struct FftSpec {
    int grid = 2048;
    double pad_factor = 4.0;

    /// Pupil samples across the diameter.
    double pupil_samples() const { return grid / pad_factor; }

    void validate() const
    {
        const bool pow2 = grid > 0 && (grid & (grid - 1)) == 0;
        detail::require_config(pow2 && grid >= 256 && grid <= 8192, "FftSpec: grid must be a power of two in [256, 8192]");
        detail::require_config(std::isfinite(pad_factor) && pad_factor >= 2.0, "FftSpec: pad_factor must be >= 2");
        detail::require_config(pupil_samples() >= 64.0, "FftSpec: pupil must span at least 64 samples");
    }
};

namespace detail {

// Planner calls are not thread-safe in FFTW; execution is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

/// Largest |d phase / dr| over the aperture, in rad/m.
inline double max_phase_slope(const AberrationState& ab)
{
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        worst = std::max(worst, std::abs(4.0 * ab.C_d * t + 4.0 * ab.C_s * t * t * t) / ab.R);
    }
    return worst;
}

} // namespace detail

/// 2D PSF |F[disk * P]|^2 via a DFT of the sampled pupil, scaled by dr^2 so
/// intensities share units with the radial simulators. DC at (grid/2, grid/2),
/// k pitch 1 / (grid dr).
inline Psf2D fft_psf(const AberrationState& ab, FftSpec f = {})
{
    ab.validate();
    f.validate();
    const int n = f.grid;
    const double dr = 2.0 * ab.R / f.pupil_samples();
    detail::require_config(detail::max_phase_slope(ab) * dr <= std::numbers::pi,
                           "fft_psf: pupil phase aliases (slope exceeds pi per sample); raise grid or lower pad_factor");

    const std::size_t total = static_cast<std::size_t>(n) * n;
    std::unique_ptr<fftw_complex[], detail::FftwFree> buf(fftw_alloc_complex(total));
    detail::require_config(buf != nullptr, "fft_psf: allocation failed");
    const int c = n / 2;
    for (int y = 0; y < n; ++y) {
        const double py = (y - c) * dr;
        for (int x = 0; x < n; ++x) {
            const double px = (x - c) * dr;
            const double r = std::sqrt(px * px + py * py);
            auto& v = buf[static_cast<std::size_t>(y) * n + x];
            if (r < ab.R) {
                // (-1)^(x+y) moves DC to the center of the output
                const double sign = ((x + y) % 2 == 0) ? 1.0 : -1.0;
                const double phi = pupil_phase(r, ab);
                v[0] = sign * std::cos(phi);
                v[1] = sign * std::sin(phi);
            } else {
                v[0] = 0.0;
                v[1] = 0.0;
            }
        }
    }
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_2d(n, n, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    Psf2D out(n, 1.0 / (n * dr));
    const double scale = dr * dr;
    for (std::size_t i = 0; i < total; ++i) {
        const double re = buf[i][0] * scale;
        const double im = buf[i][1] * scale;
        out.data[i] = re * re + im * im;
    }
    return out;
}

/// Signed blur-disk radius on the sensor, R s (1/z - 1/z_f), in meters.
inline double geometric_blur_radius(double z, const OpticalConfig& cfg)
{
    cfg.validate();
    detail::require(std::isfinite(z) && z > 0.0, "geometric_psf: object distance must be > 0");
    return cfg.R * cfg.s * (1.0 / z - 1.0 / cfg.z_f);
}

/// Same radius expressed through the defocus coefficient: 2 lambda s C_d / (pi R).
inline double geometric_blur_radius_from_defocus(double C_d, const OpticalConfig& cfg)
{
    cfg.validate();
    return 2.0 * cfg.lambda * cfg.s * C_d / (std::numbers::pi * cfg.R);
}

namespace detail {

// Area of the disk x^2 + y^2 < rho^2 inside [0, x] x [0, y], x, y >= 0.
inline double disk_quadrant_area(double x, double y, double rho)
{
    x = std::min(x, rho);
    y = std::min(y, rho);
    if (x <= 0.0 || y <= 0.0) return 0.0;
    if (x * x + y * y <= rho * rho) return x * y;
    const double t = std::sqrt(std::max(0.0, rho * rho - y * y));
    auto segment = [rho](double u) { return 0.5 * (u * std::sqrt(std::max(0.0, rho * rho - u * u)) + rho * rho * std::asin(u / rho)); };
    return y * t + segment(x) - segment(t);
}

inline double disk_signed_area(double x, double y, double rho)
{
    const double sx = x < 0.0 ? -1.0 : 1.0;
    const double sy = y < 0.0 ? -1.0 : 1.0;
    return sx * sy * disk_quadrant_area(std::abs(x), std::abs(y), rho);
}

// Exact area of the disk inside [x0, x1] x [y0, y1].
inline double disk_rect_area(double x0, double x1, double y0, double y1, double rho)
{
    return disk_signed_area(x1, y1, rho) - disk_signed_area(x0, y1, rho) - disk_signed_area(x1, y0, rho) +
           disk_signed_area(x0, y0, rho);
}

} // namespace detail

/// Uniform disk of radius `radius_px` pixels with exact area-fraction edge
/// pixels, normalized to unit sum; below half a pixel it is an impulse.
inline Psf2D disk_raster(double radius_px, int size, double k_pitch)
{
    detail::require_config(size >= 1, "disk_raster: size must be >= 1");
    Psf2D out(size, k_pitch);
    const int c = out.center();
    const double rho = std::abs(radius_px);
    if (rho < 0.5) {
        out.at(c, c) = 1.0;
        return out;
    }
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = x - c;
            const double dy = y - c;
            out.at(x, y) = detail::disk_rect_area(dx - 0.5, dx + 0.5, dy - 0.5, dy + 0.5, rho);
        }
    return normalize_energy(std::move(out));
}

/// Thin-lens PSF in sensor pixels; k_pitch = pixel_pitch / (lambda s).
inline Psf2D geometric_psf(double z, const OpticalConfig& cfg, int size)
{
    const double sigma = geometric_blur_radius(z, cfg);
    return disk_raster(sigma / cfg.pixel_pitch, size, cfg.k_pitch());
}

inline Psf2D geometric_psf_from_defocus(double C_d, const OpticalConfig& cfg, int size)
{
    const double sigma = geometric_blur_radius_from_defocus(C_d, cfg);
    return disk_raster(sigma / cfg.pixel_pitch, size, cfg.k_pitch());
}

/// Radial profile of the geometric disk in k units, scaled to carry the
/// same energy pi R^2 as the wave simulators.
inline RadialPsf geometric_radial(double C_d, const AberrationState& ab, const std::vector<double>& k_grid)
{
    validate_k_grid(k_grid);
    const double edge = 2.0 * std::abs(C_d) / (std::numbers::pi * ab.R);
    RadialPsf out;
    out.k = k_grid;
    out.h.assign(k_grid.size(), 0.0);
    const double dk = k_grid.size() > 1 ? k_grid[1] - k_grid[0] : 1.0;
    const double energy = std::numbers::pi * ab.R * ab.R;
    if (edge < 0.5 * dk) {
        out.h[0] = energy / (std::numbers::pi * 0.25 * dk * dk);
    } else {
        const double level = energy / (std::numbers::pi * edge * edge);
        for (std::size_t i = 0; i < k_grid.size(); ++i)
            if (k_grid[i] < edge) out.h[i] = level;
    }
    out.meta = {"geometric", C_d, 0.0, 0.0, 0};
    return out;
}

} // namespace fastpsf
