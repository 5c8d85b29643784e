#pragma once

// Pupil phase models: defocus coefficient from scene geometry, the quartic
// defocus + spherical phase, and its piecewise-quadratic approximation.

#include "fastpsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace fastpsf {

/// Physical camera parameters, all in meters.
struct OpticalConfig {
    double R = 1e-3;            ///< aperture radius
    double lambda = 500e-9;     ///< wavelength
    double z_f = 0.4;           ///< focusing distance
    double s = 12.37e-3;        ///< lens-to-sensor distance
    double pixel_pitch = 2e-6;  ///< sensor pixel size

    void validate() const
    {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        detail::require(positive(R) && positive(lambda) && positive(z_f) && positive(s) && positive(pixel_pitch),
                        "OpticalConfig: all fields must be finite and > 0");
        detail::require(lambda < R, "OpticalConfig: wavelength must be smaller than the aperture radius");
    }

    /// Sensor-plane spatial frequency per sensor pixel, from x = lambda * s * k.
    double k_pitch() const { return pixel_pitch / (lambda * s); }
};

/// Dimensionless defocus and spherical coefficients over an aperture of radius R.
struct AberrationState {
    double C_d = 0.0;
    double C_s = 0.0;
    double R = 1e-3;
    double C_d_max = 50.0;
    double C_s_max = 50.0;

    void validate() const
    {
        detail::require(std::isfinite(C_d) && std::isfinite(C_s) && std::isfinite(R) && R > 0.0,
                        "AberrationState: coefficients must be finite and R > 0");
        detail::require(std::abs(C_d) <= C_d_max, "AberrationState: |C_d| exceeds " + std::to_string(C_d_max));
        detail::require(C_s >= 0.0 && C_s <= C_s_max,
                        "AberrationState: C_s must lie in [0, " + std::to_string(C_s_max) + "]");
    }
};

/// One annulus [r_lo, r_hi) carrying the phase alpha * r^2 + beta.
struct PupilSegment {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double alpha = 0.0; ///< rad / m^2
    double beta = 0.0;  ///< rad
};

struct PiecewisePupil {
    std::vector<PupilSegment> segments;

    double radius() const { return segments.empty() ? 0.0 : segments.back().r_hi; }

    /// Phase of the segment containing r (the last segment is closed at R).
    double phase(double r) const
    {
        for (const auto& seg : segments) {
            if (r < seg.r_hi) return seg.alpha * r * r + seg.beta;
        }
        const auto& last = segments.back();
        return last.alpha * r * r + last.beta;
    }

    void validate() const
    {
        detail::require(!segments.empty(), "PiecewisePupil: at least one segment required");
        detail::require(segments.front().r_lo == 0.0, "PiecewisePupil: first segment must start at r = 0");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto& seg = segments[i];
            detail::require(seg.r_hi >= seg.r_lo, "PiecewisePupil: segment with r_hi < r_lo");
            detail::require(std::isfinite(seg.alpha) && std::isfinite(seg.beta), "PiecewisePupil: non-finite phase");
            if (i > 0) detail::require(segments[i - 1].r_hi == seg.r_lo, "PiecewisePupil: segments must share endpoints");
        }
    }
};

/// Least-squares fit (default) or the pure exp(j alpha r^2) form without offset.
enum class PupilFit { least_squares, quadratic_only };
/// Partition uniform in r^2 (equal-area annuli, default) or uniform in r.
enum class PupilPartition { uniform_r2, uniform_r };

struct PupilFitOptions {
    PupilFit fit = PupilFit::least_squares;
    PupilPartition partition = PupilPartition::uniform_r2;
};

/// C_d = pi (z_f - z) R^2 / (2 lambda z z_f): positive in front of focus.
inline double defocus_coefficient(double z, const OpticalConfig& cfg)
{
    cfg.validate();
    detail::require(std::isfinite(z) && z > 0.0, "defocus_coefficient: object distance must be > 0");
    return std::numbers::pi * (cfg.z_f - z) * cfg.R * cfg.R / (2.0 * cfg.lambda * z * cfg.z_f);
}

/// 2 C_d r^2/R^2 + C_s r^4/R^4 for 0 <= r <= R.
inline double pupil_phase(double r, const AberrationState& ab)
{
    detail::require(std::isfinite(r) && r >= 0.0 && r <= ab.R, "pupil_phase: r outside [0, R]");
    const double t = (r / ab.R) * (r / ab.R);
    return 2.0 * ab.C_d * t + ab.C_s * t * t;
}

/// Partition [0, R] into M annuli and fit alpha_i r^2 + beta_i to the pupil
/// phase on each, minimizing the r-weighted squared error. Substituting
/// u = r^2 turns the weight into du and the phase into a quadratic in u, so
/// the fit reduces to the best linear approximation of u^2 on [u0, u1].
inline PiecewisePupil fit_piecewise_quadratic(const AberrationState& ab, int M, PupilFitOptions options = {})
{
    ab.validate();
    detail::require(M >= 1, "fit_piecewise_quadratic: M must be >= 1");
    const double R = ab.R;
    const double R2 = R * R;
    const double R4 = R2 * R2;
    const double defocus = 2.0 * ab.C_d / R2;

    PiecewisePupil pupil;
    pupil.segments.reserve(static_cast<std::size_t>(M));
    double r_lo = 0.0;
    for (int i = 1; i <= M; ++i) {
        double r_hi = R;
        if (i < M) {
            const double frac = static_cast<double>(i) / M;
            r_hi = options.partition == PupilPartition::uniform_r2 ? R * std::sqrt(frac) : R * frac;
        }
        const double u0 = r_lo * r_lo;
        const double u1 = r_hi * r_hi;
        PupilSegment seg{r_lo, r_hi, defocus, 0.0};
        if (options.fit == PupilFit::least_squares) {
            const double mid = 0.5 * (u0 + u1);
            const double half = 0.5 * (u1 - u0);
            // u^2 ~ 2 mid u - mid^2 + half^2/3 in the L2 sense on [u0, u1]
            seg.alpha = defocus + ab.C_s * 2.0 * mid / R4;
            seg.beta = ab.C_s * (half * half / 3.0 - mid * mid) / R4;
        } else {
            // alpha = <u, phi> / <u, u> on [u0, u1]
            const double num = 0.25 * (u1 * u1 * u1 * u1 - u0 * u0 * u0 * u0);
            const double den = (u1 * u1 * u1 - u0 * u0 * u0) / 3.0;
            seg.alpha = defocus + (den > 0.0 ? ab.C_s * num / (den * R4) : 0.0);
        }
        pupil.segments.push_back(seg);
        r_lo = r_hi;
    }
    return pupil;
}

/// Sup-norm phase error of a piecewise pupil on a uniform r grid.
inline double max_phase_error(const PiecewisePupil& pupil, const AberrationState& ab, int samples = 4001)
{
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = ab.R * i / (samples - 1);
        worst = std::max(worst, std::abs(pupil.phase(r) - pupil_phase(r, ab)));
    }
    return worst;
}

} // namespace fastpsf
