#pragma once

// Square intensity rasters, radial <-> 2D conversion and energy bookkeeping.

#include "fastpsf/errors.hpp"
#include "fastpsf/radial_psf.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

namespace fastpsf {

/// size x size intensity grid, row-major, DC at index (size/2, size/2) for
/// both odd and even sizes. k_pitch is the spatial-frequency step per pixel.
struct Psf2D {
    int size = 0;
    double k_pitch = 0.0;
    std::vector<double> data;

    Psf2D() = default;
    Psf2D(int n, double pitch) : size(n), k_pitch(pitch), data(static_cast<std::size_t>(n) * n, 0.0) {}

    int center() const { return size / 2; }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * size + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * size + x]; }

    double sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }
    double max() const { return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end()); }
};

/// Linear interpolation of h at k; zero beyond the last grid node.
inline double interpolate_radial(const RadialPsf& p, double k)
{
    if (k <= 0.0) return p.h.front();
    if (k > p.k.back()) return 0.0;
    const auto it = std::upper_bound(p.k.begin(), p.k.end(), k);
    if (it == p.k.end()) return p.h.back();
    const std::size_t hi = static_cast<std::size_t>(it - p.k.begin());
    const std::size_t lo = hi - 1;
    const double t = (k - p.k[lo]) / (p.k[hi] - p.k[lo]);
    return p.h[lo] + t * (p.h[hi] - p.h[lo]);
}

/// Resample a profile onto another k grid.
inline RadialPsf resample(const RadialPsf& p, const std::vector<double>& k_grid)
{
    RadialPsf out;
    out.k = k_grid;
    out.h.resize(k_grid.size());
    for (std::size_t i = 0; i < k_grid.size(); ++i) out.h[i] = interpolate_radial(p, k_grid[i]);
    out.meta = p.meta;
    return out;
}

/// Each pixel takes h(||x||) where x is its offset from the center in k units.
inline Psf2D radial_to_2d(const RadialPsf& p, int size, double k_pitch)
{
    p.validate();
    detail::require_config(size >= 1, "radial_to_2d: size must be >= 1");
    detail::require_config(std::isfinite(k_pitch) && k_pitch > 0.0, "radial_to_2d: k_pitch must be > 0");
    Psf2D out(size, k_pitch);
    const int c = out.center();
    for (int y = 0; y < size; ++y) {
        const double dy = y - c;
        for (int x = 0; x < size; ++x) {
            const double dx = x - c;
            out.at(x, y) = interpolate_radial(p, std::sqrt(dx * dx + dy * dy) * k_pitch);
        }
    }
    return out;
}

/// Scale to unit sum.
inline Psf2D normalize_energy(Psf2D p)
{
    const double total = p.sum();
    if (!(total > 0.0)) throw DegenerateError("normalize_energy: raster has no positive energy");
    for (auto& v : p.data) v /= total;
    return p;
}

/// 2 pi int h(k) k dk by the trapezoid rule on the profile's own grid.
inline double radial_energy(const RadialPsf& p)
{
    double acc = 0.0;
    for (std::size_t i = 1; i < p.k.size(); ++i)
        acc += 0.5 * (p.h[i] * p.k[i] + p.h[i - 1] * p.k[i - 1]) * (p.k[i] - p.k[i - 1]);
    return 2.0 * std::numbers::pi * acc;
}

/// Cumulative 2 pi int_0^k h k' dk' at each grid node.
inline std::vector<double> encircled_energy(const RadialPsf& p)
{
    std::vector<double> cum(p.k.size(), 0.0);
    for (std::size_t i = 1; i < p.k.size(); ++i)
        cum[i] = cum[i - 1] + std::numbers::pi * (p.h[i] * p.k[i] + p.h[i - 1] * p.k[i - 1]) * (p.k[i] - p.k[i - 1]);
    return cum;
}

/// Ring average over integer-radius bins up to the inscribed circle. Each
/// bin's k is the mean radius of its pixels, so the grid starts at 0.
inline RadialPsf azimuthal_average(const Psf2D& p)
{
    const int c = p.center();
    const int bins = std::min(c, p.size - 1 - c) + 1;
    std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<double> radius(static_cast<std::size_t>(bins), 0.0);
    std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
    for (int y = 0; y < p.size; ++y) {
        for (int x = 0; x < p.size; ++x) {
            const double rho = std::hypot(double(x - c), double(y - c));
            const auto bin = static_cast<std::size_t>(std::lround(rho));
            if (bin >= sum.size()) continue;
            sum[bin] += p.at(x, y);
            radius[bin] += rho;
            ++count[bin];
        }
    }
    RadialPsf out;
    for (std::size_t b = 0; b < sum.size(); ++b) {
        if (count[b] == 0) continue;
        out.k.push_back(radius[b] / static_cast<double>(count[b]) * p.k_pitch);
        out.h.push_back(sum[b] / static_cast<double>(count[b]));
    }
    return out;
}

/// Bilinear resampling onto a centered size x size grid with another k pitch;
/// zero outside the source.
inline Psf2D resample_2d(const Psf2D& p, int size, double k_pitch)
{
    detail::require_config(size >= 1, "resample_2d: size must be >= 1");
    detail::require_config(std::isfinite(k_pitch) && k_pitch > 0.0, "resample_2d: k_pitch must be > 0");
    Psf2D out(size, k_pitch);
    const double scale = k_pitch / p.k_pitch;
    const int c = out.center();
    const int sc = p.center();
    auto sample = [&](int x, int y) { return (x < 0 || y < 0 || x >= p.size || y >= p.size) ? 0.0 : p.at(x, y); };
    for (int y = 0; y < size; ++y) {
        const double sy = (y - c) * scale + sc;
        const int y0 = static_cast<int>(std::floor(sy));
        const double ty = sy - y0;
        for (int x = 0; x < size; ++x) {
            const double sx = (x - c) * scale + sc;
            const int x0 = static_cast<int>(std::floor(sx));
            const double tx = sx - x0;
            out.at(x, y) = (1 - ty) * ((1 - tx) * sample(x0, y0) + tx * sample(x0 + 1, y0)) +
                           ty * ((1 - tx) * sample(x0, y0 + 1) + tx * sample(x0 + 1, y0 + 1));
        }
    }
    return out;
}

/// Central size x size window (DC stays centered).
inline Psf2D crop_center(const Psf2D& p, int size)
{
    detail::require_config(size >= 1 && size <= p.size, "crop_center: size out of range");
    Psf2D out(size, p.k_pitch);
    const int off = p.center() - out.center();
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.at(x, y) = p.at(x + off, y + off);
    return out;
}

} // namespace fastpsf
