#pragma once

// Depth-of-field synthesis: every source pixel scatters its brightness
// through the PSF of its defocus bucket.

#include "fastpsf/baselines.hpp"
#include "fastpsf/closed_form.hpp"
#include "fastpsf/errors.hpp"
#include "fastpsf/field.hpp"
#include "fastpsf/parallel.hpp"
#include "fastpsf/pupil.hpp"
#include "fastpsf/raster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fastpsf {

enum class Method { closed_form, hankel, fft, geometric };

inline std::string to_string(Method m)
{
    switch (m) {
    case Method::closed_form: return "closed";
    case Method::hankel: return "hankel";
    case Method::fft: return "fft";
    case Method::geometric: return "geometric";
    }
    return "unknown";
}

inline Method parse_method(const std::string& s)
{
    if (s == "closed" || s == "closed_form") return Method::closed_form;
    if (s == "hankel") return Method::hankel;
    if (s == "fft") return Method::fft;
    if (s == "geometric") return Method::geometric;
    throw ConfigError("unknown method '" + s + "' (expected closed|hankel|fft|geometric)");
}

struct RenderConfig {
    OpticalConfig optics;
    Method method = Method::closed_form;
    int depth_buckets = 64;
    int kernel_cap = 255;
    int segments = 5;
    double alpha = 100.0;
    double C_s = 0.0;
    std::size_t radial_samples = kDefaultRadialSamples;
    double energy_fraction = 0.999;
    QuadratureSpec quadrature;
    FftSpec fft;
    unsigned threads = 1;

    void validate() const
    {
        optics.validate();
        detail::require_config(depth_buckets >= 1, "RenderConfig: depth_buckets must be >= 1");
        detail::require_config(kernel_cap >= 3 && kernel_cap % 2 == 1, "RenderConfig: kernel_cap must be odd and >= 3");
        detail::require_config(segments >= 1, "RenderConfig: segments must be >= 1");
        detail::require_config(energy_fraction > 0.0 && energy_fraction <= 1.0,
                               "RenderConfig: energy_fraction must lie in (0, 1]");
    }
};

struct RenderStats {
    int buckets_used = 0;
    std::int64_t psf_ns = 0;
    std::int64_t scatter_ns = 0;
};

namespace detail {

inline int odd_size_for_radius(double radius_px, int cap)
{
    const int half = static_cast<int>(std::ceil(std::max(0.0, radius_px)));
    return std::min(cap, 2 * half + 1);
}

// Smallest odd raster holding `fraction` of the profile's energy.
inline int energy_kernel_size(const RadialPsf& p, double fraction, double k_pitch, int cap)
{
    const auto cum = encircled_energy(p);
    const double target = fraction * cum.back();
    std::size_t i = 0;
    while (i + 1 < cum.size() && cum[i] < target) ++i;
    return odd_size_for_radius(p.k[i] / k_pitch, cap);
}

} // namespace detail

/// Radial profile of the selected wave simulator on its default k range.
inline RadialPsf wave_radial_profile(double C_d, const RenderConfig& rc)
{
    const AberrationState ab{C_d, rc.C_s, rc.optics.R};
    ab.validate();
    const auto k = uniform_k_grid(default_k_max(ab), rc.radial_samples);
    switch (rc.method) {
    case Method::closed_form: {
        ClosedFormOptions opts;
        opts.alpha = rc.alpha;
        return radial_psf_spherical(ab, rc.segments, k, opts);
    }
    case Method::hankel: return hankel_psf(ab, k, rc.quadrature);
    case Method::fft: return resample(azimuthal_average(fft_psf(ab, rc.fft)), k);
    case Method::geometric: break;
    }
    throw ConfigError("wave_radial_profile: geometric method has no wave profile");
}

/// Unit-sum kernel in sensor pixels for one defocus value.
inline Psf2D synthesize_kernel(double C_d, const RenderConfig& rc)
{
    const double k_pitch = rc.optics.k_pitch();
    if (rc.method == Method::geometric) {
        const double radius_px = std::abs(geometric_blur_radius_from_defocus(C_d, rc.optics)) / rc.optics.pixel_pitch;
        const int size = radius_px < 0.5 ? 1 : detail::odd_size_for_radius(radius_px + 0.5, rc.kernel_cap);
        return disk_raster(radius_px, size, k_pitch);
    }
    const RadialPsf p = wave_radial_profile(C_d, rc);
    const int size = detail::energy_kernel_size(p, rc.energy_fraction, k_pitch, rc.kernel_cap);
    return normalize_energy(radial_to_2d(p, size, k_pitch));
}

/// Defocus buckets uniform in C_d over the range present in the depth map.
struct DefocusBuckets {
    double lo = 0.0;
    double width = 0.0;
    int count = 1;

    int index(double c) const
    {
        if (width == 0.0) return 0;
        return std::clamp(static_cast<int>((c - lo) / width), 0, count - 1);
    }
    double center(int i) const { return width == 0.0 ? lo : lo + (i + 0.5) * width; }
};

inline DefocusBuckets make_buckets(const std::vector<double>& defocus, int count)
{
    const auto [mn, mx] = std::minmax_element(defocus.begin(), defocus.end());
    DefocusBuckets b;
    b.lo = *mn;
    b.count = count;
    b.width = (*mx - *mn) / count;
    return b;
}

/// out[y'] += in[y] * K_bucket(y)[y' - y]. Kernels overflowing the frame
/// are renormalized by their in-frame mass so flux is conserved. Each output
/// row accumulates its sources in a fixed order, independent of threads.
inline Raster render_dof(const Raster& image, const Raster& depth, const RenderConfig& rc, RenderStats* stats = nullptr)
{
    rc.validate();
    image.validate();
    depth.validate();
    detail::require_config(image.width == depth.width && image.height == depth.height,
                           "render_dof: image and depth dimensions differ");
    for (double z : depth.data) detail::require(z > 0.0, "render_dof: depth must be > 0");

    const auto t0 = std::chrono::steady_clock::now();
    const int W = image.width;
    const int H = image.height;
    std::vector<double> defocus(depth.data.size());
    for (std::size_t i = 0; i < defocus.size(); ++i) defocus[i] = defocus_coefficient(depth.data[i], rc.optics);
    const DefocusBuckets buckets = make_buckets(defocus, rc.depth_buckets);

    std::vector<int> bucket_of(defocus.size());
    std::vector<char> used(static_cast<std::size_t>(rc.depth_buckets), 0);
    for (std::size_t i = 0; i < defocus.size(); ++i) {
        bucket_of[i] = buckets.index(defocus[i]);
        if (image.data[i] > 0.0) used[static_cast<std::size_t>(bucket_of[i])] = 1;
    }
    std::vector<int> active;
    for (int b = 0; b < rc.depth_buckets; ++b)
        if (used[static_cast<std::size_t>(b)]) active.push_back(b);

    std::vector<Psf2D> kernels(static_cast<std::size_t>(rc.depth_buckets));
    parallel_for(active.size(), rc.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int b = active[i];
            kernels[static_cast<std::size_t>(b)] = synthesize_kernel(buckets.center(b), rc);
        }
    });
    const auto t1 = std::chrono::steady_clock::now();

    // Summed-area tables give the in-frame mass of a clipped kernel in O(1).
    std::vector<std::vector<double>> sat(kernels.size());
    int max_half = 0;
    for (int b : active) {
        const auto& K = kernels[static_cast<std::size_t>(b)];
        const int n = K.size;
        max_half = std::max(max_half, n / 2);
        auto& s = sat[static_cast<std::size_t>(b)];
        s.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                s[static_cast<std::size_t>(y + 1) * (n + 1) + x + 1] = K.at(x, y) + s[static_cast<std::size_t>(y) * (n + 1) + x + 1] +
                                                                       s[static_cast<std::size_t>(y + 1) * (n + 1) + x] -
                                                                       s[static_cast<std::size_t>(y) * (n + 1) + x];
    }

    std::vector<double> weight(image.data.size(), 0.0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const std::size_t i = image.index(x, y);
            if (image.data[i] == 0.0) continue;
            const int b = bucket_of[i];
            const auto& K = kernels[static_cast<std::size_t>(b)];
            const int h = K.size / 2;
            const int x0 = std::max(0, h - x);
            const int y0 = std::max(0, h - y);
            const int x1 = std::min(K.size, W - x + h);
            const int y1 = std::min(K.size, H - y + h);
            const auto& s = sat[static_cast<std::size_t>(b)];
            const int n1 = K.size + 1;
            const double mass = s[static_cast<std::size_t>(y1) * n1 + x1] - s[static_cast<std::size_t>(y0) * n1 + x1] -
                                s[static_cast<std::size_t>(y1) * n1 + x0] + s[static_cast<std::size_t>(y0) * n1 + x0];
            // the fully contained case divides by exactly 1 when the kernel sums to 1
            const bool inside = x0 == 0 && y0 == 0 && x1 == K.size && y1 == K.size;
            weight[i] = inside ? image.data[i] : (mass > 0.0 ? image.data[i] / mass : 0.0);
        }
    }

    Raster out(W, H, RasterKind::image);
    parallel_for(static_cast<std::size_t>(H), rc.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row) {
            const int yo = static_cast<int>(row);
            double* dst = &out.data[static_cast<std::size_t>(yo) * W];
            for (int y = std::max(0, yo - max_half); y <= std::min(H - 1, yo + max_half); ++y) {
                for (int x = 0; x < W; ++x) {
                    const std::size_t i = image.index(x, y);
                    const double v = weight[i];
                    if (v == 0.0) continue;
                    const auto& K = kernels[static_cast<std::size_t>(bucket_of[i])];
                    const int h = K.size / 2;
                    const int dy = yo - y;
                    if (dy < -h || dy > h) continue;
                    const double* krow = &K.data[static_cast<std::size_t>(dy + h) * K.size];
                    const int lo = std::max(0, x - h);
                    const int hi = std::min(W - 1, x + h);
                    for (int xo = lo; xo <= hi; ++xo) dst[xo] += v * krow[xo - x + h];
                }
            }
        }
    });
    const auto t2 = std::chrono::steady_clock::now();
    if (stats) {
        stats->buckets_used = static_cast<int>(active.size());
        stats->psf_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        stats->scatter_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    }
    return out;
}

} // namespace fastpsf
