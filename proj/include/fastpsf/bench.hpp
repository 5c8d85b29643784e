#pragma once

// Runtime measurement: warm-ups discarded, median of repeats, log-log slope.

#include "fastpsf/baselines.hpp"
#include "fastpsf/closed_form.hpp"
#include "fastpsf/dof_render.hpp"
#include "fastpsf/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace fastpsf {

struct Timing {
    std::int64_t median_ns = 0;
    std::int64_t min_ns = 0;
    std::int64_t max_ns = 0;
};

inline Timing time_repeated(const std::function<void()>& fn, int repeats, int warmup)
{
    detail::require_config(repeats >= 1 && warmup >= 0, "time_repeated: repeats must be >= 1 and warmup >= 0");
    for (int i = 0; i < warmup; ++i) fn();
    std::vector<std::int64_t> t(static_cast<std::size_t>(repeats));
    for (auto& v : t) {
        const auto a = std::chrono::steady_clock::now();
        fn();
        const auto b = std::chrono::steady_clock::now();
        v = std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
    }
    std::sort(t.begin(), t.end());
    const std::size_t n = t.size();
    Timing out;
    out.median_ns = n % 2 ? t[n / 2] : (t[n / 2 - 1] + t[n / 2]) / 2;
    out.min_ns = t.front();
    out.max_ns = t.back();
    return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    detail::require_config(x.size() == y.size() && x.size() >= 2, "loglog_slope: need two or more points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        detail::require_config(x[i] > 0.0 && y[i] > 0.0, "loglog_slope: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

/// One unit of work at resolution N. closed/hankel produce an N-sample radial
/// profile (hankel with n_r = N); fft transforms an N x N grid; geometric
/// rasterizes an N x N disk.
inline std::function<void()> bench_workload(Method method, const AberrationState& ab, int N, int segments,
                                            double alpha, unsigned threads)
{
    detail::require_config(N >= 2, "bench: sizes must be >= 2");
    const auto k = uniform_k_grid(default_k_max(ab), static_cast<std::size_t>(N));
    switch (method) {
    case Method::closed_form:
        return [=] {
            ClosedFormOptions o;
            o.alpha = alpha;
            o.threads = threads;
            (void)radial_psf_spherical(ab, segments, k, o);
        };
    case Method::hankel:
        return [=] {
            QuadratureSpec q;
            q.n_r = N;
            (void)hankel_psf(ab, k, q, threads);
        };
    case Method::fft:
        return [=] {
            FftSpec f;
            f.grid = N;
            (void)fft_psf(ab, f);
        };
    case Method::geometric:
        return [=] {
            const double edge_px = 2.0 * std::abs(ab.C_d) / std::numbers::pi * N / (2.0 * default_k_max(ab) * ab.R);
            (void)disk_raster(edge_px, N, 1.0);
        };
    }
    throw ConfigError("bench: unknown method");
}

} // namespace fastpsf
