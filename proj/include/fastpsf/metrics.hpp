#pragma once

// Accuracy metrics for comparing simulated PSFs against a baseline.

#include "fastpsf/errors.hpp"
#include "fastpsf/field.hpp"
#include "fastpsf/radial_psf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fastpsf {

/// Which profile quantity the 1D metrics compare. The intensity h(k) is the
/// default; amplitude compares sqrt(h).
enum class ProfileQuantity { intensity, amplitude };

struct MetricsReport {
    double rmse = 0.0;
    /// 20 log10(max(baseline) / rmse); +infinity when rmse == 0.
    double psnr_db = 0.0;
    double pearson = 0.0;
    std::optional<double> ssim;
    double energy_deviation = 0.0;

    /// Flat `key=value` lines.
    std::string to_text() const
    {
        std::ostringstream os;
        os.precision(17);
        os << "rmse=" << rmse << "\n";
        os << "psnr_db=" << (std::isinf(psnr_db) ? std::string("inf") : std::to_string(psnr_db)) << "\n";
        os << "pearson=" << pearson << "\n";
        if (ssim) os << "ssim=" << *ssim << "\n";
        os << "energy_deviation=" << energy_deviation << "\n";
        return os.str();
    }
};

/// Sample Pearson correlation. Throws DegenerateError if either input is constant.
inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    detail::require_config(a.size() == b.size() && a.size() >= 2, "pearson: need two equal-length series");
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw DegenerateError("pearson: correlation undefined for a constant series");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Compare a profile against baseline b (b is resampled onto a's grid when the grids differ).
inline MetricsReport compare_radial(const RadialPsf& a, const RadialPsf& b,
                                    ProfileQuantity quantity = ProfileQuantity::intensity)
{
    a.validate();
    b.validate();
    const RadialPsf base = (a.k == b.k) ? b : resample(b, a.k);
    std::vector<double> va = a.h;
    std::vector<double> vb = base.h;
    if (quantity == ProfileQuantity::amplitude) {
        for (auto& v : va) v = std::sqrt(v);
        for (auto& v : vb) v = std::sqrt(v);
    }

    MetricsReport rep;
    double se = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        se += (va[i] - vb[i]) * (va[i] - vb[i]);
        peak = std::max(peak, vb[i]);
    }
    rep.rmse = std::sqrt(se / static_cast<double>(va.size()));
    rep.psnr_db = rep.rmse == 0.0 ? std::numeric_limits<double>::infinity() : 20.0 * std::log10(peak / rep.rmse);
    rep.pearson = pearson_correlation(va, vb);
    const double ea = radial_energy(a);
    const double eb = radial_energy(base);
    if (!(eb > 0.0)) throw DegenerateError("compare_radial: baseline has zero energy");
    rep.energy_deviation = std::abs(ea - eb) / eb;
    return rep;
}

namespace detail {

inline std::vector<double> gaussian_window(int size, double sigma)
{
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    const int c = size / 2;
    double total = 0.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double v = std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>(y) * size + x] = v;
            total += v;
        }
    for (auto& v : w) v /= total;
    return w;
}

} // namespace detail

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, dynamic range max(b).
inline double ssim_2d(const Psf2D& a, const Psf2D& b)
{
    detail::require_config(a.size == b.size, "ssim_2d: size mismatch");
    constexpr int win = 11;
    detail::require_config(a.size >= win, "ssim_2d: rasters smaller than the 11x11 window");
    const double L = b.max();
    if (!(L > 0.0)) throw DegenerateError("ssim_2d: baseline has zero dynamic range");
    const double c1 = (0.01 * L) * (0.01 * L);
    const double c2 = (0.03 * L) * (0.03 * L);
    const auto w = detail::gaussian_window(win, 1.5);

    double acc = 0.0;
    std::size_t count = 0;
    for (int y0 = 0; y0 + win <= a.size; ++y0) {
        for (int x0 = 0; x0 + win <= a.size; ++x0) {
            double ma = 0.0;
            double mb = 0.0;
            double saa = 0.0;
            double sbb = 0.0;
            double sab = 0.0;
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    const double wt = w[static_cast<std::size_t>(dy) * win + dx];
                    const double va = a.at(x0 + dx, y0 + dy);
                    const double vb = b.at(x0 + dx, y0 + dy);
                    ma += wt * va;
                    mb += wt * vb;
                    saa += wt * va * va;
                    sbb += wt * vb * vb;
                    sab += wt * va * vb;
                }
            const double va = saa - ma * ma;
            const double vb = sbb - mb * mb;
            const double cov = sab - ma * mb;
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

} // namespace fastpsf
