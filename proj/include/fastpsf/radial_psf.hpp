#pragma once

#include "fastpsf/errors.hpp"
#include "fastpsf/pupil.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace fastpsf {

/// Which simulator produced a profile, and with which knobs.
struct PsfMeta {
    std::string method;
    double C_d = 0.0;
    double C_s = 0.0;
    double alpha = 0.0;
    int segments = 0;
};

/// Radially symmetric intensity profile h(k) on a strictly increasing grid
/// of sensor-plane spatial frequencies (1/m) starting at k = 0.
struct RadialPsf {
    std::vector<double> k;
    std::vector<double> h;
    PsfMeta meta;

    std::size_t size() const { return k.size(); }

    void validate() const
    {
        detail::require_config(!k.empty() && k.size() == h.size(), "RadialPsf: k and h must be non-empty and equal length");
        detail::require_config(k.front() == 0.0, "RadialPsf: grid must start at k = 0");
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i > 0) detail::require_config(k[i] > k[i - 1], "RadialPsf: k must be strictly increasing");
            detail::require_config(std::isfinite(h[i]) && h[i] >= 0.0, "RadialPsf: h must be finite and >= 0");
        }
    }
};

inline void validate_k_grid(const std::vector<double>& k)
{
    detail::require_config(!k.empty() && k.front() == 0.0, "k grid must be non-empty and start at 0");
    for (std::size_t i = 1; i < k.size(); ++i)
        detail::require_config(std::isfinite(k[i]) && k[i] > k[i - 1], "k grid must be strictly increasing");
}

/// N uniform samples on [0, k_max].
inline std::vector<double> uniform_k_grid(double k_max, std::size_t n)
{
    detail::require_config(n >= 2, "uniform_k_grid: need at least 2 samples");
    detail::require_config(std::isfinite(k_max) && k_max > 0.0, "uniform_k_grid: k_max must be > 0");
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = k_max * static_cast<double>(i) / static_cast<double>(n - 1);
    k.back() = k_max;
    return k;
}

/// Geometric support of the aberrated PSF plus a margin of several Airy radii.
inline double default_k_max(const AberrationState& ab)
{
    return (2.0 * std::abs(ab.C_d) + 4.0 * ab.C_s) / (std::numbers::pi * ab.R) + 12.0 / (std::numbers::pi * ab.R);
}

inline constexpr std::size_t kDefaultRadialSamples = 512;

} // namespace fastpsf
