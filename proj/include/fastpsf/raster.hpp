#pragma once

#include "fastpsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace fastpsf {

enum class RasterKind { image, depth };

/// Single-channel width x height raster, row-major with row 0 at the top.
/// Depth rasters hold object distances in meters.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<double> data;
    RasterKind kind = RasterKind::image;

    Raster() = default;
    Raster(int w, int h, RasterKind k = RasterKind::image)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0), kind(k)
    {
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double& at(int x, int y) { return data[index(x, y)]; }
    double at(int x, int y) const { return data[index(x, y)]; }
    double sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }
    double max() const { return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end()); }

    void validate() const
    {
        detail::require_config(width > 0 && height > 0 && data.size() == static_cast<std::size_t>(width) * height,
                               "Raster: dimensions do not match data");
        for (double v : data) {
            detail::require(std::isfinite(v) && v >= 0.0, "Raster: values must be finite and >= 0");
            if (kind == RasterKind::depth) detail::require(v > 0.0, "Raster: depth values must be > 0");
        }
    }
};

} // namespace fastpsf
