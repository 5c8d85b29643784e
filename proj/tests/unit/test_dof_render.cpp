#include "fastpsf/dof_render.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fastpsf;

namespace {

Raster textured(int w, int h, int margin, unsigned seed)
{
    Raster r(w, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int y = margin; y < h - margin; ++y)
        for (int x = margin; x < w - margin; ++x) r.at(x, y) = ((x / 4 + y / 4) % 2 ? 0.8 : 0.2) + 0.1 * u(rng);
    return r;
}

Raster constant_depth(int w, int h, double z)
{
    Raster d(w, h, RasterKind::depth);
    for (auto& v : d.data) v = z;
    return d;
}

// Left half at one depth, right half at another.
Raster two_planes(int w, int h, double z_left, double z_right)
{
    Raster d(w, h, RasterKind::depth);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) d.at(x, y) = x < w / 2 ? z_left : z_right;
    return d;
}

double max_abs_diff(const Raster& a, const Raster& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

} // namespace

TEST(RenderDof, InFocusGeometricIsIdentity)
{
    RenderConfig rc;
    rc.method = Method::geometric;
    const Raster img = textured(40, 30, 0, 1);
    const Raster out = render_dof(img, constant_depth(40, 30, rc.optics.z_f), rc);
    EXPECT_EQ(out.data, img.data);
}

TEST(RenderDof, ConstantDepthMatchesConvolutionOracle)
{
    for (Method m : {Method::closed_form, Method::geometric}) {
        RenderConfig rc;
        rc.method = m;
        const double z = 0.5;
        const Psf2D K = synthesize_kernel(defocus_coefficient(z, rc.optics), rc);
        const int margin = K.size / 2 + 1;
        const Raster img = textured(64, 64, margin, 2);
        const Raster out = render_dof(img, constant_depth(64, 64, z), rc);
        const auto ref = oracle::convolve(img.data, 64, 64, K.data, K.size);
        double peak = 0.0;
        for (double v : ref) peak = std::max(peak, v);
        for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out.data[i], ref[i], 1e-6 * peak) << to_string(m);
    }
}

TEST(RenderDof, FluxConservedWithEdgeRenormalization)
{
    RenderConfig rc;
    rc.method = Method::hankel;
    Raster img = textured(48, 48, 0, 3); // bright pixels touch the border
    const Raster out = render_dof(img, two_planes(48, 48, 0.3, 0.7), rc);
    EXPECT_NEAR(out.sum(), img.sum(), 1e-3 * img.sum());
}

TEST(RenderDof, FluxConservedForInteriorSources)
{
    for (Method m : {Method::closed_form, Method::hankel, Method::fft, Method::geometric}) {
        RenderConfig rc;
        rc.method = m;
        rc.depth_buckets = 8;
        const Raster img = textured(48, 48, 12, 4);
        const Raster out = render_dof(img, two_planes(48, 48, 0.35, 0.5), rc);
        EXPECT_NEAR(out.sum(), img.sum(), 1e-3 * img.sum()) << to_string(m);
    }
}

TEST(RenderDof, OutputIndependentOfThreadCount)
{
    RenderConfig rc;
    const Raster img = textured(64, 48, 0, 5);
    const Raster depth = two_planes(64, 48, 0.3, 0.6);
    const Raster a = render_dof(img, depth, rc);
    for (unsigned t : {2u, 3u, 8u}) {
        rc.threads = t;
        EXPECT_EQ(render_dof(img, depth, rc).data, a.data) << "threads=" << t;
    }
}

TEST(RenderDof, Validation)
{
    RenderConfig rc;
    const Raster img = textured(8, 8, 0, 6);
    EXPECT_THROW(render_dof(img, constant_depth(8, 9, 0.5), rc), ConfigError);
    Raster bad = constant_depth(8, 8, 0.5);
    bad.at(2, 2) = 0.0;
    EXPECT_THROW(render_dof(img, bad, rc), DomainError);
    rc.kernel_cap = 4;
    EXPECT_THROW(render_dof(img, constant_depth(8, 8, 0.5), rc), ConfigError);
    rc.kernel_cap = 255;
    rc.depth_buckets = 0;
    EXPECT_THROW(render_dof(img, constant_depth(8, 8, 0.5), rc), ConfigError);
    EXPECT_THROW(parse_method("spline"), ConfigError);
    EXPECT_EQ(parse_method("closed"), Method::closed_form);
}

TEST(RenderDof, KernelsSizedByEnergyAndCapped)
{
    RenderConfig rc;
    const Psf2D small = synthesize_kernel(1.0, rc);
    const Psf2D large = synthesize_kernel(20.0, rc);
    EXPECT_EQ(small.size % 2, 1);
    EXPECT_LT(small.size, large.size);
    EXPECT_NEAR(large.sum(), 1.0, 1e-12);
    rc.kernel_cap = 7;
    EXPECT_EQ(synthesize_kernel(20.0, rc).size, 7);
}

TEST(RenderDof, BucketRefinementConverges)
{
    // a smooth depth ramp exercises every bucket
    const int n = 64;
    Raster depth(n, n, RasterKind::depth);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) depth.at(x, y) = 0.3 + 0.3 * x / (n - 1.0);
    const Raster img = textured(n, n, 0, 7);
    RenderConfig rc;
    std::vector<Raster> outs;
    for (int b : {16, 64, 256}) {
        rc.depth_buckets = b;
        outs.push_back(render_dof(img, depth, rc));
    }
    EXPECT_LT(max_abs_diff(outs[2], outs[1]), max_abs_diff(outs[1], outs[0]));
}

TEST(RenderDof, ClosedFormCloseToHankel)
{
    const Raster img = textured(96, 96, 0, 8);
    const Raster depth = two_planes(96, 96, 0.3, 0.6);
    RenderConfig rc;
    rc.depth_buckets = 16;
    const Raster a = render_dof(img, depth, rc);
    rc.method = Method::hankel;
    const Raster b = render_dof(img, depth, rc);
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) se += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    const double rmse = std::sqrt(se / a.data.size());
    const auto [mn, mx] = std::minmax_element(b.data.begin(), b.data.end());
    EXPECT_LE(rmse / (*mx - *mn), 0.02);
}

// Near focus the disk spans a few pixels. Across a vertical step edge the
// geometric blur rises monotonically (no rings, no negative first
// differences) in a handful of discrete steps, while wave kernels overshoot.
TEST(RenderDof, GeometricNearFocusIsBandedAndRingFree)
{
    const int n = 64;
    Raster img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = n / 2; x < n; ++x) img.at(x, y) = 1.0;
    const Raster depth = constant_depth(n, n, 0.44); // blur radius about 1.4 px
    auto edge_steps = [&](Method m, int& negative, int& rises) {
        RenderConfig rc;
        rc.method = m;
        const Raster out = render_dof(img, depth, rc);
        negative = rises = 0;
        const int y = n / 2;
        for (int x = 8; x < n - 9; ++x) {
            const double d = out.at(x + 1, y) - out.at(x, y);
            if (d < -1e-12) ++negative;
            if (d > 1e-12) ++rises;
        }
    };
    int neg = 0;
    int rises = 0;
    edge_steps(Method::geometric, neg, rises);
    const double radius = std::abs(geometric_blur_radius(0.44, OpticalConfig{})) / OpticalConfig{}.pixel_pitch;
    EXPECT_EQ(neg, 0);
    EXPECT_GE(rises, 2);
    EXPECT_LE(rises, 2 * static_cast<int>(std::ceil(radius)) + 2);
    int wave_neg = 0;
    int wave_rises = 0;
    edge_steps(Method::hankel, wave_neg, wave_rises);
    EXPECT_GT(wave_neg, 0);
}
