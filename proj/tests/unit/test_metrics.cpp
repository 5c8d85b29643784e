#include "fastpsf/baselines.hpp"
#include "fastpsf/closed_form.hpp"
#include "fastpsf/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fastpsf;

namespace {

constexpr double kR = 1e-3;

RadialPsf profile(std::vector<double> h)
{
    RadialPsf p;
    p.k = uniform_k_grid(1.0, h.size());
    p.h = std::move(h);
    return p;
}

RadialPsf fft_on(const AberrationState& ab, const std::vector<double>& k)
{
    return resample(azimuthal_average(fft_psf(ab)), k);
}

} // namespace

TEST(CompareRadial, IdentityReport)
{
    const auto p = profile({4, 3, 1, 0.5, 0.2, 0.1});
    const auto r = compare_radial(p, p);
    EXPECT_EQ(r.rmse, 0.0);
    EXPECT_TRUE(std::isinf(r.psnr_db));
    EXPECT_DOUBLE_EQ(r.pearson, 1.0);
    EXPECT_EQ(r.energy_deviation, 0.0);
    EXPECT_NE(r.to_text().find("psnr_db=inf"), std::string::npos);
}

TEST(CompareRadial, DoubledProfile)
{
    const auto b = profile({4, 3, 1, 0.5, 0.2, 0.1});
    auto a = b;
    for (auto& v : a.h) v *= 2.0;
    const auto r = compare_radial(a, b);
    EXPECT_NEAR(r.pearson, 1.0, 1e-12);
    EXPECT_NEAR(r.energy_deviation, 1.0, 1e-12);
}

TEST(CompareRadial, PearsonAffineInvariant)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(50), b(50);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double base = pearson_correlation(a, b);
    for (double s : {0.5, 3.0, 1e4}) {
        std::vector<double> t = a;
        for (auto& v : t) v = s * v + 17.0;
        EXPECT_NEAR(pearson_correlation(t, b), base, 1e-12);
    }
}

TEST(CompareRadial, ConstantInputIsDegenerate)
{
    EXPECT_THROW(pearson_correlation({1, 1, 1}, {1, 2, 3}), DegenerateError);
    EXPECT_THROW(compare_radial(profile({2, 2, 2}), profile({1, 2, 3})), DegenerateError);
}

TEST(CompareRadial, RandomProfilesAgainstThemselves)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> h(64);
        for (auto& v : h) v = u(rng);
        const auto p = profile(h);
        const auto r = compare_radial(p, p);
        EXPECT_EQ(r.rmse, 0.0);
        EXPECT_NEAR(r.pearson, 1.0, 1e-12);
        EXPECT_EQ(r.energy_deviation, 0.0);
    }
}

TEST(CompareRadial, AmplitudeQuantityUsesSquareRoot)
{
    const auto b = profile({4, 1, 0.25, 0.04});
    auto a = b;
    for (auto& v : a.h) v *= 4.0;
    const auto r = compare_radial(a, b, ProfileQuantity::amplitude);
    EXPECT_NEAR(r.rmse, std::sqrt((4.0 + 1.0 + 0.25 + 0.04) / 4.0), 1e-12);
}

TEST(CompareRadial, ResamplesBaselineOntoFirstGrid)
{
    RadialPsf b;
    b.k = uniform_k_grid(2.0, 201);
    for (double k : b.k) b.h.push_back(1.0 + k);
    RadialPsf a;
    a.k = uniform_k_grid(1.0, 11);
    for (double k : a.k) a.h.push_back(1.0 + k);
    EXPECT_NEAR(compare_radial(a, b).rmse, 0.0, 1e-12);
}

TEST(Ssim, IdenticalIsOne)
{
    const auto p = hankel_psf({3, 1, kR}, uniform_k_grid(9000.0, 300));
    const Psf2D r = radial_to_2d(p, 31, 300.0);
    EXPECT_NEAR(ssim_2d(r, r), 1.0, 1e-12);
}

TEST(Ssim, ImpulseVersusUniformIsLow)
{
    Psf2D impulse(33, 1.0);
    impulse.at(16, 16) = 1.0;
    Psf2D flat(33, 1.0);
    for (auto& v : flat.data) v = 1.0 / flat.data.size();
    EXPECT_LT(ssim_2d(impulse, flat), 0.1);
}

TEST(Ssim, SymmetricForEqualRange)
{
    Psf2D a(21, 1.0), b(21, 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : a.data) v = u(rng);
    for (auto& v : b.data) v = u(rng);
    a.data[0] = 1.0;
    b.data[0] = 1.0; // equal max, equal dynamic range
    EXPECT_NEAR(ssim_2d(a, b), ssim_2d(b, a), 1e-14);
}

TEST(Ssim, RejectsSmallOrMismatched)
{
    EXPECT_THROW(ssim_2d(Psf2D(9, 1.0), Psf2D(9, 1.0)), ConfigError);
    EXPECT_THROW(ssim_2d(Psf2D(11, 1.0), Psf2D(13, 1.0)), ConfigError);
    EXPECT_THROW(ssim_2d(Psf2D(11, 1.0), Psf2D(11, 1.0)), DegenerateError);
}

TEST(Ssim, ClosedFormNearFocusMatchesFftRaster)
{
    const AberrationState ab{1, 0, kR};
    const Psf2D fft = fft_psf(ab);
    const int size = 65;
    const auto p = radial_psf_defocus(1.0, kR, uniform_k_grid(fft.k_pitch * size, 512));
    EXPECT_GE(ssim_2d(radial_to_2d(p, size, fft.k_pitch), crop_center(fft, size)), 0.95);
}

TEST(EnergyDeviation, ClosedFormVersusFftAtModerateDefocus)
{
    // published deviation for this configuration is 6.1%
    const AberrationState ab{5, 0, kR};
    const auto k = uniform_k_grid(default_k_max(ab), kDefaultRadialSamples);
    const auto r = compare_radial(radial_psf_defocus(5, kR, k), fft_on(ab, k));
    EXPECT_NEAR(r.energy_deviation, 0.061, 0.03);
}

TEST(EnergyDeviation, ClosedFormVersusFftIsRegressionLocked)
{
    const AberrationState ab{5, 0, kR};
    const auto k = uniform_k_grid(default_k_max(ab), kDefaultRadialSamples);
    const auto r = compare_radial(radial_psf_defocus(5, kR, k), fft_on(ab, k));
    EXPECT_NEAR(r.energy_deviation, 0.313, 0.005);
}
