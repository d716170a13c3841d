#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "salbench/errors.hpp"
#include "salbench/imaging.hpp"
#include "salbench/rng.hpp"

using namespace salbench;
using namespace salbench::imaging;

namespace {

RasterImage gray(std::size_t w, std::size_t h, std::vector<double> v) {
    return RasterImage(w, h, 1, Encoding::Linear, std::move(v));
}

RasterImage random_gray(std::size_t w, std::size_t h, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(w * h);
    for (auto& x : v) x = rng.uniform();
    return gray(w, h, v);
}

RasterImage checkerboard(std::size_t w, std::size_t h) {
    std::vector<double> v(w * h);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) v[y * w + x] = (x + y) % 2 ? 1.0 : 0.0;
    return gray(w, h, v);
}

double stddev(std::span<const double> v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / v.size());
}

}  // namespace

TEST(Gamma, Endpoints) {
    EXPECT_EQ(gamma_expand(0.0), 0.0);
    EXPECT_EQ(gamma_expand(1.0), 1.0);
    EXPECT_EQ(gamma_compress(0.0), 0.0);
    EXPECT_EQ(gamma_compress(1.0), 1.0);
}

TEST(Gamma, MidGrayMatchesHighPrecisionValue) {
    // ((0.5 + 0.055) / 1.055)^2.4, 30-digit evaluation
    EXPECT_NEAR(gamma_expand(0.5), 0.214041140482232442, 1e-12);
    EXPECT_NEAR(gamma_compress(0.214041140482232442), 0.5, 1e-12);
}

TEST(Gamma, LinearSegmentBelowBreak) {
    EXPECT_DOUBLE_EQ(gamma_expand(0.04), 0.04 / 12.92);
    EXPECT_DOUBLE_EQ(gamma_compress(0.001), 0.001 * 12.92);
}

TEST(Gamma, RoundTripDenseGrid) {
    for (int i = 0; i <= 10000; ++i) {
        const double x = i / 10000.0;
        ASSERT_LE(std::abs(gamma_compress(gamma_expand(x)) - x), 1e-6) << x;
    }
}

TEST(Gamma, Monotone) {
    double prev = -1;
    for (int i = 0; i <= 1000; ++i) {
        const double v = gamma_expand(i / 1000.0);
        ASSERT_GE(v, prev);
        prev = v;
    }
}

TEST(Gamma, RejectsOutOfRange) {
    EXPECT_THROW(gamma_expand(-0.01), DomainError);
    EXPECT_THROW(gamma_expand(1.01), DomainError);
    EXPECT_THROW(gamma_expand(std::nan("")), DomainError);
    EXPECT_THROW(gamma_compress(2.0), DomainError);
}

TEST(Luminance, WhiteAndPrimaries) {
    const RasterImage px(3, 1, 3, Encoding::SrgbGamma, {1, 1, 1, 0, 1, 0, 1, 0, 0});
    const RasterImage y = srgb_to_luminance(px);
    EXPECT_EQ(y.channels(), 1u);
    EXPECT_EQ(y.encoding(), Encoding::Linear);
    EXPECT_EQ(y.at(0, 0), 1.0);
    EXPECT_EQ(y.at(1, 0), 0.7152);
    EXPECT_EQ(y.at(2, 0), 0.2126);
}

TEST(Luminance, AchromaticEqualsGammaExpand) {
    for (int i = 0; i <= 255; ++i) {
        const double v = i / 255.0;
        const RasterImage px(1, 1, 3, Encoding::SrgbGamma, {v, v, v});
        EXPECT_NEAR(srgb_to_luminance(px).at(0, 0), gamma_expand(v), 1e-15);
    }
}

TEST(Luminance, RejectsWrongInput) {
    EXPECT_THROW(srgb_to_luminance(gray(2, 2, {0, 0, 0, 0})), ImageTypeError);
    EXPECT_THROW(srgb_to_luminance(RasterImage(1, 1, 3, Encoding::Linear)), ImageTypeError);
}

TEST(RasterImage, Invariants) {
    EXPECT_THROW(RasterImage(0, 1, 1, Encoding::Linear), DomainError);
    EXPECT_THROW(RasterImage(1, 1, 2, Encoding::Linear), DomainError);
    EXPECT_THROW(gray(2, 1, {0.0}), DomainError);
    EXPECT_THROW(gray(1, 1, {1.5}), DomainError);
}

TEST(Binomial, KernelSumsTo54) {
    const auto k = binomial_kernel();
    EXPECT_EQ(std::accumulate(k.begin(), k.end(), 0), 54);
}

TEST(Binomial, ConstantPreserved) {
    const auto out = binomial_blur(gray(9, 7, std::vector<double>(63, 0.37)));
    for (double v : out.data()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Binomial, ImpulseGivesScaledKernel) {
    std::vector<double> v(121, 0.0);
    v[5 * 11 + 5] = 1.0;
    const auto out = binomial_blur(gray(11, 11, v));
    const auto k = binomial_kernel();
    for (int y = 0; y < 11; ++y) {
        for (int x = 0; x < 11; ++x) {
            const int dx = x - 5, dy = y - 5;
            const double want = (std::abs(dx) <= 2 && std::abs(dy) <= 2) ? k[(dy + 2) * 5 + (dx + 2)] / 54.0 : 0.0;
            EXPECT_NEAR(out.at(x, y), want, 1e-15) << x << "," << y;
        }
    }
}

TEST(Binomial, GlobalMeanAndRange) {
    const auto img = random_gray(64, 48, 11);
    const auto out = binomial_blur(img);
    const auto mean = [](std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    EXPECT_NEAR(mean(out.data()), mean(img.data()), 1e-3);
    for (double v : out.data()) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(Bicubic, IdentityResize) {
    const auto img = random_gray(13, 9, 3);
    const auto out = resize_bicubic(img, 13, 9);
    for (std::size_t i = 0; i < img.data().size(); ++i) EXPECT_NEAR(out.data()[i], img.data()[i], 1e-6);
}

TEST(Bicubic, ConstantStaysConstant) {
    const auto out = resize_bicubic(gray(10, 10, std::vector<double>(100, 0.6)), 7, 23);
    EXPECT_EQ(out.width(), 7u);
    EXPECT_EQ(out.height(), 23u);
    for (double v : out.data()) EXPECT_NEAR(v, 0.6, 1e-12);
}

TEST(Bicubic, RampHalvedMatchesReference) {
    std::vector<double> v(16);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) v[y * 4 + x] = (x + 4 * y) / 15.0;
    const auto img = gray(4, 4, v);
    const auto out = resize_bicubic(img, 2, 2);
    const auto ref = oracle::bicubic(img, 2, 2);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out.data()[i], ref[i], 1e-4);
}

TEST(Bicubic, RandomMatchesReference) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto img = random_gray(17, 11, s);
        for (auto [w, h] : {std::pair{8, 5}, {30, 20}, {17, 3}}) {
            const auto out = resize_bicubic(img, w, h);
            const auto ref = oracle::bicubic(img, w, h);
            for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(out.data()[i], ref[i], 1e-9);
        }
    }
}

TEST(Bicubic, RgbChannelsIndependent) {
    Rng rng(4);
    std::vector<double> v(8 * 6 * 3);
    for (auto& x : v) x = rng.uniform();
    const RasterImage img(8, 6, 3, Encoding::SrgbGamma, v);
    const auto out = resize_bicubic(img, 5, 4);
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> plane;
        for (std::size_t i = c; i < v.size(); i += 3) plane.push_back(v[i]);
        const auto ref = resize_bicubic(gray(8, 6, plane), 5, 4);
        for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(out.data()[i * 3 + c], ref.data()[i]);
    }
    EXPECT_EQ(out.encoding(), Encoding::SrgbGamma);
}

using Dims = std::pair<std::size_t, std::size_t>;

TEST(Downsample, TargetDimensions) {
    EXPECT_EQ(target_dimensions(1920, 1080, ResizePolicy::preserve()), (Dims{114, 64}));
    EXPECT_EQ(target_dimensions(1920, 1080, ResizePolicy::fixed(120)), (Dims{120, 64}));
    EXPECT_EQ(target_dimensions(1280, 1024, ResizePolicy::preserve()), (Dims{80, 64}));
    EXPECT_EQ(target_dimensions(128, 128, ResizePolicy::preserve()), (Dims{64, 64}));
}

TEST(Downsample, OutputSizes) {
    const auto big = gray(1920, 1080, std::vector<double>(1920 * 1080, 0.5));
    const auto a = downsample_to_height(big, ResizePolicy::preserve());
    EXPECT_EQ(a.width(), 114u);
    EXPECT_EQ(a.height(), 64u);
    const auto b = downsample_to_height(big, ResizePolicy::fixed(120));
    EXPECT_EQ(b.width(), 120u);
    EXPECT_EQ(b.height(), 64u);
    const auto c = downsample_to_height(random_gray(128, 128, 1), ResizePolicy::preserve());
    EXPECT_EQ(c.width(), 64u);
    EXPECT_EQ(c.height(), 64u);
}

TEST(Downsample, IdempotentAtTarget) {
    const auto img = random_gray(90, 64, 5);
    const auto out = downsample_to_height(img, ResizePolicy::preserve());
    ASSERT_EQ(out.width(), 90u);
    for (std::size_t i = 0; i < img.data().size(); ++i) EXPECT_NEAR(out.data()[i], img.data()[i], 1e-6);
}

TEST(Downsample, CheckerboardIsSmoothed) {
    const auto out = downsample_to_height(checkerboard(512, 256), ResizePolicy::preserve());
    EXPECT_LT(stddev(out.data()), 0.05);
    const double mean = std::accumulate(out.data().begin(), out.data().end(), 0.0) / out.data().size();
    EXPECT_NEAR(mean, 0.5, 0.05);
    // naive decimation by 4 keeps one phase of the pattern: all black
    const auto board = checkerboard(512, 256);
    double naive = 0;
    for (std::size_t y = 0; y < 256; y += 4)
        for (std::size_t x = 0; x < 512; x += 4) naive += board.at(x, y);
    EXPECT_EQ(naive, 0.0);
}

TEST(Downsample, Errors) {
    EXPECT_THROW(downsample_to_height(gray(10, 10, std::vector<double>(100, 0)), ResizePolicy::preserve()), DomainError);
    EXPECT_THROW(downsample_to_height(RasterImage(100, 100, 3, Encoding::SrgbGamma), ResizePolicy::preserve()),
                 ImageTypeError);
    EXPECT_THROW(ResizePolicy::preserve(0).validate(), DomainError);
    EXPECT_THROW(ResizePolicy::fixed(0).validate(), DomainError);
}

TEST(HcToLg, WhiteStaysWhite) {
    const RasterImage white(1920, 1080, 3, Encoding::SrgbGamma, std::vector<double>(1920 * 1080 * 3, 1.0));
    const auto lg = hc_to_lg(white, ResizePolicy::preserve());
    EXPECT_EQ(lg.width(), 114u);
    EXPECT_EQ(lg.height(), 64u);
    for (double v : lg.data()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(HcToLg, AchromaticCommutes) {
    Rng rng(8);
    const std::size_t w = 300, h = 200;
    std::vector<double> rgb(w * h * 3);
    for (std::size_t i = 0; i < w * h; ++i) {
        const double v = rng.uniform();
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = v;
    }
    const RasterImage img(w, h, 3, Encoding::SrgbGamma, rgb);
    const auto policy = ResizePolicy::preserve();
    const auto gray_first = hc_to_lg(img, policy);

    std::vector<double> combined;
    const double coef[3] = {kLumaRed, kLumaGreen, kLumaBlue};
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> plane(w * h);
        for (std::size_t i = 0; i < w * h; ++i) plane[i] = gamma_expand(rgb[3 * i + c]);
        const auto d = downsample_to_height(gray(w, h, plane), policy);
        if (combined.empty()) combined.assign(d.data().size(), 0.0);
        for (std::size_t i = 0; i < combined.size(); ++i) combined[i] += coef[c] * d.data()[i];
    }
    ASSERT_EQ(combined.size(), gray_first.data().size());
    for (std::size_t i = 0; i < combined.size(); ++i) EXPECT_NEAR(gray_first.data()[i], combined[i], 1e-5);
}

TEST(HcToLg, ByteRatio) {
    const auto [w, h] = target_dimensions(1920, 1080, ResizePolicy::fixed(120));
    const double ratio = static_cast<double>(w * h) / (1920.0 * 1080.0 * 3.0);
    EXPECT_NEAR(ratio * 100.0, 0.12, 0.01);
}

TEST(Gray8, QuantizationAndEncoding) {
    const auto lin = gray(3, 1, {0.0, gamma_expand(0.6), 1.0});
    EXPECT_EQ(to_gray8(lin), (std::vector<std::uint8_t>{0, 153, 255}));
    EXPECT_EQ(to_gray8(lin, true), (std::vector<std::uint8_t>{0, 81, 255}));
    const RasterImage enc(2, 1, 1, Encoding::SrgbGamma, {0.5, 1.0});
    EXPECT_EQ(to_gray8(enc), (std::vector<std::uint8_t>{128, 255}));  // 127.5 rounds up
}
