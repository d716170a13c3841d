#include "salbench/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "salbench/errors.hpp"

namespace salbench::imaging {

namespace {

constexpr double kBreakSrgb = 0.04045;
constexpr double kBreakLinear = kBreakSrgb / 12.92;

constexpr std::array<int, 25> kBinomial = {
    1, 1, 1, 1, 1,
    1, 4, 4, 4, 1,
    1, 4, 6, 4, 1,
    1, 4, 4, 4, 1,
    1, 1, 1, 1, 1,
};
constexpr double kBinomialSum = 54.0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(std::string(what) + ": value " + std::to_string(v) + " outside [0,1]");
    }
}

// Keys cubic convolution kernel with a = -0.5 (Catmull-Rom).
double cubic_weight(double x) {
    constexpr double a = -0.5;
    x = std::abs(x);
    if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    return 0.0;
}

struct Taps {
    std::array<std::size_t, 4> index;
    std::array<double, 4> weight;
};

std::vector<Taps> resample_taps(std::size_t in, std::size_t out) {
    std::vector<Taps> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    const auto last = static_cast<std::ptrdiff_t>(in) - 1;
    for (std::size_t i = 0; i < out; ++i) {
        const double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
        const double base = std::floor(src);
        const double t = src - base;
        const auto b = static_cast<std::ptrdiff_t>(base);
        for (int k = 0; k < 4; ++k) {
            const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(b - 1 + k, 0, last);
            taps[i].index[k] = static_cast<std::size_t>(idx);
            taps[i].weight[k] = cubic_weight(t - static_cast<double>(k - 1));
        }
    }
    return taps;
}

}  // namespace

RasterImage::RasterImage(std::size_t width, std::size_t height, std::size_t channels,
                         Encoding encoding)
    : RasterImage(width, height, channels, encoding,
                  std::vector<double>(width * height * channels, 0.0)) {}

RasterImage::RasterImage(std::size_t width, std::size_t height, std::size_t channels,
                         Encoding encoding, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), encoding_(encoding),
      data_(std::move(data)) {
    if (width == 0 || height == 0) throw DomainError("RasterImage: zero dimension");
    if (channels != 1 && channels != 3) {
        throw DomainError("RasterImage: channels must be 1 or 3, got " + std::to_string(channels));
    }
    if (data_.size() != width * height * channels) {
        throw DomainError("RasterImage: data length " + std::to_string(data_.size()) +
                          " != width*height*channels");
    }
    for (double v : data_) check_unit(v, "RasterImage");
}

void ResizePolicy::validate() const {
    if (target_height == 0) throw DomainError("ResizePolicy: target_height must be >= 1");
    if (fixed_width && *fixed_width == 0) throw DomainError("ResizePolicy: fixed width must be >= 1");
}

double gamma_expand(double srgb) {
    check_unit(srgb, "gamma_expand");
    if (srgb <= kBreakSrgb) return srgb / 12.92;
    return clamp01(std::pow((srgb + 0.055) / 1.055, 2.4));
}

double gamma_compress(double linear) {
    check_unit(linear, "gamma_compress");
    if (linear <= kBreakLinear) return linear * 12.92;
    return clamp01(1.0 + 1.055 * (std::pow(linear, 1.0 / 2.4) - 1.0));
}

RasterImage srgb_to_luminance(const RasterImage& img) {
    if (img.channels() != 3 || img.encoding() != Encoding::SrgbGamma) {
        throw ImageTypeError("srgb_to_luminance: expected a 3-channel sRGB image");
    }
    std::vector<double> out(img.width() * img.height());
    const auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = gamma_expand(src[3 * i]);
        const double g = gamma_expand(src[3 * i + 1]);
        const double b = gamma_expand(src[3 * i + 2]);
        out[i] = clamp01(kLumaRed * r + kLumaGreen * g + kLumaBlue * b);
    }
    return RasterImage(img.width(), img.height(), 1, Encoding::Linear, std::move(out));
}

std::span<const int, 25> binomial_kernel() { return kBinomial; }

RasterImage binomial_blur(const RasterImage& img) {
    if (img.channels() != 1) throw ImageTypeError("binomial_blur: expected a 1-channel image");
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    RasterImage out(img.width(), img.height(), 1, img.encoding());
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t ky = -2; ky <= 2; ++ky) {
                const auto sy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(y + ky, 0, h - 1));
                for (std::ptrdiff_t kx = -2; kx <= 2; ++kx) {
                    const auto sx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(x + kx, 0, w - 1));
                    acc += kBinomial[static_cast<std::size_t>((ky + 2) * 5 + (kx + 2))] * img.at(sx, sy);
                }
            }
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = clamp01(acc / kBinomialSum);
        }
    }
    return out;
}

RasterImage resize_bicubic(const RasterImage& img, std::size_t out_width, std::size_t out_height) {
    if (out_width == 0 || out_height == 0) throw DomainError("resize_bicubic: zero target dimension");
    if (img.empty()) throw DomainError("resize_bicubic: empty image");
    const std::size_t ch = img.channels();
    const std::size_t in_w = img.width();
    const std::size_t in_h = img.height();

    // Horizontal pass into an unclamped intermediate, then vertical.
    const auto xtaps = resample_taps(in_w, out_width);
    std::vector<double> tmp(out_width * in_h * ch);
    for (std::size_t y = 0; y < in_h; ++y) {
        for (std::size_t x = 0; x < out_width; ++x) {
            const Taps& t = xtaps[x];
            for (std::size_t c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += t.weight[k] * img.at(t.index[k], y, c);
                tmp[(y * out_width + x) * ch + c] = acc;
            }
        }
    }

    const auto ytaps = resample_taps(in_h, out_height);
    std::vector<double> out(out_width * out_height * ch);
    for (std::size_t y = 0; y < out_height; ++y) {
        const Taps& t = ytaps[y];
        for (std::size_t x = 0; x < out_width; ++x) {
            for (std::size_t c = 0; c < ch; ++c) {
                double acc = 0.0;
                for (int k = 0; k < 4; ++k) acc += t.weight[k] * tmp[(t.index[k] * out_width + x) * ch + c];
                out[(y * out_width + x) * ch + c] = clamp01(acc);
            }
        }
    }
    return RasterImage(out_width, out_height, ch, img.encoding(), std::move(out));
}

std::pair<std::size_t, std::size_t> target_dimensions(std::size_t width, std::size_t height,
                                                      const ResizePolicy& policy) {
    policy.validate();
    if (policy.fixed_width) return {*policy.fixed_width, policy.target_height};
    const double w = static_cast<double>(width) * static_cast<double>(policy.target_height) /
                     static_cast<double>(height);
    return {std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(w + 0.5))), policy.target_height};
}

RasterImage downsample_to_height(const RasterImage& img, const ResizePolicy& policy) {
    if (img.channels() != 1) throw ImageTypeError("downsample_to_height: expected a 1-channel image");
    policy.validate();
    if (img.height() < policy.target_height) {
        throw DomainError("downsample_to_height: input height " + std::to_string(img.height()) +
                          " is below target " + std::to_string(policy.target_height));
    }
    const auto [out_w, out_h] = target_dimensions(img.width(), img.height(), policy);

    RasterImage cur = img;
    while (cur.height() >= 2 * policy.target_height) {
        cur = binomial_blur(cur);
        cur = resize_bicubic(cur, (cur.width() + 1) / 2, (cur.height() + 1) / 2);
    }
    return resize_bicubic(cur, out_w, out_h);
}

RasterImage hc_to_lg(const RasterImage& img, const ResizePolicy& policy) {
    return downsample_to_height(srgb_to_luminance(img), policy);
}

std::vector<std::uint8_t> to_gray8(const RasterImage& img, bool keep_linear) {
    if (img.channels() != 1) throw ImageTypeError("to_gray8: expected a 1-channel image");
    const bool compress = img.encoding() == Encoding::Linear && !keep_linear;
    std::vector<std::uint8_t> out(img.width() * img.height());
    const auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = compress ? gamma_compress(src[i]) : src[i];
        out[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
    }
    return out;
}

std::vector<std::uint8_t> to_rgb8(const RasterImage& img) {
    if (img.channels() != 3) throw ImageTypeError("to_rgb8: expected a 3-channel image");
    std::vector<std::uint8_t> out(img.data().size());
    const auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(std::floor(src[i] * 255.0 + 0.5));
    }
    return out;
}

}  // namespace salbench::imaging
