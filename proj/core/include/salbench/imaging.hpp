#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace salbench::imaging {

enum class Encoding { SrgbGamma, Linear };

// Row-major floating point raster with 1 (luminance) or 3 (RGB) interleaved
// channels. Every value is kept in [0,1].
class RasterImage {
public:
    RasterImage() = default;
    // Zero-filled image. Throws DomainError on zero dimensions or a channel
    // count other than 1 or 3.
    RasterImage(std::size_t width, std::size_t height, std::size_t channels, Encoding encoding);
    // Takes ownership of `data`; validates its length and value range.
    RasterImage(std::size_t width, std::size_t height, std::size_t channels, Encoding encoding,
                std::vector<double> data);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    Encoding encoding() const noexcept { return encoding_; }
    bool empty() const noexcept { return data_.empty(); }

    double at(std::size_t x, std::size_t y, std::size_t c = 0) const {
        return data_[(y * width_ + x) * channels_ + c];
    }
    double& at(std::size_t x, std::size_t y, std::size_t c = 0) {
        return data_[(y * width_ + x) * channels_ + c];
    }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    Encoding encoding_ = Encoding::Linear;
    std::vector<double> data_;
};

// Target geometry for the high-resolution-color to low-resolution-gray
// transform. With no fixed width the aspect ratio of the source is kept.
struct ResizePolicy {
    std::size_t target_height = 64;
    std::optional<std::size_t> fixed_width;

    static ResizePolicy preserve(std::size_t height = 64) { return {height, std::nullopt}; }
    static ResizePolicy fixed(std::size_t width, std::size_t height = 64) { return {height, width}; }
    void validate() const;
};

// sRGB transfer function and its inverse. Both throw DomainError for inputs
// outside [0,1] (including NaN).
double gamma_expand(double srgb);
double gamma_compress(double linear);

inline constexpr double kLumaRed = 0.2126;
inline constexpr double kLumaGreen = 0.7152;
inline constexpr double kLumaBlue = 0.0722;

// 3-channel sRGB-encoded image -> 1-channel linear luminance.
RasterImage srgb_to_luminance(const RasterImage& img);

// 5x5 binomial low-pass (element sum 54, normalized), replicate padding.
RasterImage binomial_blur(const RasterImage& img);

// The raw 5x5 kernel, row-major, unnormalized.
std::span<const int, 25> binomial_kernel();

// Separable Catmull-Rom (a = -0.5) resampling with pixel-center alignment
// and edge replication. Works on any channel count; output clamped to [0,1].
RasterImage resize_bicubic(const RasterImage& img, std::size_t out_width, std::size_t out_height);

// Output size that downsample_to_height will produce for a given input.
std::pair<std::size_t, std::size_t> target_dimensions(std::size_t width, std::size_t height,
                                                      const ResizePolicy& policy);

// Pyramid reduction: blur + halve while height >= 2 * target, then one
// final bicubic resize to the exact target geometry.
RasterImage downsample_to_height(const RasterImage& img, const ResizePolicy& policy);

// Full HC -> LG transform: luminance conversion followed by pyramid reduction.
RasterImage hc_to_lg(const RasterImage& img, const ResizePolicy& policy);

// Quantizes a 1-channel image to 8 bits (round half up). Linear-light images
// are gamma-compressed first unless `keep_linear` is set.
std::vector<std::uint8_t> to_gray8(const RasterImage& img, bool keep_linear = false);

// Quantizes a 3-channel image to interleaved 8-bit RGB.
std::vector<std::uint8_t> to_rgb8(const RasterImage& img);

}  // namespace salbench::imaging
