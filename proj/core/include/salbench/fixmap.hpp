#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace salbench::fixmap {

struct Size {
    std::size_t width = 0;
    std::size_t height = 0;
    friend bool operator==(const Size&, const Size&) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

// Fixations of one observer on one stimulus, in stimulus pixel coordinates.
struct FixationSet {
    std::string stimulus_id;
    std::string observer_id;
    std::vector<Point> points;
    Size stimulus_size;

    // Throws ValidationError naming the first point outside [0,w) x [0,h).
    void validate() const;
    friend bool operator==(const FixationSet&, const FixationSet&) = default;
};

// Rounds a fixation to its pixel (half up), clamped into the map so that
// points in the last half pixel still land inside.
std::pair<std::size_t, std::size_t> pixel_of(const Point& p, const Size& size);

enum class Normalization { Raw, Sum1, Max1 };

// A map tagged Sum1 always sums to 1 within this tolerance.
inline constexpr double kSum1Tolerance = 1e-6;

struct BlurSpec;

// Nonnegative scalar field over a width x height grid, row-major.
class DensityMap {
public:
    DensityMap() = default;
    DensityMap(std::size_t width, std::size_t height, Normalization norm = Normalization::Raw);
    // Throws ValidationError on a length mismatch, a negative/NaN value, or
    // a Sum1 tag on values that do not sum to 1.
    DensityMap(std::size_t width, std::size_t height, std::vector<double> values,
               Normalization norm = Normalization::Raw);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    Size size() const noexcept { return {width_, height_}; }
    Normalization normalization() const noexcept { return norm_; }

    double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
    double& at(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    double sum() const;
    double max() const;

    // Throw EmptyInputError when the map has no mass.
    DensityMap normalized_sum() const;
    DensityMap normalized_max() const;
    // In-place normalized_sum.
    void rescale_to_sum1();
    // Zero-filled width x height raw map, reusing the current storage.
    void reset(std::size_t width, std::size_t height);

    friend bool operator==(const DensityMap&, const DensityMap&) = default;
    friend void gaussian_filter(const DensityMap& m, const BlurSpec& spec, DensityMap& out);

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    Normalization norm_ = Normalization::Raw;
    std::vector<double> values_;
};

enum class BlurDomain { Fourier, Spatial };

struct BlurSpec {
    double sigma = 1.0;
    BlurDomain domain = BlurDomain::Spatial;

    // Throws DomainError unless sigma >= 0.5.
    void validate() const;
};

// Resolves the pixel size of a stimulus by id; `fallback` covers ids that
// are not listed.
struct StimulusSizes {
    std::map<std::string, Size> by_id;
    std::optional<Size> fallback;

    std::optional<Size> find(const std::string& id) const;
};

// Reads `stimulus_id,observer_id,x,y` CSV. Blank lines and lines starting
// with '#' are ignored. One set per (stimulus, observer) in order of first
// appearance. Throws ParseError (with line number) or ValidationError.
std::vector<FixationSet> parse_fixations(std::istream& in, const StimulusSizes& sizes);
std::vector<FixationSet> parse_fixations_file(const std::string& path, const StimulusSizes& sizes);

// Inverse of parse_fixations; values printed in shortest round-trip form.
void write_fixations(std::ostream& out, std::span<const FixationSet> sets);

// Linear rescale into another frame, clamped to [0, w'-1] x [0, h'-1].
FixationSet rescale_fixations(const FixationSet& f, Size to);

// Raw count map: +1 at the pixel of every fixation.
DensityMap rasterize(const FixationSet& f);

// Gaussian low-pass of standard deviation spec.sigma without renormalizing.
// Mass that leaves the frame is lost (zero extension in both domains).
DensityMap gaussian_filter(const DensityMap& m, const BlurSpec& spec);
// Same, writing into `out` (which must not alias `m`) and reusing its storage.
void gaussian_filter(const DensityMap& m, const BlurSpec& spec, DensityMap& out);

// gaussian_filter followed by sum-1 normalization.
DensityMap blur_density(const DensityMap& m, const BlurSpec& spec);
void blur_density(const DensityMap& m, const BlurSpec& spec, DensityMap& out);

// Truncated, unit-sum 1-D kernel of radius ceil(4 sigma) used by the
// spatial path.
std::vector<double> gaussian_kernel(double sigma);

// Pools the points of sets that share one stimulus.
FixationSet aggregate(std::span<const FixationSet> sets, std::string observer_id = "aggregate");

}  // namespace salbench::fixmap
