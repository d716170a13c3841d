#include "salbench/fixmap.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <unordered_map>

#include "salbench/errors.hpp"
#include "salbench/text.hpp"

namespace salbench::fixmap {

namespace {

std::string describe(const Point& p) {
    return "(" + text::format_double(p.x) + ", " + text::format_double(p.y) + ")";
}

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

class FftPlan {
public:
    explicit FftPlan(fftw_plan plan) : plan_(plan) {}
    ~FftPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

void filter_spatial(const DensityMap& m, double sigma, std::span<double> out) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const auto r = static_cast<std::ptrdiff_t>(k.size() / 2);
    const auto w = static_cast<std::ptrdiff_t>(m.width());
    const auto h = static_cast<std::ptrdiff_t>(m.height());
    const auto src = m.values();

    // Scatter form of the separable convolution: cost scales with the
    // number of nonzero inputs, which keeps sparse fixation rasters cheap.
    thread_local std::vector<double> rows;
    if (rows.size() != src.size()) rows.assign(src.size(), 0.0);
    std::vector<std::ptrdiff_t> live_rows;
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        bool live = false;
        double* dst = rows.data() + y * w;
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            const double v = src[static_cast<std::size_t>(y * w + x)];
            if (v == 0.0) continue;
            live = true;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, x - r);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(w - 1, x + r);
            const double* kk = k.data() + (lo - x + r);
            for (std::ptrdiff_t i = lo; i <= hi; ++i) dst[i] += v * kk[i - lo];
        }
        if (live) live_rows.push_back(y);
    }

    for (std::ptrdiff_t y = 0; y < h; ++y) {
        double* dst = out.data() + y * w;
        std::fill(dst, dst + w, 0.0);
        for (const std::ptrdiff_t y0 : live_rows) {
            if (y0 < y - r || y0 > y + r) continue;
            const double kv = k[static_cast<std::size_t>(y - y0 + r)];
            const double* row = rows.data() + y0 * w;
            for (std::ptrdiff_t x = 0; x < w; ++x) dst[x] += kv * row[x];
        }
    }
    for (const std::ptrdiff_t y0 : live_rows) std::fill_n(rows.data() + y0 * w, w, 0.0);
}

void filter_fourier(const DensityMap& m, double sigma, std::span<double> out) {
    const auto pad = static_cast<std::size_t>(std::ceil(4.0 * sigma));
    const std::size_t pw = m.width() + 2 * pad;
    const std::size_t ph = m.height() + 2 * pad;
    const std::size_t cw = pw / 2 + 1;

    std::unique_ptr<double, FftwDeleter> real(static_cast<double*>(fftw_malloc(sizeof(double) * pw * ph)));
    std::unique_ptr<fftw_complex, FftwDeleter> spec(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * cw * ph)));
    if (!real || !spec) throw std::bad_alloc();

    std::unique_ptr<FftPlan> forward, inverse;
    {
        std::lock_guard lock(fftw_planner_mutex());
        forward = std::make_unique<FftPlan>(fftw_plan_dft_r2c_2d(
            static_cast<int>(ph), static_cast<int>(pw), real.get(), spec.get(), FFTW_ESTIMATE));
        inverse = std::make_unique<FftPlan>(fftw_plan_dft_c2r_2d(
            static_cast<int>(ph), static_cast<int>(pw), spec.get(), real.get(), FFTW_ESTIMATE));
    }

    std::fill_n(real.get(), pw * ph, 0.0);
    for (std::size_t y = 0; y < m.height(); ++y) {
        for (std::size_t x = 0; x < m.width(); ++x) real.get()[(y + pad) * pw + x + pad] = m.at(x, y);
    }
    forward->execute();

    // Gaussian transfer function exp(-2 pi^2 sigma^2 f^2), f in cycles/pixel.
    const double c = -2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
    const double scale = 1.0 / static_cast<double>(pw * ph);
    for (std::size_t ky = 0; ky < ph; ++ky) {
        const double fy = static_cast<double>(ky <= ph / 2 ? static_cast<std::ptrdiff_t>(ky)
                                                           : static_cast<std::ptrdiff_t>(ky) - static_cast<std::ptrdiff_t>(ph)) /
                          static_cast<double>(ph);
        for (std::size_t kx = 0; kx < cw; ++kx) {
            const double fx = static_cast<double>(kx) / static_cast<double>(pw);
            const double gain = std::exp(c * (fx * fx + fy * fy)) * scale;
            fftw_complex& z = spec.get()[ky * cw + kx];
            z[0] *= gain;
            z[1] *= gain;
        }
    }
    inverse->execute();

    for (std::size_t y = 0; y < m.height(); ++y) {
        for (std::size_t x = 0; x < m.width(); ++x) {
            // Round-off can leave tiny negative values far from any mass.
            out[y * m.width() + x] = std::max(0.0, real.get()[(y + pad) * pw + x + pad]);
        }
    }
}

}  // namespace

void FixationSet::validate() const {
    if (stimulus_size.width == 0 || stimulus_size.height == 0) {
        throw ValidationError("fixation set " + stimulus_id + "/" + observer_id + ": zero stimulus size");
    }
    const auto w = static_cast<double>(stimulus_size.width);
    const auto h = static_cast<double>(stimulus_size.height);
    for (const Point& p : points) {
        if (!(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h)) {
            throw ValidationError("fixation " + describe(p) + " of " + stimulus_id + "/" + observer_id +
                                  " outside stimulus " + std::to_string(stimulus_size.width) + "x" +
                                  std::to_string(stimulus_size.height));
        }
    }
}

std::pair<std::size_t, std::size_t> pixel_of(const Point& p, const Size& size) {
    const auto round_clamp = [](double v, std::size_t n) {
        const double r = std::floor(v + 0.5);
        if (r <= 0.0) return std::size_t{0};
        return std::min(static_cast<std::size_t>(r), n - 1);
    };
    return {round_clamp(p.x, size.width), round_clamp(p.y, size.height)};
}

DensityMap::DensityMap(std::size_t width, std::size_t height, Normalization norm)
    : width_(width), height_(height), norm_(norm), values_(width * height, 0.0) {
    if (norm == Normalization::Sum1) throw ValidationError("DensityMap: an all-zero map cannot be sum-normalized");
}

DensityMap::DensityMap(std::size_t width, std::size_t height, std::vector<double> values,
                       Normalization norm)
    : width_(width), height_(height), norm_(norm), values_(std::move(values)) {
    if (values_.size() != width * height) {
        throw ValidationError("DensityMap: " + std::to_string(values_.size()) + " values for a " +
                              std::to_string(width) + "x" + std::to_string(height) + " map");
    }
    bool ok = true;
    for (double v : values_) ok &= (v >= 0.0) & (v <= std::numeric_limits<double>::max());
    if (!ok) throw ValidationError("DensityMap: negative or non-finite value");
    if (norm == Normalization::Sum1 && !(std::abs(sum() - 1.0) <= kSum1Tolerance)) {
        throw ValidationError("DensityMap: values tagged sum-1 sum to " + text::format_double(sum()));
    }
}

double DensityMap::sum() const {
    // Four interleaved partial sums; fixed order, so still deterministic.
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = values_.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s[0] += values_[i];
        s[1] += values_[i + 1];
        s[2] += values_[i + 2];
        s[3] += values_[i + 3];
    }
    for (; i < n; ++i) s[0] += values_[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
}

double DensityMap::max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

DensityMap DensityMap::normalized_sum() const {
    DensityMap out(*this);
    out.rescale_to_sum1();
    return out;
}

void DensityMap::reset(std::size_t width, std::size_t height) {
    width_ = width;
    height_ = height;
    norm_ = Normalization::Raw;
    values_.assign(width * height, 0.0);
}

void DensityMap::rescale_to_sum1() {
    const double s = sum();
    if (!(s > 0.0)) throw EmptyInputError("density map has zero mass");
    for (double& x : values_) x /= s;
    norm_ = Normalization::Sum1;
}

DensityMap DensityMap::normalized_max() const {
    const double mx = max();
    if (!(mx > 0.0)) throw EmptyInputError("density map has zero mass");
    std::vector<double> v(values_);
    for (double& x : v) x /= mx;
    // Division by the max yields exactly 1 at the argmax.
    return DensityMap(width_, height_, std::move(v), Normalization::Max1);
}

void BlurSpec::validate() const {
    if (!(sigma >= 0.5) || !std::isfinite(sigma)) {
        throw DomainError("blur sigma must be >= 0.5 px, got " + text::format_double(sigma));
    }
}

std::optional<Size> StimulusSizes::find(const std::string& id) const {
    if (const auto it = by_id.find(id); it != by_id.end()) return it->second;
    return fallback;
}

std::vector<FixationSet> parse_fixations(std::istream& in, const StimulusSizes& sizes) {
    std::vector<FixationSet> sets;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view row = text::trim(line);
        if (line_no == 1 && row.starts_with("\xEF\xBB\xBF")) row.remove_prefix(3);
        if (row.empty() || row.front() == '#') continue;
        const auto fields = text::split(row, ',');
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != 4 || text::trim(fields[0]) != "stimulus_id" ||
                text::trim(fields[1]) != "observer_id" || text::trim(fields[2]) != "x" ||
                text::trim(fields[3]) != "y") {
                throw ParseError("expected header stimulus_id,observer_id,x,y", line_no);
            }
            continue;
        }
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
        }
        const std::string stimulus(text::trim(fields[0]));
        const std::string observer(text::trim(fields[1]));
        if (stimulus.empty() || observer.empty()) throw ParseError("empty stimulus_id or observer_id", line_no);
        Point p;
        if (!text::parse_double(fields[2], p.x)) throw ParseError("bad x value '" + std::string(fields[2]) + "'", line_no);
        if (!text::parse_double(fields[3], p.y)) throw ParseError("bad y value '" + std::string(fields[3]) + "'", line_no);
        const auto size = sizes.find(stimulus);
        if (!size) throw ValidationError("line " + std::to_string(line_no) + ": unknown size for stimulus " + stimulus);
        if (!(p.x >= 0.0 && p.x < static_cast<double>(size->width) && p.y >= 0.0 &&
              p.y < static_cast<double>(size->height))) {
            throw ValidationError("line " + std::to_string(line_no) + ": fixation " + describe(p) + " of " +
                                  stimulus + "/" + observer + " outside stimulus " +
                                  std::to_string(size->width) + "x" + std::to_string(size->height));
        }
        const std::string key = stimulus + '\x1f' + observer;
        auto [it, inserted] = index.try_emplace(key, sets.size());
        if (inserted) sets.push_back({stimulus, observer, {}, *size});
        sets[it->second].points.push_back(p);
    }
    if (!header_seen) return {};
    return sets;
}

std::vector<FixationSet> parse_fixations_file(const std::string& path, const StimulusSizes& sizes) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fixation file " + path);
    return parse_fixations(in, sizes);
}

void write_fixations(std::ostream& out, std::span<const FixationSet> sets) {
    out << "stimulus_id,observer_id,x,y\n";
    for (const FixationSet& s : sets) {
        for (const Point& p : s.points) {
            out << s.stimulus_id << ',' << s.observer_id << ',' << text::format_double(p.x) << ','
                << text::format_double(p.y) << '\n';
        }
    }
}

FixationSet rescale_fixations(const FixationSet& f, Size to) {
    if (to.width == 0 || to.height == 0) throw DomainError("rescale_fixations: zero target size");
    if (f.stimulus_size == to) return f;
    FixationSet out{f.stimulus_id, f.observer_id, {}, to};
    out.points.reserve(f.points.size());
    const double sx = static_cast<double>(to.width) / static_cast<double>(f.stimulus_size.width);
    const double sy = static_cast<double>(to.height) / static_cast<double>(f.stimulus_size.height);
    for (const Point& p : f.points) {
        out.points.push_back({std::clamp(p.x * sx, 0.0, static_cast<double>(to.width - 1)),
                              std::clamp(p.y * sy, 0.0, static_cast<double>(to.height - 1))});
    }
    return out;
}

DensityMap rasterize(const FixationSet& f) {
    if (f.points.empty()) {
        throw EmptyInputError("rasterize: no fixations for " + f.stimulus_id + "/" + f.observer_id);
    }
    DensityMap m(f.stimulus_size.width, f.stimulus_size.height);
    for (const Point& p : f.points) {
        const auto [x, y] = pixel_of(p, f.stimulus_size);
        m.at(x, y) += 1.0;
    }
    return m;
}

std::vector<double> gaussian_kernel(double sigma) {
    const auto r = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double s = 0.0;
    for (std::ptrdiff_t i = -r; i <= r; ++i) {
        const double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + r)] = v;
        s += v;
    }
    for (double& v : k) v /= s;
    return k;
}

void gaussian_filter(const DensityMap& m, const BlurSpec& spec, DensityMap& out) {
    spec.validate();
    if (m.width() == 0 || m.height() == 0) throw EmptyInputError("gaussian_filter: empty map");
    if (&m == &out) throw ValidationError("gaussian_filter: output aliases input");
    // Both filters write every output pixel, so the storage is only resized.
    out.width_ = m.width();
    out.height_ = m.height();
    out.norm_ = Normalization::Raw;
    out.values_.resize(m.width() * m.height());
    if (spec.domain == BlurDomain::Fourier) {
        filter_fourier(m, spec.sigma, out.values());
    } else {
        filter_spatial(m, spec.sigma, out.values());
    }
}

DensityMap gaussian_filter(const DensityMap& m, const BlurSpec& spec) {
    DensityMap out;
    gaussian_filter(m, spec, out);
    return out;
}

void blur_density(const DensityMap& m, const BlurSpec& spec, DensityMap& out) {
    gaussian_filter(m, spec, out);
    try {
        out.rescale_to_sum1();
    } catch (const EmptyInputError&) {
        throw EmptyInputError("blur_density: input map has zero mass");
    }
}

DensityMap blur_density(const DensityMap& m, const BlurSpec& spec) {
    DensityMap out;
    blur_density(m, spec, out);
    return out;
}

FixationSet aggregate(std::span<const FixationSet> sets, std::string observer_id) {
    if (sets.empty()) throw EmptyInputError("aggregate: no fixation sets");
    FixationSet out{sets.front().stimulus_id, std::move(observer_id), {}, sets.front().stimulus_size};
    for (const FixationSet& s : sets) {
        if (s.stimulus_id != out.stimulus_id) {
            throw ValidationError("aggregate: mixed stimuli '" + out.stimulus_id + "' and '" + s.stimulus_id + "'");
        }
        if (s.stimulus_size != out.stimulus_size) {
            throw ValidationError("aggregate: inconsistent stimulus size for " + s.stimulus_id);
        }
        out.points.insert(out.points.end(), s.points.begin(), s.points.end());
    }
    return out;
}

}  // namespace salbench::fixmap
