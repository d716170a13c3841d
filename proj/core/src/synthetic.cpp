#include "salbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "salbench/errors.hpp"
#include "salbench/image_io.hpp"
#include "salbench/rng.hpp"

namespace salbench::experiments {

namespace {

enum StreamTag : std::uint64_t { kLayoutStream = 1, kObserverStream = 2, kJitterStream = 3, kSecondCondition = 4 };

std::string numbered(char prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
    return buf;
}

int digits_for(std::size_t n) {
    int d = 2;
    for (std::size_t v = 100; v < n; v *= 10) ++d;
    return d;
}

}  // namespace

void SyntheticSpec::validate() const {
    const auto need = [](bool ok, const char* field) {
        if (!ok) throw ValidationError(std::string("synthetic spec: invalid ") + field);
    };
    need(stimuli >= 1, "stimuli");
    need(observers >= 1, "observers");
    need(fixations_per_observer >= 1, "fixations_per_observer");
    need(loci >= 1, "loci");
    need(loci_min <= loci, "loci_min");
    need(width >= 8 && height >= 8, "width/height");
    need(jitter_px >= 0.0 && std::isfinite(jitter_px), "jitter_px");
    need(spread_min_px > 0.0 && spread_max_px >= spread_min_px, "spread_min_px/spread_max_px");
}

std::vector<StimulusLayout> make_layouts(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(derive_seed(seed, kLayoutStream));
    const auto w = static_cast<double>(spec.width);
    const auto h = static_cast<double>(spec.height);
    const int digits = digits_for(spec.stimuli);
    std::vector<StimulusLayout> out;
    out.reserve(spec.stimuli);
    for (std::size_t s = 0; s < spec.stimuli; ++s) {
        StimulusLayout layout;
        layout.info.id = numbered('s', s, digits);
        layout.info.size = {spec.width, spec.height};
        // One spread scale per stimulus; loci vary by +-20% around it.
        const double scale = rng.uniform(spec.spread_min_px, spec.spread_max_px);
        const std::size_t lo = spec.loci_min == 0 ? spec.loci : spec.loci_min;
        const std::size_t count = lo + static_cast<std::size_t>(rng.below(spec.loci - lo + 1));
        for (std::size_t k = 0; k < count; ++k) {
            Locus l;
            l.center = {rng.uniform(0.15 * w, 0.85 * w), rng.uniform(0.15 * h, 0.85 * h)};
            l.spread = scale * rng.uniform(0.8, 1.2);
            l.weight = rng.uniform(0.5, 1.5);
            layout.loci.push_back(l);
        }
        out.push_back(std::move(layout));
    }
    return out;
}

std::vector<fixmap::FixationSet> sample_observers(const std::vector<StimulusLayout>& layouts,
                                                  const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int digits = digits_for(spec.observers);
    std::vector<fixmap::FixationSet> out;
    out.reserve(layouts.size() * spec.observers);
    for (std::size_t s = 0; s < layouts.size(); ++s) {
        const StimulusLayout& layout = layouts[s];
        const auto w = static_cast<double>(layout.info.size.width);
        const auto h = static_cast<double>(layout.info.size.height);
        double total_weight = 0.0;
        for (const Locus& l : layout.loci) total_weight += l.weight;
        for (std::size_t o = 0; o < spec.observers; ++o) {
            Rng rng(derive_seed(seed, kObserverStream, s, o));
            fixmap::FixationSet set{layout.info.id, numbered('o', o, digits), {}, layout.info.size};
            for (std::size_t f = 0; f < spec.fixations_per_observer; ++f) {
                double pick = rng.uniform() * total_weight;
                const Locus* locus = &layout.loci.back();
                for (const Locus& l : layout.loci) {
                    if (pick < l.weight) {
                        locus = &l;
                        break;
                    }
                    pick -= l.weight;
                }
                fixmap::Point p{};
                for (int attempt = 0; attempt < 32; ++attempt) {
                    p = {rng.normal(locus->center.x, locus->spread), rng.normal(locus->center.y, locus->spread)};
                    if (p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h) break;
                }
                p.x = std::clamp(p.x, 0.0, w - 1.0);
                p.y = std::clamp(p.y, 0.0, h - 1.0);
                set.points.push_back(p);
            }
            out.push_back(std::move(set));
        }
    }
    return out;
}

std::vector<fixmap::FixationSet> jitter_fixations(const std::vector<fixmap::FixationSet>& sets,
                                                  double jitter_px, std::uint64_t seed) {
    if (jitter_px == 0.0) return sets;
    std::vector<fixmap::FixationSet> out = sets;
    for (std::size_t i = 0; i < out.size(); ++i) {
        Rng rng(derive_seed(seed, kJitterStream, i));
        const auto w = static_cast<double>(out[i].stimulus_size.width);
        const auto h = static_cast<double>(out[i].stimulus_size.height);
        for (fixmap::Point& p : out[i].points) {
            p.x = std::clamp(p.x + rng.normal(0.0, jitter_px), 0.0, w - 1.0);
            p.y = std::clamp(p.y + rng.normal(0.0, jitter_px), 0.0, h - 1.0);
        }
    }
    return out;
}

imaging::RasterImage render_stimulus(const StimulusLayout& layout) {
    const std::size_t w = layout.info.size.width;
    const std::size_t h = layout.info.size.height;
    imaging::RasterImage img(w, h, 3, imaging::Encoding::SrgbGamma);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double g = 0.25 + 0.2 * static_cast<double>(x + y) / static_cast<double>(w + h);
            for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = g;
        }
    }
    for (std::size_t k = 0; k < layout.loci.size(); ++k) {
        const Locus& l = layout.loci[k];
        // Evenly spaced hues, fully saturated.
        const double hue = std::fmod(static_cast<double>(k) * 0.381966, 1.0) * 6.0;
        const double frac = hue - std::floor(hue);
        const double rgb_table[6][3] = {{1, frac, 0}, {1 - frac, 1, 0}, {0, 1, frac},
                                        {0, 1 - frac, 1}, {frac, 0, 1}, {1, 0, 1 - frac}};
        const double* rgb = rgb_table[static_cast<int>(hue) % 6];
        const double radius = 2.5 * l.spread;
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                const double dx = static_cast<double>(x) - l.center.x;
                const double dy = static_cast<double>(y) - l.center.y;
                const double a = std::exp(-(dx * dx + dy * dy) / (2.0 * radius * radius));
                if (a < 1e-3) continue;
                for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = (1 - a) * img.at(x, y, c) + a * rgb[c];
            }
        }
    }
    return img;
}

Dataset generate_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    const auto layouts = make_layouts(spec, seed);
    Dataset ds;
    for (const auto& l : layouts) ds.stimuli.push_back(l.info);
    ds.hc = sample_observers(layouts, spec, seed);
    ds.lg = jitter_fixations(ds.hc, spec.jitter_px, seed);
    return ds;
}

Dataset generate_null_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
    const auto layouts = make_layouts(spec, seed);
    Dataset ds;
    for (const auto& l : layouts) ds.stimuli.push_back(l.info);
    ds.hc = sample_observers(layouts, spec, seed);
    ds.lg = sample_observers(layouts, spec, derive_seed(seed, kSecondCondition));
    return ds;
}

Dataset write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec,
                                std::uint64_t seed, bool independent_conditions) {
    const auto layouts = make_layouts(spec, seed);
    Dataset ds = independent_conditions ? generate_null_dataset(spec, seed) : generate_synthetic_dataset(spec, seed);
    if (spec.render_images) {
        std::filesystem::create_directories(root / "stimuli");
        for (std::size_t i = 0; i < layouts.size(); ++i) {
            const std::string rel = "stimuli/" + layouts[i].info.id + ".png";
            const auto img = render_stimulus(layouts[i]);
            io::write_png(root / rel, io::Image8{img.width(), img.height(), 3, imaging::to_rgb8(img)});
            ds.stimuli[i].image = rel;
        }
    }
    save_dataset(root, ds);
    return ds;
}

}  // namespace salbench::experiments
