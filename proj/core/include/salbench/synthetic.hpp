#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "salbench/dataset.hpp"
#include "salbench/imaging.hpp"

namespace salbench::experiments {

// Parameters of the synthetic eye-tracking generator. Fixations cluster
// around a few salient loci per stimulus; the LG condition replays each HC
// fixation displaced by isotropic Gaussian jitter.
struct SyntheticSpec {
    std::size_t stimuli = 20;
    std::size_t observers = 18;
    std::size_t fixations_per_observer = 12;
    double jitter_px = 2.0;
    std::size_t loci = 3;
    // Per-stimulus locus count is uniform in [loci_min, loci]; 0 means loci.
    std::size_t loci_min = 0;
    std::size_t width = 480;
    std::size_t height = 270;
    double spread_min_px = 8.0;
    double spread_max_px = 24.0;
    bool render_images = true;

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct Locus {
    fixmap::Point center;
    double spread = 1.0;
    double weight = 1.0;
};

struct StimulusLayout {
    StimulusInfo info;
    std::vector<Locus> loci;
};

std::vector<StimulusLayout> make_layouts(const SyntheticSpec& spec, std::uint64_t seed);

// Independent observers viewing `layouts`; ids are "o00", "o01", ...
// Streams depend only on (seed, stimulus index, observer index).
std::vector<fixmap::FixationSet> sample_observers(const std::vector<StimulusLayout>& layouts,
                                                  const SyntheticSpec& spec, std::uint64_t seed);

// Copies `sets` with every point displaced by N(0, jitter_px) per axis and
// clamped into the frame. jitter_px == 0 returns the input unchanged.
std::vector<fixmap::FixationSet> jitter_fixations(const std::vector<fixmap::FixationSet>& sets,
                                                  double jitter_px, std::uint64_t seed);

// Colored blobs over a soft gradient, one per locus.
imaging::RasterImage render_stimulus(const StimulusLayout& layout);

// Deterministic for a fixed (spec, seed).
Dataset generate_synthetic_dataset(const SyntheticSpec& spec, std::uint64_t seed);

// Both conditions sampled independently from the same stimulus layouts, so
// any HC/LG difference is sampling noise. jitter_px is not used.
Dataset generate_null_dataset(const SyntheticSpec& spec, std::uint64_t seed);

// generate_synthetic_dataset (or generate_null_dataset) plus stimulus PNGs
// under <root>/stimuli.
Dataset write_synthetic_dataset(const std::filesystem::path& root, const SyntheticSpec& spec,
                                std::uint64_t seed, bool independent_conditions = false);

}  // namespace salbench::experiments
