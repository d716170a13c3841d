#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "salbench/fixmap.hpp"

namespace salbench::experiments {

inline constexpr int kSchemaVersion = 1;

struct StimulusInfo {
    std::string id;
    fixmap::Size size;
    std::string image;  // path relative to the dataset root; may be empty
};

// Stimuli plus per-observer fixations for the two viewing conditions. The
// LG list may be empty for single-condition (e.g. CAT2000-style) datasets.
struct Dataset {
    std::vector<StimulusInfo> stimuli;
    std::vector<fixmap::FixationSet> hc;
    std::vector<fixmap::FixationSet> lg;

    fixmap::StimulusSizes sizes() const;
    const StimulusInfo& stimulus(const std::string& id) const;
    // Sets of one condition for one stimulus, in dataset order.
    std::vector<fixmap::FixationSet> sets_for(const std::vector<fixmap::FixationSet>& condition,
                                              const std::string& stimulus_id) const;
};

// On-disk layout:
//   <root>/dataset.json     {"schema_version":1,"stimuli":[{"id","width","height","image"}],
//                            "fixations":{"hc":"fixations_hc.csv","lg":"fixations_lg.csv"}}
//   <root>/stimuli/*.png    optional stimulus images
//   <root>/fixations_*.csv  stimulus_id,observer_id,x,y
Dataset load_dataset(const std::filesystem::path& root);
void save_dataset(const std::filesystem::path& root, const Dataset& ds);

}  // namespace salbench::experiments
