#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "salbench/fixmap.hpp"

namespace salbench::metrics {

using fixmap::DensityMap;
using fixmap::FixationSet;

// Regularizer of the KL divergence (double machine epsilon).
inline constexpr double kEpsilon = 2.220446049250313e-16;

// Largest shuffled-AUC negative sample, as a multiple of the fixation count.
inline constexpr std::size_t kShuffledNegativesPerFixation = 100;

// Fixed field order for every serialized report.
inline constexpr std::array<std::string_view, 6> kMetricNames = {"nss", "kl", "auc_judd", "auc_shuffled", "cc", "sim"};

struct MetricIssue {
    std::string metric;
    std::string message;
    friend bool operator==(const MetricIssue&, const MetricIssue&) = default;
};

// Scores of one (prediction, ground truth) pair. A metric that could not be
// computed on a degenerate map is NaN and has a matching entry in `issues`.
struct MetricReport {
    double nss = std::numeric_limits<double>::quiet_NaN();
    double kl = std::numeric_limits<double>::quiet_NaN();
    double auc_judd = std::numeric_limits<double>::quiet_NaN();
    double auc_shuffled = std::numeric_limits<double>::quiet_NaN();
    double cc = std::numeric_limits<double>::quiet_NaN();
    double sim = std::numeric_limits<double>::quiet_NaN();
    std::vector<MetricIssue> issues;

    // Value by index into kMetricNames.
    double value(std::size_t index) const;
    double& value(std::size_t index);
    bool ok() const noexcept { return issues.empty(); }
};

// Mean z-score of `sal` (population std) at the fixated pixels.
double nss(const DensityMap& sal, const FixationSet& fix);

// sum gt * ln(eps + gt / (pred + eps)); both maps must be sum-1.
double kl(const DensityMap& pred, const DensityMap& gt);

// ROC area with thresholds at the saliency of each fixation; negatives are
// all pixels without a fixation.
double auc_judd(const DensityMap& sal, const FixationSet& fix);

// The negative locations auc_shuffled draws: all of them when there are at
// most `count`, otherwise `count` distinct entries picked with `seed`.
std::vector<fixmap::Point> sample_negatives(const FixationSet& negatives, std::size_t count, std::uint64_t seed);

// As auc_judd, with the false-positive rate measured on fixations taken
// from other stimuli (already rescaled to the map's frame).
double auc_shuffled(const DensityMap& sal, const FixationSet& fix, const FixationSet& negatives,
                    std::uint64_t seed);

// Pearson correlation over pixels.
double cc(const DensityMap& p, const DensityMap& q);

// Histogram intersection of two sum-1 maps.
double sim(const DensityMap& p, const DensityMap& q);

// All six metrics. Location metrics compare `pred` with `gt_fix`, distribution
// metrics compare `pred` with `gt_map` (both sum-normalized here). Dimension
// mismatches throw one ValidationError naming the first affected metric;
// degenerate maps are reported per metric in MetricReport::issues.
MetricReport score_pair(const DensityMap& pred, const FixationSet& gt_fix, const DensityMap& gt_map,
                        const FixationSet& negatives, std::uint64_t seed);

std::string csv_header();
std::string to_csv_row(const MetricReport& r);
std::string to_json(const MetricReport& r, int indent = -1);

}  // namespace salbench::metrics
