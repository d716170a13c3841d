#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "salbench/dataset.hpp"
#include "salbench/metrics.hpp"
#include "salbench/stats.hpp"

namespace salbench::experiments {

inline constexpr std::size_t kMetricCount = metrics::kMetricNames.size();

// Integer grid first, first+stride, ... up to and including last when it
// falls on the grid.
std::vector<double> sigma_grid(double first = 1.0, double last = 100.0, double stride = 1.0);

struct SweepConfig {
    std::vector<double> sigmas = sigma_grid();
    fixmap::BlurDomain domain = fixmap::BlurDomain::Spatial;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
};

struct PairScores {
    std::string stimulus_id;
    std::string observer_id;
    std::vector<metrics::MetricReport> by_sigma;  // aligned with SweepResult::sigmas
};

// Median and quartiles across (stimulus, observer) pairs; NaN scores are
// left out, and a column with no finite score is NaN.
struct Curve {
    std::vector<double> median;
    std::vector<double> p25;
    std::vector<double> p75;
};

struct SweepResult {
    std::vector<double> sigmas;
    std::array<Curve, kMetricCount> curves;  // indexed like kMetricNames
    std::vector<PairScores> pairs;           // sorted by (stimulus, observer)
};

// For every sigma and (stimulus, observer) pair, blurs the LG and HC
// fixations of that observer and scores LG (prediction) against HC (ground
// truth). Shuffled-AUC negatives are the HC fixations on all other stimuli.
SweepResult run_sigma_sweep(const Dataset& ds, const SweepConfig& cfg);

struct CongruencyConfig {
    double sigma = 30.0;
    fixmap::BlurDomain domain = fixmap::BlurDomain::Spatial;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
};

struct ObserverScore {
    std::string stimulus_id;
    std::string observer_id;
    metrics::MetricReport report;
};

struct ConditionScores {
    std::vector<ObserverScore> scores;  // sorted by (stimulus, observer)
    std::array<double, kMetricCount> median{};
};

struct CongruencyResult {
    double sigma = 30.0;
    ConditionScores hc;
    std::optional<ConditionScores> lg;
    // HC vs. LG one-way ANOVA per metric; empty without an LG condition.
    std::optional<std::array<stats::TestResult, kMetricCount>> anova;
};

// Blurred map of every set except `left_out`.
fixmap::DensityMap leave_one_out_predictor(const std::vector<fixmap::FixationSet>& sets, std::size_t left_out,
                                           const fixmap::BlurSpec& blur);

// Leave-one-out inter-observer congruency. Needs >= 3 observers for every
// stimulus of each present condition.
CongruencyResult run_congruency(const Dataset& ds, const CongruencyConfig& cfg);

// Column order of the inter-observer consistency table.
inline constexpr std::array<std::size_t, kMetricCount> kTableOrder = {2, 3, 4, 0, 5, 1};
inline constexpr std::array<const char*, kMetricCount> kTableLabels = {"jAUC", "sAUC", "CC", "NSS", "SIM", "KL"};

// Metrics used for model accuracy, as indices into kMetricNames.
inline constexpr std::array<std::size_t, 4> kAccuracyMetrics = {0, 2, 4, 5};

struct EvalConfig {
    double sigma = 30.0;  // ground-truth map blur
    fixmap::BlurDomain domain = fixmap::BlurDomain::Spatial;
    std::size_t jobs = 0;
};

struct ImageScore {
    std::string image_id;
    metrics::MetricReport report;  // only the accuracy metrics are set
    std::optional<double> detection_ms;
};

struct TimingSummary {
    std::size_t count = 0;
    double mean_ms = 0.0;
    double sd_ms = 0.0;
};

struct ModelEvalResult {
    std::string label;
    std::vector<ImageScore> images;  // dataset stimulus order
    std::array<double, 4> mean{};    // aligned with kAccuracyMetrics
    std::array<double, 4> sd{};
    std::optional<double> training_time_s;
    std::optional<TimingSummary> detection;
};

struct ModelComparison {
    ModelEvalResult a;
    ModelEvalResult b;
    std::array<stats::TestResult, 4> ttests{};  // aligned with kAccuracyMetrics
    // Paired over images timed in both runs, when there are at least 2.
    std::optional<stats::TestResult> detection_ttest;
};

// Prediction file for `id` in `dir`: <id>.npy, else <id>.png.
std::optional<std::filesystem::path> find_prediction(const std::filesystem::path& dir, const std::string& id);

// timing.csv: image_id,millis. Every value must be a positive number.
std::vector<std::pair<std::string, double>> read_timing_csv(const std::filesystem::path& path);

struct TrainingLogRow {
    std::size_t iteration = 0;
    double loss = 0.0;
    double lr = 0.0;
    double elapsed_s = 0.0;
};
// training_log.csv: iteration,loss,lr,elapsed_s
std::vector<TrainingLogRow> read_training_log(const std::filesystem::path& path);

// Resamples a prediction to `size`: max-1 normalization, then bicubic
// resize. A map already at `size` is only normalized.
fixmap::DensityMap upsample_prediction(const fixmap::DensityMap& pred, fixmap::Size size);

// Scores the predictions in `pred_dir` against the pooled HC fixations of
// each stimulus. Optional timing.csv and training_log.csv in the same
// directory fill the timing fields.
ModelEvalResult evaluate_model_outputs(const std::filesystem::path& pred_dir, const Dataset& ds,
                                       const EvalConfig& cfg, std::string label = "model");

// Two-tailed paired t-test per accuracy metric over shared image ids.
ModelComparison compare_models(ModelEvalResult a, ModelEvalResult b);

}  // namespace salbench::experiments
