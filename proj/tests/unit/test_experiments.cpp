#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <regex>

#include "salbench/density_io.hpp"
#include "salbench/errors.hpp"
#include "salbench/experiments.hpp"
#include "salbench/report.hpp"
#include "salbench/rng.hpp"
#include "salbench/synthetic.hpp"
#include "testing.hpp"

using namespace salbench;
using namespace salbench::experiments;
using fixmap::DensityMap;
using fixmap::FixationSet;
using testing_support::read_file;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

SyntheticSpec small_spec() {
    SyntheticSpec s;
    s.stimuli = 4;
    s.observers = 5;
    s.fixations_per_observer = 10;
    s.width = 120;
    s.height = 80;
    s.spread_min_px = 4;
    s.spread_max_px = 10;
    s.render_images = false;
    return s;
}

SweepConfig coarse(std::uint64_t seed = 1) {
    SweepConfig c;
    c.sigmas = sigma_grid(1, 100, 11);
    c.seed = seed;
    c.jobs = 1;
    return c;
}

std::size_t metric_index(std::string_view name) {
    return static_cast<std::size_t>(std::find(metrics::kMetricNames.begin(), metrics::kMetricNames.end(), name) -
                                    metrics::kMetricNames.begin());
}

// Prediction directory holding one .npy per stimulus.
void write_predictions(const std::filesystem::path& dir, const Dataset& ds, auto&& make) {
    std::filesystem::create_directories(dir);
    for (const auto& s : ds.stimuli) io::write_npy(dir / (s.id + ".npy"), make(s));
}

DensityMap gt_map_for(const Dataset& ds, const StimulusInfo& s, double sigma) {
    const auto sets = ds.sets_for(ds.hc, s.id);
    return fixmap::blur_density(fixmap::rasterize(fixmap::aggregate(sets)), {sigma});
}

}  // namespace

TEST(SigmaGrid, DefaultAndStride) {
    const auto g = sigma_grid();
    ASSERT_EQ(g.size(), 100u);
    EXPECT_EQ(g.front(), 1.0);
    EXPECT_EQ(g.back(), 100.0);
    const auto s = sigma_grid(1, 100, 5);
    EXPECT_EQ(s.size(), 20u);
    EXPECT_EQ(s.back(), 96.0);
}

TEST(Synthetic, ZeroJitterGivesIdenticalConditions) {
    auto spec = small_spec();
    spec.jitter_px = 0.0;
    const auto ds = generate_synthetic_dataset(spec, 3);
    EXPECT_EQ(ds.hc, ds.lg);
    EXPECT_EQ(ds.hc.size(), 20u);
    for (const auto& s : ds.hc) {
        EXPECT_EQ(s.points.size(), 10u);
        EXPECT_NO_THROW(s.validate());
    }
}

TEST(Synthetic, SameSeedSameBytes) {
    TempDir a, b;
    auto spec = small_spec();
    spec.render_images = true;
    write_synthetic_dataset(a.path(), spec, 7);
    write_synthetic_dataset(b.path(), spec, 7);
    for (const char* f : {"dataset.json", "fixations_hc.csv", "fixations_lg.csv", "stimuli/s00.png"}) {
        ASSERT_TRUE(std::filesystem::exists(a / f)) << f;
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
    }
    TempDir c;
    write_synthetic_dataset(c.path(), spec, 8);
    EXPECT_NE(read_file(a / "fixations_hc.csv"), read_file(c / "fixations_hc.csv"));
}

TEST(Synthetic, LoadRoundTrip) {
    TempDir dir;
    const auto ds = write_synthetic_dataset(dir.path(), small_spec(), 2);
    const auto back = load_dataset(dir.path());
    EXPECT_EQ(back.hc, ds.hc);
    EXPECT_EQ(back.lg, ds.lg);
    ASSERT_EQ(back.stimuli.size(), ds.stimuli.size());
    EXPECT_EQ(back.stimuli[1].size, (fixmap::Size{120, 80}));
}

TEST(Synthetic, SpecValidation) {
    auto spec = small_spec();
    spec.observers = 0;
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = small_spec();
    spec.spread_min_px = 20;
    spec.spread_max_px = 10;
    EXPECT_THROW(spec.validate(), ValidationError);
    spec = small_spec();
    spec.jitter_px = -1;
    EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(Synthetic, NullConditionsShareLayoutsButNotPoints) {
    const auto ds = generate_null_dataset(small_spec(), 4);
    ASSERT_EQ(ds.hc.size(), ds.lg.size());
    EXPECT_NE(ds.hc, ds.lg);
    EXPECT_EQ(generate_synthetic_dataset(small_spec(), 4).stimuli[2].id, ds.stimuli[2].id);
}

TEST(Dataset, LoadErrors) {
    TempDir dir;
    EXPECT_THROW(load_dataset(dir.path()), IoError);
    write_file(dir / "dataset.json", "{\"schema_version\": 1, \"stimuli\": []}");
    EXPECT_THROW(load_dataset(dir.path()), ValidationError);
    write_file(dir / "dataset.json", "{\"schema_version\": 9, \"stimuli\": [], \"fixations\": {\"hc\": \"f.csv\"}}");
    EXPECT_THROW(load_dataset(dir.path()), ValidationError);
    write_file(dir / "dataset.json", "not json");
    EXPECT_THROW(load_dataset(dir.path()), ParseError);
}

TEST(Sweep, IdenticalConditions) {
    auto spec = small_spec();
    spec.jitter_px = 0.0;
    const auto r = run_sigma_sweep(generate_synthetic_dataset(spec, 5), coarse());
    for (std::size_t k = 0; k < r.sigmas.size(); ++k) {
        EXPECT_NEAR(r.curves[metric_index("cc")].median[k], 1.0, 1e-9);
        EXPECT_LE(r.curves[metric_index("kl")].median[k], 1e-9);
        EXPECT_NEAR(r.curves[metric_index("sim")].median[k], 1.0, 1e-9);
    }
}

TEST(Sweep, JitteredConditionsDistributionMetricsImprove) {
    auto spec = small_spec();
    spec.jitter_px = 2.0;
    const auto r = run_sigma_sweep(generate_synthetic_dataset(spec, 6), coarse());
    const auto& cc = r.curves[metric_index("cc")].median;
    const auto& sim = r.curves[metric_index("sim")].median;
    const auto& kl = r.curves[metric_index("kl")].median;
    for (std::size_t k = 1; k < r.sigmas.size(); ++k) {
        EXPECT_GE(cc[k], cc[k - 1] - 1e-3);
        EXPECT_GE(sim[k], sim[k - 1] - 1e-3);
        EXPECT_LE(kl[k], kl[k - 1] + 1e-3);
    }
}

// HC and LG drawn independently and uniformly over the frame.
TEST(Sweep, IndependentFixationsScoresDecreaseWithSigma) {
    Dataset ds;
    const fixmap::Size size{480, 270};
    Rng rng(11);
    for (int s = 0; s < 4; ++s) {
        const std::string id = "s" + std::to_string(s);
        ds.stimuli.push_back({id, size, ""});
        for (int o = 0; o < 5; ++o) {
            FixationSet hc{id, "o" + std::to_string(o), {}, size}, lg = hc;
            for (int i = 0; i < 12; ++i) {
                hc.points.push_back({rng.uniform(0, 479), rng.uniform(0, 269)});
                lg.points.push_back({rng.uniform(0, 479), rng.uniform(0, 269)});
            }
            ds.hc.push_back(hc);
            ds.lg.push_back(lg);
        }
    }
    const auto r = run_sigma_sweep(ds, coarse());
    for (const char* m : {"nss", "auc_judd", "auc_shuffled", "cc", "sim"}) {
        const auto& c = r.curves[metric_index(m)].median;
        EXPECT_LT(c.back(), c.front()) << m << " at sigma 1 and 100";
    }
    const auto& kl = r.curves[metric_index("kl")].median;
    EXPECT_GT(kl.back(), kl.front());
}

TEST(Sweep, ObserverOrderDoesNotMatter) {
    auto ds = generate_synthetic_dataset(small_spec(), 9);
    const auto a = run_sigma_sweep(ds, coarse(3));
    std::reverse(ds.hc.begin(), ds.hc.end());
    std::rotate(ds.lg.begin(), ds.lg.begin() + 7, ds.lg.end());
    const auto b = run_sigma_sweep(ds, coarse(3));
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        EXPECT_EQ(a.curves[m].median, b.curves[m].median);
        EXPECT_EQ(a.curves[m].p25, b.curves[m].p25);
    }
}

TEST(Sweep, DeterministicAcrossJobCounts) {
    const auto ds = generate_synthetic_dataset(small_spec(), 10);
    auto one = coarse(5);
    auto four = coarse(5);
    four.jobs = 4;
    std::ostringstream a, b;
    report::write_sweep_pairs_csv(a, run_sigma_sweep(ds, one));
    report::write_sweep_pairs_csv(b, run_sigma_sweep(ds, four));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, Validation) {
    const auto ds = generate_synthetic_dataset(small_spec(), 1);
    auto cfg = coarse();
    cfg.sigmas = {1, 0.2};
    EXPECT_ANY_THROW(run_sigma_sweep(ds, cfg));
    cfg.sigmas = {5, 3};
    EXPECT_THROW(run_sigma_sweep(ds, cfg), ValidationError);
    auto missing = ds;
    missing.lg.pop_back();
    EXPECT_THROW(run_sigma_sweep(missing, coarse()), ValidationError);
}

TEST(Congruency, IdenticalObservers) {
    auto spec = small_spec();
    spec.jitter_px = 0;
    auto ds = generate_synthetic_dataset(spec, 12);
    // every observer of a stimulus replays observer o0
    for (auto* cond : {&ds.hc, &ds.lg}) {
        for (auto& s : *cond) s.points = ds.sets_for(ds.hc, s.stimulus_id).front().points;
    }
    CongruencyConfig cfg;
    cfg.jobs = 1;
    const auto r = run_congruency(ds, cfg);
    // the pooled others are the observer's own map
    EXPECT_NEAR(r.hc.median[metric_index("cc")], 1.0, 1e-9);
    EXPECT_NEAR(r.hc.median[metric_index("sim")], 1.0, 1e-9);
    for (const auto& sc : r.hc.scores) {
        const auto& first = *std::find_if(r.hc.scores.begin(), r.hc.scores.end(),
                                          [&](const ObserverScore& o) { return o.stimulus_id == sc.stimulus_id; });
        EXPECT_EQ(sc.report.auc_judd, first.report.auc_judd);
        EXPECT_EQ(sc.report.cc, first.report.cc);
    }
    ASSERT_TRUE(r.anova);
    for (const auto& t : *r.anova) EXPECT_NEAR(t.p_value, 1.0, 1e-9);
}

TEST(Congruency, TableLayout) {
    CongruencyConfig cfg;
    cfg.jobs = 1;
    const auto r = run_congruency(generate_synthetic_dataset(small_spec(), 13), cfg);
    const auto table = report::congruency_table(r);
    const std::regex row(R"(HC(, -?\d+\.\d\d){6}\nLG(, -?\d+\.\d\d){6}\nANOVA p(, \d\.\d\d){6}\n)");
    EXPECT_TRUE(std::regex_search(table, row)) << table;
    EXPECT_EQ(table.substr(0, table.find('\n')), "condition, jAUC, sAUC, CC, NSS, SIM, KL");
}

TEST(Congruency, OwnFixationsNeverInOwnPredictor) {
    auto sets = generate_synthetic_dataset(small_spec(), 14).sets_for(generate_synthetic_dataset(small_spec(), 14).hc, "s00");
    const fixmap::BlurSpec blur{5.0};
    const auto before = leave_one_out_predictor(sets, 2, blur);
    const auto before_other = leave_one_out_predictor(sets, 0, blur);
    sets[2].points = {{1, 1}, {2, 78}, {118, 3}};  // marker observer
    EXPECT_EQ(leave_one_out_predictor(sets, 2, blur), before);
    EXPECT_NE(leave_one_out_predictor(sets, 0, blur), before_other);
}

TEST(Congruency, NeedsThreeObservers) {
    auto spec = small_spec();
    spec.observers = 2;
    CongruencyConfig cfg;
    try {
        run_congruency(generate_synthetic_dataset(spec, 1), cfg);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("need at least 3"), std::string::npos);
    }
}

TEST(Eval, GroundTruthPredictionsScorePerfect) {
    TempDir dir;
    const auto ds = generate_synthetic_dataset(small_spec(), 15);
    write_predictions(dir / "gt", ds, [&](const StimulusInfo& s) { return gt_map_for(ds, s, 30.0); });
    EvalConfig cfg;
    const auto r = evaluate_model_outputs(dir / "gt", ds, cfg, "gt");
    ASSERT_EQ(r.images.size(), 4u);
    for (const auto& im : r.images) {
        EXPECT_NEAR(im.report.cc, 1.0, 1e-9);
        EXPECT_NEAR(im.report.sim, 1.0, 1e-9);
    }
    EXPECT_FALSE(r.training_time_s);
    EXPECT_FALSE(r.detection);
}

TEST(Eval, ConstantPredictionsAtChance) {
    TempDir dir;
    const auto ds = generate_synthetic_dataset(small_spec(), 16);
    write_predictions(dir / "c", ds, [](const StimulusInfo& s) {
        return DensityMap(s.size.width, s.size.height, std::vector<double>(s.size.width * s.size.height, 0.3));
    });
    const auto r = evaluate_model_outputs(dir / "c", ds, EvalConfig{}, "c");
    EXPECT_EQ(r.mean[1], 0.5);  // auc_judd
    EXPECT_TRUE(std::isnan(r.mean[0]));
    EXPECT_FALSE(r.images[0].report.issues.empty());
}

TEST(Eval, SameSizePredictionScoredUnchanged) {
    const auto ds = generate_synthetic_dataset(small_spec(), 17);
    const auto gt = gt_map_for(ds, ds.stimuli[0], 12.0);
    const auto up = upsample_prediction(gt, gt.size());
    EXPECT_EQ(up, gt.normalized_max());
    const auto fix = fixmap::aggregate(ds.sets_for(ds.hc, ds.stimuli[0].id));
    EXPECT_NEAR(metrics::nss(up, fix), metrics::nss(gt, fix), 1e-12);
    EXPECT_EQ(metrics::auc_judd(up, fix), metrics::auc_judd(gt, fix));
}

TEST(Eval, LowResolutionPredictionIsUpsampled) {
    const DensityMap small(4, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
    const auto up = upsample_prediction(small, {40, 30});
    EXPECT_EQ(up.width(), 40u);
    EXPECT_EQ(up.height(), 30u);
    EXPECT_EQ(up.max(), 1.0);
    EXPECT_EQ(up.normalization(), fixmap::Normalization::Max1);
    EXPECT_GT(up.at(39, 29), up.at(0, 0));
    const auto zero = upsample_prediction(DensityMap(2, 2), {5, 5});
    EXPECT_EQ(zero.sum(), 0.0);
}

TEST(Eval, TimingAndTrainingLogs) {
    TempDir dir;
    const auto ds = generate_synthetic_dataset(small_spec(), 18);
    for (const char* run : {"hc", "lg"}) {
        write_predictions(dir / run, ds, [&](const StimulusInfo& s) {
            const DensityMap gt = gt_map_for(ds, s, run[0] == 'h' ? 20.0 : 8.0);
            // quarter resolution, like a network output
            std::vector<double> v;
            for (std::size_t y = 0; y < gt.height(); y += 4)
                for (std::size_t x = 0; x < gt.width(); x += 4) v.push_back(gt.at(x, y));
            return DensityMap(gt.width() / 4, gt.height() / 4, v);
        });
    }
    write_file(dir / "hc/timing.csv", "image_id,millis\ns00,110\ns01,120\ns02,115\ns03,118\n");
    write_file(dir / "lg/timing.csv", "image_id,millis\ns00,12\ns01,11\ns02,13\ns03,12.5\n");
    write_file(dir / "hc/training_log.csv", "iteration,loss,lr,elapsed_s\n0,1.0,0.05,0.5\n1,0.8,0.05,1.25\n");
    const auto a = evaluate_model_outputs(dir / "hc", ds, EvalConfig{}, "HC");
    const auto b = evaluate_model_outputs(dir / "lg", ds, EvalConfig{}, "LG");
    ASSERT_TRUE(a.detection);
    EXPECT_EQ(a.detection->count, 4u);
    EXPECT_NEAR(a.detection->mean_ms, 115.75, 1e-12);
    EXPECT_EQ(a.training_time_s, 1.25);
    const auto cmp = compare_models(a, b);
    ASSERT_TRUE(cmp.detection_ttest);
    EXPECT_LT(cmp.detection_ttest->p_value, 0.001);
    for (const auto& t : cmp.ttests) EXPECT_EQ(t.dof, 3.0);

    std::ostringstream csv;
    report::write_ttest_csv(csv, cmp);
    const auto text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "schema_version,metric,mean_a,mean_b,statistic,dof,p_value");
    EXPECT_EQ(testing_support::count_lines(text), 6u);
}

TEST(Eval, MalformedInputs) {
    TempDir dir;
    write_file(dir / "t1.csv", "image_id,millis\ns00,-5\n");
    EXPECT_THROW(read_timing_csv(dir / "t1.csv"), ValidationError);
    write_file(dir / "t2.csv", "id,ms\n");
    EXPECT_THROW(read_timing_csv(dir / "t2.csv"), ParseError);
    write_file(dir / "l.csv", "iteration,loss,lr,elapsed_s\n1,x,0.1,2\n");
    try {
        read_training_log(dir / "l.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    const auto ds = generate_synthetic_dataset(small_spec(), 19);
    std::filesystem::create_directories(dir / "partial");
    io::write_npy(dir / "partial/s00.npy", DensityMap(120, 80, std::vector<double>(9600, 1.0)));
    try {
        evaluate_model_outputs(dir / "partial", ds, EvalConfig{});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("s01, s02, s03"), std::string::npos);
    }
}

TEST(Eval, PredictionLookupPrefersNpy) {
    TempDir dir;
    write_file(dir / "a.png", "x");
    write_file(dir / "a.npy", "x");
    write_file(dir / "b.png", "x");
    EXPECT_EQ(find_prediction(dir.path(), "a")->extension(), ".npy");
    EXPECT_EQ(find_prediction(dir.path(), "b")->extension(), ".png");
    EXPECT_FALSE(find_prediction(dir.path(), "c"));
}
