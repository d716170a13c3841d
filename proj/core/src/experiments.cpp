#include "salbench/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "salbench/density_io.hpp"
#include "salbench/errors.hpp"
#include "salbench/imaging.hpp"
#include "salbench/parallel.hpp"
#include "salbench/rng.hpp"
#include "salbench/text.hpp"

namespace salbench::experiments {

using fixmap::BlurSpec;
using fixmap::DensityMap;
using fixmap::FixationSet;
using metrics::MetricReport;

namespace {

// FNV-1a; ties per-item seeds to ids rather than to list positions.
std::uint64_t hash_id(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string pair_name(const FixationSet& f) { return f.stimulus_id + "/" + f.observer_id; }

bool by_ids(const FixationSet& a, const FixationSet& b) {
    return std::tie(a.stimulus_id, a.observer_id) < std::tie(b.stimulus_id, b.observer_id);
}

std::vector<FixationSet> sorted_sets(std::vector<FixationSet> sets) {
    std::sort(sets.begin(), sets.end(), by_ids);
    return sets;
}

// Fixations on every other stimulus, mapped into this stimulus' frame and
// sorted, so the pool does not depend on list order.
FixationSet negatives_for(const StimulusInfo& stim, const std::vector<FixationSet>& condition) {
    FixationSet pool{stim.id, "negatives", {}, stim.size};
    for (const FixationSet& f : condition) {
        if (f.stimulus_id == stim.id) continue;
        const FixationSet r = fixmap::rescale_fixations(f, stim.size);
        pool.points.insert(pool.points.end(), r.points.begin(), r.points.end());
    }
    std::sort(pool.points.begin(), pool.points.end(),
              [](const fixmap::Point& a, const fixmap::Point& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    return pool;
}

std::vector<double> finite_values(const std::vector<const MetricReport*>& reports, std::size_t metric) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const MetricReport* r : reports) {
        const double x = r->value(metric);
        if (std::isfinite(x)) v.push_back(x);
    }
    return v;
}

double median_or_nan(const std::vector<double>& v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(v);
}

void require_two_stimuli(const Dataset& ds, const char* what) {
    if (ds.stimuli.size() < 2) {
        throw ValidationError(std::string(what) + ": shuffled AUC needs at least 2 stimuli");
    }
}

template <typename Fn>
void guarded(MetricReport& r, std::size_t metric, Fn&& fn) {
    const std::string name(metrics::kMetricNames[metric]);
    try {
        r.value(metric) = fn();
    } catch (const DegenerateMapError& e) {
        r.issues.push_back({name, e.what()});
    } catch (const EmptyInputError& e) {
        r.issues.push_back({name, e.what()});
    }
}

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
    const std::string& operator[](std::size_t i) const { return fields[i]; }
};

std::vector<CsvRow> read_csv(const std::filesystem::path& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<CsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = text::trim(line);
        if (row.empty() || row.front() == '#') continue;
        const auto fields = text::split(row, ',');
        if (fields.size() != header.size()) {
            throw ParseError(path.filename().string() + ": expected " + std::to_string(header.size()) + " fields",
                             line_no);
        }
        std::vector<std::string> out;
        for (const auto f : fields) out.emplace_back(text::trim(f));
        if (!header_seen) {
            header_seen = true;
            if (out != header) throw ParseError(path.filename().string() + ": unexpected header", line_no);
            continue;
        }
        rows.push_back({line_no, std::move(out)});
    }
    return rows;
}

}  // namespace

std::vector<double> sigma_grid(double first, double last, double stride) {
    if (!(first > 0.0) || !(last >= first) || !(stride > 0.0)) {
        throw DomainError("sigma grid needs 0 < first <= last and stride > 0");
    }
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double s = first + static_cast<double>(i) * stride;
        if (s > last + 1e-9) break;
        out.push_back(s);
    }
    return out;
}

SweepResult run_sigma_sweep(const Dataset& ds, const SweepConfig& cfg) {
    if (cfg.sigmas.empty()) throw ValidationError("sweep: empty sigma grid");
    for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
        BlurSpec{cfg.sigmas[k], cfg.domain}.validate();
        if (k > 0 && !(cfg.sigmas[k] > cfg.sigmas[k - 1])) {
            throw ValidationError("sweep: sigmas must be strictly increasing");
        }
    }
    require_two_stimuli(ds, "sweep");

    const std::vector<FixationSet> hc = sorted_sets(ds.hc);
    const std::vector<FixationSet> lg = sorted_sets(ds.lg);
    std::vector<std::pair<const FixationSet*, const FixationSet*>> pairs;
    {
        std::size_t j = 0;
        for (const FixationSet& h : hc) {
            if (j < lg.size() && by_ids(lg[j], h)) {
                throw ValidationError("sweep: LG set " + pair_name(lg[j]) + " has no HC counterpart");
            }
            if (j == lg.size() || by_ids(h, lg[j])) {
                throw ValidationError("sweep: HC set " + pair_name(h) + " has no LG counterpart");
            }
            pairs.emplace_back(&h, &lg[j++]);
        }
        if (j < lg.size()) throw ValidationError("sweep: LG set " + pair_name(lg[j]) + " has no HC counterpart");
    }
    if (pairs.empty()) throw EmptyInputError("sweep: dataset has no fixations");

    std::map<std::string, FixationSet> negatives;
    for (const StimulusInfo& s : ds.stimuli) negatives.emplace(s.id, negatives_for(s, ds.hc));

    SweepResult result;
    result.sigmas = cfg.sigmas;
    result.pairs.resize(pairs.size());
    parallel_for(pairs.size(), cfg.jobs, [&](std::size_t i) {
        const FixationSet& h = *pairs[i].first;
        const FixationSet lgf = fixmap::rescale_fixations(*pairs[i].second, h.stimulus_size);
        const DensityMap h_raw = fixmap::rasterize(h);
        const DensityMap l_raw = fixmap::rasterize(lgf);
        const FixationSet& neg = negatives.at(h.stimulus_id);
        const std::uint64_t pair_seed = derive_seed(cfg.seed, hash_id(h.stimulus_id), hash_id(h.observer_id));
        PairScores& out = result.pairs[i];
        out.stimulus_id = h.stimulus_id;
        out.observer_id = h.observer_id;
        out.by_sigma.reserve(cfg.sigmas.size());
        DensityMap pred, gt;
        for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
            const BlurSpec blur{cfg.sigmas[k], cfg.domain};
            fixmap::blur_density(l_raw, blur, pred);
            fixmap::blur_density(h_raw, blur, gt);
            out.by_sigma.push_back(metrics::score_pair(pred, h, gt, neg, derive_seed(pair_seed, k)));
        }
    });

    for (std::size_t m = 0; m < kMetricCount; ++m) {
        Curve& c = result.curves[m];
        for (std::size_t k = 0; k < cfg.sigmas.size(); ++k) {
            std::vector<const MetricReport*> col;
            col.reserve(result.pairs.size());
            for (const PairScores& p : result.pairs) col.push_back(&p.by_sigma[k]);
            const std::vector<double> v = finite_values(col, m);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            c.median.push_back(median_or_nan(v));
            c.p25.push_back(v.empty() ? nan : stats::quantile(v, 0.25));
            c.p75.push_back(v.empty() ? nan : stats::quantile(v, 0.75));
        }
    }
    return result;
}

DensityMap leave_one_out_predictor(const std::vector<FixationSet>& sets, std::size_t left_out, const BlurSpec& blur) {
    if (left_out >= sets.size()) throw ValidationError("leave_one_out_predictor: index out of range");
    std::vector<FixationSet> others;
    others.reserve(sets.size() - 1);
    for (std::size_t j = 0; j < sets.size(); ++j) {
        if (j != left_out) others.push_back(sets[j]);
    }
    if (others.empty()) throw ValidationError("leave_one_out_predictor: no other observers");
    return fixmap::blur_density(fixmap::rasterize(fixmap::aggregate(others)), blur);
}

namespace {

ConditionScores congruency_for(const Dataset& ds, const std::vector<FixationSet>& condition, const char* tag,
                               const CongruencyConfig& cfg) {
    const BlurSpec blur{cfg.sigma, cfg.domain};
    struct Item {
        const StimulusInfo* stim;
        std::size_t group;
        std::size_t index;
    };
    std::vector<std::vector<FixationSet>> groups;
    std::vector<FixationSet> negatives;
    std::vector<Item> items;
    for (const StimulusInfo& s : ds.stimuli) {
        std::vector<FixationSet> sets = ds.sets_for(condition, s.id);
        if (sets.empty()) continue;
        if (sets.size() < 3) {
            throw ValidationError(std::string("congruency: ") + tag + " stimulus " + s.id + " has " +
                                  std::to_string(sets.size()) + " observers, need at least 3");
        }
        for (std::size_t i = 0; i < sets.size(); ++i) items.push_back({&s, groups.size(), i});
        groups.push_back(std::move(sets));
        negatives.push_back(negatives_for(s, condition));
    }
    if (items.empty()) throw EmptyInputError(std::string("congruency: no ") + tag + " fixations");

    ConditionScores out;
    out.scores.resize(items.size());
    parallel_for(items.size(), cfg.jobs, [&](std::size_t n) {
        const Item& it = items[n];
        const FixationSet& self = groups[it.group][it.index];
        const DensityMap pred = leave_one_out_predictor(groups[it.group], it.index, blur);
        const DensityMap gt = fixmap::blur_density(fixmap::rasterize(self), blur);
        const std::uint64_t seed =
            derive_seed(cfg.seed, hash_id(tag), hash_id(self.stimulus_id), hash_id(self.observer_id));
        out.scores[n] = {self.stimulus_id, self.observer_id,
                         metrics::score_pair(pred, self, gt, negatives[it.group], seed)};
    });
    std::sort(out.scores.begin(), out.scores.end(), [](const ObserverScore& a, const ObserverScore& b) {
        return std::tie(a.stimulus_id, a.observer_id) < std::tie(b.stimulus_id, b.observer_id);
    });

    std::vector<const MetricReport*> all;
    for (const ObserverScore& s : out.scores) all.push_back(&s.report);
    for (std::size_t m = 0; m < kMetricCount; ++m) out.median[m] = median_or_nan(finite_values(all, m));
    return out;
}

std::vector<double> metric_column(const ConditionScores& c, std::size_t m) {
    std::vector<const MetricReport*> all;
    for (const ObserverScore& s : c.scores) all.push_back(&s.report);
    return finite_values(all, m);
}

}  // namespace

CongruencyResult run_congruency(const Dataset& ds, const CongruencyConfig& cfg) {
    BlurSpec{cfg.sigma, cfg.domain}.validate();
    require_two_stimuli(ds, "congruency");
    CongruencyResult r;
    r.sigma = cfg.sigma;
    r.hc = congruency_for(ds, ds.hc, "HC", cfg);
    if (!ds.lg.empty()) {
        r.lg = congruency_for(ds, ds.lg, "LG", cfg);
        std::array<stats::TestResult, kMetricCount> anova{};
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            const std::vector<std::vector<double>> groups = {metric_column(r.hc, m), metric_column(*r.lg, m)};
            anova[m] = stats::one_way_anova(groups);
        }
        r.anova = anova;
    }
    return r;
}

std::optional<std::filesystem::path> find_prediction(const std::filesystem::path& dir, const std::string& id) {
    for (const char* ext : {".npy", ".png"}) {
        const std::filesystem::path p = dir / (id + ext);
        if (std::filesystem::is_regular_file(p)) return p;
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, double>> read_timing_csv(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& row : read_csv(path, {"image_id", "millis"})) {
        double ms = 0.0;
        if (!text::parse_double(row[1], ms) || !(ms > 0.0) || !std::isfinite(ms)) {
            throw ValidationError("timing.csv: detection time for " + row[0] + " must be a positive number");
        }
        out.emplace_back(row[0], ms);
    }
    return out;
}

std::vector<TrainingLogRow> read_training_log(const std::filesystem::path& path) {
    std::vector<TrainingLogRow> out;
    for (const auto& row : read_csv(path, {"iteration", "loss", "lr", "elapsed_s"})) {
        TrainingLogRow r;
        if (!text::parse_size(row[0], r.iteration) || !text::parse_double(row[1], r.loss) ||
            !text::parse_double(row[2], r.lr) || !text::parse_double(row[3], r.elapsed_s)) {
            throw ParseError("training_log.csv: malformed row for iteration " + row[0], row.line);
        }
        out.push_back(r);
    }
    return out;
}

DensityMap upsample_prediction(const DensityMap& pred, fixmap::Size size) {
    if (pred.width() == 0 || pred.height() == 0) throw EmptyInputError("prediction map is empty");
    DensityMap norm = pred.max() > 0.0 ? pred.normalized_max() : pred;
    if (norm.size() == size) return norm;
    const imaging::RasterImage img(norm.width(), norm.height(), 1, imaging::Encoding::Linear,
                                   std::vector<double>(norm.values().begin(), norm.values().end()));
    const imaging::RasterImage up = imaging::resize_bicubic(img, size.width, size.height);
    // bicubic overshoot can dip below zero near sharp edges
    std::vector<double> v(up.data().begin(), up.data().end());
    double peak = 0.0;
    for (double& x : v) {
        x = std::max(x, 0.0);
        peak = std::max(peak, x);
    }
    if (peak <= 0.0) return DensityMap(size.width, size.height);
    for (double& x : v) x /= peak;
    return DensityMap(size.width, size.height, std::move(v), fixmap::Normalization::Max1);
}

ModelEvalResult evaluate_model_outputs(const std::filesystem::path& pred_dir, const Dataset& ds,
                                       const EvalConfig& cfg, std::string label) {
    const BlurSpec blur{cfg.sigma, cfg.domain};
    blur.validate();
    if (!std::filesystem::is_directory(pred_dir)) throw IoError("prediction directory not found: " + pred_dir.string());

    std::vector<std::filesystem::path> files;
    std::string missing;
    for (const StimulusInfo& s : ds.stimuli) {
        if (auto p = find_prediction(pred_dir, s.id)) {
            files.push_back(*p);
        } else {
            missing += (missing.empty() ? "" : ", ") + s.id;
        }
    }
    if (!missing.empty()) throw ValidationError("missing predictions for: " + missing);

    ModelEvalResult r;
    r.label = std::move(label);
    r.images.resize(ds.stimuli.size());
    parallel_for(ds.stimuli.size(), cfg.jobs, [&](std::size_t i) {
        const StimulusInfo& s = ds.stimuli[i];
        const std::vector<FixationSet> sets = ds.sets_for(ds.hc, s.id);
        if (sets.empty()) throw ValidationError("no ground-truth fixations for " + s.id);
        const FixationSet gt_fix = fixmap::aggregate(sets);
        const DensityMap gt_map = fixmap::blur_density(fixmap::rasterize(gt_fix), blur);
        const DensityMap pred = upsample_prediction(io::read_density(files[i]), s.size);

        MetricReport rep;
        guarded(rep, 0, [&] { return metrics::nss(pred, gt_fix); });
        guarded(rep, 2, [&] { return metrics::auc_judd(pred, gt_fix); });
        guarded(rep, 4, [&] { return metrics::cc(pred, gt_map); });
        guarded(rep, 5, [&] { return metrics::sim(pred.normalized_sum(), gt_map); });
        r.images[i] = {s.id, std::move(rep), std::nullopt};
    });

    for (std::size_t a = 0; a < kAccuracyMetrics.size(); ++a) {
        std::vector<const MetricReport*> all;
        for (const ImageScore& im : r.images) all.push_back(&im.report);
        const std::vector<double> v = finite_values(all, kAccuracyMetrics[a]);
        r.mean[a] = v.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::mean(v);
        r.sd[a] = v.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::sample_sd(v);
    }

    if (const auto timing = pred_dir / "timing.csv"; std::filesystem::is_regular_file(timing)) {
        const auto rows = read_timing_csv(timing);
        std::map<std::string, double> by_id(rows.begin(), rows.end());
        for (ImageScore& im : r.images) {
            if (const auto it = by_id.find(im.image_id); it != by_id.end()) im.detection_ms = it->second;
        }
        if (!rows.empty()) {
            std::vector<double> ms;
            for (const auto& [id, v] : rows) ms.push_back(v);
            r.detection = TimingSummary{ms.size(), stats::mean(ms), stats::sample_sd(ms)};
        }
    }
    if (const auto log = pred_dir / "training_log.csv"; std::filesystem::is_regular_file(log)) {
        const auto rows = read_training_log(log);
        if (!rows.empty()) {
            double t = 0.0;
            for (const TrainingLogRow& row : rows) t = std::max(t, row.elapsed_s);
            r.training_time_s = t;
        }
    }
    return r;
}

ModelComparison compare_models(ModelEvalResult a, ModelEvalResult b) {
    std::map<std::string, const MetricReport*> in_b;
    for (const ImageScore& im : b.images) in_b.emplace(im.image_id, &im.report);
    ModelComparison out;
    for (std::size_t k = 0; k < kAccuracyMetrics.size(); ++k) {
        const std::size_t m = kAccuracyMetrics[k];
        std::vector<double> xa, xb;
        for (const ImageScore& im : a.images) {
            const auto it = in_b.find(im.image_id);
            if (it == in_b.end()) continue;
            const double va = im.report.value(m);
            const double vb = it->second->value(m);
            if (std::isfinite(va) && std::isfinite(vb)) {
                xa.push_back(va);
                xb.push_back(vb);
            }
        }
        if (xa.size() < 2) {
            throw ValidationError("compare: fewer than 2 paired images with a finite " +
                                  std::string(metrics::kMetricNames[m]));
        }
        out.ttests[k] = stats::paired_t_test(xa, xb);
    }
    std::map<std::string, double> ms_b;
    for (const ImageScore& im : b.images) {
        if (im.detection_ms) ms_b.emplace(im.image_id, *im.detection_ms);
    }
    std::vector<double> ta, tb;
    for (const ImageScore& im : a.images) {
        const auto it = ms_b.find(im.image_id);
        if (im.detection_ms && it != ms_b.end()) {
            ta.push_back(*im.detection_ms);
            tb.push_back(it->second);
        }
    }
    if (ta.size() >= 2) out.detection_ttest = stats::paired_t_test(ta, tb);
    out.a = std::move(a);
    out.b = std::move(b);
    return out;
}

}  // namespace salbench::experiments
