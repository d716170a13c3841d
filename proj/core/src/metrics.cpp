#include "salbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "salbench/errors.hpp"
#include "salbench/rng.hpp"
#include "salbench/text.hpp"

namespace salbench::metrics {

namespace {

std::string dims(const fixmap::Size& s) { return std::to_string(s.width) + "x" + std::to_string(s.height); }

void require_same_dims(const char* metric, fixmap::Size a, fixmap::Size b) {
    if (a != b) throw ValidationError(std::string(metric) + ": dimension mismatch " + dims(a) + " vs " + dims(b));
}

void require_fixations(const char* metric, const FixationSet& fix) {
    if (fix.points.empty()) throw EmptyInputError(std::string(metric) + ": no fixations");
}

void require_sum1(const char* metric, const char* which, const DensityMap& m) {
    if (m.normalization() == fixmap::Normalization::Sum1) return;
    if (!(std::abs(m.sum() - 1.0) <= fixmap::kSum1Tolerance)) {
        throw ValidationError(std::string(metric) + ": " + which + " map is not sum-normalized");
    }
}

void require_spread(const char* metric, const DensityMap& m) {
    const auto v = m.values();
    if (std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end()) {
        throw DegenerateMapError(std::string(metric) + ": constant map");
    }
}

std::vector<double> values_at(const DensityMap& sal, std::span<const fixmap::Point> pts) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const fixmap::Point& p : pts) {
        const auto [x, y] = fixmap::pixel_of(p, sal.size());
        out.push_back(sal.at(x, y));
    }
    return out;
}

// Trapezoidal ROC area. Thresholds are the distinct positive scores, swept
// from high to low; `negatives_at_or_above[j]` counts negatives >= thr[j]
// where thr is ascending.
double roc_area(const std::vector<double>& positives, const std::vector<double>& thr,
                const std::vector<std::size_t>& negatives_at_or_above, std::size_t negative_count) {
    std::vector<double> pos_sorted(positives);
    std::sort(pos_sorted.begin(), pos_sorted.end());
    const double np = static_cast<double>(positives.size());
    const double nn = static_cast<double>(negative_count);
    double area = 0.0;
    double prev_tp = 0.0, prev_fp = 0.0;
    for (std::size_t j = thr.size(); j-- > 0;) {
        const auto above = pos_sorted.end() - std::lower_bound(pos_sorted.begin(), pos_sorted.end(), thr[j]);
        const double tp = static_cast<double>(above) / np;
        const double fp = static_cast<double>(negatives_at_or_above[j]) / nn;
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_tp = tp;
        prev_fp = fp;
    }
    area += (1.0 - prev_fp) * (1.0 + prev_tp) / 2.0;
    return area;
}

// For ascending distinct thresholds, counts how many of `values` are >= each.
template <typename Range>
std::vector<std::size_t> count_at_or_above(const std::vector<double>& thr, const Range& values) {
    // bucket[k]: values with exactly k thresholds <= v. A value is >= thr[j]
    // iff it lands in a bucket k > j.
    std::vector<std::size_t> bucket(thr.size() + 1, 0);
    if (thr.empty()) {
        bucket[0] = std::size(values);
    } else if (thr.size() <= 32) {
        const double lowest = thr.front();
        for (const double v : values) {
            if (v < lowest) {
                ++bucket[0];
                continue;
            }
            std::size_t k = 0;
            for (const double t : thr) k += static_cast<std::size_t>(t <= v);
            ++bucket[k];
        }
    } else {
        for (const double v : values) {
            ++bucket[static_cast<std::size_t>(std::upper_bound(thr.begin(), thr.end(), v) - thr.begin())];
        }
    }
    std::vector<std::size_t> out(thr.size(), 0);
    std::size_t acc = 0;
    for (std::size_t j = thr.size(); j-- > 0;) {
        acc += bucket[j + 1];
        out[j] = acc;
    }
    return out;
}

std::vector<double> distinct_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

double MetricReport::value(std::size_t index) const {
    switch (index) {
        case 0: return nss;
        case 1: return kl;
        case 2: return auc_judd;
        case 3: return auc_shuffled;
        case 4: return cc;
        case 5: return sim;
    }
    throw std::out_of_range("MetricReport::value");
}

double& MetricReport::value(std::size_t index) {
    switch (index) {
        case 0: return nss;
        case 1: return kl;
        case 2: return auc_judd;
        case 3: return auc_shuffled;
        case 4: return cc;
        case 5: return sim;
    }
    throw std::out_of_range("MetricReport::value");
}

double nss(const DensityMap& sal, const FixationSet& fix) {
    require_same_dims("nss", sal.size(), fix.stimulus_size);
    require_fixations("nss", fix);
    require_spread("nss", sal);
    const auto v = sal.values();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    double acc = 0.0;
    for (double s : values_at(sal, fix.points)) acc += (s - mean) / sd;
    return acc / static_cast<double>(fix.points.size());
}

double kl(const DensityMap& pred, const DensityMap& gt) {
    require_same_dims("kl", pred.size(), gt.size());
    require_sum1("kl", "prediction", pred);
    require_sum1("kl", "ground-truth", gt);
    const auto p = pred.values();
    const auto q = gt.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (q[i] == 0.0) continue;  // q * ln(eps + 0) term is exactly zero
        acc += q[i] * std::log(kEpsilon + q[i] / (p[i] + kEpsilon));
    }
    return std::max(acc, 0.0);
}

double auc_judd(const DensityMap& sal, const FixationSet& fix) {
    require_same_dims("auc_judd", sal.size(), fix.stimulus_size);
    require_fixations("auc_judd", fix);
    const std::vector<double> pos = values_at(sal, fix.points);
    const std::vector<double> thr = distinct_sorted(pos);

    // Negatives are all pixels minus the distinct fixated ones.
    std::vector<std::size_t> fixated;
    fixated.reserve(fix.points.size());
    for (const fixmap::Point& p : fix.points) {
        const auto [x, y] = fixmap::pixel_of(p, sal.size());
        fixated.push_back(y * sal.width() + x);
    }
    std::sort(fixated.begin(), fixated.end());
    fixated.erase(std::unique(fixated.begin(), fixated.end()), fixated.end());
    const auto v = sal.values();
    const std::size_t neg_count = v.size() - fixated.size();
    if (neg_count == 0) throw ValidationError("auc_judd: every pixel is fixated");
    std::vector<double> fixated_values;
    fixated_values.reserve(fixated.size());
    for (const std::size_t i : fixated) fixated_values.push_back(v[i]);
    std::vector<std::size_t> neg = count_at_or_above(thr, v);
    const std::vector<std::size_t> own = count_at_or_above(thr, fixated_values);
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] -= own[j];
    return roc_area(pos, thr, neg, neg_count);
}

std::vector<fixmap::Point> sample_negatives(const FixationSet& negatives, std::size_t count, std::uint64_t seed) {
    std::vector<fixmap::Point> pts = negatives.points;
    if (pts.size() <= count) return pts;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pts.size() - i));
        std::swap(pts[i], pts[j]);
    }
    pts.resize(count);
    return pts;
}

double auc_shuffled(const DensityMap& sal, const FixationSet& fix, const FixationSet& negatives,
                    std::uint64_t seed) {
    require_same_dims("auc_shuffled", sal.size(), fix.stimulus_size);
    require_same_dims("auc_shuffled", sal.size(), negatives.stimulus_size);
    require_fixations("auc_shuffled", fix);
    if (negatives.points.empty()) throw ValidationError("auc_shuffled: empty negative set");
    const std::vector<double> pos = values_at(sal, fix.points);
    const std::vector<double> thr = distinct_sorted(pos);
    const auto sample = sample_negatives(negatives, kShuffledNegativesPerFixation * fix.points.size(), seed);
    const std::vector<double> neg = values_at(sal, sample);
    return roc_area(pos, thr, count_at_or_above(thr, neg), neg.size());
}

double cc(const DensityMap& p, const DensityMap& q) {
    require_same_dims("cc", p.size(), q.size());
    require_spread("cc", p);
    require_spread("cc", q);
    const auto a = p.values();
    const auto b = q.values();
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double sim(const DensityMap& p, const DensityMap& q) {
    require_same_dims("sim", p.size(), q.size());
    require_sum1("sim", "first", p);
    require_sum1("sim", "second", q);
    const auto a = p.values();
    const auto b = q.values();
    // dividing by the larger mass, summed in the same order, makes sim(p, p) exactly 1
    double acc = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::min(a[i], b[i]);
        sa += a[i];
        sb += b[i];
    }
    return std::min(acc / std::max(sa, sb), 1.0);
}

MetricReport score_pair(const DensityMap& pred, const FixationSet& gt_fix, const DensityMap& gt_map,
                        const FixationSet& negatives, std::uint64_t seed) {
    require_same_dims("nss", pred.size(), gt_fix.stimulus_size);
    require_same_dims("kl", pred.size(), gt_map.size());
    require_same_dims("auc_shuffled", pred.size(), negatives.stimulus_size);

    MetricReport r;
    const auto guarded = [&r](const char* name, double& slot, auto&& fn) {
        try {
            slot = fn();
        } catch (const DegenerateMapError& e) {
            r.issues.push_back({name, e.what()});
        } catch (const EmptyInputError& e) {
            r.issues.push_back({name, e.what()});
        }
    };

    guarded("nss", r.nss, [&] { return nss(pred, gt_fix); });
    guarded("auc_judd", r.auc_judd, [&] { return auc_judd(pred, gt_fix); });
    guarded("auc_shuffled", r.auc_shuffled, [&] { return auc_shuffled(pred, gt_fix, negatives, seed); });

    // Maps already tagged sum-1 are used as they are.
    std::optional<DensityMap> p_store, q_store;
    const DensityMap* p1 = &pred;
    const DensityMap* q1 = &gt_map;
    bool have_dist = true;
    try {
        if (pred.normalization() != fixmap::Normalization::Sum1) p1 = &p_store.emplace(pred.normalized_sum());
        if (gt_map.normalization() != fixmap::Normalization::Sum1) q1 = &q_store.emplace(gt_map.normalized_sum());
    } catch (const EmptyInputError& e) {
        have_dist = false;
        for (const char* name : {"kl", "cc", "sim"}) r.issues.push_back({name, e.what()});
    }
    if (have_dist) {
        guarded("kl", r.kl, [&] { return kl(*p1, *q1); });
        guarded("cc", r.cc, [&] { return cc(pred, gt_map); });
        guarded("sim", r.sim, [&] { return sim(*p1, *q1); });
    }
    // Keep issues in report field order.
    std::stable_sort(r.issues.begin(), r.issues.end(), [](const MetricIssue& a, const MetricIssue& b) {
        const auto rank = [](const std::string& m) {
            return std::find(kMetricNames.begin(), kMetricNames.end(), m) - kMetricNames.begin();
        };
        return rank(a.metric) < rank(b.metric);
    });
    return r;
}

std::string csv_header() {
    std::string h;
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        if (i) h += ',';
        h += kMetricNames[i];
    }
    return h;
}

std::string to_csv_row(const MetricReport& r) {
    std::string row;
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        if (i) row += ',';
        row += text::format_double(r.value(i));
    }
    return row;
}

std::string to_json(const MetricReport& r, int indent) {
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        const double v = r.value(i);
        j[std::string(kMetricNames[i])] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    }
    nlohmann::ordered_json issues = nlohmann::ordered_json::array();
    for (const MetricIssue& m : r.issues) issues.push_back({{"metric", m.metric}, {"message", m.message}});
    j["issues"] = std::move(issues);
    return j.dump(indent);
}

}  // namespace salbench::metrics
