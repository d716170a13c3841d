#include "salbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "salbench/text.hpp"

namespace salbench::report {

using experiments::kMetricCount;
using experiments::kSchemaVersion;
using metrics::kMetricNames;
using nlohmann::ordered_json;

namespace {

std::string num(double v) { return text::format_double(v); }

ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json test_json(const stats::TestResult& t) {
    ordered_json j;
    j["statistic"] = jnum(t.statistic);
    j["dof"] = jnum(t.dof);
    if (t.dof2 != 0.0) j["dof2"] = jnum(t.dof2);
    j["p_value"] = jnum(t.p_value);
    j["degenerate"] = t.degenerate;
    return j;
}

std::string metrics_row(const metrics::MetricReport& r) {
    std::string s;
    for (std::size_t m = 0; m < kMetricCount; ++m) s += ',' + num(r.value(m));
    return s;
}

std::string metrics_header() {
    std::string s;
    for (const auto name : kMetricNames) s += ',' + std::string(name);
    return s;
}

std::size_t issue_count(const std::vector<experiments::ObserverScore>& scores) {
    std::size_t n = 0;
    for (const auto& s : scores) n += s.report.issues.size();
    return n;
}

ordered_json medians_json(const std::array<double, kMetricCount>& med) {
    ordered_json j;
    for (std::size_t m = 0; m < kMetricCount; ++m) j[std::string(kMetricNames[m])] = jnum(med[m]);
    return j;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const experiments::SweepResult& r) {
    out << "schema_version,sigma,metric,median,p25,p75\n";
    for (std::size_t k = 0; k < r.sigmas.size(); ++k) {
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            const auto& c = r.curves[m];
            out << kSchemaVersion << ',' << num(r.sigmas[k]) << ',' << kMetricNames[m] << ',' << num(c.median[k])
                << ',' << num(c.p25[k]) << ',' << num(c.p75[k]) << '\n';
        }
    }
}

void write_sweep_pairs_csv(std::ostream& out, const experiments::SweepResult& r) {
    out << "schema_version,sigma,stimulus_id,observer_id" << metrics_header() << '\n';
    for (std::size_t k = 0; k < r.sigmas.size(); ++k) {
        for (const auto& p : r.pairs) {
            out << kSchemaVersion << ',' << num(r.sigmas[k]) << ',' << p.stimulus_id << ',' << p.observer_id
                << metrics_row(p.by_sigma[k]) << '\n';
        }
    }
}

std::string sweep_summary_json(const experiments::SweepResult& r, std::uint64_t seed) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "sweep";
    j["seed"] = seed;
    j["pairs"] = r.pairs.size();
    j["sigmas"] = r.sigmas;
    std::size_t issues = 0;
    for (const auto& p : r.pairs) {
        for (const auto& rep : p.by_sigma) issues += rep.issues.size();
    }
    j["metric_issues"] = issues;
    ordered_json first, last;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        first[std::string(kMetricNames[m])] = jnum(r.curves[m].median.front());
        last[std::string(kMetricNames[m])] = jnum(r.curves[m].median.back());
    }
    j["median_at_first_sigma"] = std::move(first);
    j["median_at_last_sigma"] = std::move(last);
    return j.dump(2) + '\n';
}

std::string sweep_svg(const experiments::SweepResult& r) {
    constexpr double kPanelW = 300, kPanelH = 200, kPad = 36;
    constexpr int kCols = 3;
    const double width = kCols * kPanelW;
    const double height = 2 * kPanelH;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + text::format_fixed(width, 0) +
                    "\" height=\"" + text::format_fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    const double smin = r.sigmas.front();
    const double smax = r.sigmas.back() > smin ? r.sigmas.back() : smin + 1.0;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        const double ox = static_cast<double>(m % kCols) * kPanelW;
        const double oy = static_cast<double>(m / kCols) * kPanelH;
        double lo = INFINITY, hi = -INFINITY;
        for (double v : r.curves[m].median) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        const double pw = kPanelW - 2 * kPad;
        const double ph = kPanelH - 2 * kPad;
        s += "<g transform=\"translate(" + text::format_fixed(ox, 0) + "," + text::format_fixed(oy, 0) + ")\">\n";
        s += "<rect x=\"" + text::format_fixed(kPad, 0) + "\" y=\"" + text::format_fixed(kPad, 0) + "\" width=\"" +
             text::format_fixed(pw, 0) + "\" height=\"" + text::format_fixed(ph, 0) +
             "\" fill=\"none\" stroke=\"#999\"/>\n";
        s += "<text x=\"" + text::format_fixed(kPanelW / 2, 0) + "\" y=\"20\" text-anchor=\"middle\">" +
             std::string(kMetricNames[m]) + "</text>\n";
        s += "<text x=\"4\" y=\"" + text::format_fixed(kPad + 4, 0) + "\">" + text::format_fixed(hi, 3) + "</text>\n";
        s += "<text x=\"4\" y=\"" + text::format_fixed(kPad + ph, 0) + "\">" + text::format_fixed(lo, 3) +
             "</text>\n";
        s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < r.sigmas.size(); ++k) {
            const double v = r.curves[m].median[k];
            if (!std::isfinite(v)) continue;
            const double x = kPad + (r.sigmas[k] - smin) / (smax - smin) * pw;
            const double y = kPad + (hi - v) / (hi - lo) * ph;
            s += text::format_fixed(x, 2) + "," + text::format_fixed(y, 2) + " ";
        }
        s += "\"/>\n</g>\n";
    }
    s += "</svg>\n";
    return s;
}

void write_congruency_csv(std::ostream& out, const experiments::CongruencyResult& r) {
    out << "schema_version,condition,stimulus_id,observer_id" << metrics_header() << '\n';
    const auto rows = [&](const char* cond, const experiments::ConditionScores& c) {
        for (const auto& s : c.scores) {
            out << kSchemaVersion << ',' << cond << ',' << s.stimulus_id << ',' << s.observer_id
                << metrics_row(s.report) << '\n';
        }
    };
    rows("HC", r.hc);
    if (r.lg) rows("LG", *r.lg);
}

std::string congruency_table(const experiments::CongruencyResult& r) {
    std::string s = "condition";
    for (const char* label : experiments::kTableLabels) s += std::string(", ") + label;
    s += '\n';
    const auto row = [&](const std::string& name, const auto& value_of) {
        s += name;
        for (const std::size_t m : experiments::kTableOrder) s += ", " + text::format_fixed(value_of(m), 2);
        s += '\n';
    };
    row("HC", [&](std::size_t m) { return r.hc.median[m]; });
    if (r.lg) row("LG", [&](std::size_t m) { return r.lg->median[m]; });
    if (r.anova) row("ANOVA p", [&](std::size_t m) { return (*r.anova)[m].p_value; });
    return s;
}

std::string congruency_summary_json(const experiments::CongruencyResult& r, std::uint64_t seed) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "congruency";
    j["seed"] = seed;
    j["sigma"] = r.sigma;
    ordered_json cond;
    cond["HC"] = {{"observations", r.hc.scores.size()},
                  {"metric_issues", issue_count(r.hc.scores)},
                  {"median", medians_json(r.hc.median)}};
    if (r.lg) {
        cond["LG"] = {{"observations", r.lg->scores.size()},
                      {"metric_issues", issue_count(r.lg->scores)},
                      {"median", medians_json(r.lg->median)}};
    }
    j["conditions"] = std::move(cond);
    if (r.anova) {
        ordered_json a;
        for (std::size_t m = 0; m < kMetricCount; ++m) a[std::string(kMetricNames[m])] = test_json((*r.anova)[m]);
        j["anova"] = std::move(a);
    }
    return j.dump(2) + '\n';
}

void write_model_eval_csv(std::ostream& out, std::span<const experiments::ModelEvalResult> runs) {
    out << "schema_version,run,image_id";
    for (const std::size_t m : experiments::kAccuracyMetrics) out << ',' << kMetricNames[m];
    out << ",detection_ms\n";
    for (const auto& run : runs) {
        for (const auto& im : run.images) {
            out << kSchemaVersion << ',' << run.label << ',' << im.image_id;
            for (const std::size_t m : experiments::kAccuracyMetrics) out << ',' << num(im.report.value(m));
            out << ',' << (im.detection_ms ? num(*im.detection_ms) : std::string()) << '\n';
        }
    }
}

void write_ttest_csv(std::ostream& out, const experiments::ModelComparison& c) {
    out << "schema_version,metric,mean_a,mean_b,statistic,dof,p_value\n";
    for (std::size_t k = 0; k < experiments::kAccuracyMetrics.size(); ++k) {
        const auto& t = c.ttests[k];
        out << kSchemaVersion << ',' << kMetricNames[experiments::kAccuracyMetrics[k]] << ',' << num(c.a.mean[k])
            << ',' << num(c.b.mean[k]) << ',' << num(t.statistic) << ',' << num(t.dof) << ',' << num(t.p_value)
            << '\n';
    }
    if (c.detection_ttest && c.a.detection && c.b.detection) {
        const auto& t = *c.detection_ttest;
        out << kSchemaVersion << ",detection_ms," << num(c.a.detection->mean_ms) << ','
            << num(c.b.detection->mean_ms) << ',' << num(t.statistic) << ',' << num(t.dof) << ','
            << num(t.p_value) << '\n';
    }
}

std::string eval_summary_json(std::span<const experiments::ModelEvalResult> runs,
                              const std::optional<experiments::ModelComparison>& comparison) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "eval";
    ordered_json rs = ordered_json::array();
    for (const auto& run : runs) {
        ordered_json o;
        o["run"] = run.label;
        o["images"] = run.images.size();
        ordered_json acc;
        for (std::size_t k = 0; k < experiments::kAccuracyMetrics.size(); ++k) {
            acc[std::string(kMetricNames[experiments::kAccuracyMetrics[k]])] = {{"mean", jnum(run.mean[k])},
                                                                                 {"sd", jnum(run.sd[k])}};
        }
        o["accuracy"] = std::move(acc);
        o["training_time_s"] = run.training_time_s ? jnum(*run.training_time_s) : ordered_json(nullptr);
        if (run.detection) {
            o["detection_time_ms"] = {{"count", run.detection->count},
                                      {"mean", jnum(run.detection->mean_ms)},
                                      {"sd", jnum(run.detection->sd_ms)}};
        } else {
            o["detection_time_ms"] = nullptr;
        }
        rs.push_back(std::move(o));
    }
    j["runs"] = std::move(rs);
    if (comparison) {
        ordered_json t;
        for (std::size_t k = 0; k < experiments::kAccuracyMetrics.size(); ++k) {
            t[std::string(kMetricNames[experiments::kAccuracyMetrics[k]])] = test_json(comparison->ttests[k]);
        }
        if (comparison->detection_ttest) t["detection_ms"] = test_json(*comparison->detection_ttest);
        j["paired_t_tests"] = std::move(t);
    }
    return j.dump(2) + '\n';
}

}  // namespace salbench::report
