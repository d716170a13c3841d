#include "salbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "salbench/errors.hpp"

namespace salbench::stats {

namespace {

constexpr double kBetaTolerance = 1e-10;
constexpr int kBetaMaxIterations = 1000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kBetaMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kBetaTolerance) return h;
    }
    throw DomainError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double mean(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("mean: no values");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw EmptyInputError("quantile: no values");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q outside [0,1]");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return v[lo];
    if (frac == 0.5) return (v[lo] + v[hi]) / 2.0;
    return v[lo] + frac * (v[hi] - v[lo]);
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("student_t_sf: dof must be positive");
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
    return t >= 0.0 ? tail : 1.0 - tail;
}

double f_sf(double f, double dof1, double dof2) {
    if (!(dof1 > 0.0 && dof2 > 0.0)) throw DomainError("f_sf: dof must be positive");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(dof2 / 2.0, dof1 / 2.0, dof2 / (dof2 + dof1 * f));
}

TestResult one_way_anova(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) throw ValidationError("one_way_anova: need at least 2 groups");
    std::size_t n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw ValidationError("one_way_anova: every group needs at least 2 samples");
        n += g.size();
        for (double v : g) grand += v;
    }
    grand /= static_cast<double>(n);
    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double m = mean(g);
        ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) ss_within += (v - m) * (v - m);
    }
    TestResult r;
    r.dof = static_cast<double>(groups.size() - 1);
    r.dof2 = static_cast<double>(n - groups.size());
    const double ms_between = ss_between / r.dof;
    const double ms_within = ss_within / r.dof2;
    if (ms_within == 0.0) {
        r.degenerate = true;
        r.statistic = ms_between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        r.p_value = ms_between == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = ms_between / ms_within;
    r.p_value = std::clamp(f_sf(r.statistic, r.dof, r.dof2), 0.0, 1.0);
    return r;
}

TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("paired_t_test: length mismatch " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
    if (a.size() < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double n = static_cast<double>(d.size());
    const double md = mean(d);
    const double sd = sample_sd(d);
    TestResult r;
    r.dof = n - 1.0;
    if (sd == 0.0) {
        r.degenerate = true;
        if (md == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.statistic = md > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
        }
        return r;
    }
    r.statistic = md / (sd / std::sqrt(n));
    r.p_value = std::clamp(2.0 * student_t_sf(std::abs(r.statistic), r.dof), 0.0, 1.0);
    return r;
}

std::string to_json(const TestResult& r) {
    nlohmann::ordered_json j;
    j["statistic"] = std::isfinite(r.statistic) ? nlohmann::ordered_json(r.statistic) : nlohmann::ordered_json(nullptr);
    j["dof"] = r.dof;
    if (r.dof2 > 0.0) j["dof2"] = r.dof2;
    j["p_value"] = r.p_value;
    j["degenerate"] = r.degenerate;
    return j.dump();
}

}  // namespace salbench::stats
