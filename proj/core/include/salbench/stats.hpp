#pragma once

#include <span>
#include <string>
#include <vector>

namespace salbench::stats {

// Outcome of a hypothesis test. `dof` is the (numerator) degrees of freedom;
// `dof2` is the denominator dof of an F test and 0 otherwise. `degenerate`
// marks results fixed by convention because a variance was zero.
struct TestResult {
    double statistic = 0.0;
    double dof = 0.0;
    double dof2 = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
};

double mean(std::span<const double> values);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> values);

// Midpoint median. Throws EmptyInputError on empty input.
double median(std::span<const double> values);

// Linearly interpolated quantile (q in [0,1]) of order statistics.
double quantile(std::span<const double> values, double q);

// Regularized incomplete beta I_x(a, b), continued fraction evaluated to a
// relative tolerance of 1e-10.
double incomplete_beta(double a, double b, double x);

// Survival functions P(T > t) and P(F > f).
double student_t_sf(double t, double dof);
double f_sf(double f, double dof1, double dof2);

// One-way ANOVA over >= 2 groups of >= 2 samples each.
TestResult one_way_anova(std::span<const std::vector<double>> groups);

// Two-tailed paired t-test on a - b (equal lengths >= 2).
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

std::string to_json(const TestResult& r);

}  // namespace salbench::stats
