#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "salbench/errors.hpp"
#include "salbench/rng.hpp"
#include "salbench/stats.hpp"

using namespace salbench;
using namespace salbench::stats;

TEST(Median, Examples) {
    EXPECT_EQ(median(std::vector<double>{1, 2, 3}), 2.0);
    EXPECT_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
    EXPECT_THROW(median(std::vector<double>{}), EmptyInputError);
}

TEST(Median, NormalSample) {
    Rng rng(2024);
    std::vector<double> v(1000);
    for (auto& x : v) x = rng.normal(5.0, 1.0);
    EXPECT_NEAR(median(v), 5.0, 0.15);
}

TEST(Quantile, Interpolates) {
    const std::vector<double> v{10, 0, 30, 20};
    EXPECT_EQ(quantile(v, 0.0), 0.0);
    EXPECT_EQ(quantile(v, 1.0), 30.0);
    EXPECT_EQ(quantile(v, 0.5), 15.0);
    EXPECT_EQ(quantile(v, 0.25), 7.5);
}

TEST(Moments, MeanAndSampleSd) {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    EXPECT_EQ(mean(v), 5.0);
    EXPECT_NEAR(sample_sd(v), std::sqrt(32.0 / 7.0), 1e-15);
    EXPECT_EQ(sample_sd(std::vector<double>{3.0}), 0.0);
}

TEST(IncompleteBeta, HighPrecisionReferences) {
    // 30-digit evaluations of the regularized incomplete beta
    struct Case {
        double a, b, x, want;
    };
    const Case cases[] = {
        {0.5, 0.5, 0.3, 0.36901011956554537504}, {2, 3, 0.4, 0.5248},
        {10, 20, 0.35, 0.59238666366390500246}, {1, 1, 0.7, 0.7},
        {0.1, 5, 0.01, 0.7690889207843462751},  {50, 60, 0.45, 0.46423529143060362867},
        {5, 0.5, 0.99, 0.75715810910156239502}, {3, 3, 0.5, 0.5},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(incomplete_beta(c.a, c.b, c.x), c.want, 1e-10 * c.want) << c.a << " " << c.b << " " << c.x;
    }
    EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
    EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(IncompleteBeta, MatchesQuadrature) {
    for (double a : {1.0, 1.5, 3.0, 7.0}) {
        for (double b : {1.0, 2.5, 6.0}) {
            for (double x : {0.05, 0.3, 0.5, 0.77, 0.95}) {
                EXPECT_NEAR(incomplete_beta(a, b, x), oracle::incomplete_beta_quadrature(a, b, x), 1e-8)
                    << a << " " << b << " " << x;
            }
        }
    }
}

TEST(IncompleteBeta, Symmetry) {
    for (double x : {0.1, 0.4, 0.8}) {
        EXPECT_NEAR(incomplete_beta(2.5, 4.0, x), 1.0 - incomplete_beta(4.0, 2.5, 1.0 - x), 1e-12);
    }
}

TEST(IncompleteBeta, DomainErrors) {
    EXPECT_THROW(incomplete_beta(0.0, 1.0, 0.5), DomainError);
    EXPECT_THROW(incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST(Distributions, StudentTTableQuantiles) {
    // (dof, quantile, upper tail)
    struct Case {
        double dof, t, tail;
    };
    const Case cases[] = {{1, 3.0776835372078066, 0.1},
                          {5, 2.0150483733330233, 0.05},
                          {10, 2.2281388519649385, 0.025},
                          {30, 2.4572615424005697, 0.01},
                          {3, 5.840909309733352, 0.005}};
    for (const auto& c : cases) EXPECT_NEAR(student_t_sf(c.t, c.dof), c.tail, 1e-4);
    EXPECT_NEAR(student_t_sf(-2.0, 7), 0.9571903357185121, 1e-9);
    EXPECT_EQ(student_t_sf(0.0, 4), 0.5);
}

TEST(Distributions, FTableQuantiles) {
    struct Case {
        double d1, d2, f, tail;
    };
    const Case cases[] = {{1, 10, 3.2850153217037628, 0.1},
                          {2, 6, 5.143252849784718, 0.05},
                          {3, 20, 3.8586986662732143, 0.025},
                          {5, 50, 3.407679505030136, 0.01},
                          {10, 4, 20.966730267961886, 0.005}};
    for (const auto& c : cases) EXPECT_NEAR(f_sf(c.f, c.d1, c.d2), c.tail, 1e-4);
    EXPECT_EQ(f_sf(0.0, 2, 5), 1.0);
}

TEST(Anova, ThreeShiftedGroups) {
    const std::vector<std::vector<double>> g{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
    const auto r = one_way_anova(g);
    EXPECT_NEAR(r.statistic, 3.0, 1e-12);
    EXPECT_EQ(r.dof, 2.0);
    EXPECT_EQ(r.dof2, 6.0);
    EXPECT_NEAR(r.p_value, 0.125, 1e-10);
}

TEST(Anova, EqualMeans) {
    const std::vector<std::vector<double>> g{{1, 2, 3, 4}, {4, 3, 2, 1}};
    const auto r = one_way_anova(g);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Anova, LargeShift) {
    Rng rng(3);
    std::vector<std::vector<double>> g(2);
    for (int i = 0; i < 10; ++i) {
        g[0].push_back(rng.normal(0, 1));
        g[1].push_back(rng.normal(10, 1));
    }
    EXPECT_LT(one_way_anova(g).p_value, 0.001);
    const std::vector<std::vector<double>> c{{5, 5, 5, 5}, {15.1, 14.9, 15.2, 14.8}};
    EXPECT_LT(one_way_anova(c).p_value, 0.001);
}

TEST(Anova, ShiftInvariant) {
    Rng rng(4);
    std::vector<std::vector<double>> g(3), h(3);
    for (std::size_t k = 0; k < 3; ++k) {
        for (int i = 0; i < 7; ++i) {
            const double v = rng.normal(k * 0.3, 1);
            g[k].push_back(v);
            h[k].push_back(v + 1234.5);
        }
    }
    EXPECT_NEAR(one_way_anova(g).statistic, one_way_anova(h).statistic, 1e-9);
}

TEST(Anova, Degenerate) {
    const std::vector<std::vector<double>> same{{2, 2}, {2, 2}};
    const auto r = one_way_anova(same);
    EXPECT_TRUE(r.degenerate);
    const std::vector<std::vector<double>> one{{1, 2}};
    EXPECT_THROW(one_way_anova(one), ValidationError);
    const std::vector<std::vector<double>> tiny{{1}, {2, 3}};
    EXPECT_THROW(one_way_anova(tiny), ValidationError);
}

TEST(PairedT, Examples) {
    const std::vector<double> a{2, 3, 4, 5}, b{1, 1, 1, 1};
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.statistic, 3.872983346207417, 1e-12);
    EXPECT_EQ(r.dof, 3.0);
    EXPECT_NEAR(r.p_value, 0.030466291662170977, 1e-9);

    const auto same = paired_t_test(a, a);
    EXPECT_EQ(same.statistic, 0.0);
    EXPECT_EQ(same.p_value, 1.0);

    const std::vector<double> c{2, 3}, d{1, 2};
    EXPECT_TRUE(paired_t_test(c, d).degenerate);
    EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{1}), ValidationError);
    EXPECT_THROW(paired_t_test(a, std::vector<double>{1, 2}), ValidationError);
}

TEST(PairedT, Antisymmetric) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> a(9), b(9);
        for (std::size_t i = 0; i < 9; ++i) {
            a[i] = rng.normal(0.1, 1);
            b[i] = rng.normal(0, 1);
        }
        const auto ab = paired_t_test(a, b);
        const auto ba = paired_t_test(b, a);
        ASSERT_EQ(ab.statistic, -ba.statistic);
        ASSERT_EQ(ab.p_value, ba.p_value);
    }
}
