#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "gca/error.hpp"
#include "gca/granger.hpp"

using namespace gca;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

Dataset make_dataset(const std::vector<double>& y, const std::vector<double>& x,
                     const std::vector<double>& z = {}) {
    std::vector<Year> years(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) years[i] = 1 + static_cast<Year>(i);
    std::vector<Covariate> covs{{TimeSeries("X", "", years, x), CovariateRole::Driver}};
    if (!z.empty()) covs.push_back({TimeSeries("Z", "", years, z), CovariateRole::Driver});
    return Dataset(TimeSeries("Y", "", years, y), covs);
}

/// Y(t) = a Y(t-1) + b X(t-1) + e, X white noise.
Dataset ar_with_cause(std::uint64_t seed, std::size_t n, double a, double b) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> x(n), y(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = nd(rng);
        y[t] = nd(rng) + (t > 0 ? a * y[t - 1] + b * x[t - 1] : 0.0);
    }
    return make_dataset(y, x);
}

VarSpec spec_xy(int order) { return VarSpec{order, "Y", {"X"}, {}, true}; }

}  // namespace

TEST(LaggedDesign, CountsRowsAndColumns) {
    std::vector<double> y(10), x(10);
    for (int i = 0; i < 10; ++i) {
        y[i] = std::sin(i);
        x[i] = std::cos(1.7 * i);
    }
    const LaggedDesign d = build_lagged_design(make_dataset(y, x), spec_xy(2));
    EXPECT_EQ(d.unrestricted.rows(), 8);
    EXPECT_EQ(d.unrestricted.cols(), 5);
    EXPECT_EQ(d.restricted.cols(), 3);
    EXPECT_EQ(d.y.size(), 8u);
    EXPECT_EQ(d.years.front(), 3);
    EXPECT_EQ(d.cause_columns, (std::vector<std::string>{lag_column("X", 1), lag_column("X", 2)}));
    // Y(t-2) for the first row t=3 is Y(1)
    const auto idx = d.unrestricted.index_of(lag_column("Y", 2));
    ASSERT_TRUE(idx.has_value());
    EXPECT_EQ(d.unrestricted.matrix()(0, *idx), y[0]);
    EXPECT_EQ(d.y[0], y[2]);
}

TEST(LaggedDesign, RestrictedIsUnrestrictedWithoutCauseLags) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::vector<double> y(40), x(40), z(40);
    for (int i = 0; i < 40; ++i) {
        y[i] = nd(rng);
        x[i] = nd(rng);
        z[i] = nd(rng);
    }
    const VarSpec spec{3, "Y", {"X"}, {"Z"}, true};
    const LaggedDesign d = build_lagged_design(make_dataset(y, x, z), spec);
    const DesignMatrix expected = d.unrestricted.without(d.cause_columns);
    EXPECT_EQ(expected.names(), d.restricted.names());
    EXPECT_EQ(expected.matrix(), d.restricted.matrix());
    EXPECT_EQ(d.unrestricted.rows(), d.restricted.rows());
}

TEST(LaggedDesign, ConstantCauseIsCollinearWithIntercept) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> y(50);
    for (auto& v : y) v = nd(rng);
    const Dataset ds = make_dataset(y, std::vector<double>(50, 3.0));
    const LaggedDesign d = build_lagged_design(ds, spec_xy(1));
    EXPECT_TRUE(d.unrestricted.ill_conditioned());
    EXPECT_EQ(code_of([&] { (void)gc_test(ds, spec_xy(1)); }), ErrorCode::IllConditioned);
}

TEST(LaggedDesign, Errors) {
    std::vector<double> v(9, 1.0);
    const Dataset small = make_dataset(v, v);
    EXPECT_EQ(code_of([&] { (void)build_lagged_design(small, spec_xy(2)); }), ErrorCode::InsufficientData);
    const Dataset ds = ar_with_cause(1, 50, 0.2, 0.2);
    EXPECT_EQ(code_of([&] { (void)build_lagged_design(ds, VarSpec{0, "Y", {"X"}, {}, true}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { (void)build_lagged_design(ds, VarSpec{1, "Y", {}, {}, true}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { (void)build_lagged_design(ds, VarSpec{1, "Y", {"Y"}, {}, true}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { (void)build_lagged_design(ds, VarSpec{1, "Y", {"Q"}, {}, true}); }),
              ErrorCode::UnknownSeries);
}

TEST(GcTest, StrongCauseRejects) {
    const GcResult r = gc_test(ar_with_cause(42, 500, 0.5, 0.8), spec_xy(1));
    EXPECT_LT(r.p_value, 1e-6);
    EXPECT_TRUE(r.reject);
    EXPECT_EQ(r.dof_numerator, 1);
    EXPECT_EQ(r.dof_denominator, 499 - 3);
    EXPECT_GE(r.rss_restricted, r.rss_unrestricted);
}

TEST(GcTest, ZeroCauseGivesNoEvidence) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> y(100);
    for (auto& v : y) v = nd(rng);
    const GcResult r = gc_test(make_dataset(y, std::vector<double>(100, 0.0)), spec_xy(2));
    EXPECT_EQ(r.f_statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.gaussian_te, 0.0);
    EXPECT_FALSE(r.reject);
}

TEST(GcTest, RestrictedRssNeverBelowUnrestricted) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const GcResult r = gc_test(ar_with_cause(seed, 60, 0.3, 0.0), spec_xy(1 + seed % 3));
        EXPECT_GE(r.rss_restricted, r.rss_unrestricted);
        EXPECT_GE(r.gaussian_te, 0.0);
        EXPECT_EQ(r.gaussian_te == 0.0, r.f_statistic == 0.0);
    }
}

TEST(GcTest, InvariantUnderAffineRescaling) {
    const Dataset ds = ar_with_cause(7, 120, 0.4, 0.15);
    const GcResult base = gc_test(ds, spec_xy(2));
    auto affine = [](const TimeSeries& s, double a, double b) {
        std::vector<double> v(s.values().begin(), s.values().end());
        for (auto& x : v) x = a * x + b;
        return s.with_values(v);
    };
    for (auto [a, b, c, d] : {std::array<double, 4>{2.0, 1.0, 1.0, 0.0}, std::array<double, 4>{1.0, 0.0, -0.3, 5.0},
                              std::array<double, 4>{1e3, -7.0, 0.01, 100.0}}) {
        const Dataset t(affine(ds.response(), c, d), {{affine(ds.series("X"), a, b), CovariateRole::Driver}});
        const GcResult r = gc_test(t, spec_xy(2));
        EXPECT_NEAR(r.p_value, base.p_value, 1e-10);
        EXPECT_EQ(r.reject, base.reject);
    }
}

TEST(TransferEntropy, Examples) {
    EXPECT_EQ(gaussian_transfer_entropy(3.0, 3.0), 0.0);
    EXPECT_NEAR(gaussian_transfer_entropy(2.0, 1.0), 0.34657359027997264, 1e-15);
    EXPECT_NEAR(gaussian_transfer_entropy(std::exp(2.0), 1.0), 1.0, 1e-15);
    EXPECT_EQ(code_of([] { (void)gaussian_transfer_entropy(1.0, 2.0); }), ErrorCode::InvalidRss);
    EXPECT_EQ(code_of([] { (void)gaussian_transfer_entropy(0.0, 0.0); }), ErrorCode::InvalidRss);
    EXPECT_EQ(code_of([] { (void)gaussian_transfer_entropy(1.0, -1.0); }), ErrorCode::InvalidRss);
}

TEST(TransferEntropy, MatchesRecordedFits) {
    const GcResult r = gc_test(ar_with_cause(9, 300, 0.5, 0.3), spec_xy(2));
    const double te = 0.5 * std::log(r.restricted.rss / r.unrestricted.rss);
    EXPECT_NEAR(r.gaussian_te, te, 1e-12);
}

TEST(SelectOrder, SingletonSearch) {
    EXPECT_EQ(select_order(ar_with_cause(1, 80, 0.3, 0.3), spec_xy(1), 1, InformationCriterion::Bic), 1);
}

TEST(SelectOrder, WhiteNoisePrefersOrderOne) {
    int ones = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ones += select_order(ar_with_cause(1000 + seed, 200, 0.0, 0.0), spec_xy(1), 4, InformationCriterion::Bic) == 1;
    }
    EXPECT_GE(ones, 180);
}

TEST(SelectOrder, StrongSecondLag) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    const std::size_t n = 1000;
    std::vector<double> y(n), x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = nd(rng);
        y[t] = nd(rng) + (t > 1 ? 0.2 * y[t - 1] + 0.6 * y[t - 2] : 0.0);
    }
    const Dataset ds = make_dataset(y, x);
    EXPECT_EQ(select_order(ds, spec_xy(1), 5, InformationCriterion::Bic), 2);
    EXPECT_EQ(select_order(ds, spec_xy(1), 5, InformationCriterion::Aic), 2);
}
