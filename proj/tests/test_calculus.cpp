#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmp/mmp.hpp"
#include "oracles.hpp"

using namespace mmp;

namespace {

MMFunction x1(std::size_t n = 1) { return mm_coordinate(n, 0); }
MMFunction minus_y(std::size_t n, std::size_t i) { return mm_compose_nonincreasing(maps::negate(), mm_coordinate(n, i)); }

double at(const MMFunction& f, Vec x, Vec y) { return f.eval(x, y); }

template <class Fn>
Errc error_code(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an mmp::Error";
    return Errc::InvalidConfig;
}

} // namespace

TEST(MMSum, LinearParts) { EXPECT_DOUBLE_EQ(at(mm_sum({x1(), minus_y(1, 0)}), {2}, {3}), -1.0); }

TEST(MMSum, SingleElementIsIdentity) {
    const auto net = problems::generate_channels(2, 3);
    const auto r = problems::rate_mm(net, 0);
    const auto s = mm_sum({r});
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const Vec x = oracle::uniform_point({0, 0}, {1, 1}, rng), y = oracle::uniform_point({0, 0}, {1, 1}, rng);
        EXPECT_EQ(s.eval(x, y), r.eval(x, y));
    }
}

TEST(MMSum, FourRatesKeepMMProperty) {
    const auto net = problems::generate_channels(4, 21);
    const auto f = mm_sum(problems::rates(net, problems::RateRepresentation::mmp));
    EXPECT_EQ(check_mm_property(f, net.power_box(), 10000, 2).violations, 0u);
}

TEST(MMSum, Errors) {
    EXPECT_EQ(error_code([] { mm_sum({}); }), Errc::EmptyList);
    EXPECT_EQ(error_code([] { mm_sum({x1(1), x1(2)}); }), Errc::DimensionMismatch);
}

TEST(MMWeightedSum, Examples) {
    EXPECT_DOUBLE_EQ(at(mm_weighted_sum({1, 1}, {x1(2), minus_y(2, 1)}), {1, 1}, {2, 2}), -1.0);
    const auto zero = mm_weighted_sum({0, 0}, {x1(2), minus_y(2, 1)});
    EXPECT_DOUBLE_EQ(at(zero, {3, -1}, {0.5, 7}), 0.0);
    const auto five = mm_weighted_sum({2, 3}, {mm_constant(1, 1), mm_constant(1, 1)});
    EXPECT_DOUBLE_EQ(at(five, {0.3}, {0.9}), 5.0);
}

TEST(MMWeightedSum, Errors) {
    EXPECT_EQ(error_code([] { mm_weighted_sum({-1}, {x1()}); }), Errc::NegativeWeight);
    EXPECT_EQ(error_code([] { mm_weighted_sum({1, 1}, {x1()}); }), Errc::DimensionMismatch);
}

TEST(MMMinMax, Examples) {
    const auto five_minus_y = mm_compose_nonincreasing(maps::subtract_from(5), x1());
    EXPECT_DOUBLE_EQ(at(mm_min({x1(), five_minus_y}), {1}, {1}), 1.0);
    EXPECT_DOUBLE_EQ(at(mm_max({x1(), five_minus_y}), {1}, {1}), 4.0);
    EXPECT_EQ(error_code([] { mm_min({}); }), Errc::EmptyList);
    EXPECT_EQ(error_code([] { mm_max({x1(1), x1(2)}); }), Errc::DimensionMismatch);
}

TEST(MMMinMax, MinOfThreeUserEfficiencies) {
    const auto net = problems::generate_channels(3, 8);
    problems::EnergyModel e{Vec(3, 5.0), 1.0, Vec(3, 1.0), 1.0};
    const auto p = problems::wmee_problem(net, e);
    EXPECT_EQ(check_mm_property(p.objective, p.initial_box, 10000, 4).violations, 0u);
}

TEST(ComposeNondecreasing, LogOfSinrIsTheRate) {
    const auto net = problems::generate_channels(2, 5);
    const auto composed = mm_compose_nondecreasing(maps::log2_1p(), problems::sinr_mm(net, 1));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec x = oracle::uniform_point({0, 0}, {1, 1}, rng);
        EXPECT_NEAR(composed.diagonal(x), oracle::rate(net, 1, x), 1e-12);
    }
}

TEST(ComposeNondecreasing, IdentityAndExp) {
    const auto f = mm_sum({x1(), minus_y(1, 0)});
    const auto id = mm_compose_nondecreasing(maps::identity(), f);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        const Vec x = oracle::uniform_point({-1}, {1}, rng), y = oracle::uniform_point({-1}, {1}, rng);
        EXPECT_EQ(id.eval(x, y), f.eval(x, y));
    }
    EXPECT_DOUBLE_EQ(at(mm_compose_nondecreasing(maps::exp(), f), {0}, {0}), 1.0);
}

TEST(ComposeNondecreasing, DomainError) {
    const auto f = mm_compose_nondecreasing(maps::ln(), mm_compose_nonincreasing(maps::negate(), x1()));
    EXPECT_EQ(error_code([&] { at(f, {0}, {1}); }), Errc::DomainError);
}

TEST(ComposeNondecreasing, RejectsWrongDirection) {
    EXPECT_EQ(error_code([] { mm_compose_nondecreasing(maps::negate(), x1()); }), Errc::NonMonotoneMap);
}

TEST(ComposeNondecreasing, SpotCheckCatchesMislabelledMap) {
    const ScalarMap liar{[](double v) { return -v; }, Monotonicity::nondecreasing, "liar"};
    EXPECT_EQ(error_code([&] { mm_compose_nondecreasing(liar, x1(), make_box({0}, {1})); }), Errc::NonMonotoneMap);
}

TEST(ComposeNonincreasing, NegationSwapsArguments) {
    const auto f = mm_compose_nonincreasing(maps::negate(), x1());
    EXPECT_DOUBLE_EQ(at(f, {5}, {2}), -2.0);
    EXPECT_EQ(check_mm_property(f, make_box({0}, {1}), 1000, 1).violations, 0u);
}

TEST(ComposeNonincreasing, ReciprocalUsesSwappedArguments) {
    const auto one_plus_y = mm_leaf(1, [](std::span<const double>, std::span<const double> y) { return 1.0 + y[0]; });
    EXPECT_DOUBLE_EQ(at(mm_compose_nonincreasing(maps::reciprocal(), one_plus_y), {1}, {0}), 0.5);
}

TEST(ComposeNonincreasing, Constant) {
    const auto f = mm_compose_nonincreasing(maps::constant(7), x1(2));
    EXPECT_DOUBLE_EQ(at(f, {0, 1}, {3, 4}), 7.0);
    EXPECT_DOUBLE_EQ(at(f, {-2, 9}, {0, 0}), 7.0);
}

TEST(MMProduct, Examples) {
    const Box unit = make_box({0, 0}, {1, 1});
    const auto p = mm_product({mm_coordinate(2, 0), mm_coordinate(2, 1)}, unit);
    EXPECT_DOUBLE_EQ(at(p, {1, 1}, {0.3, 0.8}), 1.0);
    const auto single = mm_product({mm_coordinate(2, 1, 3.0)}, unit);
    EXPECT_DOUBLE_EQ(at(single, {0.2, 0.4}, {0, 0}), 1.2);
}

TEST(MMProduct, NegativeFactorRejected) {
    const auto shifted = mm_affine_x({1.0}, -0.5);
    EXPECT_EQ(error_code([&] { mm_product({shifted}, make_box({0}, {1})); }), Errc::NegativityDetected);
    const auto p = mm_product({shifted}, make_box({0.5}, {1}));
    EXPECT_EQ(error_code([&] { at(p, {0.1}, {0.1}); }), Errc::NegativityDetected);
}

TEST(MMProduct, AlohaThroughputKeepsMMProperty) {
    problems::AlohaNetwork net{3, {1.0, 2.0, 0.5}, problems::full_interference(3), {0, 0, 0}};
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_EQ(check_mm_property(problems::aloha_throughput(net, k), make_box(Vec(3, 0.0), Vec(3, 1.0)), 10000, k)
                      .violations,
                  0u);
}

TEST(MMRatio, Examples) {
    const auto q = mm_affine_x({1.0}, 1.0);
    EXPECT_DOUBLE_EQ(at(mm_ratio(x1(), q), {1}, {0}), 1.0);
    const auto zero_den = mm_affine_x({1.0}, 0.0);
    EXPECT_EQ(error_code([&] { at(mm_ratio(x1(), zero_den), {1}, {0}); }), Errc::NonpositiveDenominator);
}

TEST(MMRatio, GlobalEfficiencyKeepsMMProperty) {
    const auto net = problems::generate_channels(3, 4);
    const problems::EnergyModel e{Vec(3, 5.0), 1.0, {}, 1.0};
    EXPECT_EQ(check_mm_property(problems::gee_objective(net, e), net.power_box(), 10000, 6).violations, 0u);
}

TEST(Calculus, WsrDiagonalMatchesDirectFormula) {
    const auto net = problems::generate_channels(4, 77);
    const auto F = problems::wsr_objective(net, problems::RateRepresentation::mmp);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = oracle::uniform_point(Vec(4, 0.0), net.P, rng);
        EXPECT_NEAR(F.diagonal(x), oracle::weighted_sum_rate(net, x), 1e-12);
    }
}

TEST(Calculus, PerturbedRepresentationIsLooser) {
    // F~(x, y) = F(x, y) + sum_i (x_i - y_i) is another representation of f.
    const auto net = problems::generate_channels(3, 13);
    const auto F = problems::wsr_objective(net, problems::RateRepresentation::mmp);
    std::vector<MMFunction> diffs{F};
    for (std::size_t i = 0; i < 3; ++i) {
        diffs.push_back(mm_coordinate(3, i));
        diffs.push_back(minus_y(3, i));
    }
    const auto Ft = mm_sum(diffs);
    EXPECT_EQ(check_mm_property(Ft, net.power_box(), 10000, 12).violations, 0u);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const auto [r, s] = oracle::random_subbox(Vec(3, 0.0), net.P, rng);
        double width = 0.0;
        for (std::size_t i = 0; i < 3; ++i) width += s[i] - r[i];
        EXPECT_NEAR(Ft.eval(s, r) - F.eval(s, r), width, 1e-12);
        EXPECT_GE(Ft.eval(s, r), F.eval(s, r));
    }
}
