#include "qdlane/uudagger.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qdlane;
using namespace qdlane::uu;

namespace {
constexpr double kPi = std::numbers::pi;

// Closed form of |<0|Ry(-b) Ry(a)|0>|.
double overlap_oracle(double a, double b) { return std::abs(std::cos((a - b) / 2.0)); }
} // namespace

TEST(Encode, DegreesToRadians) {
    EXPECT_DOUBLE_EQ(encode(0).theta, 0.0);
    EXPECT_NEAR(encode(180).theta, kPi, 1e-15);
    EXPECT_NEAR(encode(255).theta, 4.4505895925855405, 1e-12);
    EXPECT_DOUBLE_EQ(encode(77).value, 77.0);
}

TEST(Overlap, KnownValues) {
    EXPECT_NEAR(overlap(kPi / 2, 0).inner_product, 0.70710678118654757, 1e-12);
    EXPECT_NEAR(overlap(1.3, 1.3).inner_product, 1.0, 1e-12);
    EXPECT_NEAR(overlap(0.4, 0.4 + kPi).inner_product, 0.0, 1e-7);   // sqrt of ~1e-32 rounding
    EXPECT_NEAR(overlap(0.4, 0.4 + kPi).p_zero, 0.0, 1e-12);
}

TEST(Overlap, MatchesClosedFormAndIsSymmetric) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
    for (int i = 0; i < 500; ++i) {
        const double a = u(rng), b = u(rng);
        const double ab = overlap(a, b).inner_product;
        EXPECT_NEAR(ab, overlap_oracle(a, b), 1e-12);
        EXPECT_NEAR(ab, overlap(b, a).inner_product, 1e-12);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
    }
}

TEST(Overlap, ShotEstimateIsSeededAndClose) {
    const auto a = overlap(1.0, 0.2, 4096, 17);
    const auto b = overlap(1.0, 0.2, 4096, 17);
    EXPECT_EQ(a.p_zero, b.p_zero);
    EXPECT_NEAR(a.p_zero, std::pow(std::cos(0.4), 2), 4 * std::sqrt(0.25 / 4096));
}

TEST(Overlap, RejectsNonFinite) { EXPECT_THROW(overlap(std::nan(""), 0), std::invalid_argument); }

TEST(Classify, BelowThresholdGivesOppositeRegion) {
    // cos(0.75) = 0.7317 < 0.75.
    const Centroid c{0.5, Region::Shadow, 1};
    const double value = 2.0 * 180.0 / kPi;
    EXPECT_EQ(classify(value, c, 0.75), Region::Shadowless);
    EXPECT_EQ(classify(value, c, 0.73), Region::Shadow);
}

TEST(Classify, AtCentroidReturnsTrainedRegion) {
    for (Region r : {Region::Shadow, Region::Shadowless}) {
        const Centroid c{encode(42).theta, r, 3};
        EXPECT_EQ(classify(42, c, 0.97), r);
        EXPECT_EQ(classify(42, c, 1.0), r);
    }
}

TEST(Classify, ThresholdMonotone) {
    // Raising the threshold can only move values out of the centroid's region.
    const Centroid c{encode(40).theta, Region::Shadow, 1};
    for (int v = 0; v <= 255; v += 5) {
        bool was_outside = false;
        for (double t = 0.0; t <= 1.0; t += 0.05) {
            const bool outside = classify(v, c, t) != Region::Shadow;
            EXPECT_FALSE(was_outside && !outside) << "value " << v << " threshold " << t;
            was_outside = outside;
        }
    }
}

TEST(Classify, Errors) {
    EXPECT_THROW(classify(10, Centroid{}, 0.5), invalid_state);
    EXPECT_THROW(classify(10, Centroid{0.1, Region::Shadow, 1}, 1.5), std::invalid_argument);
    EXPECT_THROW(classify(10, Centroid{0.1, Region::Shadow, 1}, -0.1), std::invalid_argument);
}

TEST(Region, ParseRoundTrip) {
    for (Region r : {Region::Shadow, Region::Shadowless}) EXPECT_EQ(parse_region(to_string(r)), r);
    EXPECT_THROW(parse_region("dark"), std::invalid_argument);
}

// ---------------------------------------------------------------------------

TEST(TrainCentroid, SinglePointConverges) {
    const std::vector<double> v{30.0};
    TrainOptions o;
    o.theta0 = 1.0;
    const auto r = train_centroid(v, o);
    EXPECT_NEAR(r.centroid.theta, 0.52359877559829882, 1e-5);
    EXPECT_TRUE(r.centroid.trained());
    EXPECT_LT(r.centroid.iterations, 50);
    // First step is -tan((1 - pi/6)/2).
    ASSERT_FALSE(r.trace.steps.empty());
    EXPECT_NEAR(r.trace.steps[0].step, -std::tan((1.0 - kPi / 6) / 2), 1e-12);
    EXPECT_NEAR(r.trace.steps[0].trace, 2 * std::cos(1.0 - kPi / 6), 1e-12);
}

TEST(TrainCentroid, SymmetricPairLandsOnMean) {
    const std::vector<double> v{80.0, 100.0};
    TrainOptions o;
    o.theta0 = 0.0;
    const auto r = train_centroid(v, o);
    EXPECT_NEAR(r.centroid.theta, kPi / 2, 0.02);
}

TEST(TrainCentroid, DefaultStartIsMeanAngle) {
    const std::vector<double> v{10.0, 20.0, 60.0};
    const auto r = train_centroid(v);
    EXPECT_NEAR(r.trace.steps.front().theta, encode(30).theta, 1e-12);
}

TEST(TrainCentroid, ClusterCentroidNearMean) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(20.0, 60.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(25);
        double mean = 0.0;
        for (double& x : v) {
            x = u(rng);
            mean += x;
        }
        mean /= static_cast<double>(v.size());
        TrainOptions o;
        o.theta0 = 2.5;   // well away from the data
        const auto r = train_centroid(v, o);
        EXPECT_NEAR(r.centroid.theta, encode(mean).theta, 0.02) << "trial " << trial;
    }
}

TEST(TrainCentroid, SingularGuardSkipsUpdate) {
    const std::vector<double> v{45.0};
    TrainOptions o;
    o.theta0 = encode(45).theta;
    const auto r = train_centroid(v, o);
    EXPECT_FALSE(r.trace.steps.front().updated);
    EXPECT_DOUBLE_EQ(r.trace.steps.front().step, 0.0);
    EXPECT_NEAR(r.centroid.theta, encode(45).theta, 1e-15);
}

TEST(TrainCentroid, StepIsClamped) {
    const std::vector<double> v{0.0};
    TrainOptions o;
    o.theta0 = 3.0;   // tan(1.5) = 14.1 before clamping
    const auto r = train_centroid(v, o);
    EXPECT_NEAR(std::abs(r.trace.steps.front().step), kPi / 4, 1e-15);
}

TEST(TrainCentroid, ReversedSignMovesAway) {
    const std::vector<double> v{30.0};
    TrainOptions o;
    o.theta0 = 1.0;
    o.reversed_sign = true;
    o.max_epochs = 3;
    const auto r = train_centroid(v, o);
    EXPECT_GT(r.trace.steps[1].theta, 1.0);
    EXPECT_GT(std::abs(r.centroid.theta - encode(30).theta), std::abs(1.0 - encode(30).theta));
}

TEST(TrainCentroid, Deterministic) {
    const std::vector<double> v{12, 40, 33, 25, 19};
    const auto a = train_centroid(v);
    const auto b = train_centroid(v);
    EXPECT_EQ(a.centroid, b.centroid);
    EXPECT_EQ(a.trace.steps.size(), b.trace.steps.size());
}

TEST(TrainCentroid, Errors) {
    EXPECT_THROW(train_centroid(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(train_centroid(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
}

TEST(TrainCentroid, LabelCarriedThrough) {
    TrainOptions o;
    o.label = Region::Shadowless;
    EXPECT_EQ(train_centroid(std::vector<double>{150.0}, o).centroid.trained_on, Region::Shadowless);
}
