#include "qdlane/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace qdlane;
using namespace qdlane::exp;

namespace {

constexpr double kPi = std::numbers::pi;

SweepDataset small_dataset() {
    SweepDataset ds;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> j(0, 0.1);
    for (int i = 0; i < 5; ++i) {
        ds.data.features.push_back({-1 + j(rng), 1 + j(rng)});
        ds.data.labels.push_back(Direction::Straight);
        ds.data.features.push_back({-0.5 + j(rng), 3 + j(rng)});
        ds.data.labels.push_back(Direction::Right);
        ds.data.features.push_back({-3 + j(rng), 0.5 + j(rng)});
        ds.data.labels.push_back(Direction::Left);
    }
    ds.model.params = {0.3, -1.1, 2.0, 0.4};
    return ds;
}

} // namespace

TEST(Evaluate, Counting) {
    using D = Direction;
    const std::vector<D> a{D::Right, D::Left, D::Straight};
    EXPECT_DOUBLE_EQ(evaluate(a, a), 1.0);
    EXPECT_NEAR(evaluate(a, std::vector<D>{D::Right, D::Left, D::Left}), 2.0 / 3.0, 1e-15);
    EXPECT_THROW(evaluate(std::vector<D>{}, std::vector<D>{}), std::invalid_argument);
    EXPECT_THROW(evaluate(a, std::vector<D>{D::Right}), std::invalid_argument);
}

TEST(Wilson, KnownInterval) {
    const auto ci = wilson(8, 10);
    EXPECT_NEAR(ci.low, 0.4901625, 1e-6);
    EXPECT_NEAR(ci.high, 0.9433178, 1e-6);
    const auto all = wilson(30, 30);
    EXPECT_DOUBLE_EQ(all.high, 1.0);
    EXPECT_GT(all.low, 0.88);
    EXPECT_DOUBLE_EQ(wilson(0, 0).low, 0.0);
}

TEST(Noisy, ZeroProbabilityMatchesNoiselessExactly) {
    const auto ds = small_dataset();
    for (qc::ChannelKind k : qc::kAllChannels) {
        const auto ch = qc::make_channel(k, 0.0);
        for (const auto& pair : ds.data.features) {
            const auto clean = decision::decide_uu_detail(pair);
            const auto noisy = noisy_decide_uu(pair, decision::kDefaultReference, ch);
            EXPECT_EQ(noisy.direction, clean.direction);
            EXPECT_NEAR(noisy.p_first, clean.p_first, 1e-12);
            EXPECT_EQ(decision::argmax(noisy_vqc_scores(ds.model, pair, ch)), decision::vqc_predict(ds.model, pair));
        }
    }
}

TEST(Noisy, FullDepolarizingIsStraight) {
    const auto ch = qc::make_channel(qc::ChannelKind::Depolarizing, 1.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 100; ++i) {
        const auto d = noisy_decide_uu(SlopePair{u(rng), u(rng)}, decision::kDefaultReference, ch);
        EXPECT_EQ(d.direction, Direction::Straight);
        EXPECT_NEAR(d.p_first, 0.5, 1e-12);
    }
}

TEST(Noisy, FullBitFlipOracle) {
    // X after each rotation turns Ry(-ref) into Ry(ref): P(0) = cos^2((phi + ref) / 2).
    const auto ch = qc::make_channel(qc::ChannelKind::BitFlip, 1.0);
    for (double s : {-2.0, -0.4, 0.0, 0.9, 3.0}) {
        for (double ref : {0.3, kPi / 2, 2.0}) {
            const double phi = decision::slope_angle(s);
            const auto rho = decision::uu_circuit(s, ref).run(ch);
            EXPECT_NEAR(rho.probabilities()[0], std::pow(std::cos((phi + ref) / 2), 2), 1e-12);
        }
    }
    // Equal angles at pi/2: the |0> outcome disappears.
    EXPECT_NEAR(decision::uu_circuit(0.0, kPi / 2).run(ch).probabilities()[0], 0.0, 1e-12);
}

TEST(Sweep, DefaultGrid) {
    const auto g = default_p_grid();
    EXPECT_EQ(g.size(), 10u);
    EXPECT_DOUBLE_EQ(g.front(), 0.0);
    EXPECT_NE(std::find(g.begin(), g.end(), 0.22), g.end());
    EXPECT_NE(std::find(g.begin(), g.end(), 0.88), g.end());
}

TEST(Sweep, RowCountOrderAndZeroRows) {
    const auto ds = small_dataset();
    SweepOptions o;
    o.seed = 9;
    const auto rows = sweep(ds, o);
    ASSERT_EQ(rows.size(), 2u * 6u * 10u);
    EXPECT_EQ(rows[0].method, Head::Uu);
    EXPECT_EQ(rows[0].channel, qc::ChannelKind::BitFlip);
    EXPECT_EQ(rows[10].channel, qc::kAllChannels[1]);
    EXPECT_EQ(rows[60].method, Head::Vqc);

    const double uu_clean = evaluate(clean_predictions(Head::Uu, ds), ds.data.labels);
    const double vqc_clean = evaluate(clean_predictions(Head::Vqc, ds), ds.data.labels);
    for (const auto& r : rows) {
        EXPECT_GE(r.accuracy, 0.0);
        EXPECT_LE(r.accuracy, 1.0);
        EXPECT_LE(r.ci.low, r.accuracy);
        EXPECT_GE(r.ci.high, r.accuracy);
        EXPECT_EQ(r.n, ds.data.size());
        if (r.p == 0.0) { EXPECT_EQ(r.accuracy, r.method == Head::Uu ? uu_clean : vqc_clean); }
    }
}

TEST(Sweep, DepolarizingApproachesStraightRate) {
    const auto ds = small_dataset();
    SweepOptions o;
    o.methods = {Head::Uu};
    o.channels = {qc::ChannelKind::Depolarizing};
    o.p_grid = {0.99};
    const auto rows = sweep(ds, o);
    const double straight_rate =
        static_cast<double>(std::count(ds.data.labels.begin(), ds.data.labels.end(), Direction::Straight)) /
        static_cast<double>(ds.data.size());
    EXPECT_DOUBLE_EQ(rows.at(0).accuracy, straight_rate);
}

TEST(Sweep, DeterministicWithShots) {
    const auto ds = small_dataset();
    SweepOptions o;
    o.shots = 256;
    o.seed = 77;
    o.p_grid = {0.0, 0.33};
    const auto a = sweep(ds, o), b = sweep(ds, o);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].accuracy, b[i].accuracy);
}

TEST(Sweep, Errors) {
    SweepDataset empty;
    EXPECT_THROW(sweep(empty, SweepOptions{}), std::invalid_argument);
    auto ds = small_dataset();
    SweepOptions o;
    o.channels.clear();
    EXPECT_THROW(sweep(ds, o), std::invalid_argument);
}

TEST(Head, ParseRoundTrip) {
    EXPECT_EQ(parse_head(to_string(Head::Uu)), Head::Uu);
    EXPECT_EQ(parse_head(to_string(Head::Vqc)), Head::Vqc);
    EXPECT_THROW(parse_head("svm"), std::invalid_argument);
}

TEST(Bench, SingleRepetitionRecorded) {
    int calls = 0;
    const auto row = bench("noop", 3, 4, 1, [&] { ++calls; });
    EXPECT_EQ(calls, 2);   // warm-up + one timed run
    EXPECT_EQ(row.repetitions, 1);
    EXPECT_GT(row.wall_time_s, 0.0);
    EXPECT_EQ(row.width, 3);
    EXPECT_THROW(bench("x", 1, 1, 0, [] {}), std::invalid_argument);
}
