#include "qdlane/hough.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace qdlane::img;

namespace {

void draw_line(BinaryMask& m, int x1, int y1, int x2, int y2) {
    const int steps = std::max(std::abs(x2 - x1), std::abs(y2 - y1));
    for (int i = 0; i <= steps; ++i) {
        const double t = steps ? static_cast<double>(i) / steps : 0.0;
        m.set(static_cast<int>(std::lround(x1 + t * (x2 - x1))), static_cast<int>(std::lround(y1 + t * (y2 - y1))),
              true);
    }
}

double longest(const std::vector<LineSegment>& segs) {
    double best = 0;
    for (const auto& s : segs) best = std::max(best, s.length());
    return best;
}

} // namespace

TEST(LineSegment, Geometry) {
    const LineSegment s{0, 0, 3, 4};
    EXPECT_DOUBLE_EQ(s.length(), 5.0);
    EXPECT_DOUBLE_EQ(s.slope(), 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.mid_x(), 1.5);
    const LineSegment v{2, 0, 2, 9};
    EXPECT_TRUE(v.vertical());
    EXPECT_TRUE(std::isinf(v.slope()));
}

TEST(Hough, EmptyMaskHasNoSegments) {
    EXPECT_TRUE(hough_segments(BinaryMask(50, 40), HoughParams{}, 1).empty());
    EXPECT_TRUE(hough_segments(BinaryMask(0, 0), HoughParams{}, 1).empty());
}

TEST(Hough, ParamsValidated) {
    HoughParams p;
    p.accumulator_threshold = 0;
    EXPECT_THROW(hough_segments(BinaryMask(5, 5), p, 0), std::invalid_argument);
    p = HoughParams{};
    p.rho_res = -1;
    EXPECT_THROW(hough_segments(BinaryMask(5, 5), p, 0), std::invalid_argument);
}

TEST(Hough, HorizontalLineRecovered) {
    BinaryMask m(120, 40);
    draw_line(m, 10, 20, 109, 20);
    const auto segs = hough_segments(m, HoughParams{}, 7);
    ASSERT_FALSE(segs.empty());
    EXPECT_GE(longest(segs), 95.0);
    for (const auto& s : segs) EXPECT_NEAR(s.slope(), 0.0, 1e-12);
}

TEST(Hough, DiagonalLinesKeepTheirSlope) {
    BinaryMask m(200, 200);
    draw_line(m, 20, 180, 90, 40);     // slope -2
    draw_line(m, 110, 40, 180, 180);   // slope +2
    const auto segs = hough_segments(m, HoughParams{}, 3);
    ASSERT_GE(segs.size(), 2u);
    int neg = 0, pos = 0;
    for (const auto& s : segs) {
        if (s.length() < 60) continue;
        if (std::abs(s.slope() + 2.0) < 0.1) ++neg;
        if (std::abs(s.slope() - 2.0) < 0.1) ++pos;
    }
    EXPECT_GE(neg, 1);
    EXPECT_GE(pos, 1);
}

TEST(Hough, SegmentsLieOnEdgePixels) {
    BinaryMask m(150, 150);
    draw_line(m, 5, 140, 140, 30);
    draw_line(m, 30, 10, 30, 120);
    for (const auto& s : hough_segments(m, HoughParams{}, 11)) {
        EXPECT_TRUE(m.test(s.x1, s.y1));
        EXPECT_TRUE(m.test(s.x2, s.y2));
    }
}

TEST(Hough, MinLengthRespected) {
    BinaryMask m(100, 100);
    draw_line(m, 10, 10, 30, 10);   // 21 px
    draw_line(m, 10, 50, 90, 50);   // 81 px
    HoughParams p;
    p.min_line_length = 40;
    const auto segs = hough_segments(m, p, 5);
    ASSERT_FALSE(segs.empty());
    for (const auto& s : segs) {
        EXPECT_GE(s.length(), 40.0);
        EXPECT_EQ(s.y1, 50);
    }
}

TEST(Hough, GapBridging) {
    BinaryMask m(200, 20);
    draw_line(m, 0, 10, 80, 10);
    draw_line(m, 100, 10, 199, 10);   // 19 px gap
    HoughParams p;
    p.max_line_gap = 25;
    EXPECT_GE(longest(hough_segments(m, p, 1)), 190.0);
    p.max_line_gap = 10;
    EXPECT_LT(longest(hough_segments(m, p, 1)), 110.0);
}

TEST(Hough, DeterministicPerSeed) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> u(0, 99);
    BinaryMask m(100, 100);
    draw_line(m, 0, 99, 60, 0);
    for (int i = 0; i < 200; ++i) m.set(u(rng), u(rng), true);
    EXPECT_EQ(hough_segments(m, HoughParams{}, 42), hough_segments(m, HoughParams{}, 42));
}
