#include "qdlane/imgproc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace qdlane::img;

namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, 255);
    GrayImage g(w, h);
    for (auto& v : g.data) v = static_cast<std::uint8_t>(u(rng));
    return g;
}

// Straightforward single median pass with edge replication.
GrayImage median_once_oracle(const GrayImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::array<int, 9> w{};
            int k = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = std::min(std::max(x + dx, 0), img.width - 1);
                    const int yy = std::min(std::max(y + dy, 0), img.height - 1);
                    w[k++] = img.data[static_cast<std::size_t>(yy * img.width + xx)];
                }
            std::sort(w.begin(), w.end());
            out.data[static_cast<std::size_t>(y * img.width + x)] = static_cast<std::uint8_t>(w[4]);
        }
    }
    return out;
}

RgbImage solid(int w, int h, std::array<std::uint8_t, 3> c) {
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, c);
    return img;
}

} // namespace

TEST(Images, ConstructorsValidateSize) {
    EXPECT_THROW(GrayImage(2, 2, std::vector<std::uint8_t>(3)), std::invalid_argument);
    EXPECT_THROW(RgbImage(2, 2, std::vector<std::uint8_t>(4)), std::invalid_argument);
    EXPECT_THROW(GrayImage(-1, 2), std::invalid_argument);
}

TEST(Images, BinaryMaskRejectsIntermediateValues) {
    EXPECT_THROW(BinaryMask::from_gray(GrayImage(2, 2, 128)), std::invalid_argument);
    EXPECT_EQ(BinaryMask::from_gray(GrayImage(2, 2, 255)).count(), 4u);
}

TEST(ToGray, LumaWeights) {
    EXPECT_EQ(to_gray(solid(1, 1, {255, 0, 0})).at(0, 0), 76);    // 76.245
    EXPECT_EQ(to_gray(solid(1, 1, {0, 255, 0})).at(0, 0), 150);   // 149.685
    EXPECT_EQ(to_gray(solid(1, 1, {0, 0, 255})).at(0, 0), 29);    // 29.07
    EXPECT_EQ(to_gray(solid(1, 1, {10, 20, 30})).at(0, 0), 18);   // 18.15
    EXPECT_EQ(to_gray(solid(1, 1, {255, 255, 255})).at(0, 0), 255);
}

TEST(Chromaticity, KnownPixels) {
    auto c = chromaticity(solid(1, 1, {255, 0, 0}));
    EXPECT_EQ(c.r.at(0, 0), 255);
    EXPECT_EQ(c.g.at(0, 0), 0);
    EXPECT_EQ(c.b.at(0, 0), 0);

    c = chromaticity(solid(1, 1, {10, 20, 30}));
    EXPECT_EQ(c.r.at(0, 0), 43);   // 42.5
    EXPECT_EQ(c.g.at(0, 0), 85);
    EXPECT_EQ(c.b.at(0, 0), 128);   // 127.5

    c = chromaticity(solid(1, 1, {0, 0, 0}));
    EXPECT_EQ(c.r.at(0, 0), 85);
    EXPECT_EQ(c.g.at(0, 0), 85);
    EXPECT_EQ(c.b.at(0, 0), 85);
}

TEST(Chromaticity, GrayPixelsAreUniform) {
    for (int v = 0; v <= 255; v += 15) {
        const auto u = static_cast<std::uint8_t>(v);
        const auto c = chromaticity(solid(1, 1, {u, u, u}));
        EXPECT_EQ(c.r.at(0, 0), 85);
        EXPECT_EQ(select_plane(c, ChromaPlane::B).at(0, 0), 85);
    }
}

TEST(Chromaticity, IntensityInvariant) {
    // Scaling a colour leaves its chromaticity (nearly) unchanged.
    const auto a = chromaticity(solid(1, 1, {40, 80, 120}));
    const auto b = chromaticity(solid(1, 1, {80, 160, 240}));
    EXPECT_EQ(a.r.at(0, 0), b.r.at(0, 0));
    EXPECT_EQ(a.g.at(0, 0), b.g.at(0, 0));
}

TEST(Downsample, BlockMean) {
    const auto img = random_image(9, 7, 4);
    const auto d = downsample(img, 3);
    ASSERT_EQ(d.width, 3);
    ASSERT_EQ(d.height, 2);
    for (int by = 0; by < 2; ++by) {
        for (int bx = 0; bx < 3; ++bx) {
            double s = 0;
            for (int y = 0; y < 3; ++y)
                for (int x = 0; x < 3; ++x) s += img.at(bx * 3 + x, by * 3 + y);
            EXPECT_EQ(d.at(bx, by), static_cast<int>(std::lround(s / 9.0)));
        }
    }
}

TEST(Downsample, FactorOneIsIdentityAndErrors) {
    const auto img = random_image(5, 4, 9);
    EXPECT_EQ(downsample(img, 1), img);
    EXPECT_THROW(downsample(img, 5), std::invalid_argument);
    EXPECT_THROW(downsample(img, 0), std::invalid_argument);
}

TEST(Median, SinglePassMatchesOracle) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto img = random_image(13, 11, seed);
        EXPECT_EQ(median_filter(img, 1), median_once_oracle(img));
    }
}

TEST(Median, IteratesOracle) {
    const auto img = random_image(16, 16, 8);
    GrayImage ref = img;
    for (int i = 0; i < 30; ++i) ref = median_once_oracle(ref);
    EXPECT_EQ(median_filter(img), ref);
}

TEST(Median, RemovesImpulseAndKeepsConstant) {
    GrayImage img(9, 9, 100);
    img.at(4, 4) = 255;
    const auto out = median_filter(img, 1);
    EXPECT_EQ(out, GrayImage(9, 9, 100));
    EXPECT_EQ(median_filter(out, 30), out);
    EXPECT_EQ(median_filter(img, 0), img);
}

TEST(Gaussian, KernelValues) {
    EXPECT_NEAR(auto_sigma(5), 1.1, 1e-15);
    EXPECT_NEAR(auto_sigma(3), 0.8, 1e-15);
    // sigma = 1, size 3: weights e^{-1/2} / (1 + 2 e^{-1/2}) and 1 / (1 + 2 e^{-1/2}).
    const auto k = gaussian_kernel(3, 1.0);
    EXPECT_NEAR(k[0], 0.27406862, 1e-8);
    EXPECT_NEAR(k[1], 0.45186276, 1e-8);
    EXPECT_NEAR(k[2], k[0], 1e-15);
    EXPECT_THROW(gaussian_kernel(4, 1.0), std::invalid_argument);
}

TEST(Gaussian, KernelNormalizedAndSymmetric) {
    for (int ks : {1, 3, 5, 7, 9}) {
        const auto k = gaussian_kernel(ks, 0.0);
        double s = 0;
        for (double v : k) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
        for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k[i], k[k.size() - 1 - i], 1e-15);
    }
}

TEST(Gaussian, ConstantImageUnchanged) {
    const GrayImage img(12, 7, 173);
    EXPECT_EQ(gaussian_blur(img), img);
}

TEST(Gaussian, SmoothsImpulse) {
    GrayImage img(9, 9, 0);
    img.at(4, 4) = 255;
    const auto out = gaussian_blur(img, 5, 5, 1.1);
    EXPECT_LT(out.at(4, 4), 255);
    EXPECT_GT(out.at(5, 4), 0);
    EXPECT_EQ(out.at(3, 4), out.at(5, 4));
    EXPECT_EQ(out.at(4, 3), out.at(4, 5));
}

// ---------------------------------------------------------------------------

TEST(Canny, StepEdgeOnFirstBrightColumn) {
    GrayImage img(20, 12, 0);
    for (int y = 0; y < 12; ++y)
        for (int x = 10; x < 20; ++x) img.at(x, y) = 200;
    const auto e = canny(img);
    for (int y = 0; y < 12; ++y) {
        for (int x = 0; x < 20; ++x) EXPECT_EQ(e.test(x, y), x == 10) << x << "," << y;
    }
}

TEST(Canny, ConstantImageHasNoEdges) { EXPECT_EQ(canny(GrayImage(15, 15, 90)).count(), 0u); }

TEST(Canny, ThresholdOrderChecked) {
    EXPECT_THROW(canny(GrayImage(4, 4), 100, 100), std::invalid_argument);
    EXPECT_THROW(canny(GrayImage(4, 4), 120, 60), std::invalid_argument);
}

TEST(Canny, HysteresisKeepsOnlyConnectedWeakEdges) {
    // A step of d levels has L1 Sobel magnitude 4d, and 6d at an outer
    // corner: weak for (50, 175) when d is 25 or 30 away from corners.
    GrayImage img(40, 40, 0);
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 40; ++x) {
            if (y < 20) {
                img.at(x, y) = x < 10 ? 0 : 200;   // strong step at x = 10
            } else {
                img.at(x, y) = x < 10 ? 170 : (x < 30 ? 200 : 225);   // weak steps at 10 and 30
            }
        }
    }
    const auto e = canny(img);
    EXPECT_TRUE(e.test(10, 30));    // weak, connected to the strong column
    for (int x = 27; x <= 33; ++x) EXPECT_FALSE(e.test(x, 30)) << x;   // weak, isolated

    // With no strong edge at all, the weak step vanishes.
    GrayImage weak(40, 10, 100);
    for (int y = 0; y < 10; ++y)
        for (int x = 20; x < 40; ++x) weak.at(x, y) = 130;
    EXPECT_EQ(canny(weak).count(), 0u);
}

TEST(Canny, HigherThresholdsGiveSubset) {
    const auto img = gaussian_blur(random_image(40, 30, 77), 5, 5, 0);
    const auto loose = canny(img, 30, 90);
    const auto tight = canny(img, 60, 180);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (tight.test(x, y)) { EXPECT_TRUE(loose.test(x, y)) << x << "," << y; }
}

TEST(Sobel, GradientOfRamp) {
    GrayImage img(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) img.at(x, y) = static_cast<std::uint8_t>(10 * x);
    const auto g = sobel(img);
    // Interior: (1 + 2 + 1) * (20) = 80 per unit ramp of 10.
    EXPECT_DOUBLE_EQ(g.gx[static_cast<std::size_t>(4 * 8 + 4)], 80.0);
    EXPECT_DOUBLE_EQ(g.gy[static_cast<std::size_t>(4 * 8 + 4)], 0.0);
}

// ---------------------------------------------------------------------------

TEST(Roi, SquareCoverageIsBoundaryInclusive) {
    const RoiPolygon sq{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
    const auto cov = roi_coverage(20, 20, sq);
    EXPECT_EQ(std::count(cov.begin(), cov.end(), 1), 121);
}

TEST(Roi, DefaultPolygon) {
    const auto roi = default_roi(460, 480);
    ASSERT_EQ(roi.vertices.size(), 4u);
    EXPECT_EQ(roi.vertices[0], (Point{0, 480}));
    EXPECT_EQ(roi.vertices[3], (Point{460, 480}));
    EXPECT_TRUE(roi.contains(230, 450));
    EXPECT_TRUE(roi.contains(80, 380));    // vertex
    EXPECT_TRUE(roi.contains(200, 380));   // top edge
    EXPECT_FALSE(roi.contains(5, 385));
    EXPECT_FALSE(roi.contains(230, 300));
}

TEST(Roi, MaskZeroesOutside) {
    const auto img = random_image(30, 30, 12);
    const RoiPolygon tri{{{0, 29}, {15, 0}, {29, 29}}};
    const auto out = roi_mask(img, tri);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 30; ++x) EXPECT_EQ(out.at(x, y), tri.contains(x, y) ? img.at(x, y) : 0);
    EXPECT_THROW(roi_mask(img, RoiPolygon{{{0, 0}, {1, 1}}}), std::invalid_argument);
}

TEST(Roi, MaskOnBinaryStaysBinary) {
    BinaryMask m(10, 10);
    for (int i = 0; i < 10; ++i) m.set(i, i, true);
    const auto out = roi_mask(m, RoiPolygon{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
    EXPECT_EQ(out.count(), 5u);
}
