#include "qdlane/shadow.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace qdlane;
using namespace qdlane::shadow;
using img::BinaryMask;
using img::GrayImage;

namespace {

uu::Centroid centroid_at(double value, uu::Region r = uu::Region::Shadow) {
    return uu::Centroid{uu::encode(value).theta, r, 1};
}

GrayImage road_with_patch(int size, int px, int py, int pw, int ph, std::uint8_t road, std::uint8_t dark) {
    GrayImage g(size, size, road);
    for (int y = py; y < py + ph; ++y)
        for (int x = px; x < px + pw; ++x) g.at(x, y) = dark;
    return g;
}

double f1(const BinaryMask& pred, const GrayImage& truth_img, std::uint8_t dark) {
    double tp = 0, fp = 0, fn = 0;
    for (int y = 0; y < pred.height(); ++y) {
        for (int x = 0; x < pred.width(); ++x) {
            const bool t = truth_img.at(x, y) == dark;
            const bool p = pred.test(x, y);
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
    }
    return 2 * tp / (2 * tp + fp + fn);
}

} // namespace

TEST(Partition, BlockStarts) {
    EXPECT_EQ(block_starts(10, 3), (std::vector<int>{0, 3, 6, 10}));
    EXPECT_EQ(block_starts(11, 4), (std::vector<int>{0, 2, 5, 8, 11}));
    EXPECT_EQ(block_starts(6, 6), (std::vector<int>{0, 1, 2, 3, 4, 5, 6}));
}

TEST(Partition, CoversImageExactlyOnce) {
    const GrayImage img(37, 29, 1);
    for (int n : {1, 2, 5, 7, 29}) {
        const auto g = partition(img, n);
        ASSERT_EQ(g.cells.size(), static_cast<std::size_t>(n * n));
        std::vector<int> hits(img.data.size(), 0);
        for (const auto& c : g.cells)
            for (int y = c.y0; y < c.y0 + c.height; ++y)
                for (int x = c.x0; x < c.x0 + c.width; ++x) ++hits[img.index(x, y)];
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; })) << n;
    }
}

TEST(Partition, MidpointAndMean) {
    GrayImage img(4, 4);
    std::iota(img.data.begin(), img.data.end(), std::uint8_t{0});
    const auto g = partition(img, 1);
    EXPECT_EQ(g.at(0, 0).midpoint_value, img.at(1, 1));   // upper-left of the centre
    EXPECT_DOUBLE_EQ(g.at(0, 0).mean_value, 7.5);
}

TEST(Partition, RejectsOversizedGrid) {
    EXPECT_THROW(partition(GrayImage(10, 8), 9), std::invalid_argument);
    EXPECT_THROW(partition(GrayImage(10, 8), 0), std::invalid_argument);
}

TEST(Refine, IsolatedCellClearedAndHoleFilled) {
    const int n = 5;
    std::vector<std::uint8_t> labels(n * n, 0);
    labels[0 * n + 4] = 1;   // isolated
    // Plus shape around (2,2) with the centre missing.
    labels[1 * n + 2] = labels[3 * n + 2] = labels[2 * n + 1] = labels[2 * n + 3] = 1;
    const auto out = refine_cells(labels, n);
    EXPECT_EQ(out[0 * n + 4], 0);
    EXPECT_EQ(out[2 * n + 2], 1);
    // Arms of the plus have no 4-neighbours in the input, so they go.
    EXPECT_EQ(out[1 * n + 2], 0);
}

TEST(Refine, SolidBlockIsStable) {
    const int n = 6;
    std::vector<std::uint8_t> labels(n * n, 0);
    for (int r = 1; r < 5; ++r)
        for (int c = 1; c < 5; ++c) labels[static_cast<std::size_t>(r * n + c)] = 1;
    EXPECT_EQ(refine_cells(labels, n), labels);
}

TEST(ClassifyCells, ThresholdMonotone) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> u(0, 255);
    GrayImage img(40, 40);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(u(rng));
    const auto grid = partition(img, 10);
    const auto c = centroid_at(60);
    DetectParams p;
    std::size_t prev = grid.cells.size() + 1;
    for (double t = 0.0; t <= 1.0; t += 0.1) {
        p.threshold = t;
        const auto l = classify_cells(grid, c, p);
        const auto count = static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));
        EXPECT_LE(count, prev);
        prev = count;
    }
}

TEST(ClassifyCells, Errors) {
    const auto grid = partition(GrayImage(8, 8), 2);
    DetectParams p;
    EXPECT_THROW(classify_cells(grid, uu::Centroid{}, p), invalid_state);
    p.threshold = 2.0;
    EXPECT_THROW(classify_cells(grid, centroid_at(10), p), std::invalid_argument);
}

TEST(Detect, PatchRecoveredWithHighF1) {
    const auto img = road_with_patch(316, 128, 128, 60, 60, 200, 40);
    DetectParams p;   // factor 4, 79x79 grid, threshold 0.75
    const auto sm = detect(img, centroid_at(40), p);
    EXPECT_EQ(sm.mask.width(), 316);
    EXPECT_GE(f1(sm.mask, img, 40), 0.95);
    EXPECT_EQ(sm.provenance.grid_n, 79);
    EXPECT_EQ(sm.provenance.kind, InputKind::Intensity);
}

TEST(Detect, CentroidTrainedOnRoadLabelsRoad) {
    const auto img = road_with_patch(120, 40, 40, 40, 40, 200, 40);
    DetectParams p;
    p.grid_n = 30;
    const auto sm = detect(img, centroid_at(200), p);
    // The centroid's own region is what gets flagged.
    EXPECT_TRUE(sm.mask.test(5, 5));
    EXPECT_FALSE(sm.mask.test(60, 60));
}

TEST(Detect, UniformSceneIsConstant) {
    DetectParams p;
    p.grid_n = 20;
    EXPECT_EQ(detect(GrayImage(80, 80, 40), centroid_at(40), p).mask.count(), 80u * 80u);
    EXPECT_EQ(detect(GrayImage(80, 80, 200), centroid_at(40), p).mask.count(), 0u);
}

TEST(Detect, ChromaticityOnAchromaticSceneIsConstant) {
    // Every gray pixel has chromaticity 85, so the whole frame lands in one class.
    img::RgbImage rgb(80, 80);
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> u(0, 255);
    for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 80; ++x) {
            const auto v = static_cast<std::uint8_t>(u(rng));
            rgb.set(x, y, {v, v, v});
        }
    DetectParams p;
    p.grid_n = 20;
    const auto near = detect_chromaticity(rgb, centroid_at(85), p);
    const auto far = detect_chromaticity(rgb, centroid_at(250), p);
    EXPECT_EQ(near.mask.count(), 80u * 80u);
    EXPECT_EQ(far.mask.count(), 0u);
    EXPECT_EQ(near.provenance.kind, InputKind::Chromaticity);
}

TEST(Detect, ShotsAreSeeded) {
    const auto img = road_with_patch(100, 20, 20, 40, 40, 120, 60);
    DetectParams p;
    p.grid_n = 25;
    p.shots = 64;
    p.seed = 31;
    const auto c = centroid_at(60);
    EXPECT_EQ(detect(img, c, p).mask, detect(img, c, p).mask);
}

TEST(Detect, RequiresTrainedCentroid) {
    EXPECT_THROW(detect(GrayImage(40, 40), uu::Centroid{}, DetectParams{}), invalid_state);
}

// ---------------------------------------------------------------------------

TEST(Replace, ShadowTakesLowerMedianOfRoadInsideRoi) {
    GrayImage img(6, 1);
    img.data = {10, 20, 30, 40, 99, 77};
    BinaryMask m(6, 1);
    m.set(4, 0, true);
    const img::RoiPolygon roi{{{0, -1}, {4.5, -1}, {4.5, 1}, {0, 1}}};   // columns 0..4
    const auto r = replace_shadow(img, m, roi);
    EXPECT_FALSE(r.no_road_reference);
    EXPECT_EQ(r.road_value, 20);   // lower median of {10,20,30,40}
    EXPECT_EQ(r.image.data, (std::vector<std::uint8_t>{10, 20, 30, 40, 20, 77}));
}

TEST(Replace, ShadowOutsideRoiUntouched) {
    const auto img = road_with_patch(50, 0, 0, 10, 10, 150, 30);
    BinaryMask m(50, 50);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) m.set(x, y, true);
    const img::RoiPolygon roi{{{20, 20}, {49, 20}, {49, 49}, {20, 49}}};
    const auto r = replace_shadow(img, m, roi);
    EXPECT_EQ(r.image, img);
}

TEST(Replace, AllShadowRoiFlagsMissingReference) {
    const GrayImage img(10, 10, 50);
    BinaryMask m = BinaryMask::from_gray(GrayImage(10, 10, 255));
    const auto r = replace_shadow(img, m, img::RoiPolygon{{{0, 0}, {9, 0}, {9, 9}, {0, 9}}});
    EXPECT_TRUE(r.no_road_reference);
    EXPECT_EQ(r.image, img);
}

TEST(Replace, NonShadowPixelsNeverChange) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> u(0, 255);
    GrayImage img(30, 30);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(u(rng));
    BinaryMask m(30, 30);
    for (int i = 0; i < 100; ++i) m.set(u(rng) % 30, u(rng) % 30, true);
    const auto r = replace_shadow(img, m, img::RoiPolygon{{{0, 29}, {15, 5}, {29, 29}}});
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 30; ++x)
            if (!m.test(x, y)) { EXPECT_EQ(r.image.at(x, y), img.at(x, y)); }
}

TEST(Replace, DimensionMismatchThrows) {
    EXPECT_THROW(replace_shadow(GrayImage(5, 5), BinaryMask(4, 5), img::default_roi(5, 5)), std::invalid_argument);
}
