// Deterministic synthetic road frames with known driving direction, plus the
// square road-with-patch scene used to check shadow detection.
//
// Frames are 460x480: sky above row 200, textured asphalt below, two bright
// lane markings from row 300 to the bottom edge. Dark rectangular shadows
// are aligned to the detection grid (downsample 4, 79x79 cells) so a correct
// detector can remove them without leaving partial-cell residue.
#pragma once

#include "qdlane/decision.hpp"
#include "qdlane/imgproc.hpp"
#include "qdlane/shadow.hpp"
#include "qdlane/uudagger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qdlane::synth {

using decision::Direction;

inline constexpr int kFrameWidth = 460;
inline constexpr int kFrameHeight = 480;
inline constexpr int kHorizon = 200;
inline constexpr int kLaneTop = 300;
inline constexpr double kLaneHalfWidth = 2.5;
inline constexpr std::uint8_t kSky = 200;
inline constexpr std::uint8_t kRoad = 140;
inline constexpr std::uint8_t kLane = 240;
inline constexpr double kShadowGain = 0.3;
inline constexpr double kNoiseSigma = 4.0;

struct Lane {
    double slope;      // dy/dx in image coordinates
    double bottom_x;   // x where the lane meets the bottom row
};

struct Rect {
    int x, y, w, h;
    bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
};

struct Frame {
    std::string name;
    Direction label;
    Lane left, right;
    std::vector<Rect> shadows;
    img::RgbImage image;
    img::BinaryMask shadow_truth;
};

namespace detail {

inline std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double lane_distance(const Lane& l, double x, double y) {
    const double c = (kFrameHeight - 1) - l.slope * l.bottom_x;
    return std::abs(l.slope * x - y + c) / std::hypot(l.slope, 1.0);
}

// Full-resolution cell boundaries of the default detection grid.
inline std::vector<int> grid_lines(int length, int factor = 4, int grid_n = 79) {
    auto starts = shadow::block_starts(length / factor, grid_n);
    for (auto& s : starts) s *= factor;
    return starts;
}

inline int snap(const std::vector<int>& lines, int v) {
    const auto it = std::lower_bound(lines.begin(), lines.end(), v);
    return it == lines.end() ? lines.back() : *it;
}

// ROI half-width at row y for the default polygon, used to keep shadows
// strictly inside it.
inline double roi_left(double y) { return (kFrameHeight - y) * 0.8; }
inline double roi_right(double y) { return kFrameWidth - (kFrameHeight - y) * 0.8; }

} // namespace detail

// Lane geometry per class; `u` draws jitter in [-1, 1].
template <typename Jitter>
std::array<Lane, 2> lanes_for(Direction d, Jitter&& u) {
    switch (d) {
        case Direction::Straight:
            return {Lane{-1.0 * (1 + 0.08 * u()), 60 + 8 * u()}, Lane{1.0 * (1 + 0.08 * u()), 399 + 8 * u()}};
        case Direction::Left:
            return {Lane{-4.0 * (1 + 0.1 * u()), 70 + 8 * u()}, Lane{0.6 * (1 + 0.1 * u()), 440 + 6 * u()}};
        case Direction::Right:
            return {Lane{-0.6 * (1 + 0.1 * u()), 19 + 6 * u()}, Lane{4.0 * (1 + 0.1 * u()), 389 + 8 * u()}};
    }
    return {};
}

// Places up to `count` shadows inside the lower road region, snapped to grid
// cells, no taller than 16 px so lane gaps stay bridgeable.
template <typename Rng>
std::vector<Rect> place_shadows(Rng& rng, int count) {
    const auto xs = detail::grid_lines(kFrameWidth);
    const auto ys = detail::grid_lines(kFrameHeight);
    std::uniform_int_distribution<int> row(392, 450), height(8, 16), width(24, 90);
    std::vector<Rect> out;
    for (int attempt = 0; attempt < 50 && static_cast<int>(out.size()) < count; ++attempt) {
        const int y0 = detail::snap(ys, row(rng));
        const int y1 = detail::snap(ys, y0 + height(rng));
        const double lo = detail::roi_left(y0) + 10, hi = detail::roi_right(y0) - 10;
        const int w = width(rng);
        if (hi - lo < w + 8) continue;
        std::uniform_int_distribution<int> col(static_cast<int>(lo), static_cast<int>(hi) - w);
        const int x0 = detail::snap(xs, col(rng));
        const int x1 = detail::snap(xs, x0 + w);
        if (x0 < lo || x1 > hi || y1 > kFrameHeight - 8 || y1 <= y0 || x1 <= x0) continue;
        const Rect r{x0, y0, x1 - x0, y1 - y0};
        bool overlaps = false;
        for (const auto& o : out) {
            if (r.x < o.x + o.w + 8 && o.x < r.x + r.w + 8 && r.y < o.y + o.h + 8 && o.y < r.y + r.h + 8) overlaps = true;
        }
        if (!overlaps) out.push_back(r);
    }
    return out;
}

inline Frame render(std::string name, Direction label, Lane left, Lane right, std::vector<Rect> shadows,
                    std::uint64_t noise_seed) {
    Frame f{std::move(name), label, left, right, std::move(shadows), img::RgbImage(kFrameWidth, kFrameHeight),
            img::BinaryMask(kFrameWidth, kFrameHeight)};
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, kNoiseSigma);
    for (int y = 0; y < kFrameHeight; ++y) {
        for (int x = 0; x < kFrameWidth; ++x) {
            double v = y < kHorizon ? kSky : kRoad;
            if (y >= kLaneTop && (detail::lane_distance(left, x, y) <= kLaneHalfWidth ||
                                  detail::lane_distance(right, x, y) <= kLaneHalfWidth)) {
                v = kLane;
            }
            bool shaded = false;
            for (const auto& r : f.shadows) shaded = shaded || r.contains(x, y);
            if (shaded) {
                v *= kShadowGain;
                f.shadow_truth.set(x, y, true);
            }
            const auto p = img::saturate(v + noise(rng));
            f.image.set(x, y, {p, p, p});
        }
    }
    return f;
}

// Frame `index` of the corpus; classes cycle Straight, Left, Right.
inline Frame make_frame(std::uint64_t seed, int index) {
    static constexpr Direction order[3] = {Direction::Straight, Direction::Left, Direction::Right};
    const Direction label = order[index % 3];
    std::mt19937_64 rng(detail::frame_seed(seed, static_cast<std::uint64_t>(index)));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto u = [&] { return unit(rng); };
    const auto lanes = lanes_for(label, u);
    // Two of every three frames carry shadows.
    const int count = index % 3 == 2 ? 0 : 1 + static_cast<int>(rng() % 2);
    auto shadows = place_shadows(rng, count);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03d.png", index);
    return render(name, label, lanes[0], lanes[1], std::move(shadows), rng());
}

inline std::vector<Frame> make_corpus(std::uint64_t seed, int frames = 30) {
    std::vector<Frame> out;
    out.reserve(static_cast<std::size_t>(frames));
    for (int i = 0; i < frames; ++i) out.push_back(make_frame(seed, i));
    return out;
}

// Shadowed pixel values across a corpus, thinned to at most `limit` samples,
// for training the shadow centroid.
inline std::vector<double> shadow_samples(const std::vector<Frame>& frames, std::size_t limit = 2000) {
    std::vector<double> all;
    for (const auto& f : frames) {
        const auto gray = img::to_gray(f.image);
        for (std::size_t i = 0; i < gray.data.size(); ++i) {
            if (f.shadow_truth.image().data[i]) all.push_back(gray.data[i]);
        }
    }
    if (all.size() <= limit) return all;
    std::vector<double> out;
    const double step = static_cast<double>(all.size()) / static_cast<double>(limit);
    for (std::size_t k = 0; k < limit; ++k) out.push_back(all[static_cast<std::size_t>(k * step)]);
    return out;
}

// Square road of `road` with a dark `patch`; returns the image and its
// ground-truth mask.
struct PatchScene {
    img::GrayImage image;
    img::BinaryMask truth;
    Rect patch;
};

inline PatchScene road_with_patch(int size = 316, Rect patch = {128, 128, 60, 60}, std::uint8_t road = 200,
                                  std::uint8_t dark = 40) {
    PatchScene s{img::GrayImage(size, size, road), img::BinaryMask(size, size), patch};
    for (int y = patch.y; y < patch.y + patch.h; ++y) {
        for (int x = patch.x; x < patch.x + patch.w; ++x) {
            s.image.at(x, y) = dark;
            s.truth.set(x, y, true);
        }
    }
    return s;
}

inline std::vector<double> patch_values(const img::GrayImage& image, Rect r) {
    if (r.w <= 0 || r.h <= 0 || r.x < 0 || r.y < 0 || r.x + r.w > image.width || r.y + r.h > image.height) {
        throw std::invalid_argument("patch lies outside the image");
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(r.w) * static_cast<std::size_t>(r.h));
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) v.push_back(image.at(x, y));
    }
    return v;
}

// Pixel-level F1 of a predicted mask against ground truth.
inline double mask_f1(const img::BinaryMask& predicted, const img::BinaryMask& truth) {
    if (predicted.width() != truth.width() || predicted.height() != truth.height()) {
        throw std::invalid_argument("mask dimensions differ");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    const auto& a = predicted.image().data;
    const auto& b = truth.image().data;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) ++tp;
        else if (a[i]) ++fp;
        else if (b[i]) ++fn;
    }
    if (tp == 0) return fp == 0 && fn == 0 ? 1.0 : 0.0;
    return 2.0 * tp / (2.0 * tp + fp + fn);
}

} // namespace qdlane::synth
