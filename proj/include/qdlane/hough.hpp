// Progressive probabilistic Hough transform over a binary edge mask.
#pragma once

#include "qdlane/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace qdlane::img {

struct LineSegment {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    bool vertical() const noexcept { return x1 == x2; }
    // dy/dx in image coordinates (y grows downward); +inf when vertical.
    double slope() const noexcept {
        if (vertical()) return std::numeric_limits<double>::infinity();
        return static_cast<double>(y2 - y1) / static_cast<double>(x2 - x1);
    }
    double length() const noexcept { return std::hypot(double(x2 - x1), double(y2 - y1)); }
    double mid_x() const noexcept { return 0.5 * (x1 + x2); }
    double mid_y() const noexcept { return 0.5 * (y1 + y2); }

    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

struct HoughParams {
    double rho_res = 1.0;
    double theta_res = std::numbers::pi / 180.0;
    int accumulator_threshold = 8;
    double min_line_length = 2.0;
    int max_line_gap = 25;

    void validate() const {
        if (!(rho_res > 0 && theta_res > 0 && accumulator_threshold > 0 && min_line_length > 0 && max_line_gap > 0)) {
            throw std::invalid_argument("Hough parameters must all be positive");
        }
    }

    friend bool operator==(const HoughParams&, const HoughParams&) = default;
};

// Edge pixels are visited in a seeded random order. Each vote goes into a
// (rho, theta) accumulator; once a cell reaches the threshold the line is
// walked in both directions from the voting pixel, tolerating gaps of up
// to max_line_gap. Pixels on an accepted segment are removed from the mask
// and their votes withdrawn.
inline std::vector<LineSegment> hough_segments(const BinaryMask& edges, const HoughParams& params,
                                               std::uint64_t seed) {
    params.validate();
    const int w = edges.width(), h = edges.height();
    std::vector<LineSegment> lines;
    if (w == 0 || h == 0) return lines;

    const int num_angle = static_cast<int>(std::lround(std::numbers::pi / params.theta_res));
    const int num_rho = static_cast<int>(std::lround(((w + h) * 2 + 1) / params.rho_res));
    const double irho = 1.0 / params.rho_res;
    std::vector<double> cos_t(static_cast<std::size_t>(num_angle)), sin_t(static_cast<std::size_t>(num_angle));
    for (int n = 0; n < num_angle; ++n) {
        cos_t[static_cast<std::size_t>(n)] = std::cos(n * params.theta_res) * irho;
        sin_t[static_cast<std::size_t>(n)] = std::sin(n * params.theta_res) * irho;
    }

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    std::vector<std::uint8_t> voted(mask.size(), 0);
    std::vector<std::pair<int, int>> points;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (edges.test(x, y)) {
                mask[static_cast<std::size_t>(y * w + x)] = 1;
                points.emplace_back(x, y);
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(points.begin(), points.end(), rng);

    std::vector<int> accum(static_cast<std::size_t>(num_angle) * static_cast<std::size_t>(num_rho), 0);
    auto rho_index = [&](int x, int y, int n) {
        const int r = static_cast<int>(std::lround(x * cos_t[static_cast<std::size_t>(n)] + y * sin_t[static_cast<std::size_t>(n)]));
        return r + (num_rho - 1) / 2;
    };
    auto vote = [&](int x, int y, int delta) {
        for (int n = 0; n < num_angle; ++n) {
            accum[static_cast<std::size_t>(n) * static_cast<std::size_t>(num_rho) + static_cast<std::size_t>(rho_index(x, y, n))] += delta;
        }
    };

    constexpr int shift = 16;
    for (const auto& [px, py] : points) {
        const std::size_t pi = static_cast<std::size_t>(py * w + px);
        if (!mask[pi]) continue;

        int max_val = params.accumulator_threshold - 1;
        int max_n = 0;
        for (int n = 0; n < num_angle; ++n) {
            int& cell = accum[static_cast<std::size_t>(n) * static_cast<std::size_t>(num_rho) + static_cast<std::size_t>(rho_index(px, py, n))];
            ++cell;
            if (cell > max_val) {
                max_val = cell;
                max_n = n;
            }
        }
        voted[pi] = 1;
        if (max_val < params.accumulator_threshold) continue;

        // Direction along the line, in fixed point on the minor axis.
        const double a = -sin_t[static_cast<std::size_t>(max_n)];
        const double b = cos_t[static_cast<std::size_t>(max_n)];
        long x0 = px, y0 = py, dx0 = 0, dy0 = 0;
        const bool xflag = std::abs(a) > std::abs(b);
        if (xflag) {
            dx0 = a > 0 ? 1 : -1;
            dy0 = std::lround(b * (1 << shift) / std::abs(a));
            y0 = (y0 << shift) + (1 << (shift - 1));
        } else {
            dy0 = b > 0 ? 1 : -1;
            dx0 = std::lround(a * (1 << shift) / std::abs(b));
            x0 = (x0 << shift) + (1 << (shift - 1));
        }
        auto to_pixel = [&](long x, long y) {
            return xflag ? std::pair<long, long>{x, y >> shift} : std::pair<long, long>{x >> shift, y};
        };

        std::pair<long, long> line_end[2] = {{px, py}, {px, py}};
        for (int k = 0; k < 2; ++k) {
            long x = x0, y = y0, dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
            int gap = 0;
            for (;; x += dx, y += dy) {
                const auto [j1, i1] = to_pixel(x, y);
                if (j1 < 0 || j1 >= w || i1 < 0 || i1 >= h) break;
                if (mask[static_cast<std::size_t>(i1 * w + j1)]) {
                    gap = 0;
                    line_end[k] = {j1, i1};
                } else if (++gap > params.max_line_gap) {
                    break;
                }
            }
        }

        const double len = std::hypot(double(line_end[1].first - line_end[0].first),
                                      double(line_end[1].second - line_end[0].second));
        const bool good_line = len >= params.min_line_length;

        for (int k = 0; k < 2; ++k) {
            long x = x0, y = y0, dx = k ? -dx0 : dx0, dy = k ? -dy0 : dy0;
            for (;; x += dx, y += dy) {
                const auto [j1, i1] = to_pixel(x, y);
                if (j1 < 0 || j1 >= w || i1 < 0 || i1 >= h) break;
                const std::size_t q = static_cast<std::size_t>(i1 * w + j1);
                if (mask[q]) {
                    if (good_line && voted[q]) vote(static_cast<int>(j1), static_cast<int>(i1), -1);
                    mask[q] = 0;
                }
                if (j1 == line_end[k].first && i1 == line_end[k].second) break;
            }
        }

        if (good_line) {
            lines.push_back(LineSegment{static_cast<int>(line_end[0].first), static_cast<int>(line_end[0].second),
                                        static_cast<int>(line_end[1].first), static_cast<int>(line_end[1].second)});
        }
    }
    return lines;
}

} // namespace qdlane::img
