// Shadow detection on a submatrix grid and shadow replacement.
#pragma once

#include "qdlane/error.hpp"
#include "qdlane/imgproc.hpp"
#include "qdlane/uudagger.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::shadow {

using img::BinaryMask;
using img::GrayImage;

struct Cell {
    int row = 0, col = 0;
    int x0 = 0, y0 = 0, width = 0, height = 0;   // pixel block
    double midpoint_value = 0.0;
    double mean_value = 0.0;
};

struct SubmatrixGrid {
    int grid_n = 0;
    std::vector<int> col_starts;   // grid_n + 1 boundaries
    std::vector<int> row_starts;
    std::vector<Cell> cells;       // row-major

    const Cell& at(int row, int col) const { return cells[static_cast<std::size_t>(row * grid_n + col)]; }
};

// Block boundaries for `length` pixels in `n` near-equal parts; the last
// (length % n) blocks are one pixel larger.
inline std::vector<int> block_starts(int length, int n) {
    const int base = length / n;
    const int extra = length % n;
    std::vector<int> starts(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) {
        const int size = base + (i >= n - extra ? 1 : 0);
        starts[static_cast<std::size_t>(i) + 1] = starts[static_cast<std::size_t>(i)] + size;
    }
    return starts;
}

inline SubmatrixGrid partition(const GrayImage& image, int grid_n) {
    if (grid_n < 1 || grid_n > std::min(image.width, image.height)) {
        throw std::invalid_argument("grid size " + std::to_string(grid_n) + " does not fit a " +
                                    std::to_string(image.width) + "x" + std::to_string(image.height) + " image");
    }
    SubmatrixGrid g;
    g.grid_n = grid_n;
    g.col_starts = block_starts(image.width, grid_n);
    g.row_starts = block_starts(image.height, grid_n);
    g.cells.reserve(static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n));
    for (int r = 0; r < grid_n; ++r) {
        for (int c = 0; c < grid_n; ++c) {
            Cell cell;
            cell.row = r;
            cell.col = c;
            cell.x0 = g.col_starts[static_cast<std::size_t>(c)];
            cell.y0 = g.row_starts[static_cast<std::size_t>(r)];
            cell.width = g.col_starts[static_cast<std::size_t>(c) + 1] - cell.x0;
            cell.height = g.row_starts[static_cast<std::size_t>(r) + 1] - cell.y0;
            long sum = 0;
            for (int y = cell.y0; y < cell.y0 + cell.height; ++y) {
                for (int x = cell.x0; x < cell.x0 + cell.width; ++x) sum += image.at(x, y);
            }
            cell.mean_value = static_cast<double>(sum) / (cell.width * cell.height);
            cell.midpoint_value = image.at(cell.x0 + (cell.width - 1) / 2, cell.y0 + (cell.height - 1) / 2);
            g.cells.push_back(cell);
        }
    }
    return g;
}

enum class Feature { Midpoint, Mean };
enum class InputKind { Intensity, Chromaticity };

inline std::string_view to_string(Feature f) { return f == Feature::Midpoint ? "midpoint" : "mean"; }
inline std::string_view to_string(InputKind k) { return k == InputKind::Intensity ? "intensity" : "chromaticity"; }

struct DetectParams {
    int downsample_factor = 4;
    int grid_n = 79;
    double threshold = 0.75;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    Feature feature = Feature::Midpoint;
    bool refine = true;
    int median_passes = 1;
};

// Named classification thresholds for the two track presets.
inline constexpr double kThresholdLoose = 0.75;
inline constexpr double kThresholdStrict = 0.97;

struct Provenance {
    uu::Centroid centroid;
    double threshold = 0.0;
    InputKind kind = InputKind::Intensity;
    int grid_n = 0;
    std::uint64_t seed = 0;
    Feature feature = Feature::Midpoint;
};

struct ShadowMask {
    BinaryMask mask;
    Provenance provenance;
};

// Per-cell labels (1 = centroid region) before any refinement.
inline std::vector<std::uint8_t> classify_cells(const SubmatrixGrid& grid, const uu::Centroid& c,
                                                const DetectParams& p) {
    uu::check_threshold(p.threshold);
    if (!c.trained()) throw invalid_state("shadow detection needs a trained centroid");
    std::vector<std::uint8_t> labels(grid.cells.size(), 0);
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const Cell& cell = grid.cells[i];
        const double v = p.feature == Feature::Midpoint ? cell.midpoint_value : cell.mean_value;
        const auto region = uu::classify(v, c, p.threshold, p.shots, p.seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
        labels[i] = region == uu::Region::Shadow ? 1 : 0;
    }
    return labels;
}

// One sweep over the grid: shadow cells with no 4-neighbour shadow are
// cleared, non-shadow cells with at least 3 shadow 4-neighbours are filled.
// Reads the input labels only, so the result is order independent.
inline std::vector<std::uint8_t> refine_cells(const std::vector<std::uint8_t>& labels, int grid_n) {
    std::vector<std::uint8_t> out = labels;
    auto get = [&](int r, int c) -> int {
        if (r < 0 || c < 0 || r >= grid_n || c >= grid_n) return 0;
        return labels[static_cast<std::size_t>(r * grid_n + c)];
    };
    for (int r = 0; r < grid_n; ++r) {
        for (int c = 0; c < grid_n; ++c) {
            const int n = get(r - 1, c) + get(r + 1, c) + get(r, c - 1) + get(r, c + 1);
            auto& v = out[static_cast<std::size_t>(r * grid_n + c)];
            if (get(r, c) && n == 0) v = 0;
            else if (!get(r, c) && n >= 3) v = 1;
        }
    }
    return out;
}

// Paints grid labels back at full resolution. `factor` maps full-resolution
// pixels onto the downsampled raster the grid was built from; pixels past
// the last whole block use the last row/column.
inline BinaryMask upscale_cells(const std::vector<std::uint8_t>& labels, const SubmatrixGrid& grid, int factor,
                                int width, int height) {
    const int ds_w = grid.col_starts.back();
    const int ds_h = grid.row_starts.back();
    auto cell_of = [](const std::vector<int>& starts, int v) {
        const auto it = std::upper_bound(starts.begin(), starts.end(), v);
        return static_cast<int>(it - starts.begin()) - 1;
    };
    std::vector<int> col_cell(static_cast<std::size_t>(width)), row_cell(static_cast<std::size_t>(height));
    for (int x = 0; x < width; ++x) col_cell[static_cast<std::size_t>(x)] = cell_of(grid.col_starts, std::min(x / factor, ds_w - 1));
    for (int y = 0; y < height; ++y) row_cell[static_cast<std::size_t>(y)] = cell_of(grid.row_starts, std::min(y / factor, ds_h - 1));
    BinaryMask m(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int idx = row_cell[static_cast<std::size_t>(y)] * grid.grid_n + col_cell[static_cast<std::size_t>(x)];
            m.set(x, y, labels[static_cast<std::size_t>(idx)] != 0);
        }
    }
    return m;
}

// Downsample, partition, classify every cell against the centroid, refine
// at grid level, upscale and smooth with a median pass.
inline ShadowMask detect(const GrayImage& image, const uu::Centroid& c, const DetectParams& p,
                         InputKind kind = InputKind::Intensity) {
    if (!c.trained()) throw invalid_state("shadow detection needs a trained centroid");
    const GrayImage small = img::downsample(image, p.downsample_factor);
    const SubmatrixGrid grid = partition(small, p.grid_n);
    auto labels = classify_cells(grid, c, p);
    if (p.refine) labels = refine_cells(labels, grid.grid_n);
    BinaryMask mask = upscale_cells(labels, grid, p.downsample_factor, image.width, image.height);
    if (p.median_passes > 0) mask = BinaryMask::from_gray(img::median_filter(mask.image(), p.median_passes));
    return ShadowMask{std::move(mask), Provenance{c, p.threshold, kind, p.grid_n, p.seed, p.feature}};
}

// Chromaticity variant: classifies one normalized-colour plane.
inline ShadowMask detect_chromaticity(const img::RgbImage& image, const uu::Centroid& c, const DetectParams& p,
                                      img::ChromaPlane plane = img::ChromaPlane::R) {
    const auto planes = img::chromaticity(image);
    return detect(img::select_plane(planes, plane), c, p, InputKind::Chromaticity);
}

struct Replacement {
    GrayImage image;
    bool no_road_reference = false;   // nothing to copy from; image unchanged
    std::uint8_t road_value = 0;
};

// Shadow pixels inside the ROI take the median of the non-shadow ROI pixels.
inline Replacement replace_shadow(const GrayImage& image, const BinaryMask& mask, const img::RoiPolygon& roi) {
    if (mask.width() != image.width || mask.height() != image.height) {
        throw std::invalid_argument("shadow mask and image dimensions differ");
    }
    const auto inside = img::roi_coverage(image.width, image.height, roi);
    std::vector<std::uint8_t> road;
    bool any_shadow = false;
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        if (!inside[i]) continue;
        if (mask.image().data[i]) any_shadow = true;
        else road.push_back(image.data[i]);
    }
    Replacement out{image, false, 0};
    if (!any_shadow) return out;
    if (road.empty()) {
        out.no_road_reference = true;
        return out;
    }
    const auto mid = road.begin() + static_cast<std::ptrdiff_t>((road.size() - 1) / 2);
    std::nth_element(road.begin(), mid, road.end());
    out.road_value = *mid;
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        if (inside[i] && mask.image().data[i]) out.image.data[i] = out.road_value;
    }
    return out;
}

} // namespace qdlane::shadow
