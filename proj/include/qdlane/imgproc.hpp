// 8-bit raster types and the preprocessing chain used before lane fitting:
// grayscale, chromaticity, block downsampling, median and Gaussian
// filtering, Canny edges and polygon ROI masking.
//
// Every neighbourhood operation clamps coordinates to the image border.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdlane::img {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w < 0 || h < 0) throw std::invalid_argument("image dimensions must be non-negative");
        data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
    }
    GrayImage(int w, int h, std::vector<std::uint8_t> pixels) : width(w), height(h), data(std::move(pixels)) {
        if (data.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
            throw std::invalid_argument("gray image data length must equal width*height");
        }
    }

    bool empty() const noexcept { return data.empty(); }
    std::uint8_t at(int x, int y) const { return data[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return data[index(x, y)]; }
    std::uint8_t clamped(int x, int y) const {
        return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;   // interleaved R,G,B

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h) {
        if (w < 0 || h < 0) throw std::invalid_argument("image dimensions must be non-negative");
        data.assign(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    }
    RgbImage(int w, int h, std::vector<std::uint8_t> pixels) : width(w), height(h), data(std::move(pixels)) {
        if (data.size() != 3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
            throw std::invalid_argument("rgb image data length must equal 3*width*height");
        }
    }

    std::array<std::uint8_t, 3> pixel(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x));
        data[i] = rgb[0];
        data[i + 1] = rgb[1];
        data[i + 2] = rgb[2];
    }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// A raster whose pixels are only ever 0 or 255.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int w, int h) : image_(w, h, 0) {}

    static BinaryMask from_gray(GrayImage g) {
        for (auto v : g.data) {
            if (v != 0 && v != 255) throw std::invalid_argument("binary mask pixels must be 0 or 255");
        }
        BinaryMask m;
        m.image_ = std::move(g);
        return m;
    }

    int width() const noexcept { return image_.width; }
    int height() const noexcept { return image_.height; }
    bool test(int x, int y) const { return image_.at(x, y) != 0; }
    void set(int x, int y, bool on) { image_.at(x, y) = on ? 255 : 0; }
    std::uint8_t at(int x, int y) const { return image_.at(x, y); }
    const GrayImage& image() const noexcept { return image_; }
    std::size_t count() const {
        return static_cast<std::size_t>(std::count(image_.data.begin(), image_.data.end(), std::uint8_t{255}));
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    GrayImage image_;
};

inline std::uint8_t saturate(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// ---------------------------------------------------------------------------
// Colour

// Broadcast luma weights.
inline GrayImage to_gray(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const auto p = img.pixel(x, y);
            out.at(x, y) = saturate(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
        }
    }
    return out;
}

struct ChromaticityPlanes {
    GrayImage r, g, b;
};

enum class ChromaPlane { R, G, B };

inline const GrayImage& select_plane(const ChromaticityPlanes& planes, ChromaPlane which) {
    switch (which) {
        case ChromaPlane::R: return planes.r;
        case ChromaPlane::G: return planes.g;
        case ChromaPlane::B: return planes.b;
    }
    return planes.r;
}

// Normalized rgb scaled to [0,255]; black maps to the uniform point (85,85,85).
inline ChromaticityPlanes chromaticity(const RgbImage& img) {
    ChromaticityPlanes out{GrayImage(img.width, img.height), GrayImage(img.width, img.height),
                           GrayImage(img.width, img.height)};
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const auto p = img.pixel(x, y);
            const int sum = p[0] + p[1] + p[2];
            if (sum == 0) {
                out.r.at(x, y) = out.g.at(x, y) = out.b.at(x, y) = 85;
                continue;
            }
            out.r.at(x, y) = saturate(255.0 * p[0] / sum);
            out.g.at(x, y) = saturate(255.0 * p[1] / sum);
            out.b.at(x, y) = saturate(255.0 * p[2] / sum);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Resampling and filtering

// Block-mean downsampling; trailing rows/columns that do not fill a whole
// block are dropped.
inline GrayImage downsample(const GrayImage& img, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
    if (factor > std::min(img.width, img.height)) {
        throw std::invalid_argument("downsample factor " + std::to_string(factor) + " exceeds image dimensions");
    }
    const int w = img.width / factor;
    const int h = img.height / factor;
    GrayImage out(w, h);
    const double area = static_cast<double>(factor) * factor;
    for (int by = 0; by < h; ++by) {
        for (int bx = 0; bx < w; ++bx) {
            int sum = 0;
            for (int dy = 0; dy < factor; ++dy) {
                for (int dx = 0; dx < factor; ++dx) sum += img.at(bx * factor + dx, by * factor + dy);
            }
            out.at(bx, by) = saturate(sum / area);
        }
    }
    return out;
}

namespace detail {

// Median of nine via a fixed 19-exchange network.
inline std::uint8_t median9(std::array<std::uint8_t, 9>& p) {
    auto sort2 = [&](int a, int b) {
        if (p[a] > p[b]) std::swap(p[a], p[b]);
    };
    sort2(1, 2); sort2(4, 5); sort2(7, 8); sort2(0, 1); sort2(3, 4); sort2(6, 7);
    sort2(1, 2); sort2(4, 5); sort2(7, 8); sort2(0, 3); sort2(5, 8); sort2(4, 7);
    sort2(3, 6); sort2(1, 4); sort2(2, 5); sort2(4, 7); sort2(4, 2); sort2(6, 4);
    sort2(4, 2);
    return p[4];
}

} // namespace detail

// 3x3 median with replicated borders, applied `iterations` times; stops
// early once the image no longer changes.
inline GrayImage median_filter(const GrayImage& img, int iterations = 30) {
    if (iterations < 0) throw std::invalid_argument("median iterations must be >= 0");
    GrayImage cur = img;
    GrayImage next = img;
    const int w = cur.width, h = cur.height;
    std::array<std::uint8_t, 9> window{};
    for (int it = 0; it < iterations; ++it) {
        for (int y = 0; y < h; ++y) {
            const bool inner_row = y > 0 && y < h - 1;
            for (int x = 0; x < w; ++x) {
                if (inner_row && x > 0 && x < w - 1) {
                    const std::uint8_t* above = &cur.data[cur.index(x - 1, y - 1)];
                    const std::uint8_t* row = above + w;
                    const std::uint8_t* below = row + w;
                    window = {above[0], above[1], above[2], row[0], row[1], row[2], below[0], below[1], below[2]};
                } else {
                    int k = 0;
                    for (int dy = -1; dy <= 1; ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) window[k++] = cur.clamped(x + dx, y + dy);
                    }
                }
                next.data[next.index(x, y)] = detail::median9(window);
            }
        }
        if (next == cur) break;   // already a fixed point
        std::swap(cur, next);
    }
    return cur;
}

// Sigma used when the caller passes sigma <= 0.
inline double auto_sigma(int ksize) { return 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8; }

inline std::vector<double> gaussian_kernel(int ksize, double sigma) {
    if (ksize < 1 || ksize % 2 == 0) throw std::invalid_argument("Gaussian kernel size must be odd and positive");
    if (sigma <= 0.0) sigma = auto_sigma(ksize);
    std::vector<double> k(static_cast<std::size_t>(ksize));
    const int half = ksize / 2;
    for (int i = 0; i < ksize; ++i) {
        const double d = i - half;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& v : k) v /= sum;
    return k;
}

inline GrayImage gaussian_blur(const GrayImage& img, int ksize_x = 5, int ksize_y = 5, double sigma = 0.0) {
    const auto kx = gaussian_kernel(ksize_x, sigma);
    const auto ky = gaussian_kernel(ksize_y, sigma);
    const int hx = ksize_x / 2;
    const int hy = ksize_y / 2;
    std::vector<double> tmp(img.data.size());
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -hx; i <= hx; ++i) acc += kx[static_cast<std::size_t>(i + hx)] * img.clamped(x + i, y);
            tmp[img.index(x, y)] = acc;
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int j = -hy; j <= hy; ++j) {
                const int yy = std::clamp(y + j, 0, img.height - 1);
                acc += ky[static_cast<std::size_t>(j + hy)] * tmp[img.index(x, yy)];
            }
            out.at(x, y) = saturate(acc);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canny

struct Gradients {
    int width = 0, height = 0;
    std::vector<int> gx, gy;
    std::vector<double> magnitude;
};

// 3x3 Sobel; magnitude is |gx| + |gy|.
inline Gradients sobel(const GrayImage& img) {
    Gradients g;
    g.width = img.width;
    g.height = img.height;
    const std::size_t n = img.data.size();
    g.gx.resize(n);
    g.gy.resize(n);
    g.magnitude.resize(n);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            auto p = [&](int dx, int dy) { return static_cast<int>(img.clamped(x + dx, y + dy)); };
            const int gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            const int gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            const std::size_t i = img.index(x, y);
            g.gx[i] = gx;
            g.gy[i] = gy;
            g.magnitude[i] = std::abs(gx) + std::abs(gy);
        }
    }
    return g;
}

inline BinaryMask canny(const GrayImage& img, double low = 50.0, double high = 175.0) {
    if (!(low < high)) throw std::invalid_argument("canny: low threshold must be below high threshold");
    const int w = img.width, h = img.height;
    BinaryMask out(w, h);
    if (w == 0 || h == 0) return out;
    const Gradients g = sobel(img);

    auto mag = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return g.magnitude[img.index(x, y)];
    };

    // 0 = none, 1 = weak, 2 = strong
    std::vector<std::uint8_t> cls(img.data.size(), 0);
    constexpr double kTan22 = 0.41421356237309503;   // tan(22.5 deg)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = img.index(x, y);
            const double m = g.magnitude[i];
            if (m <= low) continue;
            const double ax = std::abs(g.gx[i]);
            const double ay = std::abs(g.gy[i]);
            int dx = 0, dy = 0;   // step along the gradient direction
            if (ay <= kTan22 * ax) {
                dx = 1;
            } else if (ax <= kTan22 * ay) {
                dy = 1;
            } else {
                dx = 1;
                dy = (g.gx[i] > 0) == (g.gy[i] > 0) ? 1 : -1;
            }
            // Ties along a plateau keep the pixel further along the gradient.
            const double behind = mag(x - dx, y - dy);
            const double ahead = mag(x + dx, y + dy);
            if (!(m >= behind && m > ahead)) continue;
            cls[i] = m > high ? 2 : 1;
        }
    }

    // Hysteresis: flood weak pixels 8-connected to strong ones.
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cls[img.index(x, y)] == 2) stack.push_back(y * w + x);
        }
    }
    std::vector<std::uint8_t> keep(img.data.size(), 0);
    for (int s : stack) keep[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
        const int s = stack.back();
        stack.pop_back();
        const int x = s % w, y = s / w;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::size_t j = img.index(nx, ny);
                if (cls[j] == 1 && !keep[j]) {
                    keep[j] = 1;
                    stack.push_back(ny * w + nx);
                }
            }
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) out.set(x, y, keep[img.index(x, y)] != 0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region of interest

struct Point {
    double x;
    double y;
    friend bool operator==(const Point&, const Point&) = default;
};

struct RoiPolygon {
    std::vector<Point> vertices;

    void validate() const {
        if (vertices.size() < 3) throw std::invalid_argument("ROI polygon needs at least 3 vertices");
    }

    // Even-odd rule; points on an edge count as inside.
    bool contains(double px, double py) const {
        bool inside = false;
        const std::size_t n = vertices.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point& a = vertices[i];
            const Point& b = vertices[j];
            const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
            if (std::abs(cross) < 1e-9 && px >= std::min(a.x, b.x) - 1e-9 && px <= std::max(a.x, b.x) + 1e-9 &&
                py >= std::min(a.y, b.y) - 1e-9 && py <= std::max(a.y, b.y) + 1e-9) {
                return true;
            }
            if ((a.y > py) != (b.y > py)) {
                const double xint = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
                if (px < xint) inside = !inside;
            }
        }
        return inside;
    }

    friend bool operator==(const RoiPolygon&, const RoiPolygon&) = default;
};

// [(0,h), (80,380), (380,380), (w,h)]
inline RoiPolygon default_roi(int width, int height) {
    return RoiPolygon{{{0.0, static_cast<double>(height)},
                       {80.0, 380.0},
                       {380.0, 380.0},
                       {static_cast<double>(width), static_cast<double>(height)}}};
}

inline std::vector<std::uint8_t> roi_coverage(int width, int height, const RoiPolygon& poly) {
    poly.validate();
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            inside[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] =
                poly.contains(x, y) ? 1 : 0;
        }
    }
    return inside;
}

inline GrayImage roi_mask(const GrayImage& img, const RoiPolygon& poly) {
    const auto inside = roi_coverage(img.width, img.height, poly);
    GrayImage out = img;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!inside[i]) out.data[i] = 0;
    }
    return out;
}

inline BinaryMask roi_mask(const BinaryMask& mask, const RoiPolygon& poly) {
    return BinaryMask::from_gray(roi_mask(mask.image(), poly));
}

} // namespace qdlane::img
