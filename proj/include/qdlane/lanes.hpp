// Consolidating Hough segments into two representative lane slopes.
#pragma once

#include "qdlane/error.hpp"
#include "qdlane/hough.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::lanes {

using img::LineSegment;

struct SlopePair {
    double first = 0.0;
    double second = 0.0;

    // Canonical order used by the decision heads.
    SlopePair ascending() const { return first <= second ? *this : SlopePair{second, first}; }

    friend bool operator==(const SlopePair&, const SlopePair&) = default;
};

struct FittedLine {
    double slope = 0.0;
    double intercept = 0.0;   // y = slope * x + intercept, pixel units
    int support = 0;

    double y_at(double x) const { return slope * x + intercept; }
};

enum class Method { ImageSplit, KMeans, Spectral };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::ImageSplit: return "image-split";
        case Method::KMeans: return "kmeans";
        case Method::Spectral: return "spectral";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    if (s == "image-split") return Method::ImageSplit;
    if (s == "kmeans" || s == "k-means") return Method::KMeans;
    if (s == "spectral") return Method::Spectral;
    throw std::invalid_argument("unknown clustering method '" + std::string(s) + "'");
}

struct ClusterAssignment {
    std::vector<int> labels;   // per input segment; -1 for segments without a finite slope
    Method method = Method::KMeans;
    bool degenerate = false;   // only one distinct slope value
};

struct ClusterResult {
    ClusterAssignment assignment;
    SlopePair pair;
};

struct PointD {
    double x, y;
};

inline FittedLine fit_line(std::span<const PointD> pts) {
    if (pts.size() < 2) throw std::invalid_argument("fit_line needs at least two points");
    const double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx <= 1e-12 * std::max(1.0, mx * mx)) throw vertical_line("all points share one x coordinate");
    const double slope = sxy / sxx;
    return FittedLine{slope, my - slope * mx, static_cast<int>(pts.size())};
}

// ---------------------------------------------------------------------------
// Image split

struct SplitFit {
    FittedLine left, right;
    FittedLine middle;   // average of the two, for display only
    std::vector<int> side;   // 0 = left half, 1 = right half, per segment

    SlopePair pair() const { return SlopePair{left.slope, right.slope}; }
};

inline SplitFit image_split_fit(std::span<const LineSegment> segments, int image_width) {
    std::vector<PointD> halves[2];
    SplitFit out;
    out.side.reserve(segments.size());
    const double centre = image_width / 2.0;
    for (const auto& s : segments) {
        const int side = s.mid_x() < centre ? 0 : 1;
        out.side.push_back(side);
        halves[side].push_back({double(s.x1), double(s.y1)});
        halves[side].push_back({double(s.x2), double(s.y2)});
    }
    static constexpr const char* names[2] = {"left", "right"};
    for (int k = 0; k < 2; ++k) {
        if (halves[k].empty()) {
            throw insufficient_data(names[k], std::string("image split: no segments in the ") + names[k] + " half");
        }
    }
    out.left = fit_line(halves[0]);
    out.right = fit_line(halves[1]);
    out.middle = FittedLine{(out.left.slope + out.right.slope) / 2.0,
                            (out.left.intercept + out.right.intercept) / 2.0,
                            out.left.support + out.right.support};
    return out;
}

// Left-half slope first.
inline SlopePair image_split(std::span<const LineSegment> segments, int image_width) {
    return image_split_fit(segments, image_width).pair();
}

// ---------------------------------------------------------------------------
// Slope clustering

namespace detail {

struct Slopes {
    std::vector<double> values;
    std::vector<std::size_t> source;   // index into the segment list
};

inline Slopes finite_slopes(std::span<const LineSegment> segments) {
    Slopes s;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const double v = segments[i].slope();
        if (std::isfinite(v)) {
            s.values.push_back(v);
            s.source.push_back(i);
        }
    }
    if (s.values.size() < 2) {
        throw insufficient_data("segments", "clustering needs at least two non-vertical segments");
    }
    return s;
}

// Two-cluster Lloyd iteration on scalars starting from the extremes.
// Labels: 0 = lower centre.
inline std::vector<int> lloyd_1d(const std::vector<double>& v, int max_iters = 100) {
    double c0 = *std::min_element(v.begin(), v.end());
    double c1 = *std::max_element(v.begin(), v.end());
    std::vector<int> labels(v.size(), -1);
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const int l = std::abs(v[i] - c1) < std::abs(v[i] - c0) ? 1 : 0;
            if (l != labels[i]) {
                labels[i] = l;
                changed = true;
            }
        }
        if (!changed) break;
        double sum[2] = {0, 0};
        int cnt[2] = {0, 0};
        for (std::size_t i = 0; i < v.size(); ++i) {
            sum[labels[i]] += v[i];
            ++cnt[labels[i]];
        }
        if (cnt[0]) c0 = sum[0] / cnt[0];
        if (cnt[1]) c1 = sum[1] / cnt[1];
    }
    return labels;
}

inline SlopePair cluster_means(const std::vector<double>& v, const std::vector<int>& labels) {
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum[labels[i]] += v[i];
        ++cnt[labels[i]];
    }
    if (!cnt[0]) return SlopePair{sum[1] / cnt[1], sum[1] / cnt[1]};
    if (!cnt[1]) return SlopePair{sum[0] / cnt[0], sum[0] / cnt[0]};
    return SlopePair{sum[0] / cnt[0], sum[1] / cnt[1]}.ascending();
}

inline bool all_equal(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo <= 1e-12 * std::max(1.0, std::abs(*lo));
}

// Relabels so cluster 0 has the lower mean and scatters labels back onto
// the original segment indices.
inline ClusterResult finish(const Slopes& s, std::vector<int> labels, Method method, std::size_t n_segments) {
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sum[labels[i]] += s.values[i];
        ++cnt[labels[i]];
    }
    if (cnt[0] && cnt[1] && sum[0] / cnt[0] > sum[1] / cnt[1]) {
        for (int& l : labels) l = 1 - l;
    }
    ClusterResult r;
    r.assignment.method = method;
    r.assignment.labels.assign(n_segments, -1);
    for (std::size_t i = 0; i < labels.size(); ++i) r.assignment.labels[s.source[i]] = labels[i];
    r.pair = cluster_means(s.values, labels);
    return r;
}

} // namespace detail

inline ClusterResult kmeans_slopes(std::span<const LineSegment> segments) {
    const auto s = detail::finite_slopes(segments);
    if (detail::all_equal(s.values)) {
        auto r = detail::finish(s, std::vector<int>(s.values.size(), 0), Method::KMeans, segments.size());
        r.assignment.degenerate = true;
        return r;
    }
    return detail::finish(s, detail::lloyd_1d(s.values), Method::KMeans, segments.size());
}

// Median of all pairwise |s_i - s_j|; 1.0 when that is zero.
inline double affinity_scale(const std::vector<double>& v) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) gaps.push_back(std::abs(v[i] - v[j]));
    }
    if (gaps.empty()) return 1.0;
    const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    return *mid > 0.0 ? *mid : 1.0;
}

// Normalized-Laplacian spectral clustering into two groups. A non-positive
// `sigma` selects affinity_scale().
inline ClusterResult spectral_slopes(std::span<const LineSegment> segments, double sigma = 0.0) {
    const auto s = detail::finite_slopes(segments);
    const auto n = static_cast<Eigen::Index>(s.values.size());
    if (detail::all_equal(s.values)) {
        auto r = detail::finish(s, std::vector<int>(s.values.size(), 0), Method::Spectral, segments.size());
        r.assignment.degenerate = true;
        return r;
    }
    if (sigma <= 0.0) sigma = affinity_scale(s.values);

    Eigen::MatrixXd affinity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = s.values[static_cast<std::size_t>(i)] - s.values[static_cast<std::size_t>(j)];
            affinity(i, j) = std::exp(-(d * d) / (2.0 * sigma * sigma));
        }
    }
    const Eigen::VectorXd inv_sqrt_deg = affinity.rowwise().sum().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(n, n) -
                                      inv_sqrt_deg.asDiagonal() * affinity * inv_sqrt_deg.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
    Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    std::vector<double> fiedler(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) fiedler[static_cast<std::size_t>(i)] = embedding(i, 1);
    std::vector<int> labels = detail::all_equal(fiedler) ? std::vector<int>(fiedler.size(), 0)
                                                         : detail::lloyd_1d(fiedler);
    return detail::finish(s, std::move(labels), Method::Spectral, segments.size());
}

// Within-cluster sum of squared slope deviations.
inline double within_cluster_sse(std::span<const double> v, std::span<const int> labels) {
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum[labels[i]] += v[i];
        ++cnt[labels[i]];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = sum[labels[i]] / cnt[labels[i]];
        sse += (v[i] - m) * (v[i] - m);
    }
    return sse;
}

} // namespace qdlane::lanes
