// End-to-end frame processing: shadow removal, edge extraction, line
// segments, lane slopes and a driving direction.
#pragma once

#include "qdlane/config.hpp"
#include "qdlane/decision.hpp"
#include "qdlane/error.hpp"
#include "qdlane/experiments.hpp"
#include "qdlane/hough.hpp"
#include "qdlane/imgproc.hpp"
#include "qdlane/lanes.hpp"
#include "qdlane/shadow.hpp"
#include "qdlane/uudagger.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qdlane::pipeline {

using decision::Direction;

struct Models {
    uu::Centroid centroid;
    std::optional<decision::VqcModel> vqc;
};

struct Stages {
    img::GrayImage gray;
    img::GrayImage smoothed;     // after the median filter
    img::GrayImage replaced;     // shadows painted with the road value
    img::GrayImage blurred;
    img::BinaryMask edges;
    img::BinaryMask roi_edges;
};

struct Result {
    shadow::ShadowMask shadow;
    shadow::Replacement replacement;   // .image duplicates stages.replaced
    Stages stages;
    std::vector<img::LineSegment> segments;
    std::vector<int> segment_labels;   // cluster / image half per segment, -1 when unused
    lanes::SlopePair slopes;
    Direction direction = Direction::Straight;
    double p_first = 0.0, p_second = 0.0;   // U U^dagger head
    decision::Scores scores{};               // VQC head
};

namespace detail {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const stage_error&) {
        throw;
    } catch (const insufficient_data& e) {
        throw stage_error(name, e.what(), true);
    } catch (const std::exception& e) {
        throw stage_error(name, e.what(), false);
    }
}

} // namespace detail

inline std::optional<qc::KrausChannel> noise_channel(const config::PipelineConfig& c) {
    if (!c.noise_channel) return std::nullopt;
    return qc::make_channel(*c.noise_channel, c.noise_p, c.phase_damping);
}

inline void decide(Result& r, const config::PipelineConfig& c, const Models& m) {
    const auto noise = noise_channel(c);
    if (c.head == exp::Head::Uu) {
        const auto d = noise ? exp::noisy_decide_uu(r.slopes, c.reference_theta, *noise, c.shots, c.seed)
                             : decision::decide_uu_detail(r.slopes, c.reference_theta, c.shots, c.seed);
        r.direction = d.direction;
        r.p_first = d.p_first;
        r.p_second = d.p_second;
    } else {
        if (!m.vqc) throw invalid_state("the vqc head needs a trained model");
        r.scores = noise ? exp::noisy_vqc_scores(*m.vqc, r.slopes, *noise) : decision::vqc_forward(*m.vqc, r.slopes);
        r.direction = decision::argmax(r.scores);
    }
}

// Runs every stage in order. Errors leave as stage_error naming the stage.
inline Result run(const img::RgbImage& frame, const config::PipelineConfig& c, const Models& m) {
    Result r;
    const int w = frame.width, h = frame.height;
    r.stages.gray = img::to_gray(frame);

    r.shadow = detail::stage("shadow", [&] {
        const auto p = c.detect_params();
        if (c.shadow_input == config::ShadowInput::Chromaticity) {
            return shadow::detect_chromaticity(frame, m.centroid, p, c.chroma_plane);
        }
        return shadow::detect(r.stages.gray, m.centroid, p);
    });
    r.stages.smoothed = detail::stage("median", [&] { return img::median_filter(r.stages.gray, c.median_iterations); });
    const img::RoiPolygon roi = detail::stage("roi", [&] {
        auto poly = c.roi_for(w, h);
        poly.validate();
        return poly;
    });
    r.replacement = detail::stage("replace", [&] { return shadow::replace_shadow(r.stages.smoothed, r.shadow.mask, roi); });
    r.stages.replaced = r.replacement.image;
    r.stages.blurred = detail::stage("blur", [&] {
        return img::gaussian_blur(r.stages.replaced, c.gaussian_ksize, c.gaussian_ksize, c.gaussian_sigma);
    });
    r.stages.edges = detail::stage("canny", [&] { return img::canny(r.stages.blurred, c.canny_low, c.canny_high); });
    r.stages.roi_edges = detail::stage("edge-roi", [&] { return img::roi_mask(r.stages.edges, roi); });
    r.segments = detail::stage("hough", [&] { return img::hough_segments(r.stages.roi_edges, c.hough, c.seed); });

    detail::stage("lanes", [&] {
        if (r.segments.empty()) throw insufficient_data("segments", "no line segments inside the region of interest");
        switch (c.cluster_method) {
            case lanes::Method::ImageSplit: {
                const auto fit = lanes::image_split_fit(r.segments, w);
                r.segment_labels = fit.side;
                r.slopes = fit.pair();
                break;
            }
            case lanes::Method::KMeans:
            case lanes::Method::Spectral: {
                const auto cr = c.cluster_method == lanes::Method::KMeans
                                    ? lanes::kmeans_slopes(r.segments)
                                    : lanes::spectral_slopes(r.segments, c.spectral_sigma);
                if (cr.assignment.degenerate) throw insufficient_data("clusters", "all segment slopes are equal");
                r.segment_labels = cr.assignment.labels;
                r.slopes = cr.pair;
                break;
            }
        }
        return 0;
    });
    detail::stage("decision", [&] {
        decide(r, c, m);
        return 0;
    });
    return r;
}

} // namespace qdlane::pipeline
