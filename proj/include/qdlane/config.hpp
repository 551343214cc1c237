// Pipeline configuration: a flat set of typed keys read from and written to
// "key = value" text. Unknown keys are rejected; serialize() then parse()
// reproduces the same configuration.
#pragma once

#include "qdlane/decision.hpp"
#include "qdlane/experiments.hpp"
#include "qdlane/hough.hpp"
#include "qdlane/imgproc.hpp"
#include "qdlane/lanes.hpp"
#include "qdlane/qcore.hpp"
#include "qdlane/record.hpp"
#include "qdlane/shadow.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qdlane::config {

enum class ShadowInput { Intensity, Chromaticity };

struct PipelineConfig {
    // shadow detection
    int downsample_factor = 4;
    int grid_n = 79;
    double shadow_threshold = shadow::kThresholdLoose;
    shadow::Feature shadow_feature = shadow::Feature::Midpoint;
    ShadowInput shadow_input = ShadowInput::Intensity;
    img::ChromaPlane chroma_plane = img::ChromaPlane::R;
    bool shadow_refine = true;
    int mask_median_passes = 1;
    std::string centroid_file;

    // image preprocessing
    int median_iterations = 30;
    int gaussian_ksize = 5;
    double gaussian_sigma = 0.0;
    double canny_low = 50.0;
    double canny_high = 175.0;
    std::optional<img::RoiPolygon> roi;   // empty: default polygon for the frame size

    img::HoughParams hough;

    // lanes and decision
    lanes::Method cluster_method = lanes::Method::ImageSplit;
    double spectral_sigma = 0.0;
    exp::Head head = exp::Head::Uu;
    double reference_theta = decision::kDefaultReference;
    std::string vqc_model;
    int vqc_maxiter = 30;

    // sampling and noise
    std::int64_t shots = 1024;
    std::uint64_t seed = 0;
    std::optional<qc::ChannelKind> noise_channel;
    double noise_p = 0.0;
    qc::PhaseDampingForm phase_damping = qc::PhaseDampingForm::Identity;

    // dataset ingest
    double steering_threshold = 0.05;

    void validate() const;

    shadow::DetectParams detect_params() const {
        shadow::DetectParams p;
        p.downsample_factor = downsample_factor;
        p.grid_n = grid_n;
        p.threshold = shadow_threshold;
        p.shots = shots;
        p.seed = seed;
        p.feature = shadow_feature;
        p.refine = shadow_refine;
        p.median_passes = mask_median_passes;
        return p;
    }

    img::RoiPolygon roi_for(int width, int height) const { return roi ? *roi : img::default_roi(width, height); }

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

// --- enum spellings --------------------------------------------------------

inline std::string_view to_string(ShadowInput s) { return s == ShadowInput::Intensity ? "intensity" : "chromaticity"; }

inline ShadowInput parse_shadow_input(std::string_view s) {
    if (s == "intensity") return ShadowInput::Intensity;
    if (s == "chromaticity") return ShadowInput::Chromaticity;
    throw rec::parse_error("shadow_input must be intensity or chromaticity");
}

inline std::string_view to_string(img::ChromaPlane p) {
    switch (p) {
        case img::ChromaPlane::R: return "r";
        case img::ChromaPlane::G: return "g";
        case img::ChromaPlane::B: return "b";
    }
    return "?";
}

inline img::ChromaPlane parse_plane(std::string_view s) {
    if (s == "r") return img::ChromaPlane::R;
    if (s == "g") return img::ChromaPlane::G;
    if (s == "b") return img::ChromaPlane::B;
    throw rec::parse_error("chroma_plane must be r, g or b");
}

inline shadow::Feature parse_feature(std::string_view s) {
    if (s == "midpoint") return shadow::Feature::Midpoint;
    if (s == "mean") return shadow::Feature::Mean;
    throw rec::parse_error("shadow_feature must be midpoint or mean");
}

inline std::string_view to_string(qc::PhaseDampingForm f) {
    return f == qc::PhaseDampingForm::Identity ? "identity" : "z";
}

inline qc::PhaseDampingForm parse_phase_damping(std::string_view s) {
    if (s == "identity") return qc::PhaseDampingForm::Identity;
    if (s == "z") return qc::PhaseDampingForm::SignFlipZ;
    throw rec::parse_error("phase_damping must be identity or z");
}

// "x,y;x,y;..." or "default".
inline std::string format_roi(const std::optional<img::RoiPolygon>& roi) {
    if (!roi) return "default";
    std::string out;
    for (std::size_t i = 0; i < roi->vertices.size(); ++i) {
        if (i) out += ';';
        out += rec::format_double(roi->vertices[i].x) + ',' + rec::format_double(roi->vertices[i].y);
    }
    return out;
}

inline std::optional<img::RoiPolygon> parse_roi(std::string_view s) {
    s = rec::trim(s);
    if (s == "default" || s.empty()) return std::nullopt;
    img::RoiPolygon poly;
    for (auto pt : rec::split(s, ';')) {
        const auto xy = rec::split(pt, ',');
        if (xy.size() != 2) throw rec::parse_error("roi: vertex must be 'x,y', got '" + std::string(pt) + "'");
        poly.vertices.push_back({rec::to_double(xy[0], "roi"), rec::to_double(xy[1], "roi")});
    }
    if (poly.vertices.size() < 3) throw rec::parse_error("roi: need at least 3 vertices");
    return poly;
}

// --- key table -------------------------------------------------------------

struct Key {
    std::string_view name;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, std::string_view)> set;
};

namespace detail {

inline Key int_key(std::string_view name, int PipelineConfig::*m) {
    return {name, [m](const PipelineConfig& c) { return std::to_string(c.*m); },
            [m, name](PipelineConfig& c, std::string_view v) { c.*m = rec::to_int<int>(v, name); }};
}

inline Key real_key(std::string_view name, double PipelineConfig::*m) {
    return {name, [m](const PipelineConfig& c) { return rec::format_double(c.*m); },
            [m, name](PipelineConfig& c, std::string_view v) { c.*m = rec::to_double(v, name); }};
}

inline Key bool_key(std::string_view name, bool PipelineConfig::*m) {
    return {name, [m](const PipelineConfig& c) { return std::string(c.*m ? "true" : "false"); },
            [m, name](PipelineConfig& c, std::string_view v) { c.*m = rec::to_bool(v, name); }};
}

inline Key string_key(std::string_view name, std::string PipelineConfig::*m) {
    return {name, [m](const PipelineConfig& c) { return c.*m; },
            [m](PipelineConfig& c, std::string_view v) { c.*m = std::string(v); }};
}

} // namespace detail

inline const std::vector<Key>& keys() {
    using C = PipelineConfig;
    using namespace detail;
    static const std::vector<Key> table = {
        int_key("downsample_factor", &C::downsample_factor),
        int_key("grid_n", &C::grid_n),
        real_key("shadow_threshold", &C::shadow_threshold),
        {"shadow_feature", [](const C& c) { return std::string(shadow::to_string(c.shadow_feature)); },
         [](C& c, std::string_view v) { c.shadow_feature = parse_feature(v); }},
        {"shadow_input", [](const C& c) { return std::string(to_string(c.shadow_input)); },
         [](C& c, std::string_view v) { c.shadow_input = parse_shadow_input(v); }},
        {"chroma_plane", [](const C& c) { return std::string(to_string(c.chroma_plane)); },
         [](C& c, std::string_view v) { c.chroma_plane = parse_plane(v); }},
        bool_key("shadow_refine", &C::shadow_refine),
        int_key("mask_median_passes", &C::mask_median_passes),
        string_key("centroid_file", &C::centroid_file),

        int_key("median_iterations", &C::median_iterations),
        int_key("gaussian_ksize", &C::gaussian_ksize),
        real_key("gaussian_sigma", &C::gaussian_sigma),
        real_key("canny_low", &C::canny_low),
        real_key("canny_high", &C::canny_high),
        {"roi", [](const C& c) { return format_roi(c.roi); }, [](C& c, std::string_view v) { c.roi = parse_roi(v); }},

        {"hough_rho", [](const C& c) { return rec::format_double(c.hough.rho_res); },
         [](C& c, std::string_view v) { c.hough.rho_res = rec::to_double(v, "hough_rho"); }},
        {"hough_theta", [](const C& c) { return rec::format_double(c.hough.theta_res); },
         [](C& c, std::string_view v) { c.hough.theta_res = rec::to_double(v, "hough_theta"); }},
        {"hough_threshold", [](const C& c) { return std::to_string(c.hough.accumulator_threshold); },
         [](C& c, std::string_view v) { c.hough.accumulator_threshold = rec::to_int<int>(v, "hough_threshold"); }},
        {"hough_min_line_length", [](const C& c) { return rec::format_double(c.hough.min_line_length); },
         [](C& c, std::string_view v) { c.hough.min_line_length = rec::to_double(v, "hough_min_line_length"); }},
        {"hough_max_line_gap", [](const C& c) { return std::to_string(c.hough.max_line_gap); },
         [](C& c, std::string_view v) { c.hough.max_line_gap = rec::to_int<int>(v, "hough_max_line_gap"); }},

        {"cluster_method", [](const C& c) { return std::string(lanes::to_string(c.cluster_method)); },
         [](C& c, std::string_view v) { c.cluster_method = lanes::parse_method(v); }},
        real_key("spectral_sigma", &C::spectral_sigma),
        {"head", [](const C& c) { return std::string(exp::to_string(c.head)); },
         [](C& c, std::string_view v) { c.head = exp::parse_head(v); }},
        real_key("reference_theta", &C::reference_theta),
        string_key("vqc_model", &C::vqc_model),
        int_key("vqc_maxiter", &C::vqc_maxiter),

        {"shots", [](const C& c) { return std::to_string(c.shots); },
         [](C& c, std::string_view v) { c.shots = rec::to_int<std::int64_t>(v, "shots"); }},
        {"seed", [](const C& c) { return std::to_string(c.seed); },
         [](C& c, std::string_view v) { c.seed = rec::to_int<std::uint64_t>(v, "seed"); }},
        {"noise_channel",
         [](const C& c) { return c.noise_channel ? std::string(qc::to_string(*c.noise_channel)) : std::string("none"); },
         [](C& c, std::string_view v) {
             if (rec::trim(v) == "none") c.noise_channel.reset();
             else c.noise_channel = qc::parse_channel(rec::trim(v));
         }},
        real_key("noise_p", &C::noise_p),
        {"phase_damping", [](const C& c) { return std::string(to_string(c.phase_damping)); },
         [](C& c, std::string_view v) { c.phase_damping = parse_phase_damping(v); }},

        real_key("steering_threshold", &C::steering_threshold),
    };
    return table;
}

inline const Key& find_key(std::string_view name) {
    for (const auto& k : keys()) {
        if (k.name == name) return k;
    }
    throw rec::parse_error("unknown config key '" + std::string(name) + "'");
}

inline void set(PipelineConfig& c, std::string_view key, std::string_view value) {
    try {
        find_key(key).set(c, rec::trim(value));
    } catch (const rec::parse_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw rec::parse_error(std::string(key) + ": " + e.what());
    }
}

inline void PipelineConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (downsample_factor < 1) fail("downsample_factor must be >= 1");
    if (grid_n < 1) fail("grid_n must be >= 1");
    if (!(shadow_threshold >= 0.0 && shadow_threshold <= 1.0)) fail("shadow_threshold must lie in [0,1]");
    if (mask_median_passes < 0) fail("mask_median_passes must be >= 0");
    if (median_iterations < 0) fail("median_iterations must be >= 0");
    if (gaussian_ksize < 1 || gaussian_ksize % 2 == 0) fail("gaussian_ksize must be odd and positive");
    if (gaussian_sigma < 0.0) fail("gaussian_sigma must be >= 0");
    if (!(canny_low >= 0.0 && canny_low <= canny_high)) fail("need 0 <= canny_low <= canny_high");
    if (roi && roi->vertices.size() < 3) fail("roi needs at least 3 vertices");
    hough.validate();
    if (spectral_sigma < 0.0) fail("spectral_sigma must be >= 0");
    if (!std::isfinite(reference_theta)) fail("reference_theta must be finite");
    if (vqc_maxiter < 1) fail("vqc_maxiter must be >= 1");
    if (shots < 0) fail("shots must be >= 0");
    if (!(noise_p >= 0.0 && noise_p <= 1.0)) fail("noise_p must lie in [0,1]");
    if (!(steering_threshold >= 0.0)) fail("steering_threshold must be >= 0");
}

inline PipelineConfig from_entries(const rec::Entries& e) {
    PipelineConfig c;
    for (const auto& [k, v] : e) set(c, k, v);
    c.validate();
    return c;
}

inline PipelineConfig parse(const std::string& text) { return from_entries(rec::parse_string(text, "config")); }
inline PipelineConfig load(const std::string& path) { return from_entries(rec::parse_file(path)); }

inline rec::Entries to_entries(const PipelineConfig& c) {
    rec::Entries out;
    for (const auto& k : keys()) out.emplace_back(std::string(k.name), k.get(c));
    return out;
}

inline std::string serialize(const PipelineConfig& c) {
    std::ostringstream os;
    rec::write(os, to_entries(c));
    return os.str();
}

} // namespace qdlane::config
