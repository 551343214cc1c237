// Angle encoding, the U U^dagger overlap classifier and centroid training.
#pragma once

#include "qdlane/error.hpp"
#include "qdlane/qcore.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::uu {

struct AngleFeature {
    double value;
    double theta;
};

// Raw feature values (8-bit intensities or rescaled chromaticity) are read
// as degrees.
inline AngleFeature encode(double value) {
    return AngleFeature{value, value * std::numbers::pi / 180.0};
}

enum class Region { Shadow, Shadowless };

inline std::string_view to_string(Region r) { return r == Region::Shadow ? "shadow" : "shadowless"; }

inline Region parse_region(std::string_view s) {
    if (s == "shadow") return Region::Shadow;
    if (s == "shadowless") return Region::Shadowless;
    throw std::invalid_argument("unknown region label '" + std::string(s) + "'");
}

inline Region opposite(Region r) { return r == Region::Shadow ? Region::Shadowless : Region::Shadow; }

struct Centroid {
    double theta = std::numeric_limits<double>::quiet_NaN();
    Region trained_on = Region::Shadow;
    int iterations = 0;

    bool trained() const noexcept { return std::isfinite(theta); }

    friend bool operator==(const Centroid&, const Centroid&) = default;
};

struct OverlapResult {
    double inner_product;
    double p_zero;
    std::int64_t shots;
};

// |<C|T>| for |C> = Ry(theta1)|0>, |T> = Ry(theta2)|0>, measured as
// sqrt(P(0)) of Ry(-theta2) Ry(theta1) |0>. shots == 0 gives the exact
// probability.
inline OverlapResult overlap(double theta1, double theta2, std::int64_t shots = 0, std::uint64_t seed = 0) {
    if (!std::isfinite(theta1) || !std::isfinite(theta2)) {
        throw std::invalid_argument("overlap: angles must be finite");
    }
    auto psi = qc::apply_gate(qc::PureState::zero(1), qc::ry(theta1), 0);
    psi = qc::apply_gate(psi, qc::ry(-theta2), 0);
    const auto m = qc::measure(psi, shots, seed);
    const double p0 = std::min(1.0, m.frequency(0));
    return OverlapResult{std::sqrt(p0), p0, shots};
}

inline void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("classification threshold must lie in [0,1]");
    }
}

// A value belongs to the centroid's region iff its overlap with the
// centroid reaches `threshold`.
inline Region classify(double value, const Centroid& c, double threshold, std::int64_t shots = 0,
                       std::uint64_t seed = 0) {
    check_threshold(threshold);
    if (!c.trained()) throw invalid_state("classify: centroid is not trained");
    const auto r = overlap(encode(value).theta, c.theta, shots, seed);
    return r.inner_product >= threshold ? c.trained_on : opposite(c.trained_on);
}

// ---------------------------------------------------------------------------
// Centroid training

struct TrainingStep {
    int epoch;
    std::size_t index;    // position of the data point within the epoch
    double theta;         // centroid before the step
    double tau;           // angle of R(theta) R(x)^T, i.e. theta - x
    double trace;         // D = 2 cos(tau)
    double delta_trace;   // D - 2
    double step;          // applied change in theta (0 when skipped)
    bool updated;
};

struct TrainingTrace {
    std::vector<TrainingStep> steps;
};

struct TrainOptions {
    std::optional<double> theta0;   // default: mean of encoded angles
    int max_epochs = 50;
    double tolerance = 1e-6;
    double max_step = std::numbers::pi / 4.0;
    double singular_guard = 1e-9;
    // Use theta += tan(tau/2) instead of the converging Newton direction
    // theta -= tan(tau/2). Kept for comparison; it runs away from the data.
    bool reversed_sign = false;
    Region label = Region::Shadow;
};

struct TrainingResult {
    Centroid centroid;
    TrainingTrace trace;
};

namespace detail {

inline double rotation_trace(double a, double b) {
    // tr(R(a) R(b)^T) for 2x2 plane rotations.
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    return 2.0 * (ca * cb + sa * sb);
}

} // namespace detail

// Newton iteration on D(theta) = 2 cos(theta - x) = 2 for each data angle x
// in turn. One epoch visits every point in order. Sequential updates settle
// into a cycle around the data; the centroid reported for an epoch is the
// mean of the iterates it produced, which removes the bias toward the last
// point visited. Training stops once that epoch centroid moves by less than
// `tolerance`, or after `max_epochs`.
inline TrainingResult train_centroid(std::span<const double> values, const TrainOptions& opt = {}) {
    if (values.empty()) throw std::invalid_argument("train_centroid: no training values");
    if (opt.max_epochs < 1) throw std::invalid_argument("train_centroid: max_epochs must be >= 1");

    std::vector<double> angles;
    angles.reserve(values.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("train_centroid: non-finite training value");
        angles.push_back(encode(v).theta);
    }

    double theta = 0.0;
    if (opt.theta0) {
        theta = *opt.theta0;
    } else {
        for (double a : angles) theta += a;
        theta /= static_cast<double>(angles.size());
    }
    if (!std::isfinite(theta)) throw std::invalid_argument("train_centroid: initial centroid must be finite");

    TrainingResult out;
    out.trace.steps.reserve(angles.size() * static_cast<std::size_t>(std::min(opt.max_epochs, 8)));
    double previous = std::numeric_limits<double>::quiet_NaN();
    double epoch_centroid = theta;
    int epoch = 0;
    while (epoch < opt.max_epochs) {
        ++epoch;
        double iterate_sum = 0.0;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const double tau = theta - angles[i];
            const double d = detail::rotation_trace(theta, angles[i]);
            const double delta_d = d - 2.0;
            const double sin_tau = std::sin(tau);
            double step = 0.0;
            bool updated = false;
            if (std::abs(sin_tau) >= opt.singular_guard) {
                // d theta / dD * delta D with dD/dtheta = -2 sin(tau).
                step = delta_d / (-2.0 * sin_tau);
                if (!opt.reversed_sign) step = -step;
                step = std::clamp(step, -opt.max_step, opt.max_step);
                updated = true;
            }
            out.trace.steps.push_back(TrainingStep{epoch, i, theta, tau, d, delta_d, step, updated});
            theta += step;
            iterate_sum += theta;
        }
        epoch_centroid = iterate_sum / static_cast<double>(angles.size());
        if (!std::isfinite(epoch_centroid)) break;
        if (std::isfinite(previous) && std::abs(epoch_centroid - previous) < opt.tolerance) break;
        previous = epoch_centroid;
    }

    out.centroid = Centroid{epoch_centroid, opt.label, epoch};
    return out;
}

} // namespace qdlane::uu
