// Direction heads: the two-circuit U U^dagger rule and a two-qubit
// variational classifier.
#pragma once

#include "qdlane/lanes.hpp"
#include "qdlane/optimize.hpp"
#include "qdlane/qcore.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::decision {

using lanes::SlopePair;

// Order doubles as the argmax tie-break order.
enum class Direction { Straight = 0, Right = 1, Left = 2 };
inline constexpr std::size_t kNumDirections = 3;

inline std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Straight: return "straight";
        case Direction::Right: return "right";
        case Direction::Left: return "left";
    }
    return "?";
}

inline Direction parse_direction(std::string_view s) {
    if (s == "straight" || s == "S") return Direction::Straight;
    if (s == "right" || s == "R") return Direction::Right;
    if (s == "left" || s == "L") return Direction::Left;
    throw std::invalid_argument("unknown direction '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// U U^dagger rule

inline constexpr double kStraightBand = 0.2;
inline constexpr double kDefaultReference = std::numbers::pi / 2.0;

// Line inclination in [0, pi).
inline double slope_angle(double slope) { return std::atan(slope) + std::numbers::pi / 2.0; }

inline qc::Circuit uu_circuit(double slope, double reference_theta) {
    qc::Circuit c(1);
    c.add(qc::ry(slope_angle(slope)), 0).add(qc::ry(-reference_theta), 0);
    return c;
}

struct UuDecision {
    Direction direction;
    double p_first;    // P(|0>) of the circuit for the lower slope
    double p_second;
};

inline Direction rule(double p_first, double p_second) {
    if (std::abs(p_first - p_second) < kStraightBand) return Direction::Straight;
    return p_first > p_second ? Direction::Right : Direction::Left;
}

namespace detail {
inline double p_zero(const qc::MeasurementResult& m) { return m.frequency(0); }
} // namespace detail

inline UuDecision decide_uu_detail(const SlopePair& pair, double reference_theta = kDefaultReference,
                                   std::int64_t shots = 0, std::uint64_t seed = 0) {
    if (!std::isfinite(pair.first) || !std::isfinite(pair.second)) {
        throw std::invalid_argument("decide_uu: slopes must be finite");
    }
    const SlopePair p = pair.ascending();
    const double p1 = detail::p_zero(qc::measure(uu_circuit(p.first, reference_theta).run(), shots, seed));
    const double p2 = detail::p_zero(qc::measure(uu_circuit(p.second, reference_theta).run(), shots, seed + 1));
    return UuDecision{rule(p1, p2), p1, p2};
}

inline Direction decide_uu(const SlopePair& pair, double reference_theta = kDefaultReference,
                           std::int64_t shots = 0, std::uint64_t seed = 0) {
    return decide_uu_detail(pair, reference_theta, shots, seed).direction;
}

// ---------------------------------------------------------------------------
// Variational classifier

inline constexpr int kVqcParams = 4;
inline constexpr std::string_view kVqcCircuitVersion = "ry-atan+cz/ry-cz-ry v1";

using Scores = std::array<double, kNumDirections>;   // indexed by Direction

struct VqcModel {
    std::array<double, kVqcParams> params{};

    friend bool operator==(const VqcModel&, const VqcModel&) = default;
};

// Feature map Ry(atan s1) q0, Ry(atan s2) q1, CZ; then the trainable block
// Ry(a) q0, Ry(b) q1, CZ, Ry(c) q0, Ry(d) q1.
inline qc::Circuit vqc_circuit(const VqcModel& m, const SlopePair& pair) {
    qc::Circuit c(2);
    c.add(qc::ry(std::atan(pair.first)), 0)
        .add(qc::ry(std::atan(pair.second)), 1)
        .add_register(qc::cz())
        .add(qc::ry(m.params[0]), 0)
        .add(qc::ry(m.params[1]), 1)
        .add_register(qc::cz())
        .add(qc::ry(m.params[2]), 0)
        .add(qc::ry(m.params[3]), 1);
    return c;
}

// Outcome -> class: 00 straight, 10 right, 01 left, 11 shared by right/left.
inline Scores class_scores(const std::vector<double>& probs) {
    Scores s{};
    s[static_cast<std::size_t>(Direction::Straight)] = probs[0];
    s[static_cast<std::size_t>(Direction::Right)] = probs[2] + 0.5 * probs[3];
    s[static_cast<std::size_t>(Direction::Left)] = probs[1] + 0.5 * probs[3];
    const double total = s[0] + s[1] + s[2];
    for (double& v : s) v /= total;
    return s;
}

inline Scores vqc_forward(const VqcModel& m, const SlopePair& pair) {
    return class_scores(qc::measure(vqc_circuit(m, pair).run(), 0, 0).probabilities);
}

inline Direction argmax(const Scores& s) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] > s[best]) best = i;
    }
    return static_cast<Direction>(best);
}

struct TrainingSet {
    std::vector<SlopePair> features;
    std::vector<Direction> labels;

    std::size_t size() const noexcept { return features.size(); }
    void validate() const {
        if (features.empty()) throw std::invalid_argument("training set is empty");
        if (features.size() != labels.size()) throw std::invalid_argument("features and labels differ in length");
    }
};

inline Scores one_hot(Direction d) {
    Scores s{};
    s[static_cast<std::size_t>(d)] = 1.0;
    return s;
}

// Mean over samples of the squared distance between the one-hot label and
// the score vector.
inline double mse(const VqcModel& m, const TrainingSet& data) {
    data.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Scores y = one_hot(data.labels[i]);
        const Scores yhat = vqc_forward(m, data.features[i]);
        for (std::size_t c = 0; c < kNumDirections; ++c) total += (y[c] - yhat[c]) * (y[c] - yhat[c]);
    }
    return total / static_cast<double>(data.size());
}

enum class Optimizer { LinearTrustRegion, Compass };

struct VqcTrainOptions {
    int max_iter = 30;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::LinearTrustRegion;
    std::optional<VqcModel> initial;   // default: uniform in [-pi, pi) from seed
    double initial_step = 1.0;
};

struct ObjectiveTrace {
    std::vector<opt::Evaluation> evaluations;
};

struct VqcTraining {
    VqcModel model;
    ObjectiveTrace trace;
    double initial_objective = 0.0;
    double final_objective = 0.0;
};

inline VqcTraining vqc_train(const TrainingSet& data, const VqcTrainOptions& o = {}) {
    data.validate();
    VqcModel init;
    if (o.initial) {
        init = *o.initial;
    } else {
        std::mt19937_64 rng(o.seed);
        std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
        for (double& p : init.params) p = u(rng);
    }
    Eigen::VectorXd x0(kVqcParams);
    for (int i = 0; i < kVqcParams; ++i) x0(i) = init.params[static_cast<std::size_t>(i)];

    auto to_model = [](const Eigen::VectorXd& x) {
        VqcModel m;
        for (int i = 0; i < kVqcParams; ++i) m.params[static_cast<std::size_t>(i)] = x(i);
        return m;
    };
    const opt::Objective objective = [&](const Eigen::VectorXd& x) { return mse(to_model(x), data); };

    opt::Result r = o.optimizer == Optimizer::LinearTrustRegion
                        ? opt::minimize_linear_trust_region(objective, x0, {o.max_iter, o.initial_step, 1e-4})
                        : opt::minimize_compass(objective, x0, {o.max_iter, o.initial_step, 1e-4});
    VqcTraining out;
    out.model = to_model(r.best);
    out.trace.evaluations = std::move(r.trace);
    out.initial_objective = out.trace.evaluations.front().objective;
    out.final_objective = r.best_value;
    return out;
}

inline Direction vqc_predict(const VqcModel& m, const SlopePair& pair) { return argmax(vqc_forward(m, pair)); }

// Fraction of samples whose argmax class equals the label.
inline double vqc_score(const VqcModel& m, const TrainingSet& data) {
    data.validate();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (vqc_predict(m, data.features[i]) == data.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

} // namespace qdlane::decision
