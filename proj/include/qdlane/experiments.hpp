// Noise sweeps, accuracy evaluation and stage timing.
#pragma once

#include "qdlane/decision.hpp"
#include "qdlane/qcore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::exp {

using decision::Direction;
using decision::SlopePair;
using qc::ChannelKind;
using qc::KrausChannel;

enum class Head { Uu, Vqc };

inline std::string_view to_string(Head h) { return h == Head::Uu ? "uu" : "vqc"; }

inline Head parse_head(std::string_view s) {
    if (s == "uu") return Head::Uu;
    if (s == "vqc") return Head::Vqc;
    throw std::invalid_argument("unknown decision head '" + std::string(s) + "'");
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed ^ (index + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// U U^dagger rule with both circuits run as density matrices under `noise`.
inline decision::UuDecision noisy_decide_uu(const SlopePair& pair, double reference_theta, const KrausChannel& noise,
                                            std::int64_t shots = 0, std::uint64_t seed = 0) {
    const SlopePair p = pair.ascending();
    const double p1 = qc::measure(decision::uu_circuit(p.first, reference_theta).run(noise), shots, seed).frequency(0);
    const double p2 = qc::measure(decision::uu_circuit(p.second, reference_theta).run(noise), shots, seed + 1).frequency(0);
    return decision::UuDecision{decision::rule(p1, p2), p1, p2};
}

inline decision::Scores noisy_vqc_scores(const decision::VqcModel& m, const SlopePair& pair,
                                         const KrausChannel& noise) {
    return decision::class_scores(decision::vqc_circuit(m, pair).run(noise).probabilities());
}

inline double evaluate(std::span<const Direction> predictions, std::span<const Direction> labels) {
    if (predictions.size() != labels.size()) throw std::invalid_argument("evaluate: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("evaluate: nothing to score");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

struct Interval {
    double low, high;
};

// Wilson score interval for k successes in n trials.
inline Interval wilson(std::size_t k, std::size_t n, double z = 1.959963984540054) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (phat + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct SweepDataset {
    decision::TrainingSet data;
    decision::VqcModel model;
    double reference_theta = decision::kDefaultReference;
};

struct SweepOptions {
    std::vector<Head> methods{Head::Uu, Head::Vqc};
    std::vector<ChannelKind> channels{std::begin(qc::kAllChannels), std::end(qc::kAllChannels)};
    std::vector<double> p_grid;
    std::uint64_t seed = 0;
    std::int64_t shots = 0;
    qc::PhaseDampingForm phase_damping = qc::PhaseDampingForm::Identity;
};

inline std::vector<double> default_p_grid() { return {0.0, 0.11, 0.22, 0.33, 0.44, 0.55, 0.66, 0.77, 0.88, 0.99}; }

struct NoiseSweepRow {
    Head method;
    ChannelKind channel;
    double p;
    double accuracy;
    std::size_t n;
    std::uint64_t seed;
    Interval ci;
};

inline std::vector<Direction> noisy_predictions(Head method, const SweepDataset& ds, const KrausChannel& ch,
                                                std::int64_t shots, std::uint64_t seed) {
    std::vector<Direction> out;
    out.reserve(ds.data.size());
    for (std::size_t i = 0; i < ds.data.size(); ++i) {
        const SlopePair& pair = ds.data.features[i];
        if (method == Head::Uu) {
            out.push_back(noisy_decide_uu(pair, ds.reference_theta, ch, shots, mix_seed(seed, i)).direction);
        } else {
            out.push_back(decision::argmax(noisy_vqc_scores(ds.model, pair, ch)));
        }
    }
    return out;
}

// Noiseless reference predictions for the same dataset.
inline std::vector<Direction> clean_predictions(Head method, const SweepDataset& ds) {
    std::vector<Direction> out;
    out.reserve(ds.data.size());
    for (const auto& pair : ds.data.features) {
        out.push_back(method == Head::Uu ? decision::decide_uu(pair, ds.reference_theta)
                                         : decision::vqc_predict(ds.model, pair));
    }
    return out;
}

// One row per (method, channel, p), in that nesting order.
inline std::vector<NoiseSweepRow> sweep(const SweepDataset& ds, const SweepOptions& o) {
    ds.data.validate();
    if (o.methods.empty() || o.channels.empty()) throw std::invalid_argument("sweep: empty method or channel list");
    const std::vector<double> grid = o.p_grid.empty() ? default_p_grid() : o.p_grid;
    std::vector<NoiseSweepRow> rows;
    rows.reserve(o.methods.size() * o.channels.size() * grid.size());
    std::uint64_t row_index = 0;
    for (Head m : o.methods) {
        for (ChannelKind k : o.channels) {
            for (double p : grid) {
                const auto ch = qc::make_channel(k, p, o.phase_damping);
                const std::uint64_t row_seed = mix_seed(o.seed, row_index++);
                const auto preds = noisy_predictions(m, ds, ch, o.shots, row_seed);
                const double acc = evaluate(preds, ds.data.labels);
                const auto hits = static_cast<std::size_t>(std::lround(acc * static_cast<double>(ds.data.size())));
                rows.push_back(NoiseSweepRow{m, k, p, acc, ds.data.size(), o.seed, wilson(hits, ds.data.size())});
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Timing

struct BenchRow {
    std::string stage;
    int width = 0, height = 0;
    double wall_time_s = 0.0;   // median over repetitions
    int repetitions = 0;
};

template <typename Fn>
BenchRow bench(std::string stage, int width, int height, int repetitions, Fn&& fn) {
    if (repetitions < 1) throw std::invalid_argument("bench: repetitions must be >= 1");
    fn();   // warm-up
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int i = 0; i < repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9));
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    const double median = n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    return BenchRow{std::move(stage), width, height, median, repetitions};
}

} // namespace qdlane::exp
