// Fixed-schema CSV writers. Numbers use the shortest round-trip form so
// identical runs produce identical bytes.
#pragma once

#include "qdlane/decision.hpp"
#include "qdlane/experiments.hpp"
#include "qdlane/hough.hpp"
#include "qdlane/lanes.hpp"
#include "qdlane/record.hpp"
#include "qdlane/uudagger.hpp"

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdlane::csv {

inline std::string number(double v) { return rec::format_double(v); }

// RFC 4180 quoting, only when needed.
inline std::string field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Splits one CSV record; handles quoted fields but not embedded newlines.
inline std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline void write_sweep(std::ostream& os, std::span<const exp::NoiseSweepRow> rows) {
    os << "method,channel,p,accuracy,n,seed,ci_low,ci_high\n";
    for (const auto& r : rows) {
        os << exp::to_string(r.method) << ',' << qc::to_string(r.channel) << ',' << number(r.p) << ','
           << number(r.accuracy) << ',' << r.n << ',' << r.seed << ',' << number(r.ci.low) << ','
           << number(r.ci.high) << '\n';
    }
}

inline void write_bench(std::ostream& os, std::span<const exp::BenchRow> rows) {
    os << "stage,width,height,wall_time_s,reps\n";
    for (const auto& r : rows) {
        os << field(r.stage) << ',' << r.width << ',' << r.height << ',' << number(r.wall_time_s) << ','
           << r.repetitions << '\n';
    }
}

inline void write_segments(std::ostream& os, std::span<const img::LineSegment> segs, std::span<const int> labels,
                           lanes::Method method) {
    os << "x1,y1,x2,y2,slope,label,method\n";
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        os << s.x1 << ',' << s.y1 << ',' << s.x2 << ',' << s.y2 << ',' << number(s.slope()) << ','
           << (i < labels.size() ? labels[i] : -1) << ',' << lanes::to_string(method) << '\n';
    }
}

struct Prediction {
    std::string path;
    decision::Direction direction;
};

inline void write_predictions(std::ostream& os, std::span<const Prediction> rows) {
    os << "path,direction\n";
    for (const auto& r : rows) os << field(r.path) << ',' << decision::to_string(r.direction) << '\n';
}

inline void write_trace(std::ostream& os, std::span<const opt::Evaluation> evals) {
    os << "iteration,objective\n";
    for (const auto& e : evals) os << e.index << ',' << number(e.objective) << '\n';
}

inline void write_centroid_trace(std::ostream& os, const uu::TrainingTrace& t) {
    os << "epoch,index,theta,tau,trace,delta_trace,step,updated\n";
    for (const auto& s : t.steps) {
        os << s.epoch << ',' << s.index << ',' << number(s.theta) << ',' << number(s.tau) << ',' << number(s.trace)
           << ',' << number(s.delta_trace) << ',' << number(s.step) << ',' << (s.updated ? 1 : 0) << '\n';
    }
}

} // namespace qdlane::csv
