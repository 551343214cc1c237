// Driving-log ingest: rows of center,left,right,steering,throttle,brake,speed
// (simulator recording layout). Steering is mapped to a direction label.
#pragma once

#include "qdlane/csv.hpp"
#include "qdlane/decision.hpp"
#include "qdlane/image_io.hpp"
#include "qdlane/record.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace qdlane::io {

struct DrivingLogRecord {
    std::string center, left, right;
    double steering = 0.0;
    double throttle = 0.0;
    double brake = 0.0;
    double speed = 0.0;
};

// Strictly beyond the threshold turns; the boundary itself is Straight.
inline decision::Direction steering_to_direction(double steering, double threshold = 0.05) {
    if (steering < -threshold) return decision::Direction::Left;
    if (steering > threshold) return decision::Direction::Right;
    return decision::Direction::Straight;
}

struct LogParse {
    std::vector<DrivingLogRecord> records;
    std::vector<std::string> warnings;
};

inline LogParse parse_driving_log(std::istream& in, std::string_view source = "driving log") {
    LogParse out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (rec::trim(line).empty()) continue;
        const auto f = csv::split_record(line);
        const std::string where = std::string(source) + ":" + std::to_string(lineno);
        if (f.size() < 7) {
            out.warnings.push_back(where + ": expected 7 columns, skipped");
            continue;
        }
        DrivingLogRecord r{std::string(rec::trim(f[0])), std::string(rec::trim(f[1])), std::string(rec::trim(f[2]))};
        try {
            r.steering = rec::to_double(f[3], "steering");
            r.throttle = rec::to_double(f[4], "throttle");
            r.brake = rec::to_double(f[5], "brake");
            r.speed = rec::to_double(f[6], "speed");
        } catch (const rec::parse_error& e) {
            // A header row is the only non-numeric row tolerated silently.
            if (lineno == 1 && rec::trim(f[3]) == "steering") continue;
            out.warnings.push_back(where + ": " + e.what() + ", skipped");
            continue;
        }
        if (!(r.steering >= -1.0 && r.steering <= 1.0)) {
            out.warnings.push_back(where + ": steering outside [-1,1], skipped");
            continue;
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

// Log paths are often absolute paths from the recording machine; fall back
// to the bare file name inside images_dir.
inline std::string resolve_image(const std::string& logged, const std::string& images_dir) {
    namespace fs = std::filesystem;
    const fs::path p(logged);
    if (p.is_absolute() && fs::exists(p)) return p.string();
    const fs::path joined = fs::path(images_dir) / p;
    if (fs::exists(joined)) return joined.string();
    const fs::path base = fs::path(images_dir) / p.filename();
    if (fs::exists(base)) return base.string();
    return {};
}

struct LabelledFrame {
    std::string path;   // as resolved on disk
    decision::Direction label;
    double steering;
};

struct IngestResult {
    std::vector<LabelledFrame> frames;
    std::vector<std::string> warnings;
};

// Resolves center-camera paths and derives labels. Images are not decoded
// here; unreadable files surface when the frame is processed.
inline IngestResult ingest(const std::string& log_csv_path, const std::string& images_dir, double threshold = 0.05) {
    std::ifstream in(log_csv_path);
    if (!in) throw std::invalid_argument("cannot open driving log '" + log_csv_path + "'");
    auto parsed = parse_driving_log(in, log_csv_path);
    IngestResult out;
    out.warnings = std::move(parsed.warnings);
    for (const auto& r : parsed.records) {
        const auto path = resolve_image(r.center, images_dir);
        if (path.empty()) {
            out.warnings.push_back("missing image '" + r.center + "', skipped");
            continue;
        }
        out.frames.push_back({path, steering_to_direction(r.steering, threshold), r.steering});
    }
    if (out.frames.empty()) throw std::invalid_argument("driving log '" + log_csv_path + "' yielded no usable frames");
    return out;
}

} // namespace qdlane::io
