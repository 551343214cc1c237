// Text records for trained artifacts: centroids, VQC models and shadow-mask
// provenance.
#pragma once

#include "qdlane/decision.hpp"
#include "qdlane/record.hpp"
#include "qdlane/shadow.hpp"
#include "qdlane/uudagger.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace qdlane::io {

inline constexpr std::string_view kCentroidFormat = "qdlane-centroid 1";
inline constexpr std::string_view kModelFormat = "qdlane-vqc 1";
inline constexpr std::string_view kClassMap = "00:straight 10:right 01:left 11:right/left";

inline void write_centroid(std::ostream& os, const uu::Centroid& c) {
    rec::write(os, {{"format", std::string(kCentroidFormat)},
                    {"theta", rec::format_double(c.theta)},
                    {"trained_on", std::string(uu::to_string(c.trained_on))},
                    {"iterations", std::to_string(c.iterations)}});
}

inline uu::Centroid read_centroid(const rec::Entries& e, std::string_view source = "centroid") {
    if (rec::require(e, "format", source) != kCentroidFormat) {
        throw rec::parse_error(std::string(source) + ": not a centroid record");
    }
    uu::Centroid c;
    c.theta = rec::to_double(rec::require(e, "theta", source), "theta");
    if (!std::isfinite(c.theta)) throw rec::parse_error(std::string(source) + ": theta must be finite");
    c.trained_on = uu::parse_region(rec::require(e, "trained_on", source));
    c.iterations = rec::to_int<int>(rec::require(e, "iterations", source), "iterations");
    return c;
}

inline uu::Centroid load_centroid(const std::string& path) { return read_centroid(rec::parse_file(path), path); }

inline void save_centroid(const std::string& path, const uu::Centroid& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_centroid(out, c);
}

inline void write_model(std::ostream& os, const decision::VqcModel& m) {
    std::string params;
    for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) params += ',';
        params += rec::format_double(m.params[i]);
    }
    rec::write(os, {{"format", std::string(kModelFormat)},
                    {"circuit", std::string(decision::kVqcCircuitVersion)},
                    {"class_map", std::string(kClassMap)},
                    {"params", params}});
}

inline decision::VqcModel read_model(const rec::Entries& e, std::string_view source = "model") {
    if (rec::require(e, "format", source) != kModelFormat) throw rec::parse_error(std::string(source) + ": not a VQC model");
    if (rec::require(e, "circuit", source) != decision::kVqcCircuitVersion) {
        throw rec::parse_error(std::string(source) + ": model was trained for a different circuit");
    }
    if (rec::require(e, "class_map", source) != kClassMap) {
        throw rec::parse_error(std::string(source) + ": unsupported class map");
    }
    const auto parts = rec::split(rec::require(e, "params", source), ',');
    decision::VqcModel m;
    if (parts.size() != m.params.size()) throw rec::parse_error(std::string(source) + ": expected 4 parameters");
    for (std::size_t i = 0; i < parts.size(); ++i) m.params[i] = rec::to_double(parts[i], "params");
    return m;
}

inline decision::VqcModel load_model(const std::string& path) { return read_model(rec::parse_file(path), path); }

inline void save_model(const std::string& path, const decision::VqcModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_model(out, m);
}

inline void write_provenance(std::ostream& os, const shadow::Provenance& p) {
    rec::write(os, {{"centroid_theta", rec::format_double(p.centroid.theta)},
                    {"centroid_trained_on", std::string(uu::to_string(p.centroid.trained_on))},
                    {"threshold", rec::format_double(p.threshold)},
                    {"kind", std::string(shadow::to_string(p.kind))},
                    {"feature", std::string(shadow::to_string(p.feature))},
                    {"grid_n", std::to_string(p.grid_n)},
                    {"seed", std::to_string(p.seed)}});
}

} // namespace qdlane::io
