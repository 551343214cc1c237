// Run manifest written next to every set of outputs: the exact configuration,
// seed, hashes of inputs and outputs, and wall-clock timestamps.
#pragma once

#include "qdlane/config.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace qdlane::io {

// FNV-1a, 64-bit, over the raw file bytes.
inline std::uint64_t fnv1a64(std::istream& in) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

inline std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash '" + path + "'");
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(in)));
    return hex;
}

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class RunManifest {
public:
    RunManifest(std::string command, const config::PipelineConfig& cfg)
        : command_(std::move(command)), config_(cfg), started_(utc_now()) {}

    void add_input(const std::string& path) { inputs_.push_back(path); }
    void add_output(const std::string& path) { outputs_.push_back(path); }
    void note(const std::string& key, const std::string& value) { notes_[key] = value; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = "qdlane";
        j["command"] = command_;
        j["seed"] = config_.seed;
        nlohmann::json cfg = nlohmann::json::object();
        for (const auto& [k, v] : config::to_entries(config_)) cfg[k] = v;
        j["config"] = cfg;
        auto files = [](const std::vector<std::string>& paths) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : paths) {
                nlohmann::json f{{"path", p}};
                f["fnv1a64"] = std::filesystem::exists(p) ? hash_file(p) : "missing";
                arr.push_back(f);
            }
            return arr;
        };
        j["inputs"] = files(inputs_);
        j["outputs"] = files(outputs_);
        if (!notes_.empty()) j["notes"] = notes_;
        j["started_utc"] = started_;
        j["finished_utc"] = utc_now();
        return j;
    }

    // Written last so the output hashes cover everything else.
    void write(const std::string& dir) const {
        const auto path = (std::filesystem::path(dir) / "manifest.json").string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << to_json().dump(2) << '\n';
    }

private:
    std::string command_;
    config::PipelineConfig config_;
    std::string started_;
    std::vector<std::string> inputs_, outputs_;
    std::map<std::string, std::string> notes_;
};

// A manifest's "config" object, parsed back into a configuration.
inline config::PipelineConfig config_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("'" + path + "': " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
        throw std::invalid_argument("'" + path + "': no config object");
    }
    rec::Entries e;
    for (const auto& [k, v] : j["config"].items()) {
        if (!v.is_string()) throw std::invalid_argument("'" + path + "': config value for '" + k + "' is not a string");
        e.emplace_back(k, v.get<std::string>());
    }
    return config::from_entries(e);
}

// "default", a key = value file, or a manifest.json from an earlier run.
inline config::PipelineConfig load_config(const std::string& spec) {
    if (spec.empty() || spec == "default") return {};
    if (std::filesystem::path(spec).extension() == ".json") return config_from_manifest(spec);
    return config::load(spec);
}

} // namespace qdlane::io
