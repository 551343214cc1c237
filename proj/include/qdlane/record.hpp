// Flat "key = value" text records used for config files, centroids,
// models and provenance sidecars. '#' starts a comment line.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace qdlane::rec {

class parse_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Entries = std::vector<std::pair<std::string, std::string>>;

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline Entries parse(std::istream& in, std::string_view source = "record") {
    Entries out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw parse_error(std::string(source) + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key(trim(t.substr(0, eq)));
        if (key.empty()) throw parse_error(std::string(source) + ":" + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : out) {
            if (k == key) throw parse_error(std::string(source) + ": duplicate key '" + key + "'");
        }
        out.emplace_back(std::move(key), std::string(trim(t.substr(eq + 1))));
    }
    return out;
}

inline Entries parse_string(const std::string& text, std::string_view source = "record") {
    std::istringstream in(text);
    return parse(in, source);
}

inline Entries parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");
    return parse(in, path);
}

inline const std::string& require(const Entries& e, std::string_view key, std::string_view source = "record") {
    for (const auto& [k, v] : e) {
        if (k == key) return v;
    }
    throw parse_error(std::string(source) + ": missing key '" + std::string(key) + "'");
}

// --- scalar conversions -----------------------------------------------------

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

inline double to_double(std::string_view s, std::string_view key) {
    s = trim(s);
    if (s == "nan") return std::nan("");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw parse_error("'" + std::string(key) + "': not a number: '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int to_int(std::string_view s, std::string_view key) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw parse_error("'" + std::string(key) + "': not an integer: '" + std::string(s) + "'");
    }
    return v;
}

inline bool to_bool(std::string_view s, std::string_view key) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw parse_error("'" + std::string(key) + "': not a boolean: '" + std::string(s) + "'");
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline void write(std::ostream& os, const Entries& e) {
    for (const auto& [k, v] : e) os << k << " = " << v << '\n';
}

} // namespace qdlane::rec
