// Reading and writing frames: PNG through libpng, binary PGM/PPM natively.
// The format is chosen from the file extension.
#pragma once

#include "qdlane/imgproc.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdlane::io {

class image_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// Returns width, height and pixels with `channels` samples each.
inline std::vector<std::uint8_t> read_png(const std::string& path, int channels, int& w, int& h) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw image_error("'" + path + "': " + image.message);
    }
    image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw image_error("'" + path + "': " + msg);
    }
    w = static_cast<int>(image.width);
    h = static_cast<int>(image.height);
    return buf;
}

inline void write_png(const std::string& path, const std::uint8_t* data, int w, int h, int channels) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
        throw image_error("'" + path + "': " + image.message);
    }
}

inline void skip_pnm_space(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

inline int read_pnm_int(std::istream& in, const std::string& path) {
    skip_pnm_space(in);
    int v = -1;
    if (!(in >> v) || v < 0) throw image_error("'" + path + "': malformed PNM header");
    return v;
}

// P5 (gray) or P6 (RGB), maxval 255 only.
inline std::vector<std::uint8_t> read_pnm(const std::string& path, int& channels, int& w, int& h) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw image_error("cannot open '" + path + "'");
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw image_error("'" + path + "': only binary PGM (P5) and PPM (P6) are supported");
    }
    channels = magic[1] == '5' ? 1 : 3;
    w = read_pnm_int(in, path);
    h = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (maxval != 255) throw image_error("'" + path + "': only 8-bit PNM is supported");
    in.get();   // single whitespace before the raster
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw image_error("'" + path + "': truncated raster");
    return buf;
}

inline void write_pnm(const std::string& path, const std::uint8_t* data, int w, int h, int channels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw image_error("cannot write '" + path + "'");
    out << (channels == 1 ? "P5" : "P6") << '\n' << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels));
    if (!out) throw image_error("write failed for '" + path + "'");
}

inline bool is_pnm(const std::string& ext) { return ext == ".pgm" || ext == ".ppm" || ext == ".pnm"; }

inline void check_supported(const std::string& path, const std::string& ext) {
    if (ext != ".png" && !is_pnm(ext)) throw image_error("'" + path + "': unsupported image extension '" + ext + "'");
}

} // namespace detail

inline img::RgbImage read_rgb(const std::string& path) {
    const auto ext = detail::lower_ext(path);
    detail::check_supported(path, ext);
    int w = 0, h = 0;
    if (ext == ".png") {
        auto px = detail::read_png(path, 3, w, h);
        return img::RgbImage(w, h, std::move(px));
    }
    int ch = 0;
    auto px = detail::read_pnm(path, ch, w, h);
    if (ch == 3) return img::RgbImage(w, h, std::move(px));
    std::vector<std::uint8_t> rgb(px.size() * 3);
    for (std::size_t i = 0; i < px.size(); ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = px[i];
    return img::RgbImage(w, h, std::move(rgb));
}

inline void write_rgb(const std::string& path, const img::RgbImage& image) {
    const auto ext = detail::lower_ext(path);
    detail::check_supported(path, ext);
    if (ext == ".png") detail::write_png(path, image.data.data(), image.width, image.height, 3);
    else detail::write_pnm(path, image.data.data(), image.width, image.height, 3);
}

inline void write_gray(const std::string& path, const img::GrayImage& image) {
    const auto ext = detail::lower_ext(path);
    detail::check_supported(path, ext);
    if (ext == ".png") detail::write_png(path, image.data.data(), image.width, image.height, 1);
    else detail::write_pnm(path, image.data.data(), image.width, image.height, 1);
}

// Gray frames read from colour files go through the luma conversion.
inline img::GrayImage read_gray(const std::string& path) { return img::to_gray(read_rgb(path)); }

} // namespace qdlane::io
