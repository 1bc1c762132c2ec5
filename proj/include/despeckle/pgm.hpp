#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "image.hpp"

namespace despeckle {

enum class IoErrorKind { missing_file, malformed_header, unsupported_maxval, malformed_raster, unwritable_path };

class IoError : public std::runtime_error {
public:
    IoError(IoErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    IoErrorKind kind() const noexcept { return kind_; }

private:
    IoErrorKind kind_;
};

namespace detail {

class PgmTokenizer {
public:
    explicit PgmTokenizer(const std::vector<char>& bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments, then reads an unsigned decimal.
    bool read_uint(unsigned long& value) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') return false;
        value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (value > 1'000'000'000UL) return false;
            ++pos_;
        }
        return true;
    }

    // Exactly one whitespace byte separates the P5 header from the raster.
    bool consume_single_space() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) return false;
        ++pos_;
        return true;
    }

    std::size_t position() const noexcept { return pos_; }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<char>& bytes_;
    std::size_t pos_ = 2;
};

}  // namespace detail

/// Reads an 8-bit portable graymap (ASCII P2 or binary P5). Intensities are
/// divided by the file's maxval.
inline ImageBuffer load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoErrorKind::missing_file, "cannot open " + path.string());
    const std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw IoError(IoErrorKind::malformed_header, "malformed header: expected P2 or P5 magic");
    }
    const bool binary = bytes[1] == '5';

    detail::PgmTokenizer tok(bytes);
    unsigned long width = 0, height = 0, maxval = 0;
    if (!tok.read_uint(width) || !tok.read_uint(height) || !tok.read_uint(maxval) || width == 0 ||
        height == 0) {
        throw IoError(IoErrorKind::malformed_header, "malformed header");
    }
    if (maxval == 0 || maxval > 255) {
        throw IoError(IoErrorKind::unsupported_maxval, "unsupported maxval " + std::to_string(maxval));
    }

    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<double> data(count);
    const double scale = static_cast<double>(maxval);

    if (binary) {
        if (!tok.consume_single_space()) throw IoError(IoErrorKind::malformed_header, "malformed header");
        const std::size_t offset = tok.position();
        if (bytes.size() - offset < count) throw IoError(IoErrorKind::malformed_raster, "malformed raster");
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<unsigned char>(bytes[offset + i]);
            if (v > maxval) throw IoError(IoErrorKind::malformed_raster, "malformed raster");
            data[i] = v / scale;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned long v = 0;
            if (!tok.read_uint(v) || v > maxval) throw IoError(IoErrorKind::malformed_raster, "malformed raster");
            data[i] = static_cast<double>(v) / scale;
        }
    }
    return ImageBuffer(width, height, std::move(data));
}

/// round(clamp(v, 0, 1) * 255) with halves rounded up.
inline std::uint8_t quantize_8bit(double v) noexcept {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

/// Writes a binary P5 graymap with maxval 255.
inline void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoErrorKind::unwritable_path, "cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> raster(img.size());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) raster[i] = static_cast<char>(quantize_8bit(px[i]));
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) throw IoError(IoErrorKind::unwritable_path, "cannot write " + path.string());
}

}  // namespace despeckle
