#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace despeckle {

/// Row-major grayscale image of real intensities. On the normalized scale
/// 1.0 is the raster maximum; intermediate buffers (log domain, speckled
/// input) may leave [0, 1].
class ImageBuffer {
public:
    ImageBuffer(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), data_(check(width, height), fill) {}

    ImageBuffer(std::size_t width, std::size_t height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != check(width, height)) {
            throw std::invalid_argument("ImageBuffer: data length does not match dimensions");
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }
    double operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }

    std::span<double> row(std::size_t y) noexcept { return {data_.data() + y * width_, width_}; }
    std::span<const double> row(std::size_t y) const noexcept {
        return {data_.data() + y * width_, width_};
    }

    std::span<double> pixels() noexcept { return data_; }
    std::span<const double> pixels() const noexcept { return data_; }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    static std::size_t check(std::size_t width, std::size_t height) {
        if (width == 0 || height == 0) {
            throw std::invalid_argument("ImageBuffer: width and height must be at least 1");
        }
        return width * height;
    }

    std::size_t width_;
    std::size_t height_;
    std::vector<double> data_;
};

inline void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

/// Mirror without repeating the edge sample: -i -> i, (n-1)+i -> (n-1)-i.
/// Offsets beyond one period fold again.
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) noexcept {
    if (n == 1) return 0;
    const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
    i %= period;
    if (i < 0) i += period;
    if (i >= static_cast<std::ptrdiff_t>(n)) i = period - i;
    return static_cast<std::size_t>(i);
}

/// Arithmetic mean with a fixed left-to-right summation order.
inline double mean_value(const ImageBuffer& img) noexcept {
    double sum = 0.0;
    for (double v : img.pixels()) sum += v;
    return sum / static_cast<double>(img.size());
}

}  // namespace despeckle
