#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include "image.hpp"
#include "parallel.hpp"

namespace despeckle {

struct SpeckleParams {
    double variance = 0.02;  ///< variance of the unit-mean multiplier
    std::uint64_t seed = 0;
    double floor = 1e-6;     ///< lower clamp on each multiplier

    void validate() const {
        if (!(variance >= 0.0)) throw std::invalid_argument("speckle variance must be >= 0");
        if (!(floor > 0.0)) throw std::invalid_argument("speckle floor must be > 0");
    }
};

/// Multiplier field eta ~ Normal(1, variance), clamped below at floor, drawn
/// in raster order from a seeded mt19937_64 via Box-Muller. The field depends
/// only on (width, height, params).
inline ImageBuffer speckle_multipliers(std::size_t width, std::size_t height, const SpeckleParams& params) {
    params.validate();
    ImageBuffer eta(width, height, 1.0);
    if (params.variance == 0.0) return eta;

    std::mt19937_64 engine(params.seed);
    // 53-bit uniform in (0, 1]; avoids log(0) below.
    auto uniform = [&engine] { return static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53; };

    const double stddev = std::sqrt(params.variance);
    auto px = eta.pixels();
    for (std::size_t i = 0; i < px.size(); i += 2) {
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        px[i] = std::max(params.floor, 1.0 + stddev * radius * std::cos(angle));
        if (i + 1 < px.size()) px[i + 1] = std::max(params.floor, 1.0 + stddev * radius * std::sin(angle));
    }
    return eta;
}

/// f = eta * f0 per pixel. The result is not clamped to [0, 1].
inline ImageBuffer add_speckle(const ImageBuffer& img, const SpeckleParams& params) {
    ImageBuffer out = speckle_multipliers(img.width(), img.height(), params);
    const auto src = img.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
    return out;
}

/// u = ln(max(f, floor)).
inline ImageBuffer log_transform(const ImageBuffer& img, double floor = 1e-6) {
    if (!(floor > 0.0)) throw std::invalid_argument("log_transform: floor must be > 0");
    ImageBuffer out(img.width(), img.height());
    parallel_rows(img.height(), [&](std::size_t y) {
        const auto src = img.row(y);
        auto dst = out.row(y);
        for (std::size_t x = 0; x < src.size(); ++x) dst[x] = std::log(std::max(src[x], floor));
    });
    return out;
}

inline ImageBuffer exp_transform(const ImageBuffer& img) {
    ImageBuffer out(img.width(), img.height());
    parallel_rows(img.height(), [&](std::size_t y) {
        const auto src = img.row(y);
        auto dst = out.row(y);
        for (std::size_t x = 0; x < src.size(); ++x) dst[x] = std::exp(src[x]);
    });
    return out;
}

}  // namespace despeckle
