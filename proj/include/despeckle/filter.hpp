#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "image.hpp"
#include "parallel.hpp"

namespace despeckle {

/// Sampled Gaussian truncated at radius ceil(3 sigma) and renormalized to
/// unit sum. Index i holds the weight of offset i - radius.
inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be >= 0");
    if (sigma == 0.0) return {1.0};
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

/// Convolves rows then columns with a symmetric odd-length, unit-sum kernel
/// under reflect boundaries. Taps are applied to differences from the center
/// sample, so constant regions pass through exactly.
inline ImageBuffer convolve_separable(const ImageBuffer& img, const std::vector<double>& kernel) {
    const std::size_t w = img.width(), h = img.height();
    const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);

    ImageBuffer tmp(w, h);
    parallel_rows(h, [&](std::size_t y) {
        const auto src = img.row(y);
        auto dst = tmp.row(y);
        for (std::size_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] *
                       (src[reflect_index(static_cast<std::ptrdiff_t>(x) + k, w)] - src[x]);
            }
            dst[x] = src[x] + acc;
        }
    });

    ImageBuffer out(w, h);
    parallel_rows(h, [&](std::size_t y) {
        auto dst = out.row(y);
        const auto center = tmp.row(y);
        for (std::size_t x = 0; x < w; ++x) dst[x] = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
            const double wk = kernel[static_cast<std::size_t>(k + radius)];
            const auto src = tmp.row(reflect_index(static_cast<std::ptrdiff_t>(y) + k, h));
            for (std::size_t x = 0; x < w; ++x) dst[x] += wk * (src[x] - center[x]);
        }
        for (std::size_t x = 0; x < w; ++x) dst[x] += center[x];
    });
    return out;
}

/// Gaussian smoothing shared by the gradient presmoothing, the structure
/// scale and the integration scale. sigma == 0 returns the input.
inline ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) return img;
    return convolve_separable(img, gaussian_kernel(sigma));
}

struct Gradient {
    ImageBuffer gx;
    ImageBuffer gy;
};

/// Central differences, x along columns and y along rows, reflect boundaries.
inline Gradient gradient_central(const ImageBuffer& img) {
    const std::size_t w = img.width(), h = img.height();
    Gradient g{ImageBuffer(w, h), ImageBuffer(w, h)};
    parallel_rows(h, [&](std::size_t y) {
        const auto iy = static_cast<std::ptrdiff_t>(y);
        const auto cur = img.row(y);
        const auto up = img.row(reflect_index(iy - 1, h));
        const auto down = img.row(reflect_index(iy + 1, h));
        auto gx = g.gx.row(y);
        auto gy = g.gy.row(y);
        for (std::size_t x = 0; x < w; ++x) {
            const auto ix = static_cast<std::ptrdiff_t>(x);
            gx[x] = 0.5 * (cur[reflect_index(ix + 1, w)] - cur[reflect_index(ix - 1, w)]);
            gy[x] = 0.5 * (down[x] - up[x]);
        }
    });
    return g;
}

/// 256-bin histogram equalization. Each pixel's bin round(v * 255) maps to
/// the fraction of pixels in that bin or below. Inputs must lie in [0, 1].
inline ImageBuffer histogram_equalize(const ImageBuffer& img) {
    std::array<std::size_t, 256> hist{};
    std::vector<std::size_t> bins(img.size());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (!(px[i] >= 0.0 && px[i] <= 1.0)) {
            throw std::domain_error("histogram_equalize: intensities must lie in [0, 1]");
        }
        bins[i] = static_cast<std::size_t>(std::floor(px[i] * 255.0 + 0.5));
        ++hist[bins[i]];
    }
    std::array<double, 256> cdf{};
    std::size_t running = 0;
    for (std::size_t b = 0; b < 256; ++b) {
        running += hist[b];
        cdf[b] = static_cast<double>(running) / static_cast<double>(px.size());
    }
    ImageBuffer out(img.width(), img.height());
    auto dst = out.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) dst[i] = cdf[bins[i]];
    return out;
}

}  // namespace despeckle
