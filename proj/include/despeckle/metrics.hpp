#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "image.hpp"
#include "parallel.hpp"

namespace despeckle {

struct MetricsReport {
    double mse = 0.0;
    double psnr = 0.0;  ///< dB; +inf when mse == 0
    double mssim = 1.0;
};

inline double mse(const ImageBuffer& ref, const ImageBuffer& test) {
    require_same_shape(ref, test, "mse");
    const auto a = ref.pixels();
    const auto b = test.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

/// 10 log10(n_max / MSE), with N_max rather than N_max^2 in the numerator.
/// On the normalized scale n_max is 1, where both readings coincide.
inline double psnr_from_mse(double mse_value, double n_max = 1.0) noexcept {
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(n_max / mse_value);
}

inline double psnr(const ImageBuffer& ref, const ImageBuffer& test, double n_max = 1.0) {
    return psnr_from_mse(mse(ref, test), n_max);
}

/// Gaussian SSIM window and stabilizing constants for dynamic range L = 1.
struct SsimSettings {
    std::size_t window = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    std::vector<double> weights() const {
        std::vector<double> w(window);
        const double center = 0.5 * static_cast<double>(window - 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < window; ++i) {
            const double d = static_cast<double>(i) - center;
            w[i] = std::exp(-d * d / (2.0 * window_sigma * window_sigma));
            sum += w[i];
        }
        for (double& v : w) v /= sum;
        return w;
    }
};

namespace detail {

// Separable Gaussian filter evaluated only at fully-covered positions.
inline ImageBuffer filter_valid(const ImageBuffer& img, const std::vector<double>& w) {
    const std::size_t n = w.size();
    const std::size_t ow = img.width() - n + 1, oh = img.height() - n + 1;
    ImageBuffer horiz(ow, img.height());
    parallel_rows(img.height(), [&](std::size_t y) {
        const auto src = img.row(y);
        auto dst = horiz.row(y);
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += w[k] * src[x + k];
            dst[x] = acc;
        }
    });
    ImageBuffer out(ow, oh);
    parallel_rows(oh, [&](std::size_t y) {
        auto dst = out.row(y);
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += w[k] * horiz(x, y + k);
            dst[x] = acc;
        }
    });
    return out;
}

inline ImageBuffer pointwise_product(const ImageBuffer& a, const ImageBuffer& b) {
    ImageBuffer out(a.width(), a.height());
    for (std::size_t i = 0; i < out.size(); ++i) out.pixels()[i] = a.pixels()[i] * b.pixels()[i];
    return out;
}

}  // namespace detail

/// Local SSIM at every position where the window fits inside both images.
/// The result is (width - window + 1) x (height - window + 1).
inline ImageBuffer ssim_map(const ImageBuffer& ref, const ImageBuffer& test, const SsimSettings& s = {}) {
    require_same_shape(ref, test, "ssim");
    if (ref.width() < s.window || ref.height() < s.window) {
        throw std::invalid_argument("ssim: image smaller than the SSIM window");
    }
    const auto w = s.weights();
    const ImageBuffer mu_x = detail::filter_valid(ref, w);
    const ImageBuffer mu_y = detail::filter_valid(test, w);
    const ImageBuffer xx = detail::filter_valid(detail::pointwise_product(ref, ref), w);
    const ImageBuffer yy = detail::filter_valid(detail::pointwise_product(test, test), w);
    const ImageBuffer xy = detail::filter_valid(detail::pointwise_product(ref, test), w);
    const double c1 = s.c1(), c2 = s.c2();

    ImageBuffer map(mu_x.width(), mu_x.height());
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double mx = mu_x.pixels()[i], my = mu_y.pixels()[i];
        const double vx = xx.pixels()[i] - mx * mx;
        const double vy = yy.pixels()[i] - my * my;
        const double cov = xy.pixels()[i] - mx * my;
        map.pixels()[i] = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return map;
}

inline double mssim(const ImageBuffer& ref, const ImageBuffer& test, const SsimSettings& s = {}) {
    return mean_value(ssim_map(ref, test, s));
}

inline MetricsReport evaluate(const ImageBuffer& ref, const ImageBuffer& test) {
    MetricsReport r;
    r.mse = mse(ref, test);
    r.psnr = psnr_from_mse(r.mse);
    r.mssim = mssim(ref, test);
    return r;
}

}  // namespace despeckle
