#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "image.hpp"
#include "parallel.hpp"

namespace despeckle {

/// Square window of side 2 * radius + 1.
struct WindowSpec {
    std::size_t radius = 2;

    std::size_t side() const noexcept { return 2 * radius + 1; }
    void validate() const {
        if (radius < 1) throw std::invalid_argument("window radius must be >= 1");
    }
};

namespace detail {

struct WindowStats {
    double mean = 0.0;
    double variance = 0.0;
};

// Gathers the reflect-padded window around (x, y) in row-major order.
inline void gather_window(const ImageBuffer& img, std::size_t x, std::size_t y, std::size_t radius,
                          std::vector<double>& out) {
    out.clear();
    const auto r = static_cast<std::ptrdiff_t>(radius);
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        const auto src = img.row(reflect_index(static_cast<std::ptrdiff_t>(y) + dy, img.height()));
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            out.push_back(src[reflect_index(static_cast<std::ptrdiff_t>(x) + dx, img.width())]);
        }
    }
}

// Mean accumulated as an offset from the center sample, so a constant window
// returns that constant exactly. Population variance, two-pass.
inline WindowStats window_stats(const std::vector<double>& win, double center) {
    double offset = 0.0;
    for (double v : win) offset += v - center;
    const double n = static_cast<double>(win.size());
    WindowStats s;
    s.mean = center + offset / n;
    double ss = 0.0;
    for (double v : win) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / n;
    return s;
}

// Applies fn(window, center, x, y) -> double at every pixel.
template <typename Fn>
ImageBuffer map_windows(const ImageBuffer& img, const WindowSpec& w, Fn&& fn) {
    w.validate();
    ImageBuffer out(img.width(), img.height());
    parallel_rows(img.height(), [&](std::size_t y) {
        std::vector<double> win;
        win.reserve(w.side() * w.side());
        auto dst = out.row(y);
        for (std::size_t x = 0; x < img.width(); ++x) {
            gather_window(img, x, y, w.radius, win);
            dst[x] = fn(win, img(x, y));
        }
    });
    return out;
}

// out = f - (1 - g)(f - m): exact identity at g = 1 and exact mean at a
// constant window.
inline double blend_toward_mean(double f, double m, double g) noexcept { return f - (1.0 - g) * (f - m); }

}  // namespace detail

/// Lee filter, additive form: g = max(0, v - noise_var) / max(v, 1e-12),
/// clamped to [0, 1]; out = m + g (f - m).
inline ImageBuffer lee_filter(const ImageBuffer& img, const WindowSpec& w, double noise_var) {
    if (!(noise_var >= 0.0)) throw std::invalid_argument("lee_filter: noise_var must be >= 0");
    return detail::map_windows(img, w, [noise_var](const std::vector<double>& win, double f) {
        const auto s = detail::window_stats(win, f);
        const double g = std::clamp(std::max(0.0, s.variance - noise_var) / std::max(s.variance, 1e-12), 0.0, 1.0);
        return detail::blend_toward_mean(f, s.mean, g);
    });
}

/// Kuan filter for multiplicative noise of relative variance noise_var:
/// g = max(0, v - noise_var m^2) / max(v (1 + noise_var), 1e-12), clamped to [0, 1].
inline ImageBuffer kuan_filter(const ImageBuffer& img, const WindowSpec& w, double noise_var) {
    if (!(noise_var >= 0.0)) throw std::invalid_argument("kuan_filter: noise_var must be >= 0");
    return detail::map_windows(img, w, [noise_var](const std::vector<double>& win, double f) {
        const auto s = detail::window_stats(win, f);
        const double num = std::max(0.0, s.variance - noise_var * s.mean * s.mean);
        const double den = std::max(s.variance * (1.0 + noise_var), 1e-12);
        return detail::blend_toward_mean(f, s.mean, std::clamp(num / den, 0.0, 1.0));
    });
}

/// Frost filter: exponentially damped weights exp(-damping (v / m^2) d) over
/// the window, d the Euclidean distance to the center.
inline ImageBuffer frost_filter(const ImageBuffer& img, const WindowSpec& w, double damping) {
    if (!(damping > 0.0)) throw std::invalid_argument("frost_filter: damping must be > 0");
    w.validate();
    const auto r = static_cast<std::ptrdiff_t>(w.radius);
    std::vector<double> distance;
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            distance.push_back(std::sqrt(static_cast<double>(dx * dx + dy * dy)));
        }
    }
    return detail::map_windows(img, w, [&distance, damping](const std::vector<double>& win, double f) {
        const auto s = detail::window_stats(win, f);
        const double rate = damping * s.variance / std::max(s.mean * s.mean, 1e-12);
        double weight_sum = 0.0;
        double offset = 0.0;
        for (std::size_t i = 0; i < win.size(); ++i) {
            const double wi = std::exp(-rate * distance[i]);
            weight_sum += wi;
            offset += wi * (win[i] - f);
        }
        return f + offset / weight_sum;
    });
}

inline ImageBuffer median_filter(const ImageBuffer& img, const WindowSpec& w) {
    return detail::map_windows(img, w, [](std::vector<double>& win, double) {
        const auto mid = win.begin() + static_cast<std::ptrdiff_t>(win.size() / 2);
        std::nth_element(win.begin(), mid, win.end());
        return *mid;
    });
}

/// Gradient descent on sum sqrt(|grad u|^2 + epsilon^2) + weight/2 sum (u - f)^2.
struct TvParams {
    double weight = 10.0;
    double epsilon = 1e-3;
    double step = 0.0;  ///< 0 selects 1 / (8 / epsilon + weight)
    std::size_t iterations = 1000;

    double lipschitz() const noexcept { return 8.0 / epsilon + weight; }
    double effective_step() const noexcept { return step > 0.0 ? step : 1.0 / lipschitz(); }

    void validate() const {
        if (!(weight > 0.0) || !(epsilon > 0.0) || !(step >= 0.0)) {
            throw std::invalid_argument("TV weight and epsilon must be > 0, step >= 0");
        }
        if (effective_step() * lipschitz() > 2.0) {
            throw std::invalid_argument("TV step exceeds 2 / (8 / epsilon + weight)");
        }
    }
};

namespace detail {

// Forward differences; the difference across the last column/row is zero
// (mirrored extension).
inline void forward_gradient(const ImageBuffer& u, ImageBuffer& dx, ImageBuffer& dy) {
    const std::size_t w = u.width(), h = u.height();
    parallel_rows(h, [&](std::size_t y) {
        const auto cur = u.row(y);
        auto gx = dx.row(y);
        auto gy = dy.row(y);
        for (std::size_t x = 0; x < w; ++x) {
            gx[x] = x + 1 < w ? cur[x + 1] - cur[x] : 0.0;
            gy[x] = y + 1 < h ? u(x, y + 1) - cur[x] : 0.0;
        }
    });
}

}  // namespace detail

inline ImageBuffer tv_denoise(const ImageBuffer& img, const TvParams& p) {
    p.validate();
    const std::size_t w = img.width(), h = img.height();
    const double tau = p.effective_step();
    const double eps_sq = p.epsilon * p.epsilon;

    ImageBuffer u = img;
    ImageBuffer dx(w, h), dy(w, h);
    for (std::size_t n = 0; n < p.iterations; ++n) {
        detail::forward_gradient(u, dx, dy);
        // Normalize in place: dx, dy become the dual field grad u / |grad u|_eps.
        parallel_rows(h, [&](std::size_t y) {
            auto gx = dx.row(y);
            auto gy = dy.row(y);
            for (std::size_t x = 0; x < w; ++x) {
                const double inv = 1.0 / std::sqrt(gx[x] * gx[x] + gy[x] * gy[x] + eps_sq);
                gx[x] *= inv;
                gy[x] *= inv;
            }
        });
        ImageBuffer next(w, h);
        parallel_rows(h, [&](std::size_t y) {
            const auto px = dx.row(y);
            const auto cur = u.row(y);
            const auto f = img.row(y);
            auto dst = next.row(y);
            for (std::size_t x = 0; x < w; ++x) {
                // Backward-difference divergence, the negative adjoint of forward_gradient.
                double div = px[x] - (x > 0 ? px[x - 1] : 0.0);
                div += dy(x, y) - (y > 0 ? dy(x, y - 1) : 0.0);
                dst[x] = cur[x] - tau * (-div + p.weight * (cur[x] - f[x]));
            }
        });
        u = std::move(next);
    }
    return u;
}

}  // namespace despeckle
