#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "image.hpp"

namespace despeckle {

enum class PhantomPattern { rings, stripes, rings_plus_stripes };

inline PhantomPattern parse_phantom_pattern(std::string_view name) {
    if (name == "rings") return PhantomPattern::rings;
    if (name == "stripes") return PhantomPattern::stripes;
    if (name == "rings_plus_stripes") return PhantomPattern::rings_plus_stripes;
    throw std::invalid_argument("unknown phantom pattern: " + std::string(name));
}

/// Sinusoidal test pattern with oriented curves. frequency counts cycles over
/// the half-diagonal R; the stripe phase is jittered by the seed.
struct PhantomSpec {
    std::size_t width = 256;
    std::size_t height = 256;
    PhantomPattern pattern = PhantomPattern::rings_plus_stripes;
    double frequency = 12.0;
    double contrast = 0.4;
    std::uint64_t seed = 0;

    void validate() const {
        if (width == 0 || height == 0) throw std::invalid_argument("phantom dimensions must be >= 1");
        if (!(contrast > 0.0 && contrast <= 0.5)) throw std::invalid_argument("phantom contrast must lie in (0, 0.5]");
        if (!(frequency >= 0.0)) throw std::invalid_argument("phantom frequency must be >= 0");
    }
};

inline ImageBuffer generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    const double cx = 0.5 * static_cast<double>(spec.width - 1);
    const double cy = 0.5 * static_cast<double>(spec.height - 1);
    const double half_diag = std::max(std::hypot(cx, cy), 0.5);
    const double omega = 2.0 * std::numbers::pi * spec.frequency / half_diag;

    std::mt19937_64 engine(spec.seed);
    const double stripe_phase = 2.0 * std::numbers::pi * static_cast<double>(engine() >> 11) * 0x1.0p-53;
    const double cos30 = std::sqrt(3.0) / 2.0, sin30 = 0.5;

    ImageBuffer img(spec.width, spec.height);
    for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
            const double dx = static_cast<double>(x) - cx;
            const double dy = static_cast<double>(y) - cy;
            const double rings = 0.5 + spec.contrast * std::sin(omega * std::hypot(dx, dy));
            const double stripes = 0.5 + spec.contrast * std::sin(omega * (dx * cos30 + dy * sin30) + stripe_phase);
            double v = 0.0;
            switch (spec.pattern) {
                case PhantomPattern::rings: v = rings; break;
                case PhantomPattern::stripes: v = stripes; break;
                case PhantomPattern::rings_plus_stripes: v = 0.5 * (rings + stripes); break;
            }
            img(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

}  // namespace despeckle
