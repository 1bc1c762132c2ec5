#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "filter.hpp"
#include "image.hpp"
#include "parallel.hpp"
#include "tensor.hpp"

namespace despeckle {

/// Largest dt * (max diffusion eigenvalue) accepted by the explicit schemes.
inline constexpr double kExplicitStabilityBound = 0.25;

/// Perona-Malik settings. k divides |grad u|^2 directly, so it has units of
/// squared gradient.
struct PmParams {
    double k = 0.01;
    double delta = 1.0;  ///< presmoothing of the diffusivity's gradient
    double dt = 0.2;
    std::size_t iterations = 10;

    void validate() const {
        if (!(k > 0.0)) throw std::invalid_argument("Perona-Malik k must be > 0");
        if (!(delta >= 0.0)) throw std::invalid_argument("Perona-Malik delta must be >= 0");
        if (!(dt > 0.0) || dt > kExplicitStabilityBound) {
            throw std::invalid_argument("Perona-Malik dt must lie in (0, 0.25]");
        }
    }
};

/// Default cap on the along-structure weight: 10 C, lowered when needed so
/// that dt * cap stays within the explicit stability bound.
inline double default_lambda_cap(double c, double dt) noexcept {
    return std::max(c, std::min(10.0 * c, kExplicitStabilityBound / dt));
}

struct CoherenceParams {
    double c = 0.5;
    double sigma = 1.2;
    double rho = 5.5;
    double dt = 0.2;
    std::size_t iterations = 10;
    double lambda_cap = default_lambda_cap(0.5, 0.2);

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("coherence C must be > 0");
        if (!(sigma >= 0.0) || !(rho >= 0.0)) throw std::invalid_argument("sigma and rho must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("coherence dt must be > 0");
        if (!(lambda_cap >= c)) throw std::invalid_argument("lambda_cap must be >= C");
        if (dt * std::max(c, lambda_cap) > kExplicitStabilityBound * (1.0 + 1e-12)) {
            throw std::invalid_argument("dt * max(C, lambda_cap) must not exceed 0.25");
        }
    }

    /// rho < sigma is allowed but usually defeats the integration step.
    bool rho_below_sigma() const noexcept { return rho < sigma; }

    DiffusionWeights weights() const noexcept { return {c, lambda_cap}; }
};

/// g = exp(-|grad u|^2 / k).
inline double pm_diffusivity(double grad_sq, double k) noexcept { return std::exp(-grad_sq / k); }

namespace detail {

// Sample of a flux component across a mirrored border. Mirroring u makes its
// fluxes odd about the border, so the normal flux vanishes on the boundary
// line and changes sign outside it.
inline double odd_flux(std::span<const double> f, std::ptrdiff_t i) noexcept {
    const auto n = static_cast<std::ptrdiff_t>(f.size());
    if (n == 1) return 0.0;
    if (i < 0) return -f[static_cast<std::size_t>(-i)];
    if (i >= n) return -f[static_cast<std::size_t>(2 * (n - 1) - i)];
    return f[static_cast<std::size_t>(i)];
}

}  // namespace detail

/// div(D grad u) with central differences for both the gradient and the
/// divergence of the flux (a u_x + b u_y, b u_x + c u_y). u is mirrored at
/// the borders; the flux normal to each border is zero there.
inline ImageBuffer divergence_tensor(const ImageBuffer& u, const TensorField& d) {
    if (u.width() != d.width() || u.height() != d.height()) {
        throw std::invalid_argument("divergence_tensor: dimension mismatch");
    }
    const std::size_t w = u.width(), h = u.height();
    const Gradient g = gradient_central(u);

    // flux_y is stored transposed so both divergences read contiguous rows.
    ImageBuffer flux_x(w, h), flux_yt(h, w);
    parallel_rows(h, [&](std::size_t y) {
        const auto ux = g.gx.row(y);
        const auto uy = g.gy.row(y);
        auto fx = flux_x.row(y);
        const bool y_border = y == 0 || y + 1 == h;
        for (std::size_t x = 0; x < w; ++x) {
            const SymTensor2& t = d(x, y);
            fx[x] = (x == 0 || x + 1 == w) ? 0.0 : t.j11 * ux[x] + t.j12 * uy[x];
            flux_yt(y, x) = y_border ? 0.0 : t.j12 * ux[x] + t.j22 * uy[x];
        }
    });

    ImageBuffer div(w, h);
    parallel_rows(h, [&](std::size_t y) {
        const auto iy = static_cast<std::ptrdiff_t>(y);
        const auto fx = flux_x.row(y);
        auto out = div.row(y);
        for (std::size_t x = 0; x < w; ++x) {
            const auto ix = static_cast<std::ptrdiff_t>(x);
            const auto fy = flux_yt.row(x);
            out[x] = 0.5 * (detail::odd_flux(fx, ix + 1) - detail::odd_flux(fx, ix - 1)) +
                     0.5 * (detail::odd_flux(fy, iy + 1) - detail::odd_flux(fy, iy - 1));
        }
    });
    return div;
}

/// One forward-Euler step u + dt div(D grad u).
inline ImageBuffer tensor_diffusion_step(const ImageBuffer& u, const TensorField& d, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("tensor_diffusion_step: dt must be >= 0");
    const ImageBuffer div = divergence_tensor(u, d);
    ImageBuffer next(u.width(), u.height());
    const auto src = u.pixels();
    const auto dv = div.pixels();
    auto dst = next.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] + dt * dv[i];
    return next;
}

/// Isotropic tensor field g I with g = pm_diffusivity of the
/// delta-presmoothed gradient of u.
inline TensorField pm_diffusivity_field(const ImageBuffer& u, double k, double delta) {
    const Gradient g = gradient_central(gaussian_blur(u, delta));
    TensorField d(u.width(), u.height());
    parallel_rows(u.height(), [&](std::size_t y) {
        const auto gx = g.gx.row(y);
        const auto gy = g.gy.row(y);
        for (std::size_t x = 0; x < gx.size(); ++x) {
            const double s = pm_diffusivity(gx[x] * gx[x] + gy[x] * gy[x], k);
            d(x, y) = {s, 0.0, s};
        }
    });
    return d;
}

/// Explicit Perona-Malik diffusion. Only the diffusivity sees the presmoothed
/// gradient; the flux uses the raw central gradient.
inline ImageBuffer perona_malik(const ImageBuffer& img, const PmParams& p) {
    p.validate();
    ImageBuffer u = img;
    for (std::size_t n = 0; n < p.iterations; ++n) {
        u = tensor_diffusion_step(u, pm_diffusivity_field(u, p.k, p.delta), p.dt);
    }
    return u;
}

/// Diffusion tensor field for the current iterate: J_rho from the structure
/// tensor at scale sigma integrated at scale rho, then the C-weighted D.
inline TensorField coherence_tensor_field(const ImageBuffer& u, const CoherenceParams& p) {
    return diffusion_tensor(smooth_tensor(structure_tensor(u, p.sigma), p.rho), p.weights());
}

/// Coherence-enhancing tensor diffusion; D is rebuilt from the current
/// iterate before every step.
inline ImageBuffer coherence_denoise(const ImageBuffer& img, const CoherenceParams& p) {
    p.validate();
    ImageBuffer u = img;
    for (std::size_t n = 0; n < p.iterations; ++n) {
        u = tensor_diffusion_step(u, coherence_tensor_field(u, p), p.dt);
    }
    return u;
}

}  // namespace despeckle
