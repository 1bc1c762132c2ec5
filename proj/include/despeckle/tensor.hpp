#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "filter.hpp"
#include "image.hpp"
#include "parallel.hpp"

namespace despeckle {

/// Symmetric 2x2 matrix [[j11, j12], [j12, j22]]. Also used for diffusion
/// tensors, where (a, b, c) = (j11, j12, j22).
struct SymTensor2 {
    double j11 = 0.0;
    double j12 = 0.0;
    double j22 = 0.0;

    friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// lambda_plus >= lambda_minus; theta_plus is a unit eigenvector for
/// lambda_plus and theta_minus() its 90 degree rotation.
struct EigenPair {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    Vec2 theta_plus{1.0, 0.0};

    Vec2 theta_minus() const noexcept { return {-theta_plus.y, theta_plus.x}; }
};

class TensorField {
public:
    TensorField(std::size_t width, std::size_t height, SymTensor2 fill = {})
        : width_(width), height_(height), tensors_(width * height, fill) {
        if (width == 0 || height == 0) throw std::invalid_argument("TensorField: empty dimensions");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return tensors_.size(); }

    SymTensor2& operator()(std::size_t x, std::size_t y) noexcept { return tensors_[y * width_ + x]; }
    const SymTensor2& operator()(std::size_t x, std::size_t y) const noexcept { return tensors_[y * width_ + x]; }

    std::span<SymTensor2> tensors() noexcept { return tensors_; }
    std::span<const SymTensor2> tensors() const noexcept { return tensors_; }

    /// Splits the field into three component images (j11, j12, j22).
    std::array<ImageBuffer, 3> components() const {
        std::array<ImageBuffer, 3> c{ImageBuffer(width_, height_), ImageBuffer(width_, height_),
                                     ImageBuffer(width_, height_)};
        for (std::size_t i = 0; i < tensors_.size(); ++i) {
            c[0].pixels()[i] = tensors_[i].j11;
            c[1].pixels()[i] = tensors_[i].j12;
            c[2].pixels()[i] = tensors_[i].j22;
        }
        return c;
    }

    static TensorField from_components(const ImageBuffer& j11, const ImageBuffer& j12, const ImageBuffer& j22) {
        require_same_shape(j11, j12, "TensorField");
        require_same_shape(j11, j22, "TensorField");
        TensorField f(j11.width(), j11.height());
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.tensors_[i] = {j11.pixels()[i], j12.pixels()[i], j22.pixels()[i]};
        }
        return f;
    }

    friend bool operator==(const TensorField&, const TensorField&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<SymTensor2> tensors_;
};

/// Outer product of the central gradient of the sigma-smoothed image.
inline TensorField structure_tensor(const ImageBuffer& img, double sigma) {
    const Gradient g = gradient_central(gaussian_blur(img, sigma));
    TensorField field(img.width(), img.height());
    parallel_rows(img.height(), [&](std::size_t y) {
        const auto gx = g.gx.row(y);
        const auto gy = g.gy.row(y);
        for (std::size_t x = 0; x < gx.size(); ++x) {
            field(x, y) = {gx[x] * gx[x], gx[x] * gy[x], gy[x] * gy[x]};
        }
    });
    return field;
}

/// Componentwise Gaussian integration at scale rho.
inline TensorField smooth_tensor(const TensorField& field, double rho) {
    if (!(rho >= 0.0)) throw std::invalid_argument("smooth_tensor: rho must be >= 0");
    if (rho == 0.0) return field;
    const auto kernel = gaussian_kernel(rho);
    auto [j11, j12, j22] = field.components();
    return TensorField::from_components(convolve_separable(j11, kernel), convolve_separable(j12, kernel),
                                        convolve_separable(j22, kernel));
}

/// Below this value of (j11 - j22)^2 + 4 j12^2 the tensor is treated as
/// isotropic and theta_plus is fixed to (1, 0).
inline constexpr double kIsotropicDiscriminant = 1e-14;

/// Closed-form eigendecomposition. The eigenvector is taken from whichever
/// row of (J - lambda_plus I) is better conditioned, so it stays accurate as
/// j12 -> 0.
inline EigenPair eigen_2x2(const SymTensor2& t) noexcept {
    const double half_trace = 0.5 * (t.j11 + t.j22);
    const double half_diff = 0.5 * (t.j11 - t.j22);
    const double r = std::hypot(half_diff, t.j12);

    EigenPair e;
    e.lambda_plus = half_trace + r;
    e.lambda_minus = half_trace - r;
    if (4.0 * r * r < kIsotropicDiscriminant) return e;

    Vec2 v = half_diff >= 0.0 ? Vec2{half_diff + r, t.j12} : Vec2{t.j12, r - half_diff};
    const double len = std::hypot(v.x, v.y);
    e.theta_plus = {v.x / len, v.y / len};
    return e;
}

/// N = sqrt(lambda_plus + lambda_minus); negative round-off is clamped to 0.
inline double coherence_norm(double lambda_plus, double lambda_minus) noexcept {
    return std::sqrt(std::max(lambda_plus, 0.0) + std::max(lambda_minus, 0.0));
}

struct DiffusionWeights {
    double c = 0.5;
    double lambda_cap = std::numeric_limits<double>::infinity();

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("diffusion weight C must be > 0");
        if (!(lambda_cap >= c)) throw std::invalid_argument("lambda_cap must be >= C");
    }

    /// Weight across structures: C / sqrt(1 + N).
    double across(const EigenPair& e) const noexcept {
        return c / std::sqrt(1.0 + coherence_norm(e.lambda_plus, e.lambda_minus));
    }

    /// Weight along structures: C sqrt((1 + lambda_plus) / (1 + lambda_minus)), capped.
    double along(const EigenPair& e) const noexcept {
        const double lp = std::max(e.lambda_plus, 0.0);
        const double lm = std::max(e.lambda_minus, 0.0);
        return std::min(c * std::sqrt((1.0 + lp) / (1.0 + lm)), lambda_cap);
    }
};

/// D = lambda1 theta+ theta+^T + lambda2 theta- theta-^T for a single tensor.
inline SymTensor2 diffusion_tensor(const SymTensor2& j, const DiffusionWeights& w) noexcept {
    const EigenPair e = eigen_2x2(j);
    const double l1 = w.across(e);
    const double l2 = w.along(e);
    const Vec2 p = e.theta_plus;
    const Vec2 m = e.theta_minus();
    return {l1 * p.x * p.x + l2 * m.x * m.x, l1 * p.x * p.y + l2 * m.x * m.y, l1 * p.y * p.y + l2 * m.y * m.y};
}

inline TensorField diffusion_tensor(const TensorField& j, const DiffusionWeights& w) {
    w.validate();
    TensorField d(j.width(), j.height());
    parallel_rows(j.height(), [&](std::size_t y) {
        for (std::size_t x = 0; x < j.width(); ++x) d(x, y) = diffusion_tensor(j(x, y), w);
    });
    return d;
}

}  // namespace despeckle
