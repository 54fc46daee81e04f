#include "mse/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace mse {

namespace {

constexpr double k_inv_sqrt_2pi = 0.39894228040143267794;
constexpr double k_support_cut = 40.0;

void require_finite(double u) {
    if (!std::isfinite(u))
        throw std::invalid_argument("kernel argument must be finite");
}

void validate_spec(const KernelSpec& spec) {
    if (!(spec.bandwidth_scale > 0.0))
        throw std::invalid_argument("bandwidth scale c must be positive");
    if (!(spec.rate_exponent > 0.0))
        throw std::invalid_argument("bandwidth rate exponent must be positive");
    if (spec.family == KernelFamily::MultiGauss8) {
        if (!(spec.b.minCoeff() > 0.0))
            throw std::invalid_argument("mixture scales b must be positive");
        const double r0 = std::abs(spec.a.sum() - 1.0);
        double worst = r0;
        for (int l = 1; l <= 3; ++l) {
            const Eigen::Array4d pw = spec.b.array().pow(2 * l);
            worst = std::max(worst, std::abs((spec.a.array() * pw).sum()));
        }
        if (!(worst < 1e-12))
            throw std::invalid_argument(
                "mixture weights violate the moment constraints");
    }
}

} // namespace

KernelSpec KernelSpec::gaussian2(double c) {
    KernelSpec spec;
    spec.family = KernelFamily::Gaussian2;
    spec.bandwidth_scale = c;
    spec.rate_exponent = 1.0 / 5.0;
    validate_spec(spec);
    return spec;
}

KernelSpec KernelSpec::multi_gauss8(double c) {
    Eigen::Vector4d b;
    for (int s = 0; s < 4; ++s) b(s) = 1.0 / std::sqrt(double(s + 1));
    return multi_gauss8(c, b);
}

KernelSpec KernelSpec::multi_gauss8(double c, const Eigen::Vector4d& b) {
    KernelSpec spec;
    spec.family = KernelFamily::MultiGauss8;
    spec.b = b;
    spec.a = solve_eighth_order_coefficients(b);
    spec.bandwidth_scale = c;
    spec.rate_exponent = 19.0 / 360.0;
    validate_spec(spec);
    return spec;
}

Eigen::Vector4d solve_eighth_order_coefficients(const Eigen::Vector4d& b) {
    if (!(b.minCoeff() > 0.0) || !b.allFinite())
        throw std::invalid_argument("mixture scales b must be positive and finite");
    const Eigen::Vector4d x = b.array().square();
    for (int s = 0; s < 4; ++s)
        for (int t = s + 1; t < 4; ++t)
            if (x(s) == x(t))
                throw std::invalid_argument(
                    "duplicate b^2 values make the moment system singular");
    Eigen::Vector4d a;
    for (int s = 0; s < 4; ++s) {
        double prod = 1.0;
        for (int t = 0; t < 4; ++t) {
            if (t == s) continue;
            prod *= (0.0 - x(t)) / (x(s) - x(t));
        }
        a(s) = prod;
    }
    return a;
}

double eval_gaussian2(double u) {
    require_finite(u);
    if (std::abs(u) > k_support_cut) return 0.0;
    return k_inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

double eval_kernel8(double u, const KernelSpec& spec) {
    require_finite(u);
    if (spec.family != KernelFamily::MultiGauss8)
        throw std::invalid_argument("eval_kernel8 requires a MultiGauss8 spec");
    if (std::abs(u) > k_support_cut) return 0.0;
    double acc = 0.0;
    for (int s = 0; s < 4; ++s)
        acc += spec.a(s) / spec.b(s) * std::exp(-u * u / (2.0 * spec.b(s) * spec.b(s)));
    return acc;
}

double eval_kernel(double u, const KernelSpec& spec) {
    return spec.family == KernelFamily::Gaussian2 ? eval_gaussian2(u)
                                                  : eval_kernel8(u, spec);
}

Eigen::ArrayXd eval_kernel(const Eigen::ArrayXd& u, const KernelSpec& spec) {
    if (!u.allFinite())
        throw std::invalid_argument("kernel argument must be finite");
    Eigen::ArrayXd w;
    if (spec.family == KernelFamily::Gaussian2) {
        w = k_inv_sqrt_2pi * (-0.5 * u.square()).exp();
    } else {
        const Eigen::ArrayXd u2 = u.square();
        w = Eigen::ArrayXd::Zero(u.size());
        for (int s = 0; s < 4; ++s)
            w += (spec.a(s) / spec.b(s)) *
                 (u2 * (-1.0 / (2.0 * spec.b(s) * spec.b(s)))).exp();
    }
    return (u.abs() > k_support_cut).select(0.0, w);
}

double bandwidth(double c, std::int64_t n, KernelFamily family) {
    if (!(c > 0.0)) throw std::invalid_argument("bandwidth scale c must be positive");
    if (n < 1) throw std::invalid_argument("sample size must be at least 1");
    const double r =
        family == KernelFamily::Gaussian2 ? 1.0 / 5.0 : 19.0 / 360.0;
    return c * std::pow(static_cast<double>(n), -r);
}

} // namespace mse
