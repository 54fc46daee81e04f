#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace mse {

enum class KernelFamily { Gaussian2, MultiGauss8 };

/// Smoothing kernel configuration for the first-stage regression.
///
/// Gaussian2 is the standard second-order Gaussian kernel with bandwidth
/// h = c * N^(-1/5). MultiGauss8 is an eighth-order signed mixture of four
/// Gaussians,
///
///     K(u) = sum_s a_s / b_s * exp(-u^2 / (2 b_s^2)),
///
/// whose mixture weights satisfy sum_s a_s = 1 and sum_s a_s b_s^(2l) = 0
/// for l in {1,2,3}, so that moments up to order 7 vanish; its bandwidth is
/// h = c * N^(-19/360). The weights are solved in closed form at
/// construction (see solve_eighth_order_coefficients).
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian2;
    Eigen::Vector4d a = Eigen::Vector4d::Zero(); // MultiGauss8 only
    Eigen::Vector4d b = Eigen::Vector4d::Zero(); // MultiGauss8 only, all > 0
    double bandwidth_scale = 1.0;                // c > 0
    double rate_exponent = 0.2;                  // r > 0

    static KernelSpec gaussian2(double c);
    /// Default scale mixture b_s = s^(-1/2), s = 1..4.
    static KernelSpec multi_gauss8(double c);
    static KernelSpec multi_gauss8(double c, const Eigen::Vector4d& b);
};

/// Mixture weights a solving sum a_s = 1, sum a_s b_s^(2l) = 0, l = 1,2,3.
/// The constraints form a Vandermonde system in the nodes x_s = b_s^2, so a
/// is computed exactly as the Lagrange basis evaluated at 0:
/// a_s = prod_{t != s} (0 - x_t) / (x_s - x_t).
/// Throws if two nodes coincide (singular system).
Eigen::Vector4d solve_eighth_order_coefficients(const Eigen::Vector4d& b);

/// (2*pi)^(-1/2) * exp(-u^2/2). Zero for |u| > 40 (underflow guard).
double eval_gaussian2(double u);

/// Eighth-order mixture kernel; may be negative. Zero for |u| > 40.
double eval_kernel8(double u, const KernelSpec& spec);

/// Dispatch on spec.family.
double eval_kernel(double u, const KernelSpec& spec);

/// Elementwise kernel weights; the single evaluation path used by the
/// first-stage regression.
Eigen::ArrayXd eval_kernel(const Eigen::ArrayXd& u, const KernelSpec& spec);

/// Deterministic bandwidth h = c * N^(-r) with the family's rate exponent.
double bandwidth(double c, std::int64_t n, KernelFamily family);

} // namespace mse
