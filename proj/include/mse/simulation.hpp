#pragma once

#include <cstdint>

#include "mse/dataset.hpp"

namespace mse {

enum class Design { Linear, Nonlinear };

/// Synthetic binary-choice design with scalar z, x, y (k = p = q = 1).
///
/// Draws follow
///   z ~ Logistic(0,1),  x ~ N(0,1),
///   eps = error_scale * eta * sqrt(1 + z^2 + x^2),  eta ~ N(0,1),
///   d = 1{ z*beta1 + G(x)*beta2 > eps },
///   y = d*(g01 + g11*m(x) + u1) + (1-d)*(g00 + g10*m(x) + u0),
/// where G(x) = g01 - g00 + (g11 - g10)*m(x) and (u1, u0) is bivariate
/// normal with standard deviation sigma_u and correlation rho.
struct DgpConfig {
    double beta1 = 1.0;
    double beta2 = 1.0;
    double g01 = 0.2;
    double g11 = 0.1;
    double g00 = 0.1;
    double g10 = 0.4;
    double rho = -0.8;     // correlation of (u1, u0), |rho| < 1
    double sigma_u = 0.33; // >= 0
    double error_scale = 0.25;
    Design design = Design::Linear;
};

/// Latent variables of a draw, exposed for diagnostics and tests.
struct LatentDraws {
    Eigen::VectorXd eps;
    Eigen::VectorXd u1;
    Eigen::VectorXd u0;
};

/// m(x): identity under the linear design, x^2 * atan(x) otherwise.
double m_function(double x, Design design);

/// Difference of conditional outcome means implied by the design.
double true_G(double x, const DgpConfig& cfg);

/// Seed-reproducible sample of size n. Each observation consumes exactly
/// five uniforms from one mt19937_64 stream, in the order
/// (z, x, eta, u1-driver, u0-driver); normals are produced by the inverse
/// CDF and (u1, u0) = sigma_u * L * (n1, n2) with L = [[1, 0],
/// [rho, sqrt(1 - rho^2)]]. Identical seeds give bit-identical datasets.
Dataset draw_sample(const DgpConfig& cfg, Eigen::Index n, std::uint64_t seed,
                    LatentDraws* latent = nullptr);

} // namespace mse
