#include "mse/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "mse/rng.hpp"

namespace mse {

namespace {

void validate_cfg(const DgpConfig& cfg) {
    if (!(std::abs(cfg.rho) < 1.0))
        throw std::invalid_argument("dgp: |rho| must be below 1");
    if (!(cfg.sigma_u >= 0.0))
        throw std::invalid_argument("dgp: sigma_u must be nonnegative");
}

} // namespace

double m_function(double x, Design design) {
    if (!std::isfinite(x))
        throw std::invalid_argument("m_function: x must be finite");
    return design == Design::Linear ? x : x * x * std::atan(x);
}

double true_G(double x, const DgpConfig& cfg) {
    return cfg.g01 - cfg.g00 + (cfg.g11 - cfg.g10) * m_function(x, cfg.design);
}

Dataset draw_sample(const DgpConfig& cfg, Eigen::Index n, std::uint64_t seed,
                    LatentDraws* latent) {
    validate_cfg(cfg);
    if (n < 1) throw std::invalid_argument("draw_sample: n must be at least 1");

    Rng rng(seed);
    Dataset data;
    data.d.resize(n);
    data.y.resize(n, 1);
    data.z.resize(n, 1);
    data.x.resize(n, 1);
    if (latent) {
        latent->eps.resize(n);
        latent->u1.resize(n);
        latent->u0.resize(n);
    }

    const double corr_tail = std::sqrt(1.0 - cfg.rho * cfg.rho);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = rng.logistic();
        const double x = rng.normal();
        const double eta = rng.normal();
        const double n1 = rng.normal();
        const double n2 = rng.normal();

        const double u1 = cfg.sigma_u * n1;
        const double u0 = cfg.sigma_u * (cfg.rho * n1 + corr_tail * n2);
        const double eps = cfg.error_scale * eta * std::sqrt(1.0 + z * z + x * x);
        const double m = m_function(x, cfg.design);
        const double g = cfg.g01 - cfg.g00 + (cfg.g11 - cfg.g10) * m;
        const int d = (z * cfg.beta1 + g * cfg.beta2 > eps) ? 1 : 0;
        const double y = d ? cfg.g01 + cfg.g11 * m + u1
                           : cfg.g00 + cfg.g10 * m + u0;

        data.d(i) = d;
        data.y(i, 0) = y;
        data.z(i, 0) = z;
        data.x(i, 0) = x;
        if (latent) {
            latent->eps(i) = eps;
            latent->u1(i) = u1;
            latent->u0(i) = u0;
        }
    }
    return data;
}

} // namespace mse
