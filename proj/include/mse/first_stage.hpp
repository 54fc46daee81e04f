#pragma once

#include <functional>
#include <optional>

#include "mse/dataset.hpp"
#include "mse/kernels.hpp"

namespace mse {

enum class FirstStageMethod { OLS, Kernel };

struct FirstStageConfig {
    FirstStageMethod method = FirstStageMethod::OLS;
    /// Required for the Kernel method; ignored by OLS.
    std::optional<KernelSpec> kernel;
    /// When set, tau_i = 1{ |x_ic| <= trim_bound for every coordinate c };
    /// when absent every observation keeps weight 1.
    std::optional<double> trim_bound;
};

/// Fitted difference of conditional outcome means
/// G(x) = E(y | x, d=1) - E(y | x, d=0), with per-observation values,
/// an evaluator for arbitrary x, and trimming weights. Immutable once
/// returned; safe to share across threads.
struct FirstStageFit {
    FirstStageMethod method = FirstStageMethod::OLS;
    Eigen::MatrixXd g_hat_at_obs; // N x p; finite wherever tau = 1
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> evaluator;
    Eigen::VectorXi tau;          // N, entries in {0,1}
    /// Per-subsample conditional standard deviations of x (Kernel only);
    /// sigma_hat[j] has one entry per x coordinate.
    std::array<Eigen::VectorXd, 2> sigma_hat;
    /// Observation points whose kernel denominator degenerated.
    int degenerate_count = 0;
};

/// Sample standard deviation (divisor n_j - 1) of x coordinate `coord`
/// over the d = j subsample. Throws EstimationError when the subsample has
/// fewer than two observations or zero spread.
double conditional_std(const Dataset& data, int j, Eigen::Index coord);

/// Nadaraya-Watson estimate of E(y | x = x0, d = j),
///
///   sum_i y_i K(u_i) 1{d_i=j} / sum_i K(u_i) 1{d_i=j},
///   u_ic = (x0_c - x_ic) / (sigma_c * h),
///
/// with a product kernel across x coordinates. Returns nullopt when
/// |denominator| < 1e-10; the caller decides the trimming fallback.
std::optional<Eigen::VectorXd> nw_estimate(const Dataset& data, int j,
                                           const Eigen::VectorXd& x0,
                                           const KernelSpec& spec, double h,
                                           const Eigen::VectorXd& sigma);

/// Fit G on both subsamples. The OLS branch regresses y on (1, x) within
/// each subsample; the Kernel branch runs nw_estimate with sigma_hat from
/// the full (untrimmed) subsamples and h = c * N^(-r) computed from the
/// total sample size. Kernel-degenerate observation points get tau = 0 and
/// are counted in degenerate_count. Deterministic.
FirstStageFit fit_first_stage(const Dataset& data, const FirstStageConfig& cfg);

/// 1 iff every coordinate satisfies |x_c| <= bound (inclusive).
int trim_indicator(const Eigen::VectorXd& x, double bound);

} // namespace mse
