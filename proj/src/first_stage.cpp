#include "mse/first_stage.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "mse/errors.hpp"

namespace mse {

namespace {

constexpr double k_degenerate_den = 1e-10;

struct Subsample {
    Eigen::MatrixXd x; // n_j x q
    Eigen::MatrixXd y; // n_j x p
};

Subsample subsample_of(const Dataset& data, int j) {
    Subsample s;
    const Eigen::Index n_j = data.count_d(j);
    s.x.resize(n_j, data.q());
    s.y.resize(n_j, data.p());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        if (data.d(i) != j) continue;
        s.x.row(r) = data.x.row(i);
        s.y.row(r) = data.y.row(i);
        ++r;
    }
    return s;
}

std::optional<Eigen::VectorXd> nw_core(const Subsample& sub,
                                       const Eigen::VectorXd& x0,
                                       const KernelSpec& spec, double h,
                                       const Eigen::VectorXd& sigma) {
    Eigen::ArrayXd w = Eigen::ArrayXd::Ones(sub.x.rows());
    for (Eigen::Index c = 0; c < x0.size(); ++c) {
        const double inv = 1.0 / (sigma(c) * h);
        w *= eval_kernel((x0(c) - sub.x.col(c).array()) * inv, spec);
    }
    const double den = w.sum();
    if (std::abs(den) < k_degenerate_den) return std::nullopt;
    Eigen::VectorXd num = sub.y.transpose() * w.matrix();
    num /= den;
    return num;
}

// Per-subsample least squares of y on (1, x); throws on rank deficiency.
Eigen::MatrixXd ols_coefficients(const Subsample& sub, int j) {
    const Eigen::Index n_j = sub.x.rows();
    const Eigen::Index q = sub.x.cols();
    Eigen::MatrixXd design(n_j, 1 + q);
    design.col(0).setOnes();
    design.rightCols(q) = sub.x;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 1 + q)
        throw EstimationError("singular OLS design on the d=" +
                              std::to_string(j) + " subsample");
    return qr.solve(sub.y);
}

} // namespace

double conditional_std(const Dataset& data, int j, Eigen::Index coord) {
    if (coord < 0 || coord >= data.q())
        throw std::invalid_argument("conditional_std: coordinate out of range");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(data.n()));
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.d(i) == j) v.push_back(data.x(i, coord));
    if (v.size() < 2)
        throw EstimationError("conditional_std: d=" + std::to_string(j) +
                              " subsample has fewer than 2 observations");
    double mean = 0.0;
    for (double t : v) mean += t;
    mean /= static_cast<double>(v.size());
    double ssd = 0.0;
    for (double t : v) ssd += (t - mean) * (t - mean);
    const double var = ssd / static_cast<double>(v.size() - 1);
    if (var == 0.0)
        throw EstimationError("conditional_std: zero spread in x coordinate " +
                              std::to_string(coord) + " on the d=" +
                              std::to_string(j) + " subsample");
    return std::sqrt(var);
}

std::optional<Eigen::VectorXd> nw_estimate(const Dataset& data, int j,
                                           const Eigen::VectorXd& x0,
                                           const KernelSpec& spec, double h,
                                           const Eigen::VectorXd& sigma) {
    if (x0.size() != data.q())
        throw std::invalid_argument("nw_estimate: x0 dimension mismatch");
    if (sigma.size() != data.q() || !(sigma.minCoeff() > 0.0))
        throw std::invalid_argument("nw_estimate: sigma must be positive, one entry per x coordinate");
    if (!(h > 0.0)) throw std::invalid_argument("nw_estimate: h must be positive");
    if (!x0.allFinite()) throw std::invalid_argument("nw_estimate: x0 must be finite");
    const Subsample sub = subsample_of(data, j);
    if (sub.x.rows() == 0)
        throw EstimationError("nw_estimate: empty d=" + std::to_string(j) + " subsample");
    return nw_core(sub, x0, spec, h, sigma);
}

int trim_indicator(const Eigen::VectorXd& x, double bound) {
    if (!(bound > 0.0))
        throw std::invalid_argument("trim_indicator: bound must be positive");
    return (x.array().abs() <= bound).all() ? 1 : 0;
}

FirstStageFit fit_first_stage(const Dataset& data, const FirstStageConfig& cfg) {
    data.validate();
    if (data.count_d(0) == 0 || data.count_d(1) == 0)
        throw EstimationError("fit_first_stage: both choice subsamples must be nonempty");

    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const Eigen::Index q = data.q();

    FirstStageFit fit;
    fit.method = cfg.method;
    fit.tau.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        fit.tau(i) = cfg.trim_bound
                         ? trim_indicator(data.x.row(i).transpose(), *cfg.trim_bound)
                         : 1;

    const Subsample sub0 = subsample_of(data, 0);
    const Subsample sub1 = subsample_of(data, 1);

    if (cfg.method == FirstStageMethod::OLS) {
        const Eigen::MatrixXd coef0 = ols_coefficients(sub0, 0);
        const Eigen::MatrixXd coef1 = ols_coefficients(sub1, 1);
        const Eigen::MatrixXd dcoef = coef1 - coef0; // (1+q) x p

        Eigen::MatrixXd design(n, 1 + q);
        design.col(0).setOnes();
        design.rightCols(q) = data.x;
        fit.g_hat_at_obs = design * dcoef;

        fit.evaluator = [dcoef](const Eigen::VectorXd& x0) {
            Eigen::VectorXd v(1 + x0.size());
            v(0) = 1.0;
            v.tail(x0.size()) = x0;
            return Eigen::VectorXd(dcoef.transpose() * v);
        };
        return fit;
    }

    if (!cfg.kernel)
        throw std::invalid_argument("fit_first_stage: Kernel method requires a KernelSpec");
    const KernelSpec spec = *cfg.kernel;

    // Scale by the full-subsample conditional spread; bandwidth shrinks with
    // the total sample size.
    for (int j = 0; j < 2; ++j) {
        fit.sigma_hat[j].resize(q);
        for (Eigen::Index c = 0; c < q; ++c)
            fit.sigma_hat[j](c) = conditional_std(data, j, c);
    }
    const double h = bandwidth(spec.bandwidth_scale, n, spec.family);

    fit.g_hat_at_obs.resize(n, p);
    Eigen::Index degenerate_rows = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd x0 = data.x.row(i).transpose();
        const auto g1 = nw_core(sub1, x0, spec, h, fit.sigma_hat[1]);
        const auto g0 = nw_core(sub0, x0, spec, h, fit.sigma_hat[0]);
        if (g1 && g0) {
            fit.g_hat_at_obs.row(i) = (*g1 - *g0).transpose();
        } else {
            fit.g_hat_at_obs.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
            ++degenerate_rows;
            ++fit.degenerate_count;
            if (fit.tau(i) == 1) fit.tau(i) = 0;
        }
    }
    if (degenerate_rows == n)
        throw EstimationError("fit_first_stage: every observation point degenerated under the kernel");

    struct NwEvalState {
        Subsample sub0, sub1;
        KernelSpec spec;
        double h;
        Eigen::VectorXd sig0, sig1;
        Eigen::Index p;
    };
    auto st = std::make_shared<const NwEvalState>(
        NwEvalState{sub0, sub1, spec, h, fit.sigma_hat[0], fit.sigma_hat[1], p});
    fit.evaluator = [st](const Eigen::VectorXd& x0) -> Eigen::VectorXd {
        const auto g1 = nw_core(st->sub1, x0, st->spec, st->h, st->sig1);
        const auto g0 = nw_core(st->sub0, x0, st->spec, st->h, st->sig0);
        if (!g1 || !g0)
            return Eigen::VectorXd::Constant(st->p,
                                             std::numeric_limits<double>::quiet_NaN());
        return *g1 - *g0;
    };
    return fit;
}

} // namespace mse
