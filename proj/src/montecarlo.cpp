#include "mse/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mse/errors.hpp"
#include "mse/rng.hpp"

namespace mse {

namespace {

// Deterministic work split: slot i is always computed by the same code
// path; only the partitioning across threads varies.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string format_scale(double c) {
    std::ostringstream os;
    os << c;
    return os.str();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string StudyVariant::id() const {
    switch (kind) {
    case VariantKind::SingleStage: return "single";
    case VariantKind::TwoStageOLS: return "ols";
    case VariantKind::TwoStageKernel:
        return (kernel->family == KernelFamily::Gaussian2 ? "kernel2:" : "kernel8:") +
               format_scale(kernel->bandwidth_scale);
    }
    return "unknown";
}

StudyVariant StudyVariant::single_stage() { return StudyVariant{}; }

StudyVariant StudyVariant::two_stage_ols() {
    StudyVariant v;
    v.kind = VariantKind::TwoStageOLS;
    return v;
}

StudyVariant StudyVariant::two_stage_kernel(const KernelSpec& spec) {
    StudyVariant v;
    v.kind = VariantKind::TwoStageKernel;
    v.kernel = spec;
    return v;
}

SummaryRow summarize(const std::vector<double>& estimates, double true_beta2) {
    if (estimates.empty())
        throw std::invalid_argument("summarize: empty estimate list");
    const auto n = static_cast<double>(estimates.size());
    double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0;
    std::vector<double> abs_dev;
    abs_dev.reserve(estimates.size());
    for (double v : estimates) {
        const double e = v - true_beta2;
        sum += e;
        sum_sq += e * e;
        sum_abs += std::abs(e);
        abs_dev.push_back(std::abs(e));
    }
    SummaryRow row;
    row.bias = sum / n;
    row.rmse = std::sqrt(sum_sq / n);
    row.median = median_of(estimates);
    row.mean_ad = sum_abs / n;
    row.median_ad = median_of(abs_dev);
    row.reps_used = static_cast<int>(estimates.size());
    return row;
}

EdfCurve edf_points(const std::vector<double>& estimates, double true_beta2,
                    Eigen::Index n) {
    if (estimates.empty())
        throw std::invalid_argument("edf_points: empty estimate list");
    const double scale = std::cbrt(static_cast<double>(n));
    EdfCurve curve;
    curve.n = n;
    curve.values.reserve(estimates.size());
    for (double v : estimates) curve.values.push_back(scale * (v - true_beta2));
    std::sort(curve.values.begin(), curve.values.end());
    const auto reps = static_cast<double>(curve.values.size());
    curve.fractions.resize(curve.values.size());
    for (std::size_t r = 0; r < curve.values.size(); ++r)
        curve.fractions[r] = static_cast<double>(r + 1) / reps;
    return curve;
}

StudyResult run_study(const StudyConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("run_study: reps must be >= 1");
    if (cfg.sample_sizes.empty())
        throw std::invalid_argument("run_study: no sample sizes");
    if (cfg.variants.empty())
        throw std::invalid_argument("run_study: no variants");
    if (!(cfg.trim_bound > 0.0))
        throw std::invalid_argument("run_study: trim_bound must be positive");

    StudyResult result;
    for (const StudyVariant& variant : cfg.variants) {
        const std::uint64_t variant_hash = fnv1a64(variant.id());
        for (const Eigen::Index n : cfg.sample_sizes) {
            std::vector<std::optional<double>> slots(
                static_cast<std::size_t>(cfg.reps));
            parallel_for(cfg.reps, cfg.threads, [&](int rep) {
                const std::uint64_t seed = derive_seed(
                    cfg.master_seed,
                    {variant_hash, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(rep)});
                const Dataset data = draw_sample(cfg.dgp, n, seed);
                try {
                    MaxScoreEstimate est;
                    switch (variant.kind) {
                    case VariantKind::SingleStage: {
                        Eigen::MatrixXd g(n, 1);
                        for (Eigen::Index i = 0; i < n; ++i)
                            g(i, 0) = true_G(data.x(i, 0), cfg.dgp);
                        Eigen::VectorXi tau(n);
                        for (Eigen::Index i = 0; i < n; ++i)
                            tau(i) = variant.trimmed()
                                         ? trim_indicator(data.x.row(i).transpose(),
                                                          cfg.trim_bound)
                                         : 1;
                        est = single_stage_estimate(data, g, tau, cfg.grid);
                        break;
                    }
                    case VariantKind::TwoStageOLS:
                    case VariantKind::TwoStageKernel: {
                        FirstStageConfig fs;
                        fs.method = variant.kind == VariantKind::TwoStageOLS
                                        ? FirstStageMethod::OLS
                                        : FirstStageMethod::Kernel;
                        fs.kernel = variant.kernel;
                        if (variant.trimmed()) fs.trim_bound = cfg.trim_bound;
                        est = two_stage_estimate(data, fs, cfg.grid);
                        break;
                    }
                    }
                    // beta2 is the coefficient on G, the first entry of the
                    // b2 block inside btilde.
                    slots[static_cast<std::size_t>(rep)] =
                        est.estimate.btilde(data.k() - 1);
                } catch (const EstimationError&) {
                    slots[static_cast<std::size_t>(rep)] = std::nullopt;
                }
            });

            std::vector<double> estimates;
            estimates.reserve(slots.size());
            for (const auto& s : slots)
                if (s) estimates.push_back(*s);
            if (estimates.empty())
                throw EstimationError("run_study: every replication failed in cell " +
                                      variant.id() + ", N=" + std::to_string(n));

            SummaryRow row = summarize(estimates, cfg.dgp.beta2);
            row.variant = variant.id();
            row.n = n;
            row.c = variant.c();
            result.rows.push_back(std::move(row));

            EdfCurve curve = edf_points(estimates, cfg.dgp.beta2, n);
            curve.variant = variant.id();
            curve.c = variant.c();
            result.curves.push_back(std::move(curve));
        }
    }
    return result;
}

} // namespace mse
