#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mse/maxscore.hpp"
#include "mse/simulation.hpp"

namespace mse {

enum class VariantKind { SingleStage, TwoStageOLS, TwoStageKernel };

/// One estimator column of the study: the infeasible single-stage
/// estimator, the two-stage estimator with an OLS first stage, or the
/// two-stage estimator with a kernel first stage at a given bandwidth
/// scale. Both two-stage variants trim by default; the single-stage
/// estimator keeps every observation unless overridden.
struct StudyVariant {
    VariantKind kind = VariantKind::SingleStage;
    std::optional<KernelSpec> kernel; // TwoStageKernel only
    std::optional<bool> trim_override;

    bool trimmed() const {
        return trim_override ? *trim_override
                             : kind != VariantKind::SingleStage;
    }
    std::optional<double> c() const {
        if (kernel) return kernel->bandwidth_scale;
        return std::nullopt;
    }
    /// Stable label, also folded into replication seeds:
    /// "single", "ols", "kernel2:<c>", "kernel8:<c>".
    std::string id() const;

    static StudyVariant single_stage();
    static StudyVariant two_stage_ols();
    static StudyVariant two_stage_kernel(const KernelSpec& spec);
};

struct StudyConfig {
    DgpConfig dgp;
    std::vector<Eigen::Index> sample_sizes;
    int reps = 1000;
    std::uint64_t master_seed = 1;
    std::vector<StudyVariant> variants;
    GridSpec grid = GridSpec::uniform(-5.0, 5.0, 5001);
    double trim_bound = 1.95;
    int threads = 0; // 0 = hardware concurrency
};

/// Five summary statistics of the beta2 estimates in one study cell, all
/// centered at the true beta2.
struct SummaryRow {
    std::string variant;
    Eigen::Index n = 0;
    std::optional<double> c;
    double bias = 0.0;
    double rmse = 0.0;
    double median = 0.0;
    double mean_ad = 0.0;
    double median_ad = 0.0;
    int reps_used = 0;
};

/// Empirical distribution of the scaled errors N^(1/3)(beta2_hat - beta2):
/// sorted values with cumulative fractions r/reps.
struct EdfCurve {
    std::string variant;
    Eigen::Index n = 0;
    std::optional<double> c;
    std::vector<double> values;
    std::vector<double> fractions;
};

struct StudyResult {
    std::vector<SummaryRow> rows;
    std::vector<EdfCurve> curves;
};

/// bias, RMSE, median (mean of the middle two for even counts), mean and
/// median absolute deviation about true_beta2. Fills only the statistics.
SummaryRow summarize(const std::vector<double>& estimates, double true_beta2);

EdfCurve edf_points(const std::vector<double>& estimates, double true_beta2,
                    Eigen::Index n);

/// Run every (variant, N) cell. Replication r of a cell draws its dataset
/// from seed derive_seed(master_seed, {fnv1a64(variant.id()), N, r}), so
/// results are bit-identical for any thread count. Failed replications are
/// dropped and reflected in reps_used; a cell where every replication
/// failed raises EstimationError.
StudyResult run_study(const StudyConfig& cfg);

} // namespace mse
