#pragma once

#include <cstdint>
#include <vector>

#include "mse/dataset.hpp"
#include "mse/first_stage.hpp"

namespace mse {

/// Scale-normalized coefficient point: the first coefficient is pinned to
/// -1 or +1; btilde holds the remaining k+p-1 coefficients.
struct ParameterPoint {
    int b11 = 1; // -1 or +1
    Eigen::VectorXd btilde;
};

/// Inputs of the sample score: rows w_i = (z_i, G_i), binary outcomes, and
/// fixed 0/1 weights. Rows with tau = 1 must be finite; tau = 0 rows are
/// never touched. Immutable after construction.
struct ScoreProblem {
    Eigen::MatrixXd w;  // N x (k+p)
    Eigen::VectorXi d;  // N, entries in {0,1}
    Eigen::VectorXi tau; // N, entries in {0,1}
};

ScoreProblem make_score_problem(Eigen::MatrixXd w, Eigen::VectorXi d,
                                Eigen::VectorXi tau);

/// Evenly spaced candidate values per btilde coordinate:
/// lower + j * (upper - lower) / (count - 1), j = 0..count-1.
struct GridAxis {
    double lower = 0.0;
    double upper = 0.0;
    int count = 1;
    double point(int j) const {
        return count == 1 ? lower
                          : lower + static_cast<double>(j) *
                                        ((upper - lower) / (count - 1));
    }
};

struct GridSpec {
    std::vector<GridAxis> axes;
    std::int64_t total_points() const;
    /// Decode a row-major flat index (first axis most significant).
    Eigen::VectorXd point_at(std::int64_t flat) const;

    static GridSpec uniform(double lower, double upper, int count,
                            std::size_t dims = 1);
};

struct MaxScoreEstimate {
    ParameterPoint estimate;  // first maximizer in scan order
    double score_value = 0.0;
    std::vector<ParameterPoint> argmax_set; // every grid maximizer
    Eigen::Index n_effective = 0;           // observations with tau = 1
};

/// Sample score (1/N) sum_i tau_i (2 d_i - 1) 1{ w_i'b > 0 }. The indicator
/// is strict, so ties w_i'b = 0 contribute zero. The sum is accumulated as
/// an integer, making values exact multiples of 1/N.
double score(const ScoreProblem& problem, const ParameterPoint& b);

/// N * score as an integer, for exact comparisons. The index w_i'b is
/// accumulated left to right: w(i,0)*b11 first, then the btilde terms.
std::int64_t score_numerator(const ScoreProblem& problem, int b11,
                             const Eigen::VectorXd& btilde);

/// Exhaustive maximization over {-1,+1} x grid. Scan order is b11 = -1
/// before +1, then lexicographic over grid indices; `estimate` is the first
/// maximizer encountered and argmax_set lists all of them. For a
/// one-dimensional btilde the scan is evaluated by per-observation binary
/// search over the grid, which reproduces the naive point-by-point scan
/// exactly (same floating-point predicate, integer accumulation).
MaxScoreEstimate maximize_score(const ScoreProblem& problem,
                                const GridSpec& grid);

/// Maximum score with known first-stage input: w_i = (z_i, G_i) from the
/// supplied N x p matrix of G values.
MaxScoreEstimate single_stage_estimate(const Dataset& data,
                                       const Eigen::MatrixXd& g_at_obs,
                                       const Eigen::VectorXi& tau,
                                       const GridSpec& grid);

/// Two-stage estimator: fit the first stage, form w_i = (z_i, Ghat(x_i))
/// with the fit's trimming weights, and maximize the score.
MaxScoreEstimate two_stage_estimate(const Dataset& data,
                                    const FirstStageConfig& fs_cfg,
                                    const GridSpec& grid);

/// Per-coordinate confidence interval for btilde from subsampling:
/// [ center - N^(-1/3) q_upper, center - N^(-1/3) q_lower ], where the
/// quantiles are order statistics of m^(1/3)(btilde*_b - btilde) over B
/// subsamples of size m drawn without replacement.
struct SubsamplingInterval {
    ParameterPoint center;     // full-sample two-stage estimate
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd q_lower;   // level/2-tail quantiles of the scaled deviations
    Eigen::VectorXd q_upper;
    int m = 0;
    int b_count = 0;
    double level = 0.0;
};

/// Subsample b uses the stream derive_seed(seed, {b}); indices come from a
/// partial Fisher-Yates pass. Requires 1 < m < N and B >= 2.
SubsamplingInterval subsampling_ci(const Dataset& data,
                                   const FirstStageConfig& fs_cfg,
                                   const GridSpec& grid, int m, int b_count,
                                   double level, std::uint64_t seed);

} // namespace mse
