#include "mse/maxscore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mse/errors.hpp"
#include "mse/rng.hpp"

namespace mse {

namespace {

void validate_problem_against_grid(const ScoreProblem& problem,
                                   const GridSpec& grid) {
    if (grid.axes.empty())
        throw std::invalid_argument("maximize_score: empty grid");
    for (const GridAxis& ax : grid.axes) {
        if (ax.count < 1)
            throw std::invalid_argument("grid axis must contain at least one point");
        if (!(ax.lower <= ax.upper))
            throw std::invalid_argument("grid axis requires lower <= upper");
    }
    if (problem.w.cols() != static_cast<Eigen::Index>(grid.axes.size()) + 1)
        throw std::invalid_argument(
            "grid dimension must equal the number of btilde coordinates");
}

struct ArgmaxTracker {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::vector<std::pair<int, std::int64_t>> hits; // (b11, flat grid index)

    void consider(int b11, std::int64_t flat, std::int64_t numerator) {
        if (numerator > best) {
            best = numerator;
            hits.clear();
        }
        if (numerator == best) hits.emplace_back(b11, flat);
    }
};

// One-dimensional btilde: the indicator of observation i flips at most once
// along the grid (the predicate a + w1*g is monotone in g and grid points
// are nondecreasing in the index), so a binary search with the exact same
// floating-point predicate as score_numerator locates the flip, and a
// difference array accumulates all grid scores at once.
void scan_axis_fast(const ScoreProblem& problem, const GridAxis& axis,
                    int b11, ArgmaxTracker& tracker) {
    const int count = axis.count;
    std::vector<std::int64_t> diff(static_cast<std::size_t>(count) + 1, 0);
    std::int64_t base = 0;

    for (Eigen::Index i = 0; i < problem.w.rows(); ++i) {
        if (problem.tau(i) == 0) continue;
        const std::int64_t c = 2 * problem.d(i) - 1;
        const double a = problem.w(i, 0) * static_cast<double>(b11);
        const double w1 = problem.w(i, 1);
        if (w1 == 0.0) {
            if (a > 0.0) base += c;
            continue;
        }
        if (w1 > 0.0) {
            // first index where the indicator turns on
            int lo = 0, hi = count;
            while (lo < hi) {
                const int mid = lo + (hi - lo) / 2;
                if (a + w1 * axis.point(mid) > 0.0) hi = mid;
                else lo = mid + 1;
            }
            if (lo < count) {
                diff[static_cast<std::size_t>(lo)] += c;
                diff[static_cast<std::size_t>(count)] -= c;
            }
        } else {
            // indicator on for a prefix; find its end
            int lo = 0, hi = count;
            while (lo < hi) {
                const int mid = lo + (hi - lo) / 2;
                if (a + w1 * axis.point(mid) > 0.0) lo = mid + 1;
                else hi = mid;
            }
            if (lo > 0) {
                diff[0] += c;
                diff[static_cast<std::size_t>(lo)] -= c;
            }
        }
    }

    std::int64_t acc = 0;
    for (int j = 0; j < count; ++j) {
        acc += diff[static_cast<std::size_t>(j)];
        tracker.consider(b11, j, base + acc);
    }
}

void scan_exhaustive(const ScoreProblem& problem, const GridSpec& grid,
                     int b11, ArgmaxTracker& tracker) {
    const auto dims = grid.axes.size();
    std::vector<int> idx(dims, 0);
    Eigen::VectorXd bt(static_cast<Eigen::Index>(dims));
    for (std::size_t c = 0; c < dims; ++c) bt(static_cast<Eigen::Index>(c)) = grid.axes[c].point(0);

    std::int64_t flat = 0;
    while (true) {
        tracker.consider(b11, flat, score_numerator(problem, b11, bt));
        // odometer step, last axis fastest (row-major flat order)
        std::size_t c = dims;
        while (c > 0) {
            --c;
            if (++idx[c] < grid.axes[c].count) {
                bt(static_cast<Eigen::Index>(c)) = grid.axes[c].point(idx[c]);
                break;
            }
            idx[c] = 0;
            bt(static_cast<Eigen::Index>(c)) = grid.axes[c].point(0);
            if (c == 0) return;
        }
        ++flat;
    }
}

} // namespace

ScoreProblem make_score_problem(Eigen::MatrixXd w, Eigen::VectorXi d,
                                Eigen::VectorXi tau) {
    const Eigen::Index n = w.rows();
    if (n < 1) throw std::invalid_argument("score problem must have at least one row");
    if (w.cols() < 1) throw std::invalid_argument("score problem needs at least one regressor");
    if (d.size() != n || tau.size() != n)
        throw std::invalid_argument("score problem dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d(i) != 0 && d(i) != 1)
            throw std::invalid_argument("outcomes d must be 0 or 1");
        if (tau(i) != 0 && tau(i) != 1)
            throw std::invalid_argument("weights tau must be 0 or 1");
        if (tau(i) == 1 && !w.row(i).allFinite())
            throw std::invalid_argument("rows with tau = 1 must be finite");
    }
    return ScoreProblem{std::move(w), std::move(d), std::move(tau)};
}

std::int64_t score_numerator(const ScoreProblem& problem, int b11,
                             const Eigen::VectorXd& btilde) {
    if (b11 != -1 && b11 != 1)
        throw std::invalid_argument("b11 must be -1 or +1");
    if (problem.w.cols() != btilde.size() + 1)
        throw std::invalid_argument("score: coefficient dimension mismatch");
    const Eigen::Index n = problem.w.rows();
    std::int64_t acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (problem.tau(i) == 0) continue;
        double s = problem.w(i, 0) * static_cast<double>(b11);
        for (Eigen::Index c = 1; c < problem.w.cols(); ++c)
            s += problem.w(i, c) * btilde(c - 1);
        if (s > 0.0) acc += 2 * problem.d(i) - 1;
    }
    return acc;
}

double score(const ScoreProblem& problem, const ParameterPoint& b) {
    return static_cast<double>(score_numerator(problem, b.b11, b.btilde)) /
           static_cast<double>(problem.w.rows());
}

std::int64_t GridSpec::total_points() const {
    std::int64_t total = 1;
    for (const GridAxis& ax : axes) total *= ax.count;
    return total;
}

Eigen::VectorXd GridSpec::point_at(std::int64_t flat) const {
    Eigen::VectorXd bt(static_cast<Eigen::Index>(axes.size()));
    for (std::size_t c = axes.size(); c-- > 0;) {
        const auto count = static_cast<std::int64_t>(axes[c].count);
        bt(static_cast<Eigen::Index>(c)) = axes[c].point(static_cast<int>(flat % count));
        flat /= count;
    }
    return bt;
}

GridSpec GridSpec::uniform(double lower, double upper, int count,
                           std::size_t dims) {
    GridSpec grid;
    grid.axes.assign(dims, GridAxis{lower, upper, count});
    return grid;
}

MaxScoreEstimate maximize_score(const ScoreProblem& problem,
                                const GridSpec& grid) {
    validate_problem_against_grid(problem, grid);

    ArgmaxTracker tracker;
    for (const int b11 : {-1, +1}) {
        if (grid.axes.size() == 1)
            scan_axis_fast(problem, grid.axes[0], b11, tracker);
        else
            scan_exhaustive(problem, grid, b11, tracker);
    }

    MaxScoreEstimate out;
    out.score_value = static_cast<double>(tracker.best) /
                      static_cast<double>(problem.w.rows());
    out.n_effective = problem.tau.cast<Eigen::Index>().sum();
    out.argmax_set.reserve(tracker.hits.size());
    for (const auto& [b11, flat] : tracker.hits)
        out.argmax_set.push_back(ParameterPoint{b11, grid.point_at(flat)});
    out.estimate = out.argmax_set.front();
    return out;
}

MaxScoreEstimate single_stage_estimate(const Dataset& data,
                                       const Eigen::MatrixXd& g_at_obs,
                                       const Eigen::VectorXi& tau,
                                       const GridSpec& grid) {
    if (g_at_obs.rows() != data.n() || g_at_obs.cols() != data.p())
        throw std::invalid_argument("single_stage_estimate: G matrix must be N x p");
    Eigen::MatrixXd w(data.n(), data.k() + data.p());
    w.leftCols(data.k()) = data.z;
    w.rightCols(data.p()) = g_at_obs;
    return maximize_score(make_score_problem(std::move(w), data.d, tau), grid);
}

MaxScoreEstimate two_stage_estimate(const Dataset& data,
                                    const FirstStageConfig& fs_cfg,
                                    const GridSpec& grid) {
    const FirstStageFit fit = fit_first_stage(data, fs_cfg);
    Eigen::MatrixXd w(data.n(), data.k() + data.p());
    w.leftCols(data.k()) = data.z;
    w.rightCols(data.p()) = fit.g_hat_at_obs;
    return maximize_score(make_score_problem(std::move(w), data.d, fit.tau), grid);
}

SubsamplingInterval subsampling_ci(const Dataset& data,
                                   const FirstStageConfig& fs_cfg,
                                   const GridSpec& grid, int m, int b_count,
                                   double level, std::uint64_t seed) {
    const Eigen::Index n = data.n();
    if (!(m > 1 && m < n))
        throw std::invalid_argument("subsampling_ci: require 1 < m < N");
    if (b_count < 2)
        throw std::invalid_argument("subsampling_ci: require B >= 2");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("subsampling_ci: level must lie in (0,1)");

    const MaxScoreEstimate full = two_stage_estimate(data, fs_cfg, grid);
    const Eigen::Index dim = full.estimate.btilde.size();
    const double scale_m = std::cbrt(static_cast<double>(m));
    const double scale_n = std::cbrt(static_cast<double>(n));

    Eigen::MatrixXd deviations(b_count, dim);
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
    for (int b = 0; b < b_count; ++b) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(b)}));
        for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < m; ++i) {
            const auto j = static_cast<Eigen::Index>(
                i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - i))));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        const Dataset sub = data.rows(
            std::vector<Eigen::Index>(pool.begin(), pool.begin() + m));
        const MaxScoreEstimate est = two_stage_estimate(sub, fs_cfg, grid);
        deviations.row(b) =
            (scale_m * (est.estimate.btilde - full.estimate.btilde)).transpose();
    }

    const double alpha = 1.0 - level;
    // order-statistic quantile: the ceil(p*B)-th smallest value
    const auto quantile = [b_count](Eigen::VectorXd v, double prob) {
        std::sort(v.begin(), v.end());
        auto r = static_cast<Eigen::Index>(
            std::ceil(prob * static_cast<double>(b_count))) - 1;
        r = std::clamp<Eigen::Index>(r, 0, b_count - 1);
        return v(r);
    };

    SubsamplingInterval out;
    out.center = full.estimate;
    out.q_lower.resize(dim);
    out.q_upper.resize(dim);
    out.lower.resize(dim);
    out.upper.resize(dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        out.q_lower(c) = quantile(deviations.col(c), alpha / 2.0);
        out.q_upper(c) = quantile(deviations.col(c), 1.0 - alpha / 2.0);
        out.lower(c) = full.estimate.btilde(c) - out.q_upper(c) / scale_n;
        out.upper(c) = full.estimate.btilde(c) - out.q_lower(c) / scale_n;
    }
    out.m = m;
    out.b_count = b_count;
    out.level = level;
    return out;
}

} // namespace mse
