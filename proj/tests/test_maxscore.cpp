#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mse/errors.hpp"
#include "mse/maxscore.hpp"
#include "mse/rng.hpp"
#include "mse/simulation.hpp"
#include "oracles.hpp"

using namespace mse;

namespace {

ScoreProblem random_problem(Rng& rng, Eigen::Index n, Eigen::Index cols,
                            double tau_one_share = 0.9) {
    Eigen::MatrixXd w(n, cols);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) w(i, c) = rng.normal();
    Eigen::VectorXi d(n), tau(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i) = rng.uniform_open01() < 0.5 ? 0 : 1;
        tau(i) = rng.uniform_open01() < tau_one_share ? 1 : 0;
    }
    return make_score_problem(std::move(w), std::move(d), std::move(tau));
}

bool same_points(const std::vector<ParameterPoint>& a,
                 const std::vector<ParameterPoint>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].b11 != b[i].b11) return false;
        if (!oracles::exact_equal(a[i].btilde, b[i].btilde)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("score hand enumeration") {
    Eigen::MatrixXd w(4, 1);
    w << 1.0, -1.0, 0.5, -0.5;
    Eigen::VectorXi d(4), tau(4);
    d << 1, 1, 0, 0;
    tau.setOnes();
    const ScoreProblem prob = make_score_problem(w, d, tau);
    const ParameterPoint plus{+1, Eigen::VectorXd{}};
    CHECK(score(prob, plus) == 0.0);

    // separable outcomes: the score attains the share of d = 1
    Eigen::VectorXi d_all(4);
    d_all << 1, 0, 1, 0;
    const ScoreProblem sep = make_score_problem(w, d_all, tau);
    CHECK(score(sep, plus) == doctest::Approx(0.5)); // indicators (1,0,1,0)

    Eigen::VectorXi ones = Eigen::VectorXi::Ones(4);
    Eigen::MatrixXd wp(4, 1);
    wp << 1.0, 2.0, 0.5, 3.0;
    const ScoreProblem all_pos = make_score_problem(wp, ones, tau);
    CHECK(score(all_pos, plus) == 1.0);

    // flipping d negates the score exactly
    Eigen::VectorXi flipped = Eigen::VectorXi::Ones(4) - d;
    const ScoreProblem neg = make_score_problem(w, flipped, tau);
    CHECK(score(neg, plus) == -score(prob, plus));
}

TEST_CASE("score respects tau and stays within the weighted bounds") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const ScoreProblem prob = random_problem(rng, 40, 2, 0.7);
        const double bound =
            static_cast<double>(prob.tau.sum()) / static_cast<double>(prob.w.rows());
        Eigen::VectorXd bt(1);
        bt << rng.normal() * 2.0;
        const ParameterPoint b{rng.uniform_open01() < 0.5 ? -1 : 1, bt};
        const double s = score(prob, b);
        CHECK(s <= bound + 1e-15);
        CHECK(s >= -bound - 1e-15);
    }
}

TEST_CASE("positive scale invariance of the indicator score") {
    Rng rng(202);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const ScoreProblem prob = random_problem(rng, 32, 2);
        const int b11 = rng.uniform_open01() < 0.5 ? -1 : 1;
        Eigen::VectorXd bt(1);
        bt << rng.normal() * 3.0;
        const std::int64_t base = score_numerator(prob, b11, bt);
        // power-of-two scalings commute exactly with every float operation
        for (const double lambda : {0.5, 2.0, 64.0}) {
            std::int64_t acc = 0;
            for (Eigen::Index i = 0; i < prob.w.rows(); ++i) {
                if (prob.tau(i) == 0) continue;
                double s = prob.w(i, 0) * (static_cast<double>(b11) * lambda);
                s += prob.w(i, 1) * (bt(0) * lambda);
                if (s > 0.0) acc += 2 * prob.d(i) - 1;
            }
            CHECK(acc == base);
            ++checked;
        }
        // non-power-of-two scaling; flips require an index within one ulp
        // of zero, which random data does not produce
        std::int64_t acc = 0;
        for (Eigen::Index i = 0; i < prob.w.rows(); ++i) {
            if (prob.tau(i) == 0) continue;
            double s = prob.w(i, 0) * (static_cast<double>(b11) * 3.7);
            s += prob.w(i, 1) * (bt(0) * 3.7);
            if (s > 0.0) acc += 2 * prob.d(i) - 1;
        }
        CHECK(acc == base);
    }
    CHECK(checked == 3000);
}

TEST_CASE("permutation invariance") {
    Rng rng(303);
    const GridSpec grid = GridSpec::uniform(-3.0, 3.0, 301);
    for (int trial = 0; trial < 50; ++trial) {
        const ScoreProblem prob = random_problem(rng, 25, 2);
        std::vector<Eigen::Index> perm(25);
        for (Eigen::Index i = 0; i < 25; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (Eigen::Index i = 24; i > 0; --i)
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
        Eigen::MatrixXd w2(25, 2);
        Eigen::VectorXi d2(25), tau2(25);
        for (Eigen::Index i = 0; i < 25; ++i) {
            w2.row(i) = prob.w.row(perm[static_cast<std::size_t>(i)]);
            d2(i) = prob.d(perm[static_cast<std::size_t>(i)]);
            tau2(i) = prob.tau(perm[static_cast<std::size_t>(i)]);
        }
        const ScoreProblem shuffled = make_score_problem(w2, d2, tau2);

        Eigen::VectorXd bt(1);
        bt << rng.normal();
        CHECK(score(prob, {1, bt}) == score(shuffled, {1, bt}));

        const MaxScoreEstimate a = maximize_score(prob, grid);
        const MaxScoreEstimate b = maximize_score(shuffled, grid);
        CHECK(a.score_value == b.score_value);
        CHECK(same_points(a.argmax_set, b.argmax_set));
    }
}

TEST_CASE("maximize_score equals the naive exhaustive scan") {
    Rng rng(404);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = static_cast<Eigen::Index>(4 + rng.below(60));
        const ScoreProblem prob = random_problem(rng, n, 2);
        const GridSpec grid = GridSpec::uniform(-4.0 + rng.uniform_open01(),
                                                2.0 + 3.0 * rng.uniform_open01(),
                                                1 + static_cast<int>(rng.below(120)));
        const MaxScoreEstimate fast = maximize_score(prob, grid);
        const MaxScoreEstimate naive = oracles::naive_grid_maximizer(prob, grid);
        CHECK(fast.score_value == naive.score_value);
        CHECK(fast.estimate.b11 == naive.estimate.b11);
        CHECK(oracles::exact_equal(fast.estimate.btilde, naive.estimate.btilde));
        CHECK(same_points(fast.argmax_set, naive.argmax_set));
    }
}

TEST_CASE("maximize_score matches the threshold-cell oracle") {
    Rng rng(505);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + rng.below(7)); // N <= 8
        const ScoreProblem prob = random_problem(rng, n, 2);
        const GridSpec grid =
            GridSpec::uniform(-3.0, 3.0, 101 + static_cast<int>(rng.below(100)));
        const MaxScoreEstimate fast = maximize_score(prob, grid);
        const MaxScoreEstimate oracle = oracles::cell_enumeration_maximizer(prob, grid);
        CHECK(fast.score_value == oracle.score_value);
        CHECK(fast.estimate.b11 == oracle.estimate.b11);
        CHECK(oracles::exact_equal(fast.estimate.btilde, oracle.estimate.btilde));
        CHECK(same_points(fast.argmax_set, oracle.argmax_set));
    }
}

TEST_CASE("multidimensional grids run through the exhaustive path") {
    Rng rng(606);
    const ScoreProblem prob = random_problem(rng, 30, 3);
    GridSpec grid;
    grid.axes = {GridAxis{-2.0, 2.0, 21}, GridAxis{-2.0, 2.0, 17}};
    const MaxScoreEstimate est = maximize_score(prob, grid);
    const MaxScoreEstimate naive = oracles::naive_grid_maximizer(prob, grid);
    CHECK(est.score_value == naive.score_value);
    CHECK(same_points(est.argmax_set, naive.argmax_set));
    // every argmax member attains the maximum exactly
    for (const ParameterPoint& b : est.argmax_set)
        CHECK(score(prob, b) == est.score_value);
}

TEST_CASE("separable data put the generating point in the argmax set") {
    Rng rng(707);
    const GridSpec grid = GridSpec::uniform(-2.0, 2.0, 81);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(10 + rng.below(40));
        Eigen::MatrixXd w(n, 2);
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i, 0) = rng.normal();
            w(i, 1) = rng.normal();
        }
        Eigen::VectorXd beta_t(1);
        beta_t << grid.axes[0].point(static_cast<int>(rng.below(81)));
        Eigen::VectorXi d(n), tau = Eigen::VectorXi::Ones(n);
        Eigen::Index positives = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d(i) = (w(i, 0) * 1.0 + w(i, 1) * beta_t(0) > 0.0) ? 1 : 0;
            positives += d(i);
        }
        const ScoreProblem prob = make_score_problem(w, d, tau);
        const MaxScoreEstimate est = maximize_score(prob, grid);
        CHECK(est.score_value ==
              static_cast<double>(positives) / static_cast<double>(n));
        const bool found = std::any_of(
            est.argmax_set.begin(), est.argmax_set.end(), [&](const ParameterPoint& b) {
                return b.b11 == 1 && oracles::exact_equal(b.btilde, beta_t);
            });
        CHECK(found);
    }
}

TEST_CASE("degenerate outcome vectors produce large argmax plateaus") {
    Rng rng(808);
    const Eigen::Index n = 50;
    Eigen::MatrixXd w(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, 0) = 0.5 + rng.uniform_open01(); // all positive
        w(i, 1) = 0.1 + rng.uniform_open01();
    }
    const ScoreProblem prob = make_score_problem(
        w, Eigen::VectorXi::Ones(n), Eigen::VectorXi::Ones(n));
    const GridSpec grid = GridSpec::uniform(-5.0, 5.0, 5001);
    const MaxScoreEstimate est = maximize_score(prob, grid);
    CHECK(est.score_value == 1.0);
    CHECK(est.argmax_set.size() >= 2500);
}

TEST_CASE("single point grids and ties prefer b11 = -1") {
    Eigen::MatrixXd w(2, 2);
    w << 1.0, 1.0, -1.0, 1.0;
    Eigen::VectorXi d(2), tau(2);
    d << 1, 1;
    tau << 1, 1;
    const ScoreProblem prob = make_score_problem(w, d, tau);
    const GridSpec grid = GridSpec::uniform(0.0, 0.0, 1);
    // at btilde = 0: b11=-1 classifies obs 2 (+1), b11=+1 classifies obs 1 (+1): tie
    const MaxScoreEstimate est = maximize_score(prob, grid);
    CHECK(est.argmax_set.size() == 2);
    CHECK(est.estimate.b11 == -1);
}

TEST_CASE("single-stage and two-stage agree when fed the same fit") {
    const DgpConfig cfg;
    const Dataset data = draw_sample(cfg, 400, 15);
    FirstStageConfig fs;
    fs.method = FirstStageMethod::OLS;
    fs.trim_bound = 1.95;
    const FirstStageFit fit = fit_first_stage(data, fs);
    const GridSpec grid = GridSpec::uniform(-5.0, 5.0, 1001);
    const MaxScoreEstimate direct =
        single_stage_estimate(data, fit.g_hat_at_obs, fit.tau, grid);
    const MaxScoreEstimate staged = two_stage_estimate(data, fs, grid);
    CHECK(direct.score_value == staged.score_value);
    CHECK(direct.estimate.b11 == staged.estimate.b11);
    CHECK(oracles::exact_equal(direct.estimate.btilde, staged.estimate.btilde));
    CHECK(same_points(direct.argmax_set, staged.argmax_set));
    CHECK(direct.n_effective == staged.n_effective);
}

TEST_CASE("input validation") {
    Rng rng(909);
    const ScoreProblem prob = random_problem(rng, 10, 2);
    GridSpec empty;
    CHECK_THROWS_AS(maximize_score(prob, empty), std::invalid_argument);
    GridSpec bad = GridSpec::uniform(1.0, -1.0, 5);
    CHECK_THROWS_AS(maximize_score(prob, bad), std::invalid_argument);
    GridSpec wrong_dim;
    wrong_dim.axes = {GridAxis{-1.0, 1.0, 3}, GridAxis{-1.0, 1.0, 3}};
    CHECK_THROWS_AS(maximize_score(prob, wrong_dim), std::invalid_argument);

    Eigen::MatrixXd w(2, 1);
    w << std::nan(""), 1.0;
    Eigen::VectorXi d(2), tau(2);
    d << 1, 0;
    tau << 1, 1;
    CHECK_THROWS_AS(make_score_problem(w, d, tau), std::invalid_argument);
    tau << 0, 1; // NaN row now ignored
    CHECK_NOTHROW(make_score_problem(w, d, tau));
}

TEST_CASE("subsampling interval construction") {
    const DgpConfig cfg;
    const Dataset data = draw_sample(cfg, 300, 41);
    FirstStageConfig fs;
    fs.method = FirstStageMethod::OLS;
    fs.trim_bound = 1.95;
    const GridSpec grid = GridSpec::uniform(-5.0, 5.0, 1001);

    CHECK_THROWS_AS(subsampling_ci(data, fs, grid, 1, 50, 0.9, 7), std::invalid_argument);
    CHECK_THROWS_AS(subsampling_ci(data, fs, grid, 300, 50, 0.9, 7), std::invalid_argument);
    CHECK_THROWS_AS(subsampling_ci(data, fs, grid, 45, 1, 0.9, 7), std::invalid_argument);

    const SubsamplingInterval ci = subsampling_ci(data, fs, grid, 45, 60, 0.9, 7);
    CHECK(ci.lower.size() == 1);
    CHECK(ci.lower(0) <= ci.upper(0));
    const MaxScoreEstimate full = two_stage_estimate(data, fs, grid);
    CHECK(oracles::exact_equal(ci.center.btilde, full.estimate.btilde));
    // the interval covers the point estimate iff the quantile spread brackets 0
    const bool brackets = ci.q_lower(0) <= 0.0 && ci.q_upper(0) >= 0.0;
    const bool contains =
        ci.lower(0) <= ci.center.btilde(0) && ci.center.btilde(0) <= ci.upper(0);
    CHECK(brackets == contains);

    // deterministic in the seed
    const SubsamplingInterval again = subsampling_ci(data, fs, grid, 45, 60, 0.9, 7);
    CHECK(oracles::exact_equal(ci.lower, again.lower));
    CHECK(oracles::exact_equal(ci.upper, again.upper));
    const SubsamplingInterval other = subsampling_ci(data, fs, grid, 45, 60, 0.9, 8);
    CHECK_FALSE(oracles::exact_equal(ci.lower, other.lower));
}

TEST_CASE("subsampling coverage on the linear design") {
    // empirical coverage of beta2 = 1 with N=1000, m = ceil(N^(2/3)) = 100,
    // B = 200, level 0.90, OLS first stage
    const DgpConfig cfg;
    FirstStageConfig fs;
    fs.method = FirstStageMethod::OLS;
    fs.trim_bound = 1.95;
    const GridSpec grid = GridSpec::uniform(-5.0, 5.0, 5001);
    const int mc_reps = 200;
    int covered = 0;
    for (int rep = 0; rep < mc_reps; ++rep) {
        const Dataset data = draw_sample(cfg, 1000, derive_seed(616, {static_cast<std::uint64_t>(rep)}));
        const SubsamplingInterval ci =
            subsampling_ci(data, fs, grid, 100, 200, 0.90,
                           derive_seed(617, {static_cast<std::uint64_t>(rep)}));
        if (ci.lower(0) <= 1.0 && 1.0 <= ci.upper(0)) ++covered;
    }
    const double coverage = static_cast<double>(covered) / mc_reps;
    CHECK(coverage >= 0.80);
    CHECK(coverage <= 0.97);
}
