#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mse {

/// One sampled unit: binary choice d, post-choice outcome y, observed
/// utility covariates z, and conditioning variables x.
struct Observation {
    int d = 0;
    Eigen::VectorXd y;
    Eigen::VectorXd z;
    Eigen::VectorXd x;
};

/// Column-wise sample storage. Row i across (d, y, z, x) is observation i;
/// column counts carry the dimensions (p, k, q).
struct Dataset {
    Eigen::VectorXi d; // N, entries in {0,1}
    Eigen::MatrixXd y; // N x p
    Eigen::MatrixXd z; // N x k
    Eigen::MatrixXd x; // N x q

    Eigen::Index n() const { return d.size(); }
    Eigen::Index p() const { return y.cols(); }
    Eigen::Index k() const { return z.cols(); }
    Eigen::Index q() const { return x.cols(); }

    Eigen::Index count_d(int j) const;
    Observation observation(Eigen::Index i) const;
    Dataset rows(const std::vector<Eigen::Index>& idx) const;

    /// Throws std::invalid_argument on inconsistent row counts, empty
    /// sample, non-finite entries, or d outside {0,1}.
    void validate() const;
};

Dataset make_dataset(const std::vector<Observation>& obs);

} // namespace mse
