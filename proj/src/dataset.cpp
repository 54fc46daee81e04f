#include "mse/dataset.hpp"

#include <stdexcept>

namespace mse {

Eigen::Index Dataset::count_d(int j) const {
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d(i) == j) ++c;
    return c;
}

Observation Dataset::observation(Eigen::Index i) const {
    return Observation{d(i), y.row(i).transpose(), z.row(i).transpose(),
                       x.row(i).transpose()};
}

Dataset Dataset::rows(const std::vector<Eigen::Index>& idx) const {
    Dataset out;
    const auto m = static_cast<Eigen::Index>(idx.size());
    out.d.resize(m);
    out.y.resize(m, y.cols());
    out.z.resize(m, z.cols());
    out.x.resize(m, x.cols());
    for (Eigen::Index r = 0; r < m; ++r) {
        out.d(r) = d(idx[r]);
        out.y.row(r) = y.row(idx[r]);
        out.z.row(r) = z.row(idx[r]);
        out.x.row(r) = x.row(idx[r]);
    }
    return out;
}

void Dataset::validate() const {
    const Eigen::Index rows = d.size();
    if (rows < 1) throw std::invalid_argument("dataset must contain at least one observation");
    if (y.rows() != rows || z.rows() != rows || x.rows() != rows)
        throw std::invalid_argument("dataset blocks have inconsistent row counts");
    if (y.cols() < 1 || z.cols() < 1 || x.cols() < 1)
        throw std::invalid_argument("dataset dimensions (k, p, q) must all be at least 1");
    if (!y.allFinite() || !z.allFinite() || !x.allFinite())
        throw std::invalid_argument("dataset contains non-finite values");
    for (Eigen::Index i = 0; i < rows; ++i)
        if (d(i) != 0 && d(i) != 1)
            throw std::invalid_argument("choice indicator d must be 0 or 1");
}

Dataset make_dataset(const std::vector<Observation>& obs) {
    if (obs.empty())
        throw std::invalid_argument("dataset must contain at least one observation");
    const auto n = static_cast<Eigen::Index>(obs.size());
    Dataset out;
    out.d.resize(n);
    out.y.resize(n, obs[0].y.size());
    out.z.resize(n, obs[0].z.size());
    out.x.resize(n, obs[0].x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Observation& o = obs[static_cast<std::size_t>(i)];
        if (o.y.size() != out.y.cols() || o.z.size() != out.z.cols() ||
            o.x.size() != out.x.cols())
            throw std::invalid_argument("observations have inconsistent dimensions");
        out.d(i) = o.d;
        out.y.row(i) = o.y.transpose();
        out.z.row(i) = o.z.transpose();
        out.x.row(i) = o.x.transpose();
    }
    out.validate();
    return out;
}

} // namespace mse
