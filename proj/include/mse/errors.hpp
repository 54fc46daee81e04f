#pragma once

#include <stdexcept>
#include <string>

namespace mse {

/// Estimation could not be carried out on the given data (degenerate
/// subsample, singular design, every point trimmed away, ...). Distinct
/// from std::invalid_argument, which flags contract violations.
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mse
