#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mse {

/// SplitMix64 finalizer; bijective mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a hash of a byte string, for folding labels into seeds.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Fold an ordered list of fields into a single stream seed.
/// derive_seed(m, {a, b}) != derive_seed(m, {b, a}) for a != b.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> fields) noexcept;

/// Quantile of the standard normal distribution (Wichura's AS 241,
/// double-precision branch). Requires p in (0, 1).
double inverse_normal_cdf(double p);

/// Seedable random stream. The engine is std::mt19937_64, whose output
/// sequence is pinned by the standard, and all variate transforms are
/// implemented here so that a seed maps to the same draws everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1): ((u >> 11) + 0.5) * 2^-53.
    double uniform_open01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the inverse CDF; consumes one u64.
    double normal() { return inverse_normal_cdf(uniform_open01()); }

    /// Standard logistic (location 0, scale 1) via the quantile transform;
    /// consumes one u64.
    double logistic();

    /// Uniform integer in [0, n); unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

} // namespace mse
