#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mse {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_compute_error = 3;
inline constexpr int exit_io_error = 4;

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed; // overrides the config seed
    int threads = 0;                   // 0 = hardware concurrency
};

/// Run the configured study; write summary.csv and edf.csv under out_dir
/// and print the summary table.
int cmd_simulate(const CliOptions& opt);

/// Estimate on a dataset CSV; print the report and write estimate.json.
int cmd_estimate(const std::string& dataset_path, const CliOptions& opt);

/// Check the eighth-order kernel construction: coefficients, constraint
/// residuals, and quadrature moments.
int cmd_kernelcheck();

/// Draw a dataset from the configured process and write dataset.csv.
int cmd_export_dgp(const CliOptions& opt);

} // namespace mse
