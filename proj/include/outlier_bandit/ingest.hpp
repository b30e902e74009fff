#pragma once

// Arm-mean files. One mean per row, optional header `mean` or `arm_id,mean`,
// `#` comment lines and blank lines ignored.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "outlier_bandit/env.hpp"

namespace outlier_bandit {

class DatasetError : public std::runtime_error {
public:
    DatasetError(const std::string& what, std::size_t line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    /// 1-based line number, 0 when the error is not tied to a line.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct LoadedMeans {
    std::vector<double> means;  ///< file order: arm i is data row i
    Bounds bounds;
};

LoadedMeans parse_means_csv(std::istream& in, const Bounds& bounds);
LoadedMeans load_means_csv(const std::filesystem::path& path, const Bounds& bounds);

/// Writes `arm_id,mean` rows with round-trip precision.
void write_means_csv(std::ostream& out, std::span<const double> means);
void write_means_csv(const std::filesystem::path& path, std::span<const double> means);

/// Row count of the crowdsourcing worker error-rate dataset used in the
/// real-data experiments (not shipped, see data/README.md).
inline constexpr std::size_t kCrowdWorkerCount = 722;

/// Synthetic stand-in for per-worker error rates: a bulk of accurate workers
/// plus a thin tail of unreliable ones, all in [0, 1].
std::vector<double> crowd_error_rates_standin(std::uint64_t seed,
                                              std::size_t workers = kCrowdWorkerCount);

}  // namespace outlier_bandit
