#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zl {

/// One (T, Theta, k, sigma) experiment with its numerical tolerances.
/// quad_tol is relative to the integral it controls; the ladder table is
/// built with absolute tolerance 10 * quad_tol.
struct ExperimentConfig {
    double t_base = 1e5;
    double theta = 1.0;
    int k = 2;
    double sigma = 1.5;
    double epsilon = 0.1;
    double quad_tol = 1e-8;
    double root_tol = 1e-8;
    double zero_guard = 1e-6;
    std::int64_t sieve_limit = 1000000;
    std::string cache_path;
    std::uint64_t seed = 20240517;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws DomainError naming the first violated bound.
void validate(const ExperimentConfig& config);

/// key = value lines; '#' starts a comment. Unknown keys, malformed values
/// and bound violations raise ParseError with the offending line.
ExperimentConfig parse_config(const std::string& source);

/// Canonical form: every key in a fixed order, doubles with 17 digits.
std::string serialize(const ExperimentConfig& config);

/// Like parse_config, but t_base, theta, k and sigma may hold
/// comma-separated lists; returns their Cartesian product ordered by
/// t_base, then theta, k, sigma.
std::vector<ExperimentConfig> parse_sweep(const std::string& source);

/// Stable text key of the fields that determine a run's numbers.
std::string run_key(const ExperimentConfig& config);

}  // namespace zl
