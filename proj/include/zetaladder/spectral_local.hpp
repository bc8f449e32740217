#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zl {

// Working floor T0 for local windows and ladder construction.
inline constexpr double kWorkingFloor = 1e3;
// |local_z - Z| <= kLocalErrorConstant * x_r^{-1/4} on admissible windows.
inline constexpr double kLocalErrorConstant = 5.0;
// |phase discrepancy| <= kPhaseErrorConstant * (1 + h^2) / x_r.
inline constexpr double kPhaseErrorConstant = 1.0;
inline constexpr int kAuditSamples = 64;

/// Oscillator table of the local spectral form of Z on [x_r, x_r + h]:
///   Z(t) ~ sum_n amplitudes[n] cos(t * frequencies[n] + phase_constant)
/// with frequencies[n] = ln(tau(x_r) / n) and amplitudes[n] = 2 / sqrt(n).
/// Index 0 holds n = 1. Immutable after construction.
struct LocalSpectrum {
    double x_r = 0.0;
    double h = 0.0;
    std::vector<double> frequencies;
    std::vector<double> amplitudes;
    double phase_constant = 0.0;

    std::int64_t oscillator_count() const noexcept {
        return static_cast<std::int64_t>(frequencies.size());
    }
};

/// Throws WindowError unless 0 < h <= x_r^{1/4}, DomainError unless x_r > floor.
LocalSpectrum local_spectrum(double x_r, double h, double floor = kWorkingFloor);

double local_z(const LocalSpectrum& spec, double t);

/// delta(t) = (theta(t) - t ln n) - (t ln(tau(x_r)/n) - x_r/2 - pi/8); the
/// t ln n terms cancel, so the value does not depend on n.
double phase_expansion_audit(double x_r, double h, double t);

/// Difference between the Riemann-Siegel main sum truncated at tau(t) and at
/// tau(x_r), both with the exact theta(t).
struct TruncationAudit {
    double x_r = 0.0;
    double t = 0.0;
    std::int64_t dropped_terms = 0;
    double difference = 0.0;
    // Largest amplitude a dropped term can have, 2 / sqrt(floor(tau(x_r)) + 1).
    double per_term_bound = 0.0;
};

TruncationAudit truncation_step_audit(double x_r, double h, double t);

struct LocalErrorAudit {
    double x_r = 0.0;
    double h = 0.0;
    double max_abs_error = 0.0;
    double bound = 0.0;

    bool passed() const noexcept { return max_abs_error <= bound; }
};

/// Chebyshev-Lobatto points on [a, b], endpoints included.
std::vector<double> chebyshev_points(double a, double b, int n);

/// sup over kAuditSamples Chebyshev points of |local_z - Z| with Z from the
/// corrected Riemann-Siegel formula.
LocalErrorAudit audit_local_window(double x_r, double h, int samples = kAuditSamples,
                                   double floor = kWorkingFloor);

std::string local_audit_csv_header();
std::string to_csv_row(const LocalErrorAudit& audit);

}  // namespace zl
