#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace zl {

/// Riemann-Siegel theta and its first two derivatives at height t.
struct ThetaValue {
    double t = 0.0;
    double theta = 0.0;
    double derivative = 0.0;
    double second_derivative = 0.0;
};

/// One Riemann-Siegel evaluation of Hardy's Z(t).
struct ZEvaluation {
    double t = 0.0;
    double z = 0.0;
    std::int64_t truncation_index = 0;  // floor(sqrt(t / 2pi))
    double remainder_bound = 0.0;
    bool corrected = false;
};

enum class ZetaMethod { euler_maclaurin, dirichlet_series };

struct ComplexZetaValue {
    double sigma = 0.0;
    double t = 0.0;
    std::complex<double> value;
    ZetaMethod method = ZetaMethod::euler_maclaurin;
    double tail_bound = 0.0;
};

// Remainder constants: |Z - main sum| <= 3 t^{-1/4}; with the first
// correction term added, <= 10 t^{-3/4}.
inline constexpr double kRemainderConstant = 3.0;
inline constexpr double kCorrectedRemainderConstant = 10.0;

// theta uses the asymptotic expansion at and above this height and the
// complex log-gamma below it.
inline constexpr double kThetaAsymptoticFloor = 32.0;

ThetaValue theta(double t);

double tau(double t);

/// First Riemann-Siegel correction coefficient C0(p), p = frac(tau).
double rs_correction_c0(double p);

ZEvaluation riemann_siegel_z(double t, bool corrected = true);

/// Zeta(sigma + i t) by Euler-Maclaurin summation, absolute accuracy tol.
ComplexZetaValue zeta_euler_maclaurin(double sigma, double t, double tol = 1e-12);

/// Rounding floor of zeta_euler_maclaurin at (sigma, t): requesting a
/// tolerance below this raises AccuracyError.
double euler_maclaurin_noise_floor(double sigma, double t);

/// zeta(sigma + i t) on a short window [t_from, t_to] for repeated queries.
///
/// The Euler-Maclaurin main sum is tabulated on a uniform grid by rotating
/// each term n^{-s} from one grid point to the next, with the cutoff of
/// the window's top; queries use 12-point barycentric interpolation. The
/// grid step keeps step * ln N below 1/4 so the interpolation error stays
/// near rounding level. A tol below the rounding floor is raised to it.
/// Immutable after construction.
class ZetaStrip {
public:
    ZetaStrip(double sigma, double t_from, double t_to, double tol = 1e-12);

    double sigma() const noexcept { return sigma_; }
    double t_from() const noexcept { return from_; }
    double t_to() const noexcept { return to_; }
    double step() const noexcept { return step_; }
    std::int64_t cutoff() const noexcept { return cutoff_; }
    std::size_t grid_size() const noexcept { return values_.size(); }
    double tail_bound() const noexcept { return tail_bound_; }

    /// RangeError outside [t_from, t_to].
    std::complex<double> operator()(double t) const;

private:
    double sigma_, from_, to_;
    double grid0_ = 0.0;
    double step_ = 0.0;
    std::int64_t cutoff_ = 0;
    double tail_bound_ = 0.0;
    std::vector<std::complex<double>> values_;
};

/// Moebius function on 1..limit, built once by a linear sieve and read-only
/// afterwards.
class MobiusSieve {
public:
    explicit MobiusSieve(std::int64_t n_max);

    std::int64_t limit() const noexcept { return limit_; }
    int operator()(std::int64_t n) const { return values_.at(static_cast<std::size_t>(n)); }
    // Index 0 is unused and holds 0.
    std::span<const std::int8_t> values() const noexcept { return values_; }

private:
    std::int64_t limit_;
    std::vector<std::int8_t> values_;
};

MobiusSieve mobius_sieve(std::int64_t n_max);

/// Smallest sieve limit N with N^{1-sigma}/(sigma-1) <= tol.
std::int64_t mobius_required_limit(double sigma, double tol);

/// Partial sum of sum mu(n) n^{-sigma - i t} over the whole sieve.
ComplexZetaValue mobius_dirichlet(double sigma, double t, const MobiusSieve& sieve,
                                  double tol);

double zeta_two_sigma(double sigma);

}  // namespace zl
