#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zetaladder/jacobs_ladder.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {

enum class IntegrandId { zeta_sq_sigma, ztilde_product, composed_product };
enum class PointKind { d_point, e_point };

std::string to_string(IntegrandId id);
std::string to_string(PointKind kind);

struct IntegralResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    int panels = 0;  // accepted Gauss-Kronrod subintervals
    IntegrandId integrand_id = IntegrandId::zeta_sq_sigma;
};

struct MeanValuePoint {
    double location = 0.0;
    PointKind kind = PointKind::d_point;
    double residual = 0.0;  // I - L F(location)
    // phi_1^r(location) for r = 0..k (d) or r = 0..k-1 (e)
    std::vector<double> iterate_images;
    double scan_min = 0.0;  // extremes of F on the final scan grid
    double scan_max = 0.0;
    int scan_points = 0;
    bool boundary_warning = false;
};

// Adaptive 15-point Gauss-Kronrod over panels no wider than the local zero
// spacing 2pi / ln tau. Subintervals with the largest |K15 - G7| are split
// until the summed estimate is below tol; AccuracyError past max_intervals.
inline constexpr int kMaxSubintervals = 1 << 13;

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tol, IntegrandId id);

/// Integral of |zeta(sigma + i t)|^2 over [t_from, t_to].
IntegralResult integrate_zeta_sq(double sigma, double t_from, double t_to, double tol);
IntegralResult integrate_zeta_sq(const ZetaStrip& strip, double t_from, double t_to, double tol);

/// Lookaside store for integrand values; must be safe for concurrent use.
class EvalMemo {
public:
    virtual ~EvalMemo() = default;
    virtual std::optional<double> find(double t) const = 0;
    virtual void store(double t, double value) = 0;
};

/// F(t) = |zeta(sigma + i phi_1^k(t))|^2 prod_{r<k} Z~^2(phi_1^r(t)) on the
/// k-th iterate of a chain; the zeta factor is dropped without sigma.
/// Thread-safe for concurrent evaluation.
class ComposedIntegrand {
public:
    ComposedIntegrand(const SegmentChain& chain, const LadderTable& table,
                      std::optional<double> sigma);

    int k() const noexcept { return chain_.k(); }
    const Interval& domain() const { return chain_.segment(chain_.k()); }
    bool has_sigma() const noexcept { return strip_ != nullptr; }
    IntegrandId id() const noexcept {
        return has_sigma() ? IntegrandId::composed_product : IntegrandId::ztilde_product;
    }
    const SegmentChain& chain() const noexcept { return chain_; }
    const LadderTable& table() const noexcept { return table_; }
    /// operator() consults memo first and records misses in it.
    void attach_memo(std::shared_ptr<EvalMemo> memo) { memo_ = std::move(memo); }

    /// ChainError if an image phi_1^r(t) leaves iterate k - r.
    double operator()(double t) const;
    /// Without the zeta factor.
    double ztilde_product(double t) const;
    /// phi_1^r(t) for r = 0..count-1.
    std::vector<double> images(double t, int count) const;
    double zeta_sq_at(double u) const;

private:
    double product(double t, double* top) const;

    SegmentChain chain_;
    const LadderTable& table_;
    std::shared_ptr<const ZetaStrip> strip_;
    std::shared_ptr<EvalMemo> memo_;
};

IntegralResult integrate_composed(const SegmentChain& chain, const LadderTable& table,
                                  std::optional<double> sigma, double tol);
IntegralResult integrate_composed(const ComposedIntegrand& f, double tol);

inline constexpr int kInitialScan = 512;
inline constexpr int kMaxScan = 1 << 16;

/// Root of I - L F(x) on the open k-th iterate, leftmost sign change of the
/// scan; |residual| <= tol * I.
MeanValuePoint find_mean_value_point(const ComposedIntegrand& f, double integral, double tol,
                                     PointKind kind);

MeanValuePoint find_d_point(const SegmentChain& chain, const LadderTable& table, double sigma,
                            double tol);
MeanValuePoint find_e_point(const SegmentChain& chain, const LadderTable& table, double tol);

std::string integral_csv_header();
std::string to_csv_row(const IntegralResult& result);
std::string mean_value_csv_header();
std::string to_csv_row(const MeanValuePoint& point);

}  // namespace zl
