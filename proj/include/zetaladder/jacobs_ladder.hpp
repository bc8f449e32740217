#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "zetaladder/spectral_local.hpp"

namespace zl {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// U(T, Theta) = ln ln T + Theta ln T, for T > e and Theta in [0, 1].
double u_of_t_theta(double t, double theta);

/// (1 - c) T / ln T, the gap-law scale with pi(T) replaced by T / ln T.
double gap_law_scale(double t);

/// Z~^2(t) = Z(t)^2 / ln t with Z from the corrected Riemann-Siegel formula.
double z_tilde_squared(double t, double floor = kWorkingFloor);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains_open(double x) const noexcept { return x > lo && x < hi; }
};

// The panel width starts at kPanelFraction * 2pi / ln tau(kPanelHeadroom * t_high)
// and is halved until the audited error per node interval is below tol.
struct LadderOptions {
    int panels_per_node = 4;
    unsigned threads = 1;
    int max_halvings = 4;
};

inline constexpr double kPanelFraction = 1.0 / 8.0;
inline constexpr double kPanelHeadroom = 4.0;
inline constexpr int kGaussNodes = 4;
inline constexpr int kLadderFormatVersion = 1;
// every kAuditStride-th node interval is re-integrated at half panel width
inline constexpr int kAuditStride = 97;

/// Tabulated surrogate of the Jacob's ladder phi_1 on [t_low, t_high],
/// defined by phi_1' = Z~^2 and the anchor
///   phi_1(t_low) = t_low - (1 - c) t_low / ln t_low.
///
/// Values at the grid are cumulative 4-point Gauss-Legendre sums over
/// uniform panels, grid node i sitting at t_low + i * panels_per_node * h.
/// phi() refines between nodes with the same panels, so telescoping
/// identities hold exactly and phi' = Z~^2 up to quadrature error.
/// interpolate() is the monotone cubic Hermite interpolant of the grid.
/// A finished table is immutable apart from extend(); const access is
/// thread-safe.
class LadderTable {
public:
    double t_low() const noexcept { return t_.front(); }
    double t_high() const noexcept { return t_.back(); }
    double phi_low() const noexcept { return phi_.front(); }
    double phi_high() const noexcept { return phi_.back(); }
    std::pair<double, double> anchor() const noexcept { return {t_.front(), phi_.front()}; }
    double quadrature_tol() const noexcept { return tol_; }
    double panel_width() const noexcept { return panel_width_; }
    int panels_per_node() const noexcept { return panels_per_node_; }
    double panel_limit() const noexcept { return panel_limit_; }
    // Largest audited error of one node interval, and the audit
    // extrapolated to the whole table.
    double worst_interval_error() const noexcept { return worst_error_; }
    double error_estimate() const noexcept { return error_estimate_; }

    std::span<const double> t_grid() const noexcept { return t_; }
    std::span<const double> phi_values() const noexcept { return phi_; }

    double phi(double x) const;
    double interpolate(double x) const;
    /// phi_1 applied r times; throws RangeError if an image leaves the table.
    double phi_iterate(double x, int r) const;

    /// Continue the cumulative integration up to at least new_high; heights
    /// past panel_limit() need a rebuilt table and raise RangeError.
    void extend(double new_high, unsigned threads = 1);

    void save(std::ostream& os) const;
    static LadderTable load(std::istream& is);

private:
    friend LadderTable build_ladder(double, double, double, const LadderOptions&);

    std::size_t node_index(double x) const;
    double node_t(std::size_t i) const noexcept;
    void append_nodes(std::size_t count, unsigned threads);

    std::vector<double> t_, phi_;
    double tol_ = 0.0;
    double panel_width_ = 0.0;
    int panels_per_node_ = 4;
    double panel_limit_ = 0.0;
    double worst_error_ = 0.0;
    double error_sum_ = 0.0;
    std::size_t audited_ = 0;
    double error_estimate_ = 0.0;
    double carry_ = 0.0;  // Neumaier compensation of the cumulative sum
};

/// Throws AccuracyError naming the worst audited node interval when the
/// estimated quadrature error exceeds tol.
LadderTable build_ladder(double t_low, double t_high, double tol,
                         const LadderOptions& options = {});

/// x with |phi_1(x) - target| <= tol; RangeError if target is outside
/// [phi_1(t_low), phi_1(t_high)].
double ladder_inverse(const LadderTable& table, double target);

/// [T, T+U] and its reverse iterates [T^r, (T+U)^r], r = 1..k.
struct SegmentChain {
    Interval base;
    std::vector<Interval> iterates;  // r = 1..k at index r-1
    std::vector<double> gaps;        // (T^r) - (T+U)^{r-1}
    double u = 0.0;

    int k() const noexcept { return static_cast<int>(iterates.size()); }
    // r = 0 is the base segment
    const Interval& segment(int r) const { return r == 0 ? base : iterates.at(static_cast<std::size_t>(r - 1)); }
};

SegmentChain reverse_iterates(const LadderTable& table, double t_base, double u, int k);

/// Right end a table anchored at t_low should reach to hold k iterates of
/// [t_base, t_base + u]; a first guess, reverse_iterates reports shortfalls.
double ladder_span_estimate(double t_base, double u, int k);

}  // namespace zl
