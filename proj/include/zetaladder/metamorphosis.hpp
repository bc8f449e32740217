#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "zetaladder/config.hpp"
#include "zetaladder/jacobs_ladder.hpp"
#include "zetaladder/quadrature.hpp"
#include "zetaladder/spectral_local.hpp"

namespace zl {

class EvalCache;

inline constexpr double kZeroGuard = 1e-6;
// consecutive control points must sit within this band of (1 - c) T / ln T
inline constexpr double kSpacingBandLow = 0.6;
inline constexpr double kSpacingBandHigh = 1.4;
inline constexpr double kConsistencyTol = 1e-10;

/// alphas[r] = alpha_r for r = 0..k; betas[r - 1] = beta_r for r = 1..k.
struct ControlSequences {
    std::vector<double> alphas;
    std::vector<double> betas;
    double sigma = 0.0;
    double t_base = 0.0;
    double theta = 0.0;
    int k = 0;
    double epsilon = 0.0;
};

struct QSystemValue {
    std::vector<double> xs;
    std::vector<double> ys;
    double value = 0.0;
};

/// prod |Z(x_r)| / |Z(y_r)|. Inputs are sorted first, so any reordering
/// gives the same value; they must then be strictly increasing and above
/// kWorkingFloor (DomainError). |Z(y_r)| < zero_guard raises
/// SingularPointError with r counted from 1 in sorted order.
/// With use_local_form, Z comes from the local spectral form on
/// [x - h/2, x + h/2], h = x^{1/4}, when that window is admissible.
QSystemValue q_system(std::span<const double> xs, std::span<const double> ys,
                      bool use_local_form = false, double zero_guard = kZeroGuard);

/// alpha_{k-r} = phi_1^r(d); ChainError if alpha_r leaves iterate r.
std::vector<double> extract_alphas(const MeanValuePoint& d, const SegmentChain& chain);
/// beta_{k-r} = phi_1^r(e), r = 0..k-1.
std::vector<double> extract_betas(const MeanValuePoint& e, const SegmentChain& chain);

/// prod Z^2(alpha_r) divided by zeta(2 sigma) (U / L) ln^k T |M|^2, where
/// L is the length of the k-th iterate and M = sum mu(n) n^{-sigma - i alpha_0}.
double product_formula_alpha_check(const ControlSequences& seq, const SegmentChain& chain,
                                   double mobius_modulus);
/// prod Z^2(beta_r) divided by (U / L) ln^k T.
double product_formula_beta_check(const ControlSequences& seq, const SegmentChain& chain);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Ordering, inclusion, zero-guard and spacing checks of the sequences.
std::vector<CheckResult> check_sequences(const ControlSequences& seq, const SegmentChain& chain,
                                         double zero_guard);

struct MetamorphosisReport {
    ControlSequences sequences;
    SegmentChain chain;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    MeanValuePoint d_point;
    MeanValuePoint e_point;
    std::map<std::string, double> diagnostics;
    std::vector<CheckResult> checks;
    std::vector<LocalErrorAudit> local_audits;  // one window at each alpha_r
    std::map<std::string, double> stage_seconds;

    bool all_passed() const;
};

/// Full pipeline for one configuration. Failures are rethrown as
/// StageError naming the stage. A cache, when given, supplies and
/// receives ladder tables and integrand values.
MetamorphosisReport run_metamorphosis(const ExperimentConfig& config, EvalCache* cache = nullptr);

}  // namespace zl
