#include "zetaladder/z_sweep.hpp"

#include <cmath>
#include <numbers>

#include "zetaladder/errors.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {

ZSweep::ZSweep(double start, double step, bool corrected)
    : start_(start), step_(step), corrected_(corrected), t_(start) {
    if (!(start >= 2.0 * std::numbers::pi)) throw DomainError("ZSweep: start below 2pi");
    if (!(step > 0.0)) throw DomainError("ZSweep: step must be positive");
    grow_to(static_cast<std::int64_t>(std::floor(tau(start))));
}

void ZSweep::grow_to(std::int64_t n_terms) {
    for (auto n = static_cast<std::int64_t>(re_.size()) + 1; n <= n_terms; ++n) {
        const double dn = static_cast<double>(n);
        const double log_n = std::log(dn);
        const double amp = 1.0 / std::sqrt(dn);
        re_.push_back(amp * std::cos(t_ * log_n));
        im_.push_back(-amp * std::sin(t_ * log_n));
        rot_re_.push_back(std::cos(step_ * log_n));
        rot_im_.push_back(-std::sin(step_ * log_n));
    }
}

void ZSweep::reseed() {
    for (std::size_t i = 0; i < re_.size(); ++i) {
        const double dn = static_cast<double>(i + 1);
        const double log_n = std::log(dn);
        const double amp = 1.0 / std::sqrt(dn);
        re_[i] = amp * std::cos(t_ * log_n);
        im_[i] = -amp * std::sin(t_ * log_n);
    }
    since_reseed_ = 0;
}

double ZSweep::next() {
    const double tv = tau(t_);
    const auto n_terms = static_cast<std::int64_t>(std::floor(tv));
    grow_to(n_terms);

    double sum_re = 0.0;
    double sum_im = 0.0;
    double* re = re_.data();
    double* im = im_.data();
    const double* rr = rot_re_.data();
    const double* ri = rot_im_.data();
    const auto count = static_cast<std::size_t>(n_terms);
#pragma omp simd reduction(+ : sum_re, sum_im)
    for (std::size_t i = 0; i < count; ++i) {
        const double a = re[i];
        const double b = im[i];
        sum_re += a;
        sum_im += b;
        re[i] = a * rr[i] - b * ri[i];
        im[i] = a * ri[i] + b * rr[i];
    }
    // Terms beyond the current truncation still have to advance.
    for (std::size_t i = count; i < re_.size(); ++i) {
        const double a = re[i];
        const double b = im[i];
        re[i] = a * rr[i] - b * ri[i];
        im[i] = a * ri[i] + b * rr[i];
    }

    const double th = theta(t_).theta;
    double z = 2.0 * (std::cos(th) * sum_re - std::sin(th) * sum_im);
    if (corrected_) {
        const double p = tv - static_cast<double>(n_terms);
        const double sign = (n_terms % 2 == 1) ? 1.0 : -1.0;
        z += sign * std::pow(2.0 * std::numbers::pi / t_, 0.25) * rs_correction_c0(p);
    }

    ++index_;
    t_ = start_ + static_cast<double>(index_) * step_;
    if (++since_reseed_ >= kReseedInterval) reseed();
    return z;
}

}  // namespace zl
