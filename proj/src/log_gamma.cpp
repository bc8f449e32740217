#include "zetaladder/log_gamma.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "zetaladder/errors.hpp"

namespace zl {
namespace {

using cplx = std::complex<double>;

// B_{2k} for k = 1..10.
constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6.0,        -1.0 / 30.0,    1.0 / 42.0,   -1.0 / 30.0,
    5.0 / 66.0,       -691.0 / 2730.0, 7.0 / 6.0,   -3617.0 / 510.0,
    43867.0 / 798.0, -174611.0 / 330.0};

// Stirling's series is used once |z| >= kShiftTarget; the truncation error of
// ten Bernoulli terms there is below 1e-20.
constexpr double kShiftTarget = 16.0;

int shift_count(cplx z) {
    if (std::abs(z) >= kShiftTarget) return 0;
    return static_cast<int>(std::ceil(kShiftTarget - z.real()));
}

void check_domain(cplx z) {
    if (!(z.real() > 0.0)) throw DomainError("log_gamma: requires Re z > 0");
}

}  // namespace

cplx log_gamma(cplx z) {
    check_domain(z);
    const int m = shift_count(z);
    cplx shift_sum{0.0, 0.0};
    for (int j = 0; j < m; ++j) shift_sum += std::log(z + static_cast<double>(j));
    const cplx w = z + static_cast<double>(m);

    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series{0.0, 0.0};
    cplx power = inv;
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        const double n = 2.0 * static_cast<double>(k + 1);
        series += kBernoulli[k] / (n * (n - 1.0)) * power;
        power *= inv2;
    }
    const cplx stirling =
        (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series;
    return stirling - shift_sum;
}

cplx digamma(cplx z) {
    check_domain(z);
    const int m = shift_count(z);
    cplx shift_sum{0.0, 0.0};
    for (int j = 0; j < m; ++j) shift_sum += 1.0 / (z + static_cast<double>(j));
    const cplx w = z + static_cast<double>(m);

    const cplx inv2 = 1.0 / (w * w);
    cplx series{0.0, 0.0};
    cplx power = inv2;
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        const double n = 2.0 * static_cast<double>(k + 1);
        series += kBernoulli[k] / n * power;
        power *= inv2;
    }
    return std::log(w) - 0.5 / w - series - shift_sum;
}

cplx trigamma(cplx z) {
    check_domain(z);
    const int m = shift_count(z);
    cplx shift_sum{0.0, 0.0};
    for (int j = 0; j < m; ++j) {
        const cplx d = z + static_cast<double>(j);
        shift_sum += 1.0 / (d * d);
    }
    const cplx w = z + static_cast<double>(m);

    const cplx inv = 1.0 / w;
    const cplx inv2 = inv * inv;
    cplx series{0.0, 0.0};
    cplx power = inv2 * inv;
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        series += kBernoulli[k] * power;
        power *= inv2;
    }
    return inv + 0.5 * inv2 + series + shift_sum;
}

}  // namespace zl
