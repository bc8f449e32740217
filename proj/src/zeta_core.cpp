#include "zetaladder/zeta_core.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zetaladder/errors.hpp"
#include "zetaladder/log_gamma.hpp"

namespace zl {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Taylor coefficients of C0 in z = 1 - 2p, even powers only (C0 is entire;
// the series below reaches ~1e-17 on |z| <= 1).
constexpr std::array<double, 18> kC0 = {
    0.38268343236508977172846,   0.43724046807752044936030,
    0.13237657548034352332404,   -0.01360502604767418865498,
    -0.01356762197010358088792,  -0.00162372532314446528285,
    0.00029705353733379690783,   0.00007943300879521469588,
    4.65561246145045050371e-7,   -1.43272516309551057541e-6,
    -1.03548471123129460750e-7,  1.23579270838617380561e-8,
    1.78810838579549049857e-9,   -3.39141438992703590694e-11,
    -1.63266339025659051014e-11, -3.78510931854122038285e-13,
    9.32742325920172484566e-14,  5.22184301597813685531e-15};

// B_{2j} / (2j)! for j = 1..60.
constexpr std::array<double, 60> kBernoulliOverFactorial = {
    8.3333333333333333333e-2,   -1.3888888888888888889e-3,  3.3068783068783068783e-5,
    -8.2671957671957671958e-7,  2.0876756987868098979e-8,   -5.2841901386874931848e-10,
    1.3382536530684678833e-11,  -3.3896802963225828668e-13, 8.5860620562778445641e-15,
    -2.174868698558061873e-16,  5.5090028283602295152e-18,  -1.3954464685812523341e-19,
    3.5347070396294674717e-21,  -8.9535174270375468504e-23, 2.2679524523376830603e-24,
    -5.7447906688722024453e-26, 1.4551724756148649019e-27,  -3.6859949406653101782e-29,
    9.336734257095044672e-31,   -2.3650224157006299346e-32, 5.9906717624821343047e-34,
    -1.5174548844682902617e-35, 3.8437581254541882322e-37,  -9.7363530726466910353e-39,
    2.4662470442006809571e-40,  -6.2470767418207436931e-42, 1.5824030244644914298e-43,
    -4.0082736859489359685e-45, 1.0153075855569556312e-46,  -2.5718041582418717499e-48,
    6.5144560352338149316e-50,  -1.6501309906896524555e-51, 4.1798306285394758949e-53,
    -1.058763466770290877e-54,  2.6818791912607706661e-56,  -6.7932793511074212095e-58,
    1.7207577616681404905e-59,  -4.3587303293488938434e-61, 1.1040792903684666751e-62,
    -2.7966655133781345072e-64, 7.0840365016794701985e-66,  -1.7944074082892240666e-67,
    4.5452870636110961071e-69,  -1.1513346631982051813e-70, 2.9163647710923613547e-72,
    -7.3872382634973375626e-74, 1.8712093117637953062e-75,  -4.7398285577617994055e-77,
    1.200612599335450652e-78,   -3.041187241514292383e-80,  7.7034172747051062729e-82,
    -1.9512983909098830711e-83, 4.9426965651594614749e-85,  -1.2519996659171847922e-86,
    3.1713522017635154606e-88,  -8.0331289707353344614e-90, 2.0348153391661465708e-91,
    -5.1542474664474738591e-93, 1.3055861352149467246e-94,  -3.3070883141750912485e-96};

// Ratio |s| / (2 pi N) targeted by the Euler-Maclaurin cutoff; the j-th
// correction then decays roughly like kEmRatio^{2j}.
constexpr double kEmRatio = 0.6;
constexpr std::int64_t kEmMinTerms = 10;

std::int64_t em_cutoff(double sigma, double t) {
    const double s_abs = std::hypot(sigma, t);
    // the +40 leaves room for ~20 corrections before the Pochhammer growth
    // overtakes N^{-2j} at small |s|
    const double n = std::ceil((s_abs + 40.0) / (2.0 * kPi * kEmRatio));
    return std::max<std::int64_t>(kEmMinTerms, static_cast<std::int64_t>(n));
}

// n^{-sigma - i t}
inline cplx power_term(double sigma, double t, double log_n) {
    const double mag = std::exp(-sigma * log_n);
    const double arg = t * log_n;
    return {mag * std::cos(arg), -mag * std::sin(arg)};
}

// Terms of the Euler-Maclaurin formula beyond the main sum over n < n_cut:
// N^{1-s}/(s-1) + N^{-s}/2 + Bernoulli corrections, truncated at the first
// correction below tol / 4. tail receives the magnitude of that last term.
cplx em_remainder(double sigma, double t, std::int64_t n_cut, double tol, double& tail) {
    const cplx s{sigma, t};
    const double big_n = static_cast<double>(n_cut);
    const cplx w = power_term(sigma, t, std::log(big_n));  // N^{-s}
    cplx sum = big_n * w / (s - 1.0) + 0.5 * w;

    // The series is asymptotic: stop at the first term below tol, or fail if
    // the terms never get there.
    cplx poch = s * w / big_n;  // s N^{-s-1}
    double smallest = std::numeric_limits<double>::infinity();
    tail = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        const cplx term = kBernoulliOverFactorial[j] * poch;
        const double mag = std::abs(term);
        smallest = std::min(smallest, mag);
        sum += term;
        if (mag <= 0.25 * tol) {
            tail = mag;
            break;
        }
        const double m = 2.0 * static_cast<double>(j + 1);
        poch *= (s + (m - 1.0)) * (s + m) / (big_n * big_n);
    }
    if (!(tail <= tol))
        throw AccuracyError("zeta_euler_maclaurin: correction series stalled above tol", smallest);
    return sum;
}

}  // namespace

ThetaValue theta(double t) {
    if (!(t >= 0.0)) throw DomainError("theta: t must be nonnegative");
    ThetaValue out;
    out.t = t;
    if (t >= kThetaAsymptoticFloor) {
        const double inv = 1.0 / t;
        const double inv2 = inv * inv;
        out.theta = 0.5 * t * std::log(t / (2.0 * kPi)) - 0.5 * t - kPi / 8.0 +
                    inv * (1.0 / 48.0 +
                           inv2 * (7.0 / 5760.0 +
                                   inv2 * (31.0 / 80640.0 +
                                           inv2 * (127.0 / 430080.0 +
                                                   inv2 * (511.0 / 1216512.0)))));
        out.derivative = 0.5 * std::log(t / (2.0 * kPi)) -
                         inv2 * (1.0 / 48.0 +
                                 inv2 * (7.0 / 1920.0 +
                                         inv2 * (31.0 / 16128.0 + inv2 * (127.0 / 61440.0))));
        out.second_derivative =
            0.5 * inv + inv * inv2 *
                            (1.0 / 24.0 +
                             inv2 * (7.0 / 480.0 + inv2 * (31.0 / 2688.0 + inv2 * (127.0 / 7680.0))));
        return out;
    }
    const cplx z{0.25, 0.5 * t};
    const double log_pi = std::log(kPi);
    out.theta = -0.5 * t * log_pi + log_gamma(z).imag();
    out.derivative = -0.5 * log_pi + 0.5 * digamma(z).real();
    out.second_derivative = -0.25 * trigamma(z).imag();
    return out;
}

double tau(double t) {
    if (!(t >= 0.0)) throw DomainError("tau: t must be nonnegative");
    return std::sqrt(t / (2.0 * kPi));
}

double rs_correction_c0(double p) {
    const double z = 1.0 - 2.0 * p;
    const double z2 = z * z;
    double acc = 0.0;
    for (auto it = kC0.rbegin(); it != kC0.rend(); ++it) acc = acc * z2 + *it;
    return acc;
}

ZEvaluation riemann_siegel_z(double t, bool corrected) {
    if (!(t >= 2.0 * kPi)) throw DomainError("riemann_siegel_z: requires t >= 2pi");
    const double th = theta(t).theta;
    const double tv = tau(t);
    const auto n_max = static_cast<std::int64_t>(std::floor(tv));

    double sum = 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const double dn = static_cast<double>(n);
        sum += std::cos(th - t * std::log(dn)) / std::sqrt(dn);
    }
    ZEvaluation out;
    out.t = t;
    out.truncation_index = n_max;
    out.corrected = corrected;
    out.z = 2.0 * sum;
    if (corrected) {
        const double p = tv - static_cast<double>(n_max);
        const double sign = (n_max % 2 == 1) ? 1.0 : -1.0;
        out.z += sign * std::pow(2.0 * kPi / t, 0.25) * rs_correction_c0(p);
        out.remainder_bound = kCorrectedRemainderConstant * std::pow(t, -0.75);
    } else {
        out.remainder_bound = kRemainderConstant * std::pow(t, -0.25);
    }
    return out;
}

double euler_maclaurin_noise_floor(double sigma, double t) {
    const auto n = static_cast<double>(em_cutoff(sigma, t));
    const double log_n = std::log(n);
    // Sum of n^{-2 sigma} over the main sum, bounded by 1 + integral.
    const double a = 1.0 - 2.0 * sigma;
    const double sq = std::abs(a) < 1e-12 ? log_n : (std::pow(n, a) - 1.0) / a;
    return kEps * (1.0 + std::abs(t) * log_n) * std::sqrt(1.0 + std::max(sq, 0.0));
}

ComplexZetaValue zeta_euler_maclaurin(double sigma, double t, double tol) {
    if (!(sigma > 0.0)) throw DomainError("zeta_euler_maclaurin: requires sigma > 0");
    if (!(tol > 0.0)) throw DomainError("zeta_euler_maclaurin: tol must be positive");
    const cplx s{sigma, t};
    if (std::abs(s - 1.0) < 1e-6) throw PoleError("zeta_euler_maclaurin: |s - 1| < 1e-6");
    const double floor_tol = euler_maclaurin_noise_floor(sigma, t);
    if (tol < floor_tol)
        throw AccuracyError("zeta_euler_maclaurin: tol " + std::to_string(tol) +
                                " below double-precision floor " + std::to_string(floor_tol),
                            floor_tol);

    const std::int64_t n_cut = em_cutoff(sigma, t);
    cplx sum{0.0, 0.0};
    for (std::int64_t n = 1; n < n_cut; ++n)
        sum += power_term(sigma, t, std::log(static_cast<double>(n)));
    double tail = 0.0;
    sum += em_remainder(sigma, t, n_cut, tol, tail);

    ComplexZetaValue out;
    out.sigma = sigma;
    out.t = t;
    out.value = sum;
    out.method = ZetaMethod::euler_maclaurin;
    out.tail_bound = tail + floor_tol;
    return out;
}

ZetaStrip::ZetaStrip(double sigma, double t_from, double t_to, double tol)
    : sigma_(sigma), from_(t_from), to_(t_to) {
    if (!(sigma > 0.0)) throw DomainError("ZetaStrip: requires sigma > 0");
    if (!(t_to > t_from)) throw DomainError("ZetaStrip: need t_from < t_to");
    if (!(tol > 0.0)) throw DomainError("ZetaStrip: tol must be positive");
    constexpr int kHalf = 6;
    constexpr int kReseed = 64;
    cutoff_ = em_cutoff(sigma, std::max(std::abs(t_from), std::abs(t_to)) + 1.0);
    const double log_cut = std::log(static_cast<double>(cutoff_));
    step_ = std::min(0.02, 0.25 / log_cut);
    grid0_ = t_from - kHalf * step_;
    const auto points = static_cast<std::size_t>(std::ceil((t_to - t_from) / step_)) + 2 * kHalf + 1;
    const double floor_tol = euler_maclaurin_noise_floor(sigma, grid0_ + points * step_);
    tol = std::max(tol, floor_tol);
    for (std::size_t j = 0; j < points; ++j)
        if (std::abs(cplx(sigma, grid0_ + j * step_) - 1.0) < 1e-6) throw PoleError("ZetaStrip: window touches s = 1");

    const auto n_terms = static_cast<std::size_t>(cutoff_ - 1);
    std::vector<double> log_n(n_terms), re(n_terms), im(n_terms), rot_re(n_terms), rot_im(n_terms);
    for (std::size_t i = 0; i < n_terms; ++i) {
        log_n[i] = std::log(static_cast<double>(i + 1));
        rot_re[i] = std::cos(step_ * log_n[i]);
        rot_im[i] = -std::sin(step_ * log_n[i]);
    }
    values_.resize(points);
    double worst_tail = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        const double t = grid0_ + static_cast<double>(j) * step_;
        if (j % kReseed == 0) {
            for (std::size_t i = 0; i < n_terms; ++i) {
                const cplx v = power_term(sigma, t, log_n[i]);
                re[i] = v.real();
                im[i] = v.imag();
            }
        }
        double sr = 0.0, si = 0.0;
        double* pr = re.data();
        double* pi = im.data();
        const double* rr = rot_re.data();
        const double* ri = rot_im.data();
#pragma omp simd reduction(+ : sr, si)
        for (std::size_t i = 0; i < n_terms; ++i) {
            const double a = pr[i];
            const double b = pi[i];
            sr += a;
            si += b;
            pr[i] = a * rr[i] - b * ri[i];
            pi[i] = a * ri[i] + b * rr[i];
        }
        double tail = 0.0;
        values_[j] = cplx(sr, si) + em_remainder(sigma, t, cutoff_, tol, tail);
        worst_tail = std::max(worst_tail, tail);
    }
    tail_bound_ = worst_tail + floor_tol;
}

std::complex<double> ZetaStrip::operator()(double t) const {
    if (!(t >= from_ && t <= to_)) throw RangeError("ZetaStrip: t outside the window", t);
    constexpr int kPoints = 12;
    // barycentric weights (-1)^i C(11, i) of equispaced nodes
    static constexpr std::array<double, kPoints> kWeights{1, -11, 55, -165, 330, -462, 462, -330, 165, -55, 11, -1};
    const double x = (t - grid0_) / step_;
    auto j0 = static_cast<std::ptrdiff_t>(std::floor(x)) - (kPoints / 2 - 1);
    j0 = std::clamp<std::ptrdiff_t>(j0, 0, static_cast<std::ptrdiff_t>(values_.size()) - kPoints);
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        const double d = x - static_cast<double>(j0 + i);
        if (d == 0.0) return values_[static_cast<std::size_t>(j0 + i)];
        const double w = kWeights[static_cast<std::size_t>(i)] / d;
        num += w * values_[static_cast<std::size_t>(j0 + i)];
        den += w;
    }
    return num / den;
}

MobiusSieve::MobiusSieve(std::int64_t n_max) : limit_(n_max) {
    if (n_max < 1) throw DomainError("mobius_sieve: n_max must be >= 1");
    const auto size = static_cast<std::size_t>(n_max) + 1;
    values_.assign(size, 0);
    std::vector<bool> composite(size, false);
    std::vector<std::int64_t> primes;
    values_[1] = 1;
    for (std::int64_t i = 2; i <= n_max; ++i) {
        if (!composite[static_cast<std::size_t>(i)]) {
            primes.push_back(i);
            values_[static_cast<std::size_t>(i)] = -1;
        }
        for (const std::int64_t p : primes) {
            const std::int64_t ip = i * p;
            if (ip > n_max) break;
            composite[static_cast<std::size_t>(ip)] = true;
            if (i % p == 0) {
                values_[static_cast<std::size_t>(ip)] = 0;
                break;
            }
            values_[static_cast<std::size_t>(ip)] =
                static_cast<std::int8_t>(-values_[static_cast<std::size_t>(i)]);
        }
    }
}

MobiusSieve mobius_sieve(std::int64_t n_max) { return MobiusSieve(n_max); }

std::int64_t mobius_required_limit(double sigma, double tol) {
    if (!(sigma > 1.0)) throw DivergenceError("mobius series requires sigma > 1");
    const double n = std::pow((sigma - 1.0) * tol, -1.0 / (sigma - 1.0));
    if (!(n < 9.0e18)) return std::numeric_limits<std::int64_t>::max();
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

ComplexZetaValue mobius_dirichlet(double sigma, double t, const MobiusSieve& sieve, double tol) {
    if (!(sigma > 1.0))
        throw DivergenceError("mobius_dirichlet: series diverges for sigma <= 1");
    const auto n_max = sieve.limit();
    const double tail =
        std::pow(static_cast<double>(n_max), 1.0 - sigma) / (sigma - 1.0);
    if (tail > tol) {
        const auto need = mobius_required_limit(sigma, tol);
        throw AccuracyError("mobius_dirichlet: sieve limit " + std::to_string(n_max) +
                                " too small for tol; need N >= " + std::to_string(need),
                            tail);
    }
    const auto mu = sieve.values();
    cplx sum{0.0, 0.0};
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const int m = mu[static_cast<std::size_t>(n)];
        if (m == 0) continue;
        const cplx term = power_term(sigma, t, std::log(static_cast<double>(n)));
        sum += m > 0 ? term : -term;
    }
    ComplexZetaValue out;
    out.sigma = sigma;
    out.t = t;
    out.value = sum;
    out.method = ZetaMethod::dirichlet_series;
    out.tail_bound = tail;
    return out;
}

double zeta_two_sigma(double sigma) {
    if (!(sigma > 0.5)) throw DomainError("zeta_two_sigma: requires sigma > 1/2");
    if (2.0 * sigma > 60.0) {
        // 1 + 2^{-2s} + 3^{-2s}: the remaining terms are below 1e-28.
        return 1.0 + std::pow(2.0, -2.0 * sigma) + std::pow(3.0, -2.0 * sigma);
    }
    return zeta_euler_maclaurin(2.0 * sigma, 0.0, 1e-14).value.real();
}

}  // namespace zl
