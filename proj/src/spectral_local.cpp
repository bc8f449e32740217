#include "zetaladder/spectral_local.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "zetaladder/errors.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {
namespace {

constexpr double kPi = std::numbers::pi;

void check_window(double x_r, double h) {
    if (!(h > 0.0) || h > std::pow(x_r, 0.25))
        throw WindowError("local window requires 0 < h <= x_r^{1/4}");
}

void check_in_window(double x_r, double h, double t) {
    if (!(t >= x_r && t <= x_r + h)) throw WindowError("t outside [x_r, x_r + h]");
}

double main_sum(double th, double t, std::int64_t n_terms) {
    double sum = 0.0;
    for (std::int64_t n = 1; n <= n_terms; ++n) {
        const double dn = static_cast<double>(n);
        sum += std::cos(th - t * std::log(dn)) / std::sqrt(dn);
    }
    return 2.0 * sum;
}

}  // namespace

LocalSpectrum local_spectrum(double x_r, double h, double floor) {
    if (!(x_r > floor)) throw DomainError("local_spectrum: x_r must exceed the working floor");
    check_window(x_r, h);
    LocalSpectrum spec;
    spec.x_r = x_r;
    spec.h = h;
    spec.phase_constant = -x_r / 2.0 - kPi / 8.0;
    const double tv = tau(x_r);
    const double log_tau = std::log(tv);
    const auto count = static_cast<std::int64_t>(std::floor(tv));
    spec.frequencies.reserve(static_cast<std::size_t>(count));
    spec.amplitudes.reserve(static_cast<std::size_t>(count));
    for (std::int64_t n = 1; n <= count; ++n) {
        const double dn = static_cast<double>(n);
        spec.frequencies.push_back(log_tau - std::log(dn));
        spec.amplitudes.push_back(2.0 / std::sqrt(dn));
    }
    return spec;
}

double local_z(const LocalSpectrum& spec, double t) {
    check_in_window(spec.x_r, spec.h, t);
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.frequencies.size(); ++i)
        sum += spec.amplitudes[i] * std::cos(t * spec.frequencies[i] + spec.phase_constant);
    return sum;
}

double phase_expansion_audit(double x_r, double h, double t) {
    check_window(x_r, h);
    check_in_window(x_r, h, t);
    return theta(t).theta - t * std::log(tau(x_r)) + x_r / 2.0 + kPi / 8.0;
}

TruncationAudit truncation_step_audit(double x_r, double h, double t) {
    check_window(x_r, h);
    check_in_window(x_r, h, t);
    const double th = theta(t).theta;
    const auto n_x = static_cast<std::int64_t>(std::floor(tau(x_r)));
    const auto n_t = static_cast<std::int64_t>(std::floor(tau(t)));
    TruncationAudit out;
    out.x_r = x_r;
    out.t = t;
    out.dropped_terms = n_t - n_x;
    out.difference = main_sum(th, t, n_t) - main_sum(th, t, n_x);
    out.per_term_bound = 2.0 / std::sqrt(static_cast<double>(n_x + 1));
    return out;
}

std::vector<double> chebyshev_points(double a, double b, int n) {
    if (n < 2) throw DomainError("chebyshev_points: need at least two points");
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        pts[static_cast<std::size_t>(j)] =
            a + (b - a) * (1.0 - std::cos(kPi * j / (n - 1))) / 2.0;
    pts.back() = b;
    return pts;
}

LocalErrorAudit audit_local_window(double x_r, double h, int samples, double floor) {
    const auto spec = local_spectrum(x_r, h, floor);
    LocalErrorAudit audit;
    audit.x_r = x_r;
    audit.h = h;
    audit.bound = kLocalErrorConstant * std::pow(x_r, -0.25);
    for (double t : chebyshev_points(x_r, x_r + h, samples)) {
        const double err = std::abs(local_z(spec, t) - riemann_siegel_z(t, true).z);
        audit.max_abs_error = std::max(audit.max_abs_error, err);
    }
    return audit;
}

std::string local_audit_csv_header() { return "x_r,h,max_abs_error,bound"; }

std::string to_csv_row(const LocalErrorAudit& audit) {
    std::ostringstream os;
    os.precision(12);
    os << audit.x_r << ',' << audit.h << ',' << audit.max_abs_error << ',' << audit.bound;
    return os.str();
}

}  // namespace zl
