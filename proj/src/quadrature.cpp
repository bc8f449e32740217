#include "zetaladder/quadrature.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "zetaladder/errors.hpp"

namespace zl {
namespace {

constexpr double kPi = std::numbers::pi;

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

// 15-point Gauss-Kronrod with the QUADPACK error scaling, which damps the
// raw |K15 - G7| for smooth integrands and adds a rounding floor.
Piece gk15(const std::function<double(double)>& f, double a, double b) {
    using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
    using gauss = boost::math::quadrature::gauss<double, 7>;
    const auto& x = kronrod::abscissa();
    const auto& wk = kronrod::weights();
    const auto& wg = gauss::weights();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> fv{};
    fv[0] = f(centre);
    for (std::size_t i = 1; i < x.size(); ++i) {
        fv[2 * i - 1] = f(centre - half * x[i]);
        fv[2 * i] = f(centre + half * x[i]);
    }
    double resk = fv[0] * wk[0];
    double resg = fv[0] * wg[0];
    double resabs = std::abs(resk);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double pair = fv[2 * i - 1] + fv[2 * i];
        resk += wk[i] * pair;
        resabs += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
        if (i % 2 == 0) resg += wg[i / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < x.size(); ++i)
        resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
    return {a, b, resk * half, err};
}

double zero_spacing(double t) { return 2.0 * kPi / std::log(tau(std::max(t, 8.0 * kPi))); }

std::string fmt12(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::string to_string(IntegrandId id) {
    switch (id) {
        case IntegrandId::zeta_sq_sigma: return "zeta_sq_sigma";
        case IntegrandId::ztilde_product: return "ztilde_product";
        case IntegrandId::composed_product: return "composed_product";
    }
    return "unknown";
}

std::string to_string(PointKind kind) { return kind == PointKind::d_point ? "d_point" : "e_point"; }

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tol, IntegrandId id) {
    if (!(b > a)) throw DomainError("integrate: need t_from < t_to");
    if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
    const auto n0 = std::max(1, static_cast<int>(std::ceil((b - a) / zero_spacing(b))));
    std::priority_queue<Piece> heap;
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = i + 1 == n0 ? b : a + (b - a) * (i + 1) / n0;
        heap.push(gk15(f, lo, hi));
    }
    auto sum_errors = [&] {
        auto copy = heap;
        double s = 0.0;
        while (!copy.empty()) {
            s += copy.top().error;
            copy.pop();
        }
        return s;
    };
    double total_err = sum_errors();
    while (total_err > tol) {
        if (static_cast<int>(heap.size()) >= kMaxSubintervals) {
            std::ostringstream os;
            os.precision(12);
            os << "integrate: error estimate " << total_err << " above tol " << tol << " after "
               << heap.size() << " subintervals; worst [" << heap.top().a << ", " << heap.top().b << "]";
            throw AccuracyError(os.str(), total_err);
        }
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw AccuracyError("integrate: subinterval collapsed to rounding level", total_err);
        }
        const Piece left = gk15(f, worst.a, mid);
        const Piece right = gk15(f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // refresh the running sum now and then against drift
        if (heap.size() % 256 == 0) total_err = sum_errors();
    }
    IntegralResult out;
    out.integrand_id = id;
    out.panels = static_cast<int>(heap.size());
    std::vector<Piece> pieces;
    pieces.reserve(heap.size());
    while (!heap.empty()) {
        pieces.push_back(heap.top());
        heap.pop();
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
    double sum = 0.0, carry = 0.0, err = 0.0;
    for (const auto& p : pieces) {
        const double next = sum + p.value;
        carry += std::abs(sum) >= std::abs(p.value) ? (sum - next) + p.value : (p.value - next) + sum;
        sum = next;
        err += p.error;
    }
    out.value = sum + carry;
    out.abs_error_estimate = err;
    return out;
}

IntegralResult integrate_zeta_sq(const ZetaStrip& strip, double t_from, double t_to, double tol) {
    if (!(strip.sigma() > 1.0)) throw DomainError("integrate_zeta_sq: requires sigma > 1");
    auto f = [&strip](double t) { return std::norm(strip(t)); };
    return integrate_adaptive(f, t_from, t_to, tol, IntegrandId::zeta_sq_sigma);
}

IntegralResult integrate_zeta_sq(double sigma, double t_from, double t_to, double tol) {
    if (!(sigma > 1.0)) throw DomainError("integrate_zeta_sq: requires sigma > 1");
    if (!(t_to > t_from)) throw DomainError("integrate_zeta_sq: need t_from < t_to");
    const ZetaStrip strip(sigma, t_from, t_to);
    return integrate_zeta_sq(strip, t_from, t_to, tol);
}

ComposedIntegrand::ComposedIntegrand(const SegmentChain& chain, const LadderTable& table,
                                     std::optional<double> sigma)
    : chain_(chain), table_(table) {
    if (chain.k() < 1) throw DomainError("composed integrand: chain has no iterates");
    if (sigma) {
        if (!(*sigma > 1.0)) throw DomainError("composed integrand: requires sigma > 1");
        strip_ = std::make_shared<const ZetaStrip>(*sigma, chain.base.lo, chain.base.hi);
    }
}

double ComposedIntegrand::product(double t, double* top) const {
    const int k = chain_.k();
    // inversion residuals grow by the local slope at each iterate
    const double slack = std::max(1e-6, 1e3 * table_.quadrature_tol());
    double prod = 1.0;
    double x = t;
    for (int r = 0; r < k; ++r) {
        const Interval& seg = chain_.segment(k - r);
        if (x < seg.lo - slack || x > seg.hi + slack) {
            std::ostringstream os;
            os << "phi_1^" << r << "(" << t << ") = " << x << " escaped iterate " << k - r;
            throw ChainError(os.str());
        }
        prod *= z_tilde_squared(x);
        x = table_.phi(x);
    }
    if (x < chain_.base.lo - slack || x > chain_.base.hi + slack) {
        std::ostringstream os;
        os << "phi_1^" << k << "(" << t << ") = " << x << " escaped the base segment";
        throw ChainError(os.str());
    }
    *top = std::clamp(x, chain_.base.lo, chain_.base.hi);
    return prod;
}

double ComposedIntegrand::ztilde_product(double t) const {
    double top = 0.0;
    return product(t, &top);
}

double ComposedIntegrand::zeta_sq_at(double u) const {
    if (!strip_) throw DomainError("composed integrand: no sigma");
    return std::norm((*strip_)(u));
}

double ComposedIntegrand::operator()(double t) const {
    if (memo_) {
        if (auto hit = memo_->find(t)) return *hit;
    }
    double top = 0.0;
    const double prod = product(t, &top);
    const double value = strip_ ? prod * std::norm((*strip_)(top)) : prod;
    if (memo_) memo_->store(t, value);
    return value;
}

std::vector<double> ComposedIntegrand::images(double t, int count) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    double x = t;
    for (int r = 0; r < count; ++r) {
        out.push_back(x);
        if (r + 1 < count) x = table_.phi(x);
    }
    return out;
}

IntegralResult integrate_composed(const ComposedIntegrand& f, double tol) {
    const Interval& dom = f.domain();
    return integrate_adaptive([&f](double t) { return f(t); }, dom.lo, dom.hi, tol, f.id());
}

IntegralResult integrate_composed(const SegmentChain& chain, const LadderTable& table,
                                  std::optional<double> sigma, double tol) {
    const ComposedIntegrand f(chain, table, sigma);
    return integrate_composed(f, tol);
}

MeanValuePoint find_mean_value_point(const ComposedIntegrand& f, double integral, double tol,
                                     PointKind kind) {
    if (!(tol > 0.0)) throw DomainError("mean value point: tol must be positive");
    const Interval dom = f.domain();
    const double len = dom.length();
    auto g = [&](double x) { return integral - len * f(x); };

    for (int n = kInitialScan; n <= kMaxScan; n *= 2) {
        // interior scan points; the root must lie in the open interval
        std::vector<double> xs(static_cast<std::size_t>(n)), gs(static_cast<std::size_t>(n));
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -fmin;
        for (int i = 0; i < n; ++i) {
            xs[i] = dom.lo + len * (i + 0.5) / n;
            const double fx = f(xs[i]);
            fmin = std::min(fmin, fx);
            fmax = std::max(fmax, fx);
            gs[i] = integral - len * fx;
        }
        for (int i = 0; i + 1 < n; ++i) {
            if (gs[i] == 0.0 || gs[i] * gs[i + 1] < 0.0) {
                MeanValuePoint out;
                out.kind = kind;
                out.scan_min = fmin;
                out.scan_max = fmax;
                out.scan_points = n;
                double best_x = xs[i];
                double best_g = std::abs(gs[i]);
                if (gs[i] != 0.0) {
                    const double target = tol * std::abs(integral);
                    auto tracked = [&](double x) {
                        const double v = g(x);
                        if (std::abs(v) < best_g) {
                            best_g = std::abs(v);
                            best_x = x;
                        }
                        return v;
                    };
                    if (std::abs(gs[i + 1]) < best_g) {
                        best_g = std::abs(gs[i + 1]);
                        best_x = xs[i + 1];
                    }
                    auto done = [&](double a, double b) { return best_g <= target || b - a <= 1e-15 * b; };
                    std::uintmax_t iters = 200;
                    if (best_g > target)
                        boost::math::tools::toms748_solve(tracked, xs[i], xs[i + 1], gs[i], gs[i + 1], done, iters);
                    if (best_g > target) {
                        std::ostringstream os;
                        os << to_string(kind) << ": residual " << best_g << " above " << target;
                        throw AccuracyError(os.str(), best_g);
                    }
                }
                out.location = best_x;
                out.residual = g(best_x);
                out.boundary_warning = best_x - dom.lo <= tol * len || dom.hi - best_x <= tol * len;
                out.iterate_images = f.images(best_x, kind == PointKind::d_point ? f.k() + 1 : f.k());
                return out;
            }
        }
    }
    std::ostringstream os;
    os << to_string(kind) << ": no sign change of I - L F on " << kMaxScan << " scan points";
    throw ResolutionError(os.str());
}

MeanValuePoint find_d_point(const SegmentChain& chain, const LadderTable& table, double sigma,
                            double tol) {
    const ComposedIntegrand f(chain, table, sigma);
    const auto integral = integrate_composed(f, 0.1 * tol * zeta_two_sigma(sigma) * chain.u);
    return find_mean_value_point(f, integral.value, tol, PointKind::d_point);
}

MeanValuePoint find_e_point(const SegmentChain& chain, const LadderTable& table, double tol) {
    const ComposedIntegrand f(chain, table, std::nullopt);
    return find_mean_value_point(f, chain.u, tol, PointKind::e_point);
}

std::string integral_csv_header() { return "integrand,value,abs_error_estimate,panels"; }

std::string to_csv_row(const IntegralResult& r) {
    return to_string(r.integrand_id) + ',' + fmt12(r.value) + ',' + fmt12(r.abs_error_estimate) + ',' +
           std::to_string(r.panels);
}

std::string mean_value_csv_header() { return "kind,location,residual,scan_points,iterate_images"; }

std::string to_csv_row(const MeanValuePoint& p) {
    std::string images;
    for (std::size_t i = 0; i < p.iterate_images.size(); ++i) {
        if (i) images += ';';
        images += fmt12(p.iterate_images[i]);
    }
    return to_string(p.kind) + ',' + fmt12(p.location) + ',' + fmt12(p.residual) + ',' +
           std::to_string(p.scan_points) + ',' + images;
}

}  // namespace zl
