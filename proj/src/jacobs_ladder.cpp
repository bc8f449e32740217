#include "zetaladder/jacobs_ladder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "zetaladder/errors.hpp"
#include "zetaladder/z_sweep.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxAuditsPerAppend = 4096;

// Gauss-Legendre rule on [0, 1].
struct UnitRule {
    std::array<double, kGaussNodes> x{};
    std::array<double, kGaussNodes> w{};
};

const UnitRule& unit_rule() {
    static const UnitRule rule = [] {
        using gauss = boost::math::quadrature::gauss<double, kGaussNodes>;
        UnitRule r;
        const auto& a = gauss::abscissa();
        const auto& w = gauss::weights();
        std::size_t j = 0;
        for (std::size_t i = a.size(); i-- > 0;) {
            if (a[i] == 0.0) continue;
            r.x[j] = (1.0 - a[i]) / 2.0;
            r.w[j++] = w[i] / 2.0;
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            r.x[j] = (1.0 + a[i]) / 2.0;
            r.w[j++] = w[i] / 2.0;
        }
        return r;
    }();
    return rule;
}

double ztilde_sq_unchecked(double t) {
    const double z = riemann_siegel_z(t, true).z;
    return z * z / std::log(t);
}

// GL integral of Z~^2 over [a, a + width] with direct evaluations.
double panel_integral(double a, double width) {
    const auto& rule = unit_rule();
    double s = 0.0;
    for (int q = 0; q < kGaussNodes; ++q) s += rule.w[q] * ztilde_sq_unchecked(a + width * rule.x[q]);
    return s * width;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double u_of_t_theta(double t, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("U(T, Theta): Theta must lie in [0, 1]");
    if (!(t > std::numbers::e)) throw DomainError("U(T, Theta): T must exceed e");
    const double lt = std::log(t);
    return std::log(lt) + theta * lt;
}

double gap_law_scale(double t) {
    if (!(t > 1.0)) throw DomainError("gap_law_scale: t must exceed 1");
    return (1.0 - kEulerGamma) * t / std::log(t);
}

double z_tilde_squared(double t, double floor) {
    if (!(t >= floor)) throw DomainError("z_tilde_squared: t below the working floor");
    return ztilde_sq_unchecked(t);
}

double LadderTable::node_t(std::size_t i) const noexcept {
    return t_.front() + static_cast<double>(i) * panels_per_node_ * panel_width_;
}

std::size_t LadderTable::node_index(double x) const {
    const double span = panels_per_node_ * panel_width_;
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor((x - t_.front()) / span)));
    i = std::min(i, t_.size() - 2);
    while (i > 0 && t_[i] > x) --i;
    while (i + 2 < t_.size() && t_[i + 1] <= x) ++i;
    return i;
}

void LadderTable::append_nodes(std::size_t count, unsigned threads) {
    if (count == 0) return;
    const std::size_t first = t_.size() - 1;  // interval index of the first new node interval
    const int s = panels_per_node_;
    const double h = panel_width_;
    const double t0 = t_.front();
    std::vector<double> increments(count);

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    auto work = [&](std::size_t lo, std::size_t hi) {
        const auto& rule = unit_rule();
        const double p0 = static_cast<double>((first + lo) * static_cast<std::size_t>(s));
        std::vector<ZSweep> sweeps;
        sweeps.reserve(kGaussNodes);
        for (int q = 0; q < kGaussNodes; ++q) sweeps.emplace_back(t0 + (p0 + rule.x[q]) * h, h, true);
        for (std::size_t j = lo; j < hi; ++j) {
            double acc = 0.0;
            for (int p = 0; p < s; ++p) {
                double panel = 0.0;
                for (int q = 0; q < kGaussNodes; ++q) {
                    const double t = sweeps[q].position();
                    const double z = sweeps[q].next();
                    panel += rule.w[q] * (z * z / std::log(t));
                }
                acc += panel;
            }
            increments[j] = acc * h;
        }
    };
    if (threads == 1) {
        work(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (count + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t lo = k * chunk;
            const std::size_t hi = std::min(count, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // error audit on a sample of the new node intervals
    std::size_t stride = kAuditStride;
    while (count / stride > kMaxAuditsPerAppend) stride *= 2;
    double worst = 0.0, worst_at = 0.0, sum = 0.0;
    std::size_t audited = 0;
    for (std::size_t j = 0; j < count; j += stride) {
        const double a = t0 + static_cast<double>((first + j) * static_cast<std::size_t>(s)) * h;
        double fine = 0.0;
        for (int p = 0; p < 2 * s; ++p) fine += panel_integral(a + p * h / 2, h / 2);
        const double err = std::abs(fine - increments[j]);
        sum += err;
        ++audited;
        if (err > worst) {
            worst = err;
            worst_at = a;
        }
    }
    if (worst > tol_) {
        std::ostringstream os;
        os << "ladder quadrature error " << worst << " exceeds tol " << tol_
           << " on node interval [" << worst_at << ", " << worst_at + s * h << "]";
        throw AccuracyError(os.str(), worst);
    }
    worst_error_ = std::max(worst_error_, worst);
    error_estimate_ += sum * static_cast<double>(count) / static_cast<double>(audited);

    // sequential compensated cumulative sum
    t_.reserve(t_.size() + count);
    phi_.reserve(phi_.size() + count);
    double raw = phi_.back() - carry_;
    for (std::size_t j = 0; j < count; ++j) {
        const double x = increments[j];
        const double next = raw + x;
        carry_ += std::abs(raw) >= std::abs(x) ? (raw - next) + x : (x - next) + raw;
        raw = next;
        t_.push_back(node_t(first + j + 1));
        phi_.push_back(raw + carry_);
    }
}

double LadderTable::phi(double x) const {
    if (!(x >= t_.front())) throw RangeError("phi_1: argument below the table");
    if (x > t_.back()) throw RangeError("phi_1: argument above the table", x);
    const std::size_t i = node_index(x);
    if (x == t_[i]) return phi_[i];
    if (x == t_[i + 1]) return phi_[i + 1];
    const double h = panel_width_;
    const double base = t_[i];
    const auto full = std::min(static_cast<int>(std::floor((x - base) / h)), panels_per_node_ - 1);
    double acc = 0.0;
    for (int p = 0; p < full; ++p) acc += panel_integral(base + p * h, h);
    const double a = base + full * h;
    if (x > a) acc += panel_integral(a, x - a);
    return phi_[i] + acc;
}

double LadderTable::interpolate(double x) const {
    if (!(x >= t_.front())) throw RangeError("phi_1: argument below the table");
    if (x > t_.back()) throw RangeError("phi_1: argument above the table", x);
    const std::size_t i = node_index(x);
    const std::size_t n = t_.size();
    const double dx = t_[i + 1] - t_[i];
    auto secant = [&](std::size_t j) { return (phi_[j + 1] - phi_[j]) / (t_[j + 1] - t_[j]); };
    auto slope = [&](std::size_t j) {
        if (j == 0) return secant(0);
        if (j == n - 1) return secant(n - 2);
        const double a = secant(j - 1);
        const double b = secant(j);
        if (a <= 0.0 || b <= 0.0) return 0.0;
        return 2.0 / (1.0 / a + 1.0 / b);
    };
    const double u = (x - t_[i]) / dx;
    const double d0 = slope(i) * dx;
    const double d1 = slope(i + 1) * dx;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * phi_[i] + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * phi_[i + 1] +
           (u3 - u2) * d1;
}

double LadderTable::phi_iterate(double x, int r) const {
    if (r < 0) throw DomainError("phi_iterate: negative order");
    for (int j = 0; j < r; ++j) x = phi(x);
    return x;
}

void LadderTable::extend(double new_high, unsigned threads) {
    if (new_high <= t_.back()) return;
    if (new_high > panel_limit_) {
        std::ostringstream os;
        os << "extension to " << new_high << " exceeds the panel limit " << panel_limit_
           << "; rebuild the table";
        throw RangeError(os.str(), new_high);
    }
    const double span = panels_per_node_ * panel_width_;
    const auto count = static_cast<std::size_t>(std::ceil((new_high - t_.back()) / span));
    append_nodes(count, threads);
}

void LadderTable::save(std::ostream& os) const {
    os << "# zetaladder ladder table v" << kLadderFormatVersion << '\n';
    os << "# t_low panel_width panels_per_node tol panel_limit worst_error error_estimate carry\n";
    os << fmt(t_.front()) << ' ' << fmt(panel_width_) << ' ' << panels_per_node_ << ' ' << fmt(tol_)
       << ' ' << fmt(panel_limit_) << ' ' << fmt(worst_error_) << ' ' << fmt(error_estimate_) << ' '
       << fmt(carry_) << '\n';
    os << "# t phi\n";
    for (std::size_t i = 0; i < t_.size(); ++i) os << fmt(t_[i]) << ' ' << fmt(phi_[i]) << '\n';
}

LadderTable LadderTable::load(std::istream& is) {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(is, line)) return false;
        ++line_no;
        return true;
    };
    if (!next_line()) throw ParseError("empty ladder table", 0);
    const std::string expected = "# zetaladder ladder table v" + std::to_string(kLadderFormatVersion);
    if (line != expected) throw ParseError("unsupported ladder table header '" + line + "'", line_no);

    LadderTable table;
    double t_low = 0.0;
    bool have_params = false;
    while (next_line()) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_params) {
            if (!(ls >> t_low >> table.panel_width_ >> table.panels_per_node_ >> table.tol_ >>
                  table.panel_limit_ >> table.worst_error_ >> table.error_estimate_ >> table.carry_))
                throw ParseError("malformed parameter line", line_no);
            if (!(table.panel_width_ > 0.0) || table.panels_per_node_ < 1)
                throw ParseError("invalid panel parameters", line_no);
            have_params = true;
            continue;
        }
        double t = 0.0, phi = 0.0;
        if (!(ls >> t >> phi)) throw ParseError("expected two columns t phi", line_no);
        if (table.t_.empty()) {
            if (t != t_low) throw ParseError("first node differs from t_low", line_no);
            table.t_.push_back(t);
        } else {
            const double expect = table.node_t(table.t_.size());
            if (std::abs(t - expect) > 1e-9 * std::abs(expect))
                throw ParseError("node off the uniform panel grid", line_no);
            if (!(phi > table.phi_.back())) throw ParseError("phi values not strictly increasing", line_no);
            table.t_.push_back(expect);
        }
        table.phi_.push_back(phi);
    }
    if (table.t_.size() < 2) throw ParseError("ladder table needs at least two nodes", line_no);
    return table;
}

LadderTable build_ladder(double t_low, double t_high, double tol, const LadderOptions& options) {
    if (!(t_low >= kWorkingFloor)) throw DomainError("build_ladder: t_low below the working floor");
    if (!(t_high > t_low)) throw DomainError("build_ladder: need t_low < t_high");
    if (!(tol > 0.0)) throw DomainError("build_ladder: tol must be positive");
    if (options.panels_per_node < 1) throw DomainError("build_ladder: panels_per_node must be positive");

    const double limit = kPanelHeadroom * t_high;
    double width = kPanelFraction * 2.0 * kPi / std::log(tau(limit));
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                            : options.threads;
    for (int halving = 0;; ++halving, width /= 2.0) {
        LadderTable table;
        table.tol_ = tol;
        table.panel_width_ = width;
        table.panels_per_node_ = options.panels_per_node;
        table.panel_limit_ = limit;
        table.t_.push_back(t_low);
        table.phi_.push_back(t_low - gap_law_scale(t_low));
        const double span = options.panels_per_node * width;
        const auto count = static_cast<std::size_t>(std::ceil((t_high - t_low) / span));
        try {
            table.append_nodes(count, threads);
        } catch (const AccuracyError&) {
            if (halving >= options.max_halvings) throw;
            continue;
        }
        return table;
    }
}

double ladder_inverse(const LadderTable& table, double target) {
    const auto phi = table.phi_values();
    const auto t = table.t_grid();
    if (!(target >= phi.front())) throw RangeError("ladder_inverse: target below phi_1(t_low)");
    if (target > phi.back()) {
        const double need = table.t_high() + 1.5 * (target - phi.back());
        throw RangeError("ladder_inverse: target above phi_1(t_high); extend the table", need);
    }
    auto it = std::upper_bound(phi.begin(), phi.end(), target);
    if (it == phi.end()) return t.back();
    const auto j = static_cast<std::size_t>(it - phi.begin()) - 1;
    if (phi[j] == target) return t[j];

    const double tol = table.quadrature_tol();
    double best_x = t[j];
    double best_f = std::abs(phi[j] - target);
    auto f = [&](double x) {
        const double v = table.phi(x) - target;
        if (std::abs(v) < best_f) {
            best_f = std::abs(v);
            best_x = x;
        }
        return v;
    };
    auto done = [&](double a, double b) { return best_f <= 0.1 * tol || b - a <= 1e-15 * b; };
    std::uintmax_t iters = 100;
    const double fa = phi[j] - target;
    const double fb = phi[j + 1] - target;
    if (std::abs(fb) < best_f) {
        best_f = std::abs(fb);
        best_x = t[j + 1];
    }
    if (best_f > 0.1 * tol) boost::math::tools::toms748_solve(f, t[j], t[j + 1], fa, fb, done, iters);
    if (best_f > tol) {
        std::ostringstream os;
        os << "ladder_inverse: residual " << best_f << " above tol " << tol;
        throw AccuracyError(os.str(), best_f);
    }
    return best_x;
}

double ladder_span_estimate(double t_base, double u, int k) {
    return t_base + 1.5 * k * gap_law_scale(t_base) + 2.0 * (k + 1) * u + 64.0;
}

SegmentChain reverse_iterates(const LadderTable& table, double t_base, double u, int k) {
    if (k < 1) throw DomainError("reverse_iterates: k must be at least 1");
    if (!(u > 0.0)) throw DomainError("reverse_iterates: U must be positive");
    SegmentChain chain;
    chain.base = {t_base, t_base + u};
    chain.u = u;
    Interval prev = chain.base;
    for (int r = 1; r <= k; ++r) {
        Interval next;
        try {
            next.lo = ladder_inverse(table, prev.lo);
            next.hi = ladder_inverse(table, prev.hi);
        } catch (const RangeError& e) {
            if (e.required_high() <= 0.0) throw;
            const double need = std::max(e.required_high() + (k - r) * 1.5 * gap_law_scale(t_base) + 4.0 * u,
                                         ladder_span_estimate(t_base, u, k));
            std::ostringstream os;
            os << "reverse_iterates: iterate " << r << " leaves the table; extend to at least " << need;
            throw RangeError(os.str(), need);
        }
        if (!(next.lo > prev.hi) || !(next.hi > next.lo)) {
            std::ostringstream os;
            os << "reverse_iterates: iterate " << r << " is not ordered after iterate " << r - 1;
            throw ChainError(os.str());
        }
        chain.gaps.push_back(next.lo - prev.hi);
        chain.iterates.push_back(next);
        prev = next;
    }
    return chain;
}

}  // namespace zl
