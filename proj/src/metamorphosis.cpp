#include "zetaladder/metamorphosis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zetaladder/errors.hpp"
#include "zetaladder/eval_cache.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {

namespace {

double z_at(double t) { return riemann_siegel_z(t, true).z; }

double local_or_global_z(double x, bool use_local_form) {
    if (use_local_form) {
        const double h = std::pow(x, 0.25);
        try {
            return local_z(local_spectrum(x - 0.5 * h, h), x);
        } catch (const DomainError&) {
        } catch (const WindowError&) {
        }
    }
    return z_at(x);
}

std::vector<double> sorted_checked(std::span<const double> v, const char* name) {
    std::vector<double> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > kWorkingFloor))
            throw DomainError(std::string("q_system: ") + name + " below the working floor");
        if (i > 0 && !(out[i] > out[i - 1]))
            throw DomainError(std::string("q_system: ") + name + " not strictly increasing");
    }
    return out;
}

std::vector<double> images_into_chain(const MeanValuePoint& p, const SegmentChain& chain,
                                      std::size_t count, const char* name) {
    const int k = chain.k();
    if (p.iterate_images.size() != count) {
        std::ostringstream os;
        os << name << ": expected " << count << " iterate images, got " << p.iterate_images.size();
        throw ChainError(os.str());
    }
    const double slack = std::max(1e-6, 1e-12 * chain.base.hi);
    std::vector<double> out(count);
    for (std::size_t r = 0; r < count; ++r) {
        const int index = k - static_cast<int>(r);
        const Interval& seg = chain.segment(index);
        const double x = p.iterate_images[r];
        if (x < seg.lo - slack || x > seg.hi + slack) {
            std::ostringstream os;
            os.precision(12);
            os << name << "_" << index << " = " << x << " outside [" << seg.lo << ", " << seg.hi
               << "]";
            throw ChainError(os.str());
        }
        out[count - 1 - r] = x;
    }
    return out;
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

class StageClock {
public:
    explicit StageClock(std::map<std::string, double>& out) : out_(out) {}

    template <class F>
    auto operator()(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        struct Record {
            std::map<std::string, double>& out;
            const std::string& name;
            std::chrono::steady_clock::time_point t0;
            ~Record() {
                out[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        } record{out_, name, t0};
        try {
            return f();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    }

private:
    std::map<std::string, double>& out_;
};

}  // namespace

QSystemValue q_system(std::span<const double> xs, std::span<const double> ys, bool use_local_form,
                      double zero_guard) {
    if (xs.size() != ys.size() || xs.empty())
        throw DomainError("q_system: xs and ys must be nonempty and of equal length");
    QSystemValue out;
    out.xs = sorted_checked(xs, "xs");
    out.ys = sorted_checked(ys, "ys");
    double value = 1.0;
    for (std::size_t r = 0; r < out.xs.size(); ++r) {
        const double den = std::abs(local_or_global_z(out.ys[r], use_local_form));
        if (!(den >= zero_guard)) {
            std::ostringstream os;
            os << "q_system: |Z(y_" << r + 1 << ")| = " << den << " below zero guard " << zero_guard;
            throw SingularPointError(os.str(), static_cast<int>(r + 1));
        }
        value *= std::abs(local_or_global_z(out.xs[r], use_local_form)) / den;
    }
    out.value = value;
    return out;
}

std::vector<double> extract_alphas(const MeanValuePoint& d, const SegmentChain& chain) {
    return images_into_chain(d, chain, static_cast<std::size_t>(chain.k()) + 1, "alpha");
}

std::vector<double> extract_betas(const MeanValuePoint& e, const SegmentChain& chain) {
    return images_into_chain(e, chain, static_cast<std::size_t>(chain.k()), "beta");
}

double product_formula_alpha_check(const ControlSequences& seq, const SegmentChain& chain,
                                   double mobius_modulus) {
    double prod = 1.0;
    for (int r = 1; r <= seq.k; ++r) prod *= std::pow(z_at(seq.alphas[static_cast<std::size_t>(r)]), 2);
    const double len = chain.segment(seq.k).length();
    const double rhs = zeta_two_sigma(seq.sigma) * (chain.u / len) *
                       std::pow(std::log(seq.t_base), seq.k) * mobius_modulus * mobius_modulus;
    return prod / rhs;
}

double product_formula_beta_check(const ControlSequences& seq, const SegmentChain& chain) {
    double prod = 1.0;
    for (double b : seq.betas) prod *= std::pow(z_at(b), 2);
    const double len = chain.segment(seq.k).length();
    return prod / ((chain.u / len) * std::pow(std::log(seq.t_base), seq.k));
}

std::vector<CheckResult> check_sequences(const ControlSequences& seq, const SegmentChain& chain,
                                         double zero_guard) {
    std::vector<CheckResult> out;
    const auto& a = seq.alphas;
    const auto& b = seq.betas;
    const bool sizes = a.size() == static_cast<std::size_t>(seq.k) + 1 &&
                       b.size() == static_cast<std::size_t>(seq.k);
    if (!sizes) {
        out.push_back({"ordering", false, "sequence lengths do not match k"});
        return out;
    }

    const bool ordered = a.front() > seq.t_base && strictly_increasing(a) &&
                         b.front() > seq.t_base && strictly_increasing(b);
    out.push_back({"ordering", ordered, ordered ? "" : "alphas or betas not increasing above T"});

    std::string where;
    for (int r = 0; r <= seq.k; ++r) {
        if (!chain.segment(r).contains_open(a[static_cast<std::size_t>(r)]))
            where += "alpha_" + std::to_string(r) + " ";
        if (r > 0 && !chain.segment(r).contains_open(b[static_cast<std::size_t>(r - 1)]))
            where += "beta_" + std::to_string(r) + " ";
    }
    out.push_back({"inclusion", where.empty(), where.empty() ? "" : "outside its segment: " + where});

    where.clear();
    for (std::size_t r = 0; r < a.size(); ++r)
        if (!(std::abs(z_at(a[r])) > zero_guard)) where += "alpha_" + std::to_string(r) + " ";
    for (std::size_t r = 0; r < b.size(); ++r)
        if (!(std::abs(z_at(b[r])) > zero_guard)) where += "beta_" + std::to_string(r + 1) + " ";
    out.push_back({"zero_guard", where.empty(), where.empty() ? "" : "|Z| below guard at " + where});

    const double scale = gap_law_scale(seq.t_base);
    auto spacing = [&](const std::vector<double>& v, const char* name) {
        std::string bad;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double ratio = (v[i + 1] - v[i]) / scale;
            if (!(ratio >= kSpacingBandLow && ratio <= kSpacingBandHigh))
                bad += std::string(name) + " gap " + std::to_string(i + 1) + " ratio " + fmt(ratio) + " ";
        }
        return bad;
    };
    const auto sa = spacing(a, "alpha");
    out.push_back({"spacing_alpha", sa.empty(), sa});
    const auto sb = spacing(b, "beta");
    out.push_back({"spacing_beta", sb.empty(), sb});
    return out;
}

bool MetamorphosisReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

MetamorphosisReport run_metamorphosis(const ExperimentConfig& config, EvalCache* cache) {
    MetamorphosisReport report;
    StageClock stage(report.stage_seconds);
    auto& diag = report.diagnostics;

    stage("config", [&] {
        validate(config);
        return 0;
    });
    const double t = config.t_base;
    const int k = config.k;
    const double sigma = config.sigma;
    const double u = u_of_t_theta(t, config.theta);
    const double ladder_tol = 10.0 * config.quad_tol;
    const double zeta2 = zeta_two_sigma(sigma);

    // ladder and chain: extend, or rebuild past the panel limit, until the
    // chain fits
    std::shared_ptr<const LadderTable> table;
    const double first_high = ladder_span_estimate(t, u, k);
    std::ostringstream key_stream;
    key_stream.precision(17);
    key_stream << "ladder|" << t << '|' << first_high << '|' << ladder_tol << '|' << u << '|' << k;
    const std::string ladder_key = key_stream.str();
    if (cache) table = cache->find_ladder(ladder_key);
    SegmentChain chain;
    if (table) {
        chain = stage("chain", [&] { return reverse_iterates(*table, t, u, k); });
    } else {
        auto built = stage("ladder", [&] { return build_ladder(t, first_high, ladder_tol); });
        for (int attempt = 0;; ++attempt) {
            try {
                chain = stage("chain", [&] { return reverse_iterates(built, t, u, k); });
                break;
            } catch (const StageError&) {
                double need = 0.0;
                try {
                    reverse_iterates(built, t, u, k);
                } catch (const RangeError& e) {
                    need = e.required_high();
                } catch (...) {
                }
                if (attempt >= 3 || !(need > built.t_high())) throw;
                const double high = need + 64.0 + 0.01 * (need - t);
                stage("ladder", [&] {
                    if (high <= built.panel_limit()) built.extend(high);
                    else built = build_ladder(t, high, ladder_tol);
                    return 0;
                });
            }
        }
        table = std::make_shared<const LadderTable>(std::move(built));
        if (cache) cache->store_ladder(ladder_key, *table);
    }
    report.chain = chain;
    diag["ladder_t_high"] = table->t_high();
    diag["ladder_worst_interval_error"] = table->worst_interval_error();
    diag["ladder_error_estimate"] = table->error_estimate();
    double gap_sum = 0.0;
    for (std::size_t r = 0; r < chain.gaps.size(); ++r) {
        gap_sum += chain.gaps[r];
        diag["gap_ratio_" + std::to_string(r + 1)] = chain.gaps[r] / gap_law_scale(t);
    }
    diag["gap_mean"] = gap_sum / static_cast<double>(chain.gaps.size());
    diag["gap_law_ratio"] = diag["gap_mean"] / gap_law_scale(t);

    const std::string run = run_key(config);

    // d: mean value point of the composed integrand with the zeta factor
    report.d_point = stage("d_point", [&] {
        ComposedIntegrand f(chain, *table, sigma);
        if (cache) f.attach_memo(cache->memo("composed|" + run, ladder_tol));
        const auto integral = integrate_composed(f, config.quad_tol * zeta2 * u);
        diag["composed_integral"] = integral.value;
        diag["composed_integral_error"] = integral.abs_error_estimate;
        diag["composed_mean_ratio"] = integral.value / (zeta2 * u);
        return find_mean_value_point(f, integral.value, config.root_tol, PointKind::d_point);
    });
    diag["d_residual"] = report.d_point.residual;

    // e: the same without the zeta factor, whose integral is U
    double change_error = 0.0;
    report.e_point = stage("e_point", [&] {
        ComposedIntegrand f(chain, *table, std::nullopt);
        if (cache) f.attach_memo(cache->memo("ztilde|" + run, ladder_tol));
        const auto integral = integrate_composed(f, config.quad_tol * u);
        change_error = std::abs(integral.value - u);
        diag["ztilde_integral"] = integral.value;
        return find_mean_value_point(f, u, config.root_tol, PointKind::e_point);
    });
    diag["e_residual"] = report.e_point.residual;
    diag["change_of_variables_error"] = change_error;

    auto& seq = report.sequences;
    seq.sigma = sigma;
    seq.t_base = t;
    seq.theta = config.theta;
    seq.k = k;
    seq.epsilon = config.epsilon;
    stage("sequences", [&] {
        seq.alphas = extract_alphas(report.d_point, chain);
        seq.betas = extract_betas(report.e_point, chain);
        return 0;
    });
    report.checks = check_sequences(seq, chain, config.zero_guard);
    double zmin_a = 1e300, zmin_b = 1e300;
    for (double a : seq.alphas) zmin_a = std::min(zmin_a, std::abs(z_at(a)));
    for (double b : seq.betas) zmin_b = std::min(zmin_b, std::abs(z_at(b)));
    diag["min_abs_z_alpha"] = zmin_a;
    diag["min_abs_z_beta"] = zmin_b;

    report.lhs = stage("q_system", [&] {
        const std::span<const double> xs(seq.alphas.data() + 1, static_cast<std::size_t>(k));
        return q_system(xs, seq.betas, false, config.zero_guard).value;
    });

    const double alpha0 = seq.alphas.front();
    double mobius_modulus = 0.0;
    stage("rhs", [&] {
        const MobiusSieve sieve(config.sieve_limit);
        const double tail =
            std::pow(static_cast<double>(config.sieve_limit), 1.0 - sigma) / (sigma - 1.0);
        const auto m = mobius_dirichlet(sigma, alpha0, sieve, tail * (1.0 + 1e-12));
        const double em_tol = std::max(1e-11, 2.0 * euler_maclaurin_noise_floor(sigma, alpha0));
        const auto z = zeta_euler_maclaurin(sigma, alpha0, em_tol);
        mobius_modulus = std::abs(m.value);
        report.rhs = std::sqrt(zeta2) * mobius_modulus;
        const double residual = std::abs(m.value * z.value - 1.0);
        const double bound = std::abs(z.value) * m.tail_bound + mobius_modulus * z.tail_bound + 1e-12;
        diag["mobius_tail_bound"] = m.tail_bound;
        diag["zeta_tail_bound"] = z.tail_bound;
        diag["mobius_identity_residual"] = residual;
        diag["mobius_identity_bound"] = bound;
        diag["rhs_via_zeta"] = std::sqrt(zeta2) / std::abs(z.value);
        report.checks.push_back({"mobius_identity", residual <= bound,
                                 "|M zeta - 1| = " + fmt(residual) + ", bound " + fmt(bound)});
        return 0;
    });

    report.ratio = report.lhs / report.rhs;
    const bool finite = std::isfinite(report.ratio) && report.lhs > 0.0 && report.rhs > 0.0;
    report.checks.push_back({"ratio_finite", finite, finite ? "" : "lhs or rhs not positive"});

    stage("product_checks", [&] {
        const double a = product_formula_alpha_check(seq, chain, mobius_modulus);
        const double b = product_formula_beta_check(seq, chain);
        diag["alpha_check"] = a;
        diag["beta_check"] = b;
        const double gap = std::abs(report.ratio - std::sqrt(a / b));
        diag["consistency_residual"] = gap;
        report.checks.push_back({"factorization_consistency", gap <= kConsistencyTol,
                                 "|lhs/rhs - sqrt(alpha/beta)| = " + fmt(gap)});
        return 0;
    });

    const double change_tol = std::max(config.quad_tol, 1e-4 * u);
    report.checks.push_back({"change_of_variables", change_error <= change_tol,
                             "|integral - U| = " + fmt(change_error) + ", tol " + fmt(change_tol)});

    stage("local_audit", [&] {
        double worst = 0.0;
        for (double a : seq.alphas) {
            const auto audit = audit_local_window(a, std::pow(a, 0.25));
            worst = std::max(worst, audit.max_abs_error / audit.bound);
            report.local_audits.push_back(audit);
        }
        diag["local_error_to_bound"] = worst;
        return 0;
    });
    return report;
}

}  // namespace zl
