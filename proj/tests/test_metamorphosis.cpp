#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "zetaladder/errors.hpp"
#include "zetaladder/metamorphosis.hpp"
#include "zetaladder/zeta_core.hpp"

namespace {

using namespace zl;

double em_abs(double t) {
    const double tol = std::max(1e-11, 2 * euler_maclaurin_noise_floor(0.5, t));
    return std::abs(zeta_euler_maclaurin(0.5, t, tol).value);
}

double zero_of_z_after(double t) {
    double a = t;
    double fa = riemann_siegel_z(a).z;
    double b = a;
    while (true) {
        b = a + 0.05;
        if (riemann_siegel_z(b).z * fa < 0) break;
        a = b;
        fa = riemann_siegel_z(a).z;
    }
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::bisect([](double x) { return riemann_siegel_z(x).z; }, a, b,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
    return (root.first + root.second) / 2;
}

ExperimentConfig config_at(double t, int k) {
    ExperimentConfig c;
    c.t_base = t;
    c.k = k;
    return c;
}

const MetamorphosisReport& report_1e5() {
    static const MetamorphosisReport r = run_metamorphosis(config_at(1e5, 2));
    return r;
}

const CheckResult& check_named(const MetamorphosisReport& r, const std::string& name) {
    const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                                 [&](const CheckResult& c) { return c.name == name; });
    if (it == r.checks.end()) throw std::runtime_error("no check " + name);
    return *it;
}

TEST(QSystem, IdenticalTuplesGiveOne) {
    const std::vector<double> xs{2e4, 3e4 + 0.3, 5e4 + 0.7};
    EXPECT_EQ(q_system(xs, xs).value, 1.0);
}

TEST(QSystem, SingleFactorMatchesZetaModuli) {
    const double x = 12345.6, y = 23456.7;
    const std::vector<double> xs{x}, ys{y};
    const double oracle = em_abs(x) / em_abs(y);
    const auto rx = riemann_siegel_z(x), ry = riemann_siegel_z(y);
    // first-order propagation of the two remainder bounds
    const double bound = oracle * (rx.remainder_bound / std::abs(rx.z) + ry.remainder_bound / std::abs(ry.z));
    EXPECT_NEAR(q_system(xs, ys).value, oracle, bound);
}

TEST(QSystem, InvariantUnderConsistentReordering) {
    const std::vector<double> xs{2e4 + 0.1, 3e4 + 0.2, 4e4 + 0.3};
    const std::vector<double> ys{2e4 + 0.5, 3e4 + 0.6, 4e4 + 0.7};
    const std::vector<double> xr{xs[2], xs[0], xs[1]};
    const std::vector<double> yr{ys[2], ys[0], ys[1]};
    EXPECT_EQ(q_system(xs, ys).value, q_system(xr, yr).value);
    double manual = 1.0;
    for (int r = 0; r < 3; ++r) manual *= std::abs(riemann_siegel_z(xs[r]).z / riemann_siegel_z(ys[r]).z);
    EXPECT_NEAR(q_system(xs, ys).value, manual, 1e-14 * manual);
}

TEST(QSystem, SingularDenominatorNamesItsIndex) {
    const double zero = zero_of_z_after(3e4);
    const std::vector<double> xs{2e4, 4e4};
    const std::vector<double> ys{2e4 + 0.5, zero};
    try {
        q_system(xs, ys);
        FAIL() << "expected SingularPointError";
    } catch (const SingularPointError& e) {
        EXPECT_EQ(e.index(), 2);
    }
    // a zero in the numerator is not singular
    const std::vector<double> num{2e4, zero};
    EXPECT_LT(q_system(num, xs).value, 1e-6);
}

TEST(QSystem, Contracts) {
    const std::vector<double> a{2e4, 2e4}, b{3e4, 4e4}, low{500.0}, one{2e4};
    EXPECT_THROW(q_system(a, b), DomainError);
    EXPECT_THROW(q_system(low, one), DomainError);
    EXPECT_THROW(q_system(one, b), DomainError);
}

TEST(QSystem, LocalFormStaysWithinLocalErrorBound) {
    const std::vector<double> xs{2e5 + 0.3}, ys{3e5 + 0.8};
    const double global = q_system(xs, ys).value;
    const double local = q_system(xs, ys, true).value;
    const double zx = std::abs(riemann_siegel_z(xs[0]).z), zy = std::abs(riemann_siegel_z(ys[0]).z);
    const double ex = kLocalErrorConstant * std::pow(xs[0], -0.25);
    const double ey = kLocalErrorConstant * std::pow(ys[0], -0.25);
    EXPECT_NEAR(local, global, (zx + ex) / (zy - ey) - zx / zy);
}

TEST(Metamorphosis, RatioWithinWideBandAtOneHundredThousand) {
    const auto& r = report_1e5();
    EXPECT_GE(r.ratio, 0.4);
    EXPECT_LE(r.ratio, 2.5);
    EXPECT_GT(r.lhs, 0.0);
    EXPECT_GT(r.rhs, 0.0);
    EXPECT_TRUE(r.all_passed());
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Metamorphosis, RatioIsSquareRootOfProductChecks) {
    const auto& r = report_1e5();
    const double a = r.diagnostics.at("alpha_check");
    const double b = r.diagnostics.at("beta_check");
    EXPECT_NEAR(r.ratio, std::sqrt(a / b), 1e-10);
}

TEST(Metamorphosis, ProductChecksWithinBands) {
    const auto& r = report_1e5();
    EXPECT_GE(r.diagnostics.at("alpha_check"), 0.5);
    EXPECT_LE(r.diagnostics.at("alpha_check"), 2.0);
    EXPECT_GE(r.diagnostics.at("beta_check"), 0.5);
    EXPECT_LE(r.diagnostics.at("beta_check"), 2.0);
}

TEST(Metamorphosis, AlphaCheckIsTheMeanValueRatioRearranged) {
    // L F(d) = I with Z~^2 replaced by Z^2 / ln T
    const auto& r = report_1e5();
    const auto& s = r.sequences;
    const double len = r.chain.segment(s.k).length();
    const double zeta2 = zeta_two_sigma(s.sigma);
    const double m = r.rhs / std::sqrt(zeta2);
    double prod = 1.0;
    for (int i = 1; i <= s.k; ++i) prod *= std::pow(riemann_siegel_z(s.alphas[i]).z, 2) / std::log(s.t_base);
    const double expected = len * prod / (zeta2 * r.chain.u * m * m);
    EXPECT_NEAR(product_formula_alpha_check(s, r.chain, m), expected, 1e-12 * expected);
    double bprod = 1.0;
    for (double b : s.betas) bprod *= std::pow(riemann_siegel_z(b).z, 2) / std::log(s.t_base);
    EXPECT_NEAR(product_formula_beta_check(s, r.chain), len * bprod / r.chain.u, 1e-12);
}

TEST(Metamorphosis, RhsAgreesWithInverseZeta) {
    const auto& r = report_1e5();
    const double via_zeta = r.diagnostics.at("rhs_via_zeta");
    const double tail = r.diagnostics.at("mobius_identity_bound");
    EXPECT_NEAR(r.rhs / via_zeta, 1.0, tail);
    EXPECT_TRUE(check_named(r, "mobius_identity").passed);
}

TEST(Metamorphosis, SequencesFollowTheMeanValuePoints) {
    const auto& r = report_1e5();
    const auto& s = r.sequences;
    ASSERT_EQ(s.alphas.size(), 3u);
    ASSERT_EQ(s.betas.size(), 2u);
    EXPECT_EQ(s.alphas[2], r.d_point.location);
    EXPECT_EQ(s.alphas[0], r.d_point.iterate_images[2]);
    EXPECT_EQ(s.betas[1], r.e_point.location);
    EXPECT_EQ(s.betas[0], r.e_point.iterate_images[1]);
    for (int i = 0; i <= s.k; ++i) EXPECT_TRUE(r.chain.segment(i).contains_open(s.alphas[i])) << i;
    for (int i = 1; i <= s.k; ++i) EXPECT_TRUE(r.chain.segment(i).contains_open(s.betas[i - 1])) << i;
    EXPECT_GT(s.alphas[0], s.t_base);
    EXPECT_TRUE(std::is_sorted(s.alphas.begin(), s.alphas.end()));
    for (double a : s.alphas) EXPECT_GT(std::abs(riemann_siegel_z(a).z), kZeroGuard);
    for (double b : s.betas) EXPECT_GT(std::abs(riemann_siegel_z(b).z), kZeroGuard);
}

TEST(Metamorphosis, SpacingFollowsGapLaw) {
    const auto& r = report_1e5();
    const double scale = gap_law_scale(1e5);
    const auto& a = r.sequences.alphas;
    const auto& b = r.sequences.betas;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        EXPECT_GE((a[i + 1] - a[i]) / scale, kSpacingBandLow);
        EXPECT_LE((a[i + 1] - a[i]) / scale, kSpacingBandHigh);
    }
    EXPECT_GE((b[1] - b[0]) / scale, kSpacingBandLow);
    EXPECT_LE((b[1] - b[0]) / scale, kSpacingBandHigh);
    const double mean = (r.chain.gaps[0] + r.chain.gaps[1]) / 2;
    EXPECT_DOUBLE_EQ(r.diagnostics.at("gap_mean"), mean);
    EXPECT_DOUBLE_EQ(r.diagnostics.at("gap_law_ratio"), mean / scale);
}

TEST(Metamorphosis, SingleIterateSmokeRun) {
    const auto r = run_metamorphosis(config_at(1e4, 1));
    for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    ASSERT_EQ(r.sequences.alphas.size(), 2u);
    EXPECT_EQ(r.sequences.alphas[1], r.d_point.location);
    EXPECT_EQ(r.sequences.betas[0], r.e_point.location);
    EXPECT_TRUE(r.chain.base.contains_open(r.sequences.alphas[0]));
    EXPECT_LE(r.diagnostics.at("change_of_variables_error"), 1e-4 * r.chain.u);
    EXPECT_EQ(r.local_audits.size(), 2u);
}

TEST(Metamorphosis, ProductChecksTrendTowardOne) {
    // least-squares slope of |log ratio| against log10 T is not positive
    std::vector<double> xs, alpha, beta;
    for (double t : {1e4, 1e5, 1e6}) {
        const auto r = run_metamorphosis(config_at(t, 1));
        xs.push_back(std::log10(t));
        alpha.push_back(std::abs(std::log(r.diagnostics.at("alpha_check"))));
        beta.push_back(std::abs(std::log(r.diagnostics.at("beta_check"))));
    }
    auto slope = [&](const std::vector<double>& ys) {
        const double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3;
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        return num / den;
    };
    EXPECT_LE(slope(alpha), 0.0);
    EXPECT_LE(slope(beta), 0.0);
}

TEST(ExtractSequences, ImagesOutsideTheChainRaise) {
    const auto& r = report_1e5();
    auto d = r.d_point;
    d.iterate_images[1] += 1e3;
    EXPECT_THROW(extract_alphas(d, r.chain), ChainError);
    auto e = r.e_point;
    e.iterate_images.pop_back();
    EXPECT_THROW(extract_betas(e, r.chain), ChainError);
}

TEST(CheckSequences, DetectsViolations) {
    const auto& r = report_1e5();
    auto s = r.sequences;
    std::swap(s.betas[0], s.betas[1]);
    auto checks = check_sequences(s, r.chain, kZeroGuard);
    EXPECT_FALSE(checks[0].passed);
    EXPECT_FALSE(checks[1].passed);

    s = r.sequences;
    const double zero = zero_of_z_after(s.alphas[1]);
    s.alphas[1] = zero;
    checks = check_sequences(s, r.chain, kZeroGuard);
    EXPECT_FALSE(std::find_if(checks.begin(), checks.end(), [](auto& c) { return c.name == "zero_guard"; })->passed);

    s = r.sequences;
    s.alphas[0] = s.alphas[1] - 0.3 * gap_law_scale(s.t_base);
    checks = check_sequences(s, r.chain, kZeroGuard);
    EXPECT_FALSE(std::find_if(checks.begin(), checks.end(), [](auto& c) { return c.name == "spacing_alpha"; })->passed);
}

TEST(RunMetamorphosis, FailuresNameTheStage) {
    auto c = config_at(1e4, 1);
    c.theta = 2.0;
    try {
        run_metamorphosis(c);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "config");
    }
    c = config_at(1e4, 1);
    c.zero_guard = 1e3;
    try {
        run_metamorphosis(c);
        FAIL();
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "q_system");
        EXPECT_NE(std::string(e.what()).find("zero guard"), std::string::npos);
    }
}

}  // namespace
