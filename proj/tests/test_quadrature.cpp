#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zetaladder/errors.hpp"
#include "zetaladder/quadrature.hpp"

namespace {

using namespace zl;

double em_tol(double sigma, double t) { return std::max(1e-11, 2 * euler_maclaurin_noise_floor(sigma, t)); }

struct Fixture {
    double t = 1e5;
    double u = u_of_t_theta(1e5, 1.0);
    LadderTable table = build_ladder(1e5, ladder_span_estimate(1e5, u_of_t_theta(1e5, 1.0), 3), 1e-7);
    SegmentChain chain(int k) const { return reverse_iterates(table, t, u, k); }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

TEST(ZetaStrip, MatchesDirectEulerMaclaurin) {
    for (double t0 : {1e3, 1e4, 2e5}) {
        for (double sigma : {1.1, 1.5, 3.0}) {
            const ZetaStrip strip(sigma, t0, t0 + 15.0);
            std::mt19937 rng(3);
            std::uniform_real_distribution<double> pick(t0, t0 + 15.0);
            for (int i = 0; i < 6; ++i) {
                const double t = pick(rng);
                const auto direct = zeta_euler_maclaurin(sigma, t, em_tol(sigma, t));
                EXPECT_LE(std::abs(strip(t) - direct.value), 4 * (strip.tail_bound() + direct.tail_bound))
                    << t0 << " " << sigma;
            }
        }
    }
}

TEST(ZetaStrip, Contracts) {
    const ZetaStrip strip(1.5, 1e4, 1e4 + 1.0);
    EXPECT_THROW(strip(1e4 - 0.01), RangeError);
    EXPECT_THROW(strip(1e4 + 1.01), RangeError);
    EXPECT_LT(strip.step() * std::log(static_cast<double>(strip.cutoff())), 0.2501);
    EXPECT_THROW(ZetaStrip(1.5, 10.0, 5.0), DomainError);
    EXPECT_THROW(ZetaStrip(1.0, -1e-7, 1e-7), PoleError);
}

TEST(IntegrateZetaSq, LargeSigmaTendsToLength) {
    for (double sigma : {10.0, 12.0}) {
        const auto r = integrate_zeta_sq(sigma, 1e4, 1e4 + 20.0, 1e-10);
        EXPECT_NEAR(r.value / 20.0, 1.0, 1e-3);
        EXPECT_EQ(r.integrand_id, IntegrandId::zeta_sq_sigma);
        EXPECT_GE(r.abs_error_estimate, 0.0);
    }
}

TEST(IntegrateZetaSq, MeanValueAtTenThousand) {
    const double t = 1e4;
    const double u = u_of_t_theta(t, 1.0);
    const auto r = integrate_zeta_sq(1.5, t, t + u, 1e-9);
    const double ratio = r.value / (zeta_two_sigma(1.5) * u);
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
}

TEST(IntegrateZetaSq, AgreesWithDirectEvaluationQuadrature) {
    // independent integrand (direct Euler-Maclaurin) and rule (Boost adaptive GK)
    const double a = 1e4, b = 1e4 + 6.0;
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double ref = gk::integrate(
        [](double t) { return std::norm(zeta_euler_maclaurin(1.5, t, em_tol(1.5, t)).value); }, a, b, 10, 1e-12);
    const auto r = integrate_zeta_sq(1.5, a, b, 1e-10);
    EXPECT_NEAR(r.value, ref, 1e-8);
}

TEST(IntegrateZetaSq, Additivity) {
    const double tol = 1e-9;
    const auto whole = integrate_zeta_sq(2.0, 2e4, 2e4 + 12.0, tol);
    const auto left = integrate_zeta_sq(2.0, 2e4, 2e4 + 5.0, tol);
    const auto right = integrate_zeta_sq(2.0, 2e4 + 5.0, 2e4 + 12.0, tol);
    EXPECT_NEAR(whole.value, left.value + right.value, 2 * tol);
}

TEST(IntegrateZetaSq, ErrorEstimatesAreHonest) {
    // the error against a much tighter reference shrinks with tol
    const ZetaStrip strip(1.5, 1e4, 1e4 + 15.0);
    const double ref = integrate_zeta_sq(strip, 1e4, 1e4 + 15.0, 1e-12).value;
    double prev = 1e300;
    for (double tol : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
        const auto r = integrate_zeta_sq(strip, 1e4, 1e4 + 15.0, tol);
        const double err = std::abs(r.value - ref);
        EXPECT_LE(err, tol);
        EXPECT_LE(err, r.abs_error_estimate + 1e-12);
        EXPECT_LE(r.abs_error_estimate, prev);
        prev = r.abs_error_estimate;
    }
}

TEST(IntegrateZetaSq, Contracts) {
    EXPECT_THROW(integrate_zeta_sq(1.0, 1e4, 1e4 + 1, 1e-8), DomainError);
    EXPECT_THROW(integrate_zeta_sq(1.5, 1e4, 1e4, 1e-8), DomainError);
    EXPECT_THROW(integrate_zeta_sq(1.5, 1e4, 1e4 + 1, 0.0), DomainError);
}

TEST(IntegrateComposed, WithoutSigmaGivesU) {
    const auto& f = fixture();
    for (int k = 1; k <= 3; ++k) {
        const auto chain = f.chain(k);
        const auto r = integrate_composed(chain, f.table, std::nullopt, 1e-8);
        EXPECT_EQ(r.integrand_id, IntegrandId::ztilde_product);
        EXPECT_NEAR(r.value, f.u, std::max(1e-8, f.table.quadrature_tol()) * k * 10) << k;
    }
}

TEST(IntegrateComposed, SingleIterateIsPlainZTildeIntegral) {
    const auto& f = fixture();
    const auto chain = f.chain(1);
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    const auto& seg = chain.segment(1);
    double ref = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double a = seg.lo + seg.length() * i / 20, b = seg.lo + seg.length() * (i + 1) / 20;
        ref += gk::integrate([](double t) { return z_tilde_squared(t); }, a, b, 8, 1e-12);
    }
    EXPECT_NEAR(ref, f.u, 1e-6);
    EXPECT_NEAR(integrate_composed(chain, f.table, std::nullopt, 1e-9).value, ref, 1e-6);
}

TEST(IntegrateComposed, WithSigmaMatchesBaseIntegral) {
    const auto& f = fixture();
    const auto base = integrate_zeta_sq(1.5, f.t, f.t + f.u, 1e-9);
    const auto chain = f.chain(2);
    const auto r = integrate_composed(chain, f.table, 1.5, 1e-8);
    EXPECT_EQ(r.integrand_id, IntegrandId::composed_product);
    EXPECT_NEAR(r.value / base.value, 1.0, 1e-6);
    // the same mean-value window as the base integral
    const double ratio = r.value / (zeta_two_sigma(1.5) * f.u);
    EXPECT_NEAR(ratio, base.value / (zeta_two_sigma(1.5) * f.u), 1e-6);
}

TEST(IntegrateComposed, EscapingImagesRaiseChainError) {
    const auto& f = fixture();
    auto chain = f.chain(2);
    // shift iterate 1 so phi_1 of iterate 2 no longer lands in it
    chain.iterates[0].lo += 1.0;
    chain.iterates[0].hi += 1.0;
    EXPECT_THROW(integrate_composed(chain, f.table, std::nullopt, 1e-6), ChainError);
}

void check_point(const MeanValuePoint& p, const SegmentChain& chain, double integral, double tol) {
    const int k = chain.k();
    const auto& dom = chain.segment(k);
    EXPECT_TRUE(dom.contains_open(p.location));
    EXPECT_LE(std::abs(p.residual), tol * integral);
    const double mean = integral / dom.length();
    EXPECT_LT(p.scan_min, mean);
    EXPECT_GT(p.scan_max, mean);
    for (std::size_t r = 0; r < p.iterate_images.size(); ++r) {
        const auto& seg = chain.segment(k - static_cast<int>(r));
        EXPECT_GE(p.iterate_images[r], seg.lo - 1e-6) << r;
        EXPECT_LE(p.iterate_images[r], seg.hi + 1e-6) << r;
    }
}

TEST(FindDPoint, ExistsAtOneHundredThousandWithK2) {
    const auto& f = fixture();
    const auto chain = f.chain(2);
    const double tol = 1e-8;
    const auto d = find_d_point(chain, f.table, 1.5, tol);
    EXPECT_EQ(d.kind, PointKind::d_point);
    ASSERT_EQ(d.iterate_images.size(), 3u);
    const auto integral = integrate_composed(chain, f.table, 1.5, 0.1 * tol * zeta_two_sigma(1.5) * f.u);
    check_point(d, chain, integral.value, tol);
    EXPECT_EQ(d.iterate_images[0], d.location);
}

TEST(FindDPoint, SingleIterate) {
    const auto& f = fixture();
    const auto chain = f.chain(1);
    const auto d = find_d_point(chain, f.table, 2.0, 1e-8);
    ASSERT_EQ(d.iterate_images.size(), 2u);
    const auto integral = integrate_composed(chain, f.table, 2.0, 1e-9);
    check_point(d, chain, integral.value, 1e-8);
}

TEST(FindEPoint, ImagesFollowTheChain) {
    const auto& f = fixture();
    for (int k = 1; k <= 3; ++k) {
        const auto chain = f.chain(k);
        const auto e = find_e_point(chain, f.table, 1e-8);
        EXPECT_EQ(e.kind, PointKind::e_point);
        ASSERT_EQ(e.iterate_images.size(), static_cast<std::size_t>(k));
        check_point(e, chain, f.u, 1e-8);
    }
}

TEST(FindEPoint, BruteForceScanAtTenThousand) {
    const double t = 1e4;
    const double u = u_of_t_theta(t, 1.0);
    const auto table = build_ladder(t, ladder_span_estimate(t, u, 1), 1e-7);
    const auto chain = reverse_iterates(table, t, u, 1);
    const auto e = find_e_point(chain, table, 1e-10);
    const auto& seg = chain.segment(1);
    const double level = u / seg.length();
    EXPECT_NEAR(z_tilde_squared(e.location), level, 1e-9);
    // brute force: every sign change of Z~^2 - U/L on a fine grid; the
    // 512-point scan may step over a close pair, so e is matched to any root
    const int n = 200000;
    const double dx = seg.length() / n;
    double prev = z_tilde_squared(seg.lo + 0.5 * dx) - level;
    double nearest = 1e300;
    int roots = 0;
    for (int i = 1; i < n; ++i) {
        const double x = seg.lo + (i + 0.5) * dx;
        const double v = z_tilde_squared(x) - level;
        if (v * prev <= 0) {
            ++roots;
            nearest = std::min(nearest, std::abs(x - dx / 2 - e.location));
        }
        prev = v;
    }
    ASSERT_GT(roots, 0);
    EXPECT_LE(nearest, dx);
}

TEST(FindMeanValuePoint, UnreachableMeanRaisesResolutionError) {
    const auto& f = fixture();
    const auto chain = f.chain(1);
    const ComposedIntegrand g(chain, f.table, std::nullopt);
    EXPECT_THROW(find_mean_value_point(g, 1e9, 1e-8, PointKind::e_point), ResolutionError);
}

TEST(QuadratureCsv, Rows) {
    IntegralResult r{1.5, 2.5e-9, 12, IntegrandId::composed_product};
    EXPECT_EQ(integral_csv_header(), "integrand,value,abs_error_estimate,panels");
    EXPECT_EQ(to_csv_row(r), "composed_product,1.5,2.5e-09,12");
    MeanValuePoint p;
    p.location = 100000.25;
    p.kind = PointKind::e_point;
    p.residual = -1e-9;
    p.scan_points = 512;
    p.iterate_images = {100000.25, 99000.5};
    EXPECT_EQ(to_csv_row(p), "e_point,100000.25,-1e-09,512,100000.25;99000.5");
    EXPECT_EQ(mean_value_csv_header(), "kind,location,residual,scan_points,iterate_images");
}

}  // namespace
