#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfd/error.hpp"
#include "mfd/maps.hpp"
#include "mfd/ode.hpp"

using namespace mfd;

namespace {

const WeightField kHyp = WeightField::hyperbolic_half_plane();

// Fixed-step long-double RK4 for u' = sqrt(1 - 4 lambda u^2), u(0) = 0.
long double harmonic_rk4(long double lambda, long double y) {
    const int steps = 200000;
    const long double h = y / steps;
    long double u = 0.0L;
    auto f = [lambda](long double v) { return std::sqrt(1.0L - 4.0L * lambda * v * v); };
    for (int i = 0; i < steps; ++i) {
        const long double k1 = f(u);
        const long double k2 = f(u + 0.5L * h * k1);
        const long double k3 = f(u + 0.5L * h * k2);
        const long double k4 = f(u + h * k3);
        u += h * (k1 + 2.0L * k2 + 2.0L * k3 + k4) / 6.0L;
    }
    return u;
}

}  // namespace

TEST(StretchDensity, Examples) {
    EXPECT_EQ(stretch_density(ConvexProfile::power(2), 1.0), 0.0);
    EXPECT_EQ(stretch_density(ConvexProfile::linear(), 1.0), 0.0);
    EXPECT_NEAR(stretch_density(ConvexProfile::power(2), 2.0), -7.5, 1e-14);
    EXPECT_NEAR(stretch_density(ConvexProfile::linear(), 0.5), 0.75, 1e-15);
    EXPECT_THROW(stretch_density(ConvexProfile::linear(), 0.0), DomainError);
    EXPECT_THROW(stretch_density(ConvexProfile::linear(), -1.0), DomainError);
}

TEST(StretchDensity, StrictlyDecreasing) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    for (const char* spec : {"linear", "power:2", "power:3", "exp:1"}) {
        const auto psi = ConvexProfile::parse(spec);
        for (int i = 0; i < 1000; ++i) {
            double a = std::exp(U(rng)), b = std::exp(U(rng));
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            EXPECT_GT(stretch_density(psi, a), stretch_density(psi, b)) << spec << " " << a << " " << b;
            EXPECT_EQ(stretch_density(psi, a) > 0.0, a < 1.0);
        }
    }
}

TEST(StretchDensity, Limit) {
    const auto lin = stretch_density_limit(ConvexProfile::linear());
    EXPECT_FALSE(lin.infinite);
    EXPECT_NEAR(lin.value, 1.0, 1e-9);
    EXPECT_TRUE(stretch_density_limit(ConvexProfile::power(2)).infinite);
    EXPECT_TRUE(stretch_density_limit(ConvexProfile::exponential(1.0)).infinite);
}

TEST(StretchInverse, Examples) {
    EXPECT_NEAR(stretch_for_density(ConvexProfile::power(2), 0.0, Branch::Contracting), 1.0, 1e-12);
    EXPECT_NEAR(stretch_for_density(ConvexProfile::linear(), 0.75, Branch::Contracting), 0.5, 1e-12);
    for (double y : {0.1, 0.5, 0.9})
        EXPECT_NEAR(stretch_for_density(ConvexProfile::linear(), y, Branch::Contracting), std::sqrt(1.0 - y),
                    1e-12);
    const double big = 1e4;
    const double t = stretch_for_density(ConvexProfile::power(2), big, Branch::Contracting);
    EXPECT_NEAR(t * big, 1.0, 1e-6);
    for (const char* spec : {"power:2", "exp:1"}) {
        const auto psi = ConvexProfile::parse(spec);
        for (double y : {-50.0, -1.0, -1e-3, 1e-3, 3.0}) {
            const Branch b = y > 0 ? Branch::Contracting : Branch::Expanding;
            const double s = stretch_for_density(psi, y, b);
            EXPECT_LE(std::abs(stretch_density(psi, s) - y), 1e-13 * (1.0 + std::abs(y)));
            EXPECT_EQ(s < 1.0, y > 0);
        }
    }
}

TEST(StretchInverse, RangeError) {
    EXPECT_THROW(stretch_for_density(ConvexProfile::linear(), 1.0, Branch::Contracting), RangeError);
    EXPECT_THROW(stretch_for_density(ConvexProfile::linear(), 2.0, Branch::Contracting), RangeError);
    EXPECT_THROW(stretch_for_density(ConvexProfile::power(2), 1.0, Branch::Expanding), RangeError);
}

TEST(Solve, ZeroLambdaIsIdentity) {
    const auto p = solve_profile(ConvexProfile::power(2), kHyp, 0.0, 50.0);
    EXPECT_EQ(p.branch, Branch::Identity);
    for (const auto& s : p.samples) {
        EXPECT_EQ(s.u, s.y);
        EXPECT_EQ(s.du, 1.0);
    }
    EXPECT_DOUBLE_EQ(p.y_reached(), 50.0);
}

TEST(Solve, HarmonicClosedFormAgainstOracle) {
    for (double lambda : {-1.0, -0.25}) {
        const auto cf = harmonic_closed_form(lambda);
        for (double y : {0.5, 2.0, 5.0, 10.0}) {
            const long double ref = harmonic_rk4(lambda, y);
            EXPECT_LT(std::abs(cf.u(y) - static_cast<double>(ref)) / static_cast<double>(ref), 1e-12) << y;
        }
    }
    const auto zero = harmonic_closed_form(0.0);
    EXPECT_DOUBLE_EQ(zero.u(3.0), 3.0);
    EXPECT_DOUBLE_EQ(zero.distortion(3.0), 1.0);
    EXPECT_THROW(harmonic_closed_form(0.5), DomainError);
}

TEST(Solve, HarmonicProfileMatchesClosedForm) {
    const auto p = solve_profile(ConvexProfile::linear(), kHyp, -1.0, 10.0);
    const auto cf = harmonic_closed_form(-1.0);
    double worst = 0.0;
    for (const auto& s : p.samples) {
        if (s.y == 0.0) continue;
        worst = std::max(worst, std::abs(s.u - cf.u(s.y)) / cf.u(s.y));
    }
    EXPECT_LE(worst, 1e-8);
    for (double y : {0.3, 1.7, 9.1}) EXPECT_LE(std::abs(p.u_at(y) - cf.u(y)) / cf.u(y), 1e-8);
    // Distortion in terms of the image height.
    for (double y : {0.5, 3.0}) EXPECT_NEAR(cf.distortion(y), cf.distortion_at_height(cf.u(y)), 1e-9 * cf.distortion(y));
}

TEST(Solve, HarmonicDistortionGrowsWithoutBound) {
    double prev = 1.0;
    for (double Y : {1.0, 2.0, 4.0, 8.0}) {
        const auto p = solve_profile(ConvexProfile::linear(), kHyp, -1.0, Y);
        double sup = 0.0;
        for (const auto& s : p.samples) sup = std::max(sup, p.distortion_at(s.y));
        EXPECT_GT(sup, prev);
        prev = sup;
    }
    EXPECT_GT(prev, 1e5);
}

TEST(Solve, BranchAndResidualInvariants) {
    struct Case { const char* psi; double lambda; };
    for (const Case& c : {Case{"power:2", 1.0}, Case{"power:2", -1.0}, Case{"power:3", 0.5},
                          Case{"exp:1", -0.3}, Case{"linear", -1.0}}) {
        const auto psi = ConvexProfile::parse(c.psi);
        const auto p = solve_profile(psi, kHyp, c.lambda, 100.0);
        EXPECT_EQ(p.samples.front().u, 0.0);
        double prev = -1.0;
        for (const auto& s : p.samples) {
            if (s.u == 0.0) continue;  // G(0) = 1 where eta is infinite
            if (c.lambda > 0) {
                EXPECT_GT(s.du, 0.0);
                EXPECT_LT(s.du, 1.0);
            } else {
                EXPECT_GT(s.du, 1.0);
            }
            EXPECT_GT(s.u, prev);
            prev = s.u;
            const double res = std::abs(stretch_density(psi, s.du) * kHyp(cplx(0.0, s.u)) - 4.0 * c.lambda);
            EXPECT_LE(res, 1e-9 * std::max(1.0, 4.0 * std::abs(c.lambda))) << c.psi << " y=" << s.y;
        }
    }
}

TEST(Solve, RangeExhaustion) {
    const auto p = solve_profile(ConvexProfile::linear(), kHyp, 1.0, 10.0);
    EXPECT_TRUE(p.exhausted);
    EXPECT_NEAR(p.y_reached(), std::numbers::pi / 4.0, 1e-3);
    EXPECT_NEAR(p.samples.back().u, 0.5, 1e-4);
    // Exact solution u = sin(2y)/2 up to the stop.
    for (const auto& s : p.samples)
        if (s.y < 0.7) { EXPECT_NEAR(s.u, 0.5 * std::sin(2.0 * s.y), 1e-8); }
    EXPECT_EQ(surjectivity_diagnosis(p).verdict, Surjectivity::NoSolution);
}

TEST(Solve, Power2Exponents) {
    const auto up = solve_profile(ConvexProfile::power(2), kHyp, 1.0, 1e4);
    EXPECT_NEAR(power2_exponent(up, 1e2, 1e4), 1.0 / 3.0, 0.02);
    const auto down = solve_profile(ConvexProfile::power(2), kHyp, -1.0, 1e4);
    EXPECT_NEAR(power2_exponent(down, 1e2, 1e4), 3.0, 0.05);
    const auto flat = solve_profile(ConvexProfile::power(2), kHyp, 0.0, 1e4);
    EXPECT_DOUBLE_EQ(power2_exponent(flat, 1e2, 1e4), 1.0);
    EXPECT_THROW(power2_exponent(up, 1e2, 1e6), RangeError);
}

TEST(Surjectivity, Verdicts) {
    auto verdict = [](const char* psi, double lambda) {
        return surjectivity_diagnosis(solve_profile(ConvexProfile::parse(psi), kHyp, lambda, 1e3)).verdict;
    };
    EXPECT_EQ(verdict("power:2", 1.0), Surjectivity::NotSurjective);
    EXPECT_EQ(verdict("power:3", 1.0), Surjectivity::Surjective);
    EXPECT_EQ(verdict("power:4", 1.0), Surjectivity::Surjective);
    for (const char* psi : {"linear", "power:2", "power:3", "exp:1"})
        EXPECT_EQ(verdict(psi, -0.5), Surjectivity::Surjective) << psi;
}

TEST(Surjectivity, EscapeIsNotExhaustion) {
    // u = sinh(2cy)/(2c) leaves double range long before y = 1000.
    const auto p = solve_profile(ConvexProfile::linear(), kHyp, -0.5, 1e3);
    EXPECT_TRUE(p.escaped);
    EXPECT_FALSE(p.exhausted);
    EXPECT_LT(p.y_reached(), 1e3);
    EXPECT_GT(p.samples.back().u, OdeProfile::kEscapeHeight);
}

TEST(HalfPlaneMap, Examples) {
    const auto grid = DomainGrid::build(DomainSpec::half_plane(64, 2.0, 0.1, 3.0));
    const auto id = build_half_plane_map(solve_profile(ConvexProfile::power(2), kHyp, 0.0, 5.0), grid);
    for (std::size_t k = 0; k < grid->size(); ++k) EXPECT_EQ(id[k], grid->node(k));

    // Unit eta: constant stretch alpha with lambda = F(alpha)/4.
    for (double alpha : {0.5, 2.0}) {
        const auto psi = ConvexProfile::power(2);
        const double lambda = stretch_density(psi, alpha) / 4.0;
        const auto p = solve_profile(psi, WeightField::unit(), lambda, 5.0);
        const auto h = build_half_plane_map(p, grid);
        const auto lin = linear_stretch(alpha);
        for (std::size_t k = 0; k < grid->size(); ++k)
            EXPECT_LT(std::abs(h[k] - lin(grid->node(k))), 1e-10);
        EXPECT_LE(ah_residual(h, half_plane_map_derivatives(p, grid), psi, WeightField::unit(), lambda), 1e-12);
    }
    const auto short_profile = solve_profile(ConvexProfile::power(2), kHyp, -1.0, 1.0);
    EXPECT_THROW(build_half_plane_map(short_profile, grid), RangeError);
}

TEST(HalfPlaneMap, HarmonicDistortionAlongY) {
    const auto grid = DomainGrid::build(DomainSpec::half_plane(64, 1.0, 0.1, 3.0));
    const auto p = solve_profile(ConvexProfile::linear(), kHyp, -1.0, 4.0);
    const auto h = build_half_plane_map(p, grid);
    const auto d = half_plane_map_derivatives(p, grid);
    const auto cf = harmonic_closed_form(-1.0);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        const double y = grid->node(k).imag();
        const double hz = std::abs(d.fz[k]), hzb = std::abs(d.fzbar[k]);
        const double K = (hz * hz + hzb * hzb) / (hz * hz - hzb * hzb);
        EXPECT_NEAR(K, cf.distortion(y), 1e-8 * cf.distortion(y));
        EXPECT_NEAR(h[k].imag(), cf.u(y), 1e-8 * cf.u(y));
    }
}

TEST(AhResidual, AnalyticAndFiniteDifference) {
    const auto grid = DomainGrid::build(DomainSpec::half_plane(256, 1.0, 0.1, 2.0));
    EXPECT_LE(ah_residual(identity_map().sample(grid), ConvexProfile::power(2), kHyp, 0.0), 1e-9);
    for (const char* spec : {"linear", "power:2", "power:3", "exp:1"}) {
        const auto psi = ConvexProfile::parse(spec);
        for (double lambda : {-0.5, 0.05}) {
            const auto p = solve_profile(psi, kHyp, lambda, 3.0);
            if (p.exhausted) continue;
            EXPECT_LE(ah_residual(build_half_plane_map(p, grid), half_plane_map_derivatives(p, grid), psi,
                                  kHyp, lambda),
                      1e-10)
                << spec << " " << lambda;
        }
    }
    const auto harm = solve_profile(ConvexProfile::linear(), kHyp, -1.0, 3.0);
    const auto unit_box = DomainGrid::build(DomainSpec::half_plane(256, 1.0, 0.1, 1.0));
    EXPECT_LE(ah_residual(build_half_plane_map(harm, unit_box), ConvexProfile::linear(), kHyp, -1.0), 1e-6);
}

TEST(ProfileSpec, Parse) {
    const auto s = parse_profile_spec("psi=power:3;eta=hyp-half;lambda=-0.5;ymax=200");
    EXPECT_EQ(s.psi.name(), "power:3");
    EXPECT_DOUBLE_EQ(s.lambda, -0.5);
    EXPECT_DOUBLE_EQ(s.y_max, 200.0);
    const auto d = parse_profile_spec("lambda=1");
    EXPECT_DOUBLE_EQ(d.y_max, 1e3);
    EXPECT_THROW(parse_profile_spec("mu=1"), ConfigError);
    EXPECT_THROW(parse_profile_spec("lambda=abc"), ConfigError);
    EXPECT_THROW(parse_profile_spec("psi=cubic"), ConfigError);
}
