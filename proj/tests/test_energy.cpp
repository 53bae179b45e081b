#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfd/energy.hpp"
#include "mfd/error.hpp"
#include "mfd/maps.hpp"

using namespace mfd;

namespace {

GridPtr disk(int n) { return DomainGrid::build(DomainSpec::disk(n)); }
GridPtr rect(int n, double x1, double y1) {
    return DomainGrid::build(DomainSpec::rectangle(n, {0.0, x1, 0.0, y1}));
}

}  // namespace

TEST(Profile, BuiltinsAreConvexIncreasingAndDominateT) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(1.0, 1e3);
    for (const char* spec : {"linear", "power:2", "power:3.5", "exp:1", "exp:0.5"}) {
        const auto psi = ConvexProfile::parse(spec);
        EXPECT_GE(psi(1.0), 1.0) << spec;
        for (int i = 0; i < 200; ++i) {
            const double a = U(rng), b = U(rng);
            EXPECT_GE(psi(a), a) << spec;
            EXPECT_GT(psi.deriv(a), 0.0) << spec;
            EXPECT_LE(psi(0.5 * (a + b)), 0.5 * (psi(a) + psi(b)) * (1.0 + 1e-14)) << spec;
        }
    }
}

TEST(Profile, DerivativesMatchDifferenceQuotients) {
    for (const char* spec : {"power:2", "power:3", "exp:1"}) {
        const auto psi = ConvexProfile::parse(spec);
        for (double t : {1.0, 1.7, 3.0}) {
            const double h = 1e-5;
            EXPECT_NEAR(psi.deriv(t), (psi(t + h) - psi(t - h)) / (2 * h), 1e-6 * psi.deriv(t));
            EXPECT_NEAR(psi.second(t), (psi.deriv(t + h) - psi.deriv(t - h)) / (2 * h),
                        1e-5 * std::max(1.0, psi.second(t)));
        }
    }
}

TEST(Profile, ParseErrors) {
    EXPECT_THROW(ConvexProfile::parse("power:0.5"), ConfigError);
    EXPECT_THROW(ConvexProfile::parse("exp:-1"), ConfigError);
    EXPECT_THROW(ConvexProfile::parse("cubic"), ConfigError);
    EXPECT_THROW(WeightField::parse("flat"), ConfigError);
}

TEST(Growth, Examples) {
    const auto p2 = growth_diagnostic(ConvexProfile::power(2.0), 1e3);
    EXPECT_NEAR(p2.ratio.back(), 2.0, 0.01);
    EXPECT_TRUE(p2.bounded);
    const auto lin = growth_diagnostic(ConvexProfile::linear(), 1e3);
    for (double r : lin.ratio) EXPECT_NEAR(r, 1.0, 1e-14);
    const auto ex = growth_diagnostic(ConvexProfile::exponential(1.0), 100.0);
    EXPECT_NEAR(ex.ratio.back(), 100.0, 1e-9);
    EXPECT_FALSE(ex.bounded);
    EXPECT_EQ(ex.trend, "unbounded");
    EXPECT_THROW(growth_diagnostic(ConvexProfile::linear(), 5.0), ConfigError);
}

TEST(Weight, Builtins) {
    EXPECT_DOUBLE_EQ(WeightField::unit()(cplx(0.3, 0.2)), 1.0);
    EXPECT_DOUBLE_EQ(WeightField::hyperbolic_disk()(cplx(0.5, 0.0)), 1.0 / (0.75 * 0.75));
    EXPECT_DOUBLE_EQ(WeightField::hyperbolic_half_plane()(cplx(3.0, 0.5)), 4.0);
    EXPECT_DOUBLE_EQ(WeightField::cayley()(cplx(1.0, 0.0)), 4.0 / 16.0);
    EXPECT_TRUE(std::isinf(WeightField::hyperbolic_disk()(cplx(1.5, 0.0))));
    // Divergence toward the boundary, monotone along rays.
    for (double th : {0.0, 1.0, 2.5}) {
        double prev = 0.0;
        for (double r = 0.0; r < 0.999; r += 0.01) {
            const double v = WeightField::hyperbolic_disk()(std::polar(r, th));
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(EnergyDirect, Examples) {
    const auto g = disk(128);
    const auto id = identity_map().sample(g);
    const double area = g->masked_area();
    EXPECT_NEAR(energy_direct(id, ConvexProfile::linear(), WeightField::unit()).value, area, 1e-12);
    EXPECT_NEAR(area, std::numbers::pi, 0.01);
    EXPECT_NEAR(energy_direct(id, ConvexProfile::power(2), WeightField::unit()).value, area, 1e-12);

    const auto sq = rect(64, 1.0, 1.0);
    const auto f = affine_map({1.5, 0.0}, {-0.5, 0.0}).sample(sq);  // x + 2iy
    EXPECT_NEAR(energy_direct(f, ConvexProfile::linear(), WeightField::unit()).value, 1.25, 1e-12);
}

TEST(EnergyDirect, DegeneracyError) {
    const auto g = disk(32);
    try {
        energy_direct(conjugation_map().sample(g), ConvexProfile::linear(), WeightField::unit());
        FAIL() << "expected DegeneracyError";
    } catch (const DegeneracyError& e) {
        EXPECT_DOUBLE_EQ(e.fraction(), 1.0);
    }
}

TEST(EnergyDirect, SingularWeightExcludesMass) {
    const auto g = disk(64);
    const auto r = energy_direct(identity_map().sample(g), ConvexProfile::linear(),
                                 WeightField::custom("spike", [](cplx z) {
                                     return std::abs(z) < 0.1 ? 1e13 : 1.0;
                                 }, [](cplx) { return true; }));
    EXPECT_GT(r.excluded_nodes, 0u);
    EXPECT_NEAR(r.excluded_area, r.excluded_nodes * g->cell_area(), 1e-15);
}

TEST(EnergyDirect, MonotoneInWeightAndProfile) {
    const auto g = disk(64);
    const auto f = disk_shear(0.2).sample(g);
    const double e1 = energy_direct(f, ConvexProfile::linear(), WeightField::unit()).value;
    const double e2 = energy_direct(f, ConvexProfile::power(2), WeightField::unit()).value;
    const double e3 = energy_direct(f, ConvexProfile::linear(), WeightField::hyperbolic_disk()).value;
    EXPECT_GE(e2, e1);
    EXPECT_GE(e3, e1);
}

TEST(EnergyDirect, LowerBoundByWeightMass) {
    const auto g = disk(64);
    const auto w = WeightField::hyperbolic_disk();
    const auto psi = ConvexProfile::power(2);
    double mass = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->inside(k)) mass += w(g->node(k)) * g->cell_area();
    const double eid = energy_direct(identity_map().sample(g), psi, w).value;
    const double esh = energy_direct(disk_shear(0.2).sample(g), psi, w).value;
    EXPECT_NEAR(eid, mass, 1e-9 * mass);
    EXPECT_GT(esh, mass);
}

TEST(EnergyInverse, IdentityAndLinearPair) {
    const auto g = disk(64);
    const auto id = identity_map().sample(g);
    const auto psi = ConvexProfile::power(2);
    EXPECT_NEAR(energy_inverse(id, psi, WeightField::unit()).value,
                energy_direct(id, psi, WeightField::unit()).value, 1e-12);

    // f = x + 2iy on [0,1]^2 and h = x + iy/2 on [0,1]x[0,2].
    const auto f = affine_map({1.5, 0.0}, {-0.5, 0.0}).sample(rect(64, 1.0, 1.0));
    const auto h = affine_map({0.75, 0.0}, {0.25, 0.0}).sample(rect(64, 1.0, 2.0));
    const auto lin = ConvexProfile::linear();
    EXPECT_NEAR(energy_inverse(h, lin, WeightField::unit()).value,
                energy_direct(f, lin, WeightField::unit()).value, 1e-12);
}

TEST(EnergyInverse, RangeAndDegeneracyErrors) {
    const auto g = rect(16, 2.0, 2.0);
    const auto shifted = affine_map({1.0, 0.0}, {0.0, 0.0}).sample(g);  // leaves the disk
    EXPECT_THROW(energy_inverse(shifted, ConvexProfile::linear(), WeightField::hyperbolic_disk()),
                 RangeError);
    EXPECT_THROW(energy_inverse(conjugation_map().sample(disk(16)), ConvexProfile::linear(),
                                WeightField::unit()),
                 DegeneracyError);
}

TEST(CovGap, IdentityPairIsZero) {
    const auto g = disk(64);
    const auto id = identity_map().sample(g);
    EXPECT_LT(cov_gap(id, id, ConvexProfile::power(2), WeightField::unit()).gap, 1e-14);
}

TEST(CovGap, LinearPairIsExact) {
    // Constant integrands: the midpoint rule is exact at every resolution.
    for (int n : {128, 256}) {
        const auto f = affine_map({1.5, 0.0}, {-0.5, 0.0});
        const auto r = cov_gap(f.sample(rect(n, 1.0, 1.0)), sample_inverse(f, rect(n, 1.0, 2.0)),
                               ConvexProfile::power(2),
                               WeightField::unit());
        EXPECT_LT(r.gap, 1e-12) << n;
    }
}

TEST(CovGap, RadialPair) {
    const auto g = disk(256);
    const auto f = radial_power(0.2);
    const auto finv = radial_power(1.0 / 1.2 - 1.0);
    const auto r = cov_gap(f.sample(g), finv.sample(g), ConvexProfile::linear(), WeightField::unit(),
                           1e-5);
    EXPECT_LE(r.gap, 1e-3);
}

TEST(CovGap, RefinementHalvesTheGap) {
    const auto psi = ConvexProfile::power(2);
    const auto w = WeightField::unit();
    std::vector<double> gaps;
    for (int n : {64, 128, 256}) {
        const auto g = disk(n);
        const auto f = disk_shear(0.1);
        gaps.push_back(cov_gap(f.sample(g), sample_inverse(f, g), psi, w).gap);
    }
    EXPECT_GE(gaps[0] / gaps[1], 2.0);
    EXPECT_GE(gaps[1] / gaps[2], 2.0);
}

TEST(CovGap, PairingError) {
    const auto g = disk(32);
    EXPECT_THROW(cov_gap(disk_shear(0.1).sample(g), identity_map().sample(g),
                         ConvexProfile::linear(), WeightField::unit()),
                 PairingError);
}
