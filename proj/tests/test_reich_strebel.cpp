#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfd/error.hpp"
#include "mfd/maps.hpp"
#include "mfd/reich_strebel.hpp"

using namespace mfd;

namespace {

GridPtr disk(int n) { return DomainGrid::build(DomainSpec::disk(n)); }

double term(const InequalityReport& r, const std::string& name) {
    for (const auto& t : r.terms)
        if (t.name == name) return t.value;
    ADD_FAILURE() << "missing term " << name;
    return NAN;
}

}  // namespace

TEST(Differentials, Parse) {
    EXPECT_EQ(parse_differential("1")(cplx(0.3, 0.1)), cplx(1.0));
    EXPECT_EQ(parse_differential("w2")(cplx(0.0, 1.0)), cplx(-1.0));
    EXPECT_EQ(parse_differential("1+w3")(cplx(2.0)), cplx(9.0));
    EXPECT_EQ(standard_differentials().size(), 4u);
    EXPECT_THROW(parse_differential("w4"), ConfigError);
}

TEST(RsSides, IdentityIsEquality) {
    const auto g = disk(128);
    const auto id = identity_map();
    for (const auto& phi : standard_differentials()) {
        const auto r = rs_sides(id.sample(g), id.derivatives(g), phi);
        EXPECT_LE(std::abs(r.slack), 1e-12 * std::max(1.0, r.lhs)) << phi.name;
        EXPECT_TRUE(r.holds);
        EXPECT_EQ(r.boundary_gap, 0.0);
    }
    const auto one = rs_sides(id.sample(g), id.derivatives(g), parse_differential("1"));
    EXPECT_NEAR(one.lhs, g->masked_area(), 1e-12);
    EXPECT_NEAR(one.lhs, std::numbers::pi, 0.01);
}

TEST(RsSides, RadialStretch) {
    const auto g = disk(256);
    const auto f = radial_power(0.2);
    const auto r = rs_sides(f.sample(g), f.derivatives(g), parse_differential("1"));
    EXPECT_GT(r.slack, 0.0);
    EXPECT_GE(r.rhs, g->masked_area());
    EXPECT_TRUE(r.holds);
    // Radial quadrature oracle: |f_z - f_zbar e^{...}| integrated over rings.
    // For f = z|z|^a and phi = 1: sqrt|phi(f)| sqrt|phi| = 1, |f_z - f_zbar| averaged over the
    // angle equals (1/2pi) int |(1+a/2) r^a - (a/2) r^a e^{-2it}| dt.
    const double a = 0.2;
    const int nr = 4000, nt = 4000;
    double rhs = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double rr = (i + 0.5) / nr;
        double ring = 0.0;
        for (int j = 0; j < nt; ++j) {
            const double t = 2.0 * std::numbers::pi * (j + 0.5) / nt;
            ring += std::abs((1.0 + a / 2.0) - (a / 2.0) * std::polar(1.0, -2.0 * t));
        }
        rhs += std::pow(rr, a) * ring / nt * 2.0 * std::numbers::pi * rr / nr;
    }
    EXPECT_NEAR(r.rhs, rhs, 0.01 * rhs);
}

TEST(RsSides, DegeneracyError) {
    EXPECT_THROW(rs_sides(conjugation_map().sample(disk(32)), parse_differential("1")), DegeneracyError);
}

TEST(RsSides, SmallBattery) {
    const auto g = disk(64);
    RandomMapGenerator gen(g, 42);
    for (int i = 0; i < 10; ++i) {
        const auto f = gen.next();
        for (const auto& phi : standard_differentials()) {
            const auto r = rs_sides(f.sample(g), f.derivatives(g), phi);
            EXPECT_GE(r.slack, -1e-9 * std::max(1.0, r.lhs)) << f.name << " " << phi.name;
            EXPECT_LT(r.boundary_gap, 1e-12);
        }
    }
}

TEST(RandomMaps, StayInTheClass) {
    const auto g = disk(64);
    RandomMapGenerator a(g, 9), b(g, 9);
    for (int i = 0; i < 20; ++i) {
        const auto f = a.next();
        const auto h = b.next();
        const auto d = f.derivatives(g);
        double minJ = 1e300;
        for (std::size_t k = 0; k < g->size(); ++k) {
            if (!g->inside(k)) continue;
            minJ = std::min(minJ, std::norm(d.fz[k]) - std::norm(d.fzbar[k]));
            EXPECT_EQ(f(g->node(k)), h(g->node(k)));
        }
        EXPECT_GE(minJ, 0.1 - 1e-12);
        for (double th = 0.0; th < 6.28; th += 0.1) {
            const cplx z = std::polar(1.0, th);
            EXPECT_LT(std::abs(f(z) - z), 1e-14);
        }
    }
}

TEST(LowerBounds, IdentityAndRadial) {
    const auto g = disk(128);
    const auto id = identity_map();
    const auto phi = parse_differential("w2");
    const auto e = rs_lower_bounds(id.sample(g), id.derivatives(g), phi);
    EXPECT_LE(std::abs(e.quadratic.slack), 1e-12 * e.quadratic.lhs);
    EXPECT_LE(std::abs(e.jacobian.slack), 1e-12 * e.jacobian.lhs);

    const auto f = radial_power(0.2);
    const auto r = rs_lower_bounds(f.sample(g), f.derivatives(g), parse_differential("1"));
    EXPECT_GT(r.quadratic.slack, 0.0);
    EXPECT_GT(r.jacobian.slack, 0.0);
    EXPECT_TRUE(r.quadratic.holds);
    EXPECT_TRUE(r.jacobian.holds);
    EXPECT_GE(term(r.quadratic, "cauchy_schwarz"), 0.0);
}

TEST(Alignment, Examples) {
    const auto g = disk(64);
    const auto one = parse_differential("1").sample(g);
    EXPECT_LE(alignment_residual(identity_map().sample(g), one), 1e-12);

    // mu = k conj(phi)/|phi| for phi = w^2.
    const auto w2 = parse_differential("w2").sample(g);
    BeltramiField mu{g, std::vector<cplx>(g->size()), std::vector<std::uint8_t>(g->size(), 0)};
    for (std::size_t k = 0; k < g->size(); ++k) {
        if (!g->inside(k)) continue;
        const cplx p = w2.phi[k];
        mu.mu[k] = 0.3 * std::conj(p) / std::abs(p);
        mu.valid[k] = 1;
    }
    EXPECT_LE(alignment_residual(mu, w2), 1e-12);

    // Vertical stretch conjugated to the disk: mu is not aligned with 1.
    const auto f = cayley_stretch(2.0);
    EXPECT_GT(alignment_residual(f.sample(g), one), 0.1);

    auto holes = one;
    for (std::size_t k = 0; k < g->size() / 4; ++k) holes.phi[k] = 0.0;
    EXPECT_THROW(alignment_residual(mu, holes), CoverageError);
}

TEST(PointwiseTeich, EqualMapsGiveEqualityEverywhere) {
    const auto g = disk(64);
    const auto f = affine_map({1.0, 0.0}, {-0.3, 0.0});
    const auto r = pointwise_teich(f.sample(g), f.derivatives(g), f.derivatives(g), parse_differential("1"));
    EXPECT_NEAR(r.worst_node_slack, 0.0, 1e-12);
    EXPECT_EQ(static_cast<std::size_t>(term(r, "equality_nodes")), g->inside_count());
}

TEST(PointwiseTeich, TeichmullerAgainstIdentityIsStrict) {
    const auto g = disk(64);
    const auto f = affine_map({1.0, 0.0}, {-0.3, 0.0});
    const auto r = pointwise_teich(f.sample(g), f.derivatives(g), identity_map().derivatives(g),
                                   parse_differential("1"));
    EXPECT_EQ(r.hypothesis_violations, 0u);
    EXPECT_GT(r.slack, 0.0);
    EXPECT_GE(r.worst_node_slack, -1e-9);
    EXPECT_EQ(term(r, "equality_nodes"), 0.0);
}

TEST(PointwiseTeich, DominatedBattery) {
    const auto g = disk(64);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto f = affine_map({1.0, 0.0}, {-0.4, 0.0});
    int checked = 0;
    for (int i = 0; i < 50; ++i) {
        const cplx kg = std::polar(0.4 * U(rng), 2.0 * std::numbers::pi * U(rng));
        const auto gmap = affine_map({1.0, 0.0}, kg);
        const auto r = pointwise_teich(f.sample(g), f.derivatives(g), gmap.derivatives(g),
                                       parse_differential("1"));
        if (r.hypothesis_violations > 0) continue;
        ++checked;
        EXPECT_GE(r.worst_node_slack, -1e-9) << kg;
    }
    EXPECT_GT(checked, 10);
}

TEST(EnergyGap, SelfAndShear) {
    const auto g = disk(128);
    const auto psi = ConvexProfile::power(2);
    const auto w = WeightField::unit();
    const auto id = identity_map().sample(g);
    const auto self = energy_gap(id, id, psi, w);
    EXPECT_NEAR(self.gap, 0.0, 1e-14);
    EXPECT_NEAR(self.term1, 0.0, 1e-14);
    EXPECT_NEAR(self.term2, 0.0, 1e-12);
    EXPECT_TRUE(self.certified);

    const auto H = disk_shear(0.1).sample(g);
    const auto r = energy_gap(id, H, psi, w);
    EXPECT_TRUE(r.certified);
    EXPECT_GT(r.gap, 0.0);
    EXPECT_GE(r.gap, r.term1 + r.term2 - 1e-6);
    EXPECT_TRUE(r.bound_holds);
    EXPECT_EQ(r.convexity_violations, 0u);
    EXPECT_EQ(r.negative_term1_nodes, 0u);
    EXPECT_LT(r.inversion_residual, 1e-10);
}

TEST(EnergyGap, ConvexityHoldsForEveryProfile) {
    const auto g = disk(64);
    const auto h = disk_shear(0.05).sample(g);
    const auto H = basis_bump(*g, {0.1, 0.0}).sample(g);
    for (const char* spec : {"linear", "power:2", "power:3", "exp:1"}) {
        const auto r = energy_gap(h, H, ConvexProfile::parse(spec), WeightField::unit());
        EXPECT_EQ(r.convexity_violations, 0u) << spec;
        EXPECT_EQ(r.negative_term1_nodes, 0u) << spec;
    }
}

TEST(EnergyGap, Errors) {
    const auto g = disk(32);
    const auto id = identity_map().sample(g);
    EXPECT_THROW(energy_gap(id, affine_map({1.0, 0.0}, {0.2, 0.0}).sample(g), ConvexProfile::linear(),
                            WeightField::unit()),
                 PairingError);
}

TEST(Uniqueness, Verdicts) {
    const auto g = disk(128);
    const auto psi = ConvexProfile::power(2);
    const auto w = WeightField::unit();
    const auto id = identity_map().sample(g);
    const auto same = uniqueness_verdict(id, id, psi, w);
    EXPECT_TRUE(same.coincide);
    EXPECT_EQ(same.verdict, "maps coincide (discrete)");

    const auto shear = uniqueness_verdict(id, disk_shear(0.1).sample(g), psi, w);
    EXPECT_FALSE(shear.coincide);
    EXPECT_EQ(shear.verdict, "distinct");
    EXPECT_GT(shear.gap.gap, 10.0 * shear.gap.tolerance);
}

TEST(Uniqueness, IdentityUpToResampling) {
    const auto g = disk(128);
    const auto id = identity_map().sample(g);
    const auto id2 = MappingField::sample(g, [](cplx z) { return z + 1e-12 * z * (1.0 - std::norm(z)); });
    const auto r = uniqueness_verdict(id, id2, ConvexProfile::power(2), WeightField::unit());
    EXPECT_TRUE(r.coincide);
}
