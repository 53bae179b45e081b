#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mfd/fields.hpp"
#include "mfd/hopf.hpp"
#include "mfd/maps.hpp"
#include "mfd/profile.hpp"
#include "mfd/weight.hpp"

namespace mfd {

/// Holomorphic quadratic differential given in closed form, so that it can
/// be evaluated at image points f(z) as well as at nodes.
struct HolomorphicDifferential {
    std::string name;
    std::function<cplx(cplx)> phi;

    cplx operator()(cplx z) const { return phi(z); }
    QuadraticDifferentialField sample(GridPtr grid) const;
};

// "1" | "w" | "w2" | "1+w3"
HolomorphicDifferential parse_differential(const std::string& name);
std::vector<HolomorphicDifferential> standard_differentials();

struct NamedTerm {
    std::string name;
    double value;
};

/// Two sides of an inequality lhs <= rhs, with the hypotheses it rests on.
struct InequalityReport {
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    // Pointwise variants: smallest per-node slack and where it occurred.
    double worst_node_slack = 0.0;
    std::size_t worst_node = 0;
    std::vector<NamedTerm> terms;  // intermediate quantities of the chain

    // Hypothesis diagnostics.
    double boundary_gap = 0.0;        // max |f(z) - z| on boundary nodes
    double phi_dbar = 0.0;            // max |dphi/dzbar| on the grid
    bool phi_holomorphic = false;
    double phi_l1 = 0.0;
    double excluded_area = 0.0;       // area where |phi| < eps_phi
    std::size_t degenerate_nodes = 0;
    std::size_t hypothesis_violations = 0;

    double tolerance = 1e-9;
    bool holds = false;
    std::string verdict;
};

// holds iff slack >= -tol * max(|lhs|, 1); fills verdict.
void finalize(InequalityReport& report, double tol);

/// int |phi| <= int sqrt|phi(f)| sqrt|phi| |f_z - (phi/|phi|) f_zbar|.
/// DegeneracyError when more than 1% of the nodes have J <= 0.
InequalityReport rs_sides(const MappingField& f, const WirtingerField& derivs,
                          const HolomorphicDifferential& phi, double tol = 1e-9);
InequalityReport rs_sides(const MappingField& f, const HolomorphicDifferential& phi,
                          double tol = 1e-9, int stencil_order = 4);

struct LowerBounds {
    InequalityReport quadratic;  // int |phi(f)| |A|^2 >= int |phi|
    InequalityReport jacobian;   // int |phi| |A|^2 / J >= int |phi|
};

/// The two Cauchy-Schwarz consequences of the Reich-Strebel inequality,
/// with A = f_z - (phi/|phi|) f_zbar. The intermediate quotients are listed
/// in `terms` under "cauchy_schwarz".
LowerBounds rs_lower_bounds(const MappingField& f, const WirtingerField& derivs,
                            const HolomorphicDifferential& phi, double tol = 1e-9);

/// max |mu_h - |mu_h| conj(phi)/|phi|| over nodes where both are defined.
/// CoverageError if phi vanishes (below eps_phi) on more than 1% of the nodes.
double alignment_residual(const BeltramiField& mu, const QuadraticDifferentialField& phi);
double alignment_residual(const MappingField& h, const QuadraticDifferentialField& phi,
                          int stencil_order = 4);

/// Pointwise chain at each node, with phi evaluated at f(z):
///   |(1-|mu_f|)(g_z conj(f_z) - e g_zbar f_z)/J_f|^2
///       <= (1-|mu_f|)^2 (|g_z|+|g_zbar|)^2 |f_z|^2 / J_f^2 <= J_g / J_f,
/// e = phi(f)/|phi(f)|. lhs/rhs hold the integrals of the outer members;
/// worst_node_slack is the smallest slack of either link. Counted hypothesis
/// violations: nodes with |mu_g| > |mu_f| and nodes where mu_{f^-1} is not
/// aligned with phi. The "equality_nodes" term counts |mu_f - mu_g| <= 1e-9.
InequalityReport pointwise_teich(const MappingField& f, const WirtingerField& df,
                                 const WirtingerField& dg, const HolomorphicDifferential& phi,
                                 double tol = 1e-9);

struct EnergyGapReport {
    double gap = 0.0;         // E(H) - E(h), each on its own grid
    double pulled_gap = 0.0;  // int [Psi(K(xi,H)) - Psi(K(z,h))] J_h lambda(h)
    double term1 = 0.0;
    double term2 = 0.0;
    double energy_h = 0.0;
    double energy_H = 0.0;
    double tolerance = 0.0;
    double inversion_residual = 0.0;  // max |H(xi(z)) - h(z)|
    double boundary_mismatch = 0.0;
    double max_xi_zbar = 0.0;
    double max_xi_displacement = 0.0;  // max |xi(z) - z|
    double identity_mismatch = 0.0;    // max nodewise |convexity bound - (t1 + t2) integrand|
    std::size_t convexity_violations = 0;
    std::size_t negative_term1_nodes = 0;
    std::size_t nodes = 0;
    std::size_t skipped_nodes = 0;  // inversion failed or degenerate
    DbarReport phi_dbar;
    double phi_l1 = 0.0;
    bool certified = false;
    bool bound_holds = false;  // pulled_gap >= term1 + term2 - tol and gap >= -tol
    std::string verdict;
};

// Scale of the discretisation-aware tolerance max(1e-8, C h^2).
inline constexpr double kGapToleranceConstant = 1.0;

/// Decomposition of the energy gap between h and a competitor H with the
/// same boundary values, through xi = H^{-1} o h obtained by Newton
/// inversion of H's interpolant. PairingError when the boundary traces
/// differ by more than `pairing_tol`; InvertibilityError when the inversion
/// fails at more than 1% of the nodes.
///
/// A negative `pairing_tol` selects the default: 1e-6, or the grid spacing on
/// the disk, whose boundary nodes sit up to a cell inside the circle where
/// maps fixing the circle need not agree exactly.
EnergyGapReport energy_gap(const MappingField& h, const MappingField& H, const ConvexProfile& psi,
                           const WeightField& w, double pairing_tol = -1.0,
                           int stencil_order = 4);

struct UniquenessReport {
    EnergyGapReport gap;
    bool coincide = false;
    std::string verdict;  // "maps coincide (discrete)" | "distinct" | "hypotheses unmet"
};

UniquenessReport uniqueness_verdict(const MappingField& h, const MappingField& H,
                                    const ConvexProfile& psi, const WeightField& w,
                                    double pairing_tol = -1.0);

/// Random boundary-identity maps id + sum c_i phi_i of the unit disk built
/// from the dyadic bump basis. Coefficients are drawn, normalised so that
/// |Df - I| reaches a random target in [0.3, 0.9], then shrunk by 0.8 until
/// min J >= 0.1 on the grid.
class RandomMapGenerator {
public:
    RandomMapGenerator(GridPtr grid, std::uint64_t seed, int levels = 3);
    ClosedFormMap next();

private:
    GridPtr grid_;
    BumpBasis basis_;
    std::mt19937_64 rng_;
};

}  // namespace mfd
