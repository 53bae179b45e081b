#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfd/fields.hpp"
#include "mfd/profile.hpp"
#include "mfd/weight.hpp"

namespace mfd {

struct QuadraticDifferentialField {
    GridPtr grid;
    std::vector<cplx> phi;
    std::vector<std::uint8_t> valid;
    std::string weight_tag;
    std::string role = "differential";
    // Size of the products Phi is formed from (Psi'(K)|h_w|^2 lambda for Hopf
    // differentials); sets the rounding floor when Phi itself cancels to ~0.
    double magnitude = 0.0;

    std::size_t valid_count() const;

    // Samples a closed-form differential at the inside nodes.
    static QuadraticDifferentialField sample(GridPtr grid, const std::function<cplx(cplx)>& phi,
                                             std::string weight_tag = "analytic");
};

// Which second factor enters Phi: h_w * conj(h_wbar) (the default, covariant
// under conformal changes of coordinates) or the plain product h_w * h_wbar.
enum class HopfForm { Conjugated, Unconjugated };

/// Ahlfors-Hopf field  Phi_h = Psi'(K(w,h)) h_w conj(h_wbar) lambda(h(w)).
///
/// Nodes with J <= 0 or with weight above kWeightCeiling (or outside its
/// domain) are left invalid; DegeneracyError if more than 1% of nodes are
/// degenerate. Phi is exactly zero wherever h_wbar == 0.
QuadraticDifferentialField hopf_differential(const MappingField& h, const ConvexProfile& psi,
                                             const WeightField& w,
                                             HopfForm form = HopfForm::Conjugated,
                                             int stencil_order = 4);
QuadraticDifferentialField hopf_differential(const MappingField& h, const WirtingerField& derivs,
                                             const ConvexProfile& psi, const WeightField& w,
                                             HopfForm form = HopfForm::Conjugated);

struct DbarReport {
    double max_dbar = 0.0;        // max |dPhi/dwbar|, centred 4th-order stencil
    double mean_value_gap = 0.0;  // max |Phi(c) - mean of the 4 axis neighbours|
    double truncation_estimate = 0.0;
    double threshold = 0.0;
    bool holomorphic = false;
    std::size_t nodes = 0;  // nodes where the full stencil was available
    std::size_t failing_nodes = 0;
};

/// Numerical holomorphy test. The truncation estimate is the gap between the
/// 4th- and 2nd-order dbar stencils; a node fails when its 4th-order dbar
/// exceeds 10 x its own estimate (plus a rounding floor), and Phi counts as
/// numerically holomorphic when no node fails.
/// An optional `region` restricts the nodes examined. CoverageError when
/// Phi is valid on fewer than 99% of the inside nodes of the region.
DbarReport dbar_residual(const QuadraticDifferentialField& phi,
                         const std::function<bool(cplx)>& region = {});

// Midpoint-rule integral of |Phi| over valid nodes.
double l1_mass(const QuadraticDifferentialField& phi);

struct L1MassReport {
    std::vector<int> resolutions;
    std::vector<double> mass;
    bool divergent = false;
    cplx concentration_point{};
    double concentration_share = 0.0;  // share of last-level mass near that point
    std::string verdict;
};

/// L1 mass of Phi at each resolution. Divergent when the last mass exceeds
/// the first by more than a factor 2 while at least half of it sits within
/// 0.25 of a point that is within three cells of the domain boundary.
L1MassReport l1_mass(const std::function<QuadraticDifferentialField(int)>& phi_at,
                     const std::vector<int>& resolutions);

// psi(w) = e^{i theta} (w - a) / (1 - conj(a) w),  |a| < 1.
struct MobiusParams {
    cplx a{0.0, 0.0};
    double theta = 0.0;
};
cplx mobius(const MobiusParams& m, cplx w);

/// sup |Phi_h - Phi_{m o h}| with the hyperbolic disk weight, over the
/// stencil-interior nodes with |w| <= region_radius. The weight is unbounded
/// at the circle, so the comparison runs on a compact subdisk.
/// RangeError if h or m o h leaves the closed disk.
double mobius_invariance_gap(const MappingField& h, const ConvexProfile& psi,
                             const MobiusParams& m, double region_radius = 0.9);

}  // namespace mfd
