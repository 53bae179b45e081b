#pragma once

#include <cstddef>

#include "mfd/fields.hpp"
#include "mfd/profile.hpp"
#include "mfd/weight.hpp"

namespace mfd {

// Nodes whose weight exceeds this are left out of the quadrature and
// reported as excluded mass.
inline constexpr double kWeightCeiling = 1e12;
// Largest tolerated fraction of degenerate (J <= 0) nodes.
inline constexpr double kMaxDegenerateFraction = 0.01;

struct EnergyResult {
    double value = 0.0;
    std::size_t nodes_used = 0;
    std::size_t degenerate_nodes = 0;
    double degenerate_fraction = 0.0;
    std::size_t excluded_nodes = 0;  // weight above kWeightCeiling
    double excluded_area = 0.0;
};

/// Midpoint rule for  sum Psi(K(z,f)) lambda(z) dA  over nondegenerate nodes.
EnergyResult energy_direct(const MappingField& f, const ConvexProfile& psi, const WeightField& w,
                           int stencil_order = 4);
EnergyResult energy_direct(const WirtingerField& derivs, const ConvexProfile& psi,
                           const WeightField& w);

/// Midpoint rule for  sum Psi(K(w,h)) lambda(h(w)) J(w,h) dA,  the same
/// energy written through the inverse map h = f^{-1}. The weight is
/// evaluated analytically at the image points. Throws RangeError listing
/// nodes whose image lies outside the weight's domain.
EnergyResult energy_inverse(const MappingField& h, const ConvexProfile& psi, const WeightField& w,
                            int stencil_order = 4);
EnergyResult energy_inverse(const MappingField& h, const WirtingerField& derivs,
                            const ConvexProfile& psi, const WeightField& w);

struct CovGap {
    double gap = 0.0;  // |E_direct - E_inverse| / E_direct
    double direct = 0.0;
    double inverse = 0.0;
    double inverse_consistency = 0.0;  // sup |f(f^{-1}(w)) - w|
};

/// Relative disagreement of the direct and inverse forms of the energy for a
/// mutually inverse pair. The pair is checked first by interpolating f at
/// the points f_inverse(w); PairingError if the sup error exceeds
/// `pairing_tol`.
CovGap cov_gap(const MappingField& f, const MappingField& f_inverse, const ConvexProfile& psi,
               const WeightField& w, double pairing_tol = 1e-6);

}  // namespace mfd
