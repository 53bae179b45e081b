#pragma once

#include <complex>
#include <functional>

#include "mfd/fields.hpp"
#include "mfd/hopf.hpp"
#include "mfd/weight.hpp"

namespace mfd {

// psi(z) = -i (z - 1) / (z + 1) maps the unit disk onto the upper half-plane
// with psi(0) = i, psi(1) = 0 and psi(-1) = infinity.
cplx cayley(cplx z);
cplx cayley_inv(cplx w);
cplx cayley_derivative(cplx z);

/// lambda(w) = eta(psi(w)) |psi'(w)|^2 on the disk.
///
/// With eta = Im^-2 this is 4 (1 - |w|^2)^-2: the curvature -1 metrics of
/// the half-plane and the disk differ from the bare area elements by that
/// factor.
WeightField pullback_weight(const WeightField& eta);

struct ResampledMap {
    MappingField map;
    std::size_t masked = 0;        // inside nodes left inactive
    double masked_fraction = 0.0;  // masked / inside nodes
};

/// g = psi^{-1} o h o psi sampled on `disk_grid`, with h resampled from its
/// half-plane field. Nodes whose psi-image leaves the truncated band (or
/// cannot be interpolated) are masked. TruncationError when more than
/// `max_masked_fraction` of the nodes are masked.
ResampledMap conjugate_map(const MappingField& h_half, GridPtr disk_grid,
                           double max_masked_fraction = 0.1);

/// The reverse conjugation h = psi o g o psi^{-1} on a half-plane grid.
ResampledMap conjugate_to_half_plane(const MappingField& g_disk, GridPtr half_grid,
                                     double max_masked_fraction = 0.1);

/// Phi_disk(w) = Phi(psi(w)) psi'(w)^2.
QuadraticDifferentialField transport_differential(const std::function<cplx(cplx)>& phi_half,
                                                  GridPtr disk_grid);
QuadraticDifferentialField transport_differential(const QuadraticDifferentialField& phi_half,
                                                  GridPtr disk_grid);

}  // namespace mfd
