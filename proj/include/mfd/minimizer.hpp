#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfd/bumps.hpp"
#include "mfd/fields.hpp"
#include "mfd/hopf.hpp"
#include "mfd/profile.hpp"
#include "mfd/weight.hpp"

namespace mfd {

// The energy minimised here is  E(h) = sum Psi(K(w,h)) lambda(h(w)) J(w,h) dA,
// varied through h -> h o (id + t phi) with phi from a BumpBasis.

/// E(h o (id + t phi)), with h resampled at the displaced nodes by its
/// biquartic interpolant. RangeError if a displaced node cannot be resampled;
/// +inf if the varied map has a node with J <= 0.
double inner_variation_energy(const MappingField& h, const Bump& phi, double t,
                              const ConvexProfile& psi, const WeightField& w,
                              int stencil_order = 4);

struct InnerDerivative {
    double value = 0.0;
    double error = 0.0;  // |Richardson correction|
};

/// d/dt E(h o (id + t phi)) at t = 0: centred differences at delta and
/// delta/2 combined by one Richardson step.
InnerDerivative inner_derivative(const MappingField& h, const Bump& phi, const ConvexProfile& psi,
                                 const WeightField& w, double delta = 1e-4,
                                 int stencil_order = 4);

struct MinimizeOptions {
    double grad_tol = 1e-6;
    double j_floor = 1e-3;
    int max_sweeps = 200;
    int basis_levels = 3;
    double delta = 1e-4;
    double max_step = 0.9;  // |t| < 1 keeps id + t phi a diffeomorphism
    int max_backtracks = 40;
    int stencil_order = 4;
};

struct DescentStep {
    int iteration = 0;
    int sweep = 0;
    double energy = 0.0;
    double step = 0.0;
    std::size_t basis_index = 0;
    double min_jacobian = 0.0;
    double dbar = 0.0;  // max |dPhi/dwbar| of the Hopf differential; NaN if unavailable
};

struct DescentTrace {
    std::vector<DescentStep> steps;  // steps[0] is the start, iteration 0
    std::string termination;         // "stationary" | "max_sweeps" | "no_descent"
    int sweeps = 0;
    double max_derivative = 0.0;     // over the basis, at the final iterate
};

struct MinimizeResult {
    MappingField map;
    DescentTrace trace;
};

/// Coordinate descent over the bump basis with backtracking on t. A step is
/// accepted only if the energy decreases and min J stays above j_floor.
/// Stops when every |inner derivative| <= grad_tol max(1, E), when a full
/// sweep makes no progress, or after max_sweeps.
///
/// PairingError if `start` does not carry `boundary_trace` exactly;
/// DegeneracyError if min J of the start is at or below j_floor; StallError
/// if the first sweep finds a descent direction but cannot take any step.
MinimizeResult minimize(const std::vector<cplx>& boundary_trace, const MappingField& start,
                        const ConvexProfile& psi, const WeightField& w,
                        const MinimizeOptions& options = {});

struct StationarityReport {
    double max_derivative = 0.0;
    std::size_t argmax = 0;
    double derivative_threshold = 0.0;
    DbarReport dbar;
    bool stationary = false;
    bool holomorphic = false;
    bool consistent = false;  // both tests agree
};

StationarityReport stationarity_vs_holomorphy(const MappingField& h, const ConvexProfile& psi,
                                              const WeightField& w, const BumpBasis& basis,
                                              double grad_tol = 1e-6, double delta = 1e-4);

}  // namespace mfd
