#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfd/grid.hpp"

namespace mfd {

/// A mapping sampled at the nodes of a DomainGrid.
///
/// Only `active` nodes carry values; by default these are the inside nodes of
/// the grid. Resampling operations (conjugation, composition) deactivate nodes
/// whose preimage left the sampled region. `boundary_trace()` is a copy of the
/// values at the grid's boundary nodes and always equals them bit for bit.
class MappingField {
public:
    MappingField(GridPtr grid, std::vector<cplx> values);
    MappingField(GridPtr grid, std::vector<cplx> values, std::vector<std::uint8_t> active);

    static MappingField sample(GridPtr grid, const std::function<cplx(cplx)>& map);

    const DomainGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    cplx operator[](std::size_t k) const { return values_[k]; }
    bool active(std::size_t k) const { return active_[k] != 0; }
    const std::vector<std::uint8_t>& active_mask() const { return active_; }
    std::size_t active_count() const { return active_count_; }
    const std::vector<cplx>& boundary_trace() const { return boundary_trace_; }

    // Same grid and mask, new values. Used by iterative algorithms.
    MappingField with_values(std::vector<cplx> values) const;

private:
    void validate_and_trace();

    GridPtr grid_;
    std::vector<cplx> values_;
    std::vector<std::uint8_t> active_;
    std::size_t active_count_ = 0;
    std::vector<cplx> boundary_trace_;
};

// Per-node f_z, f_zbar and J = |f_z|^2 - |f_zbar|^2.
struct WirtingerField {
    GridPtr grid;
    std::vector<cplx> fz;
    std::vector<cplx> fzbar;
    std::vector<double> jacobian;
    std::vector<std::uint8_t> valid;

    bool ok(std::size_t k) const { return valid[k] != 0; }
    std::size_t valid_count() const;

    // Exact derivatives supplied by the caller (for maps known in closed form).
    static WirtingerField analytic(GridPtr grid,
                                   const std::function<std::pair<cplx, cplx>(cplx)>& derivs,
                                   const std::vector<std::uint8_t>* mask = nullptr);
};

struct BeltramiField {
    GridPtr grid;
    std::vector<cplx> mu;
    std::vector<std::uint8_t> valid;  // f_z != 0
};

struct DistortionField {
    GridPtr grid;
    std::vector<double> K;                // NaN where undefined
    std::vector<std::uint8_t> degenerate;  // J <= 0 (or |mu| >= 1)
    std::vector<std::uint8_t> defined;     // K computed

    std::size_t degenerate_count() const;
    std::size_t defined_count() const;
    // Degenerate nodes over all nodes that had derivative data.
    double degenerate_fraction() const;
};

WirtingerField wirtinger_derivatives(const MappingField& f, int stencil_order = 4);

// (f_z, f_zbar) at node (i, j) from raw node data, with the same stencils as
// wirtinger_derivatives. Lets callers re-evaluate a window after local edits.
std::optional<std::pair<cplx, cplx>> wirtinger_at(const DomainGrid& grid,
                                                   std::span<const cplx> values,
                                                   const std::vector<std::uint8_t>& active, int i,
                                                   int j, int stencil_order);

DistortionField distortion(const WirtingerField& w);
BeltramiField beltrami(const WirtingerField& w);
DistortionField distortion_from_beltrami(const BeltramiField& mu);

// Pointwise versions of the above.
double distortion_value(cplx fz, cplx fzbar);
double distortion_from_mu(cplx mu);

struct FiniteDistortionReport {
    std::size_t node_count = 0;
    std::size_t degenerate_count = 0;
    double degenerate_fraction = 0.0;
    double jacobian_l1 = 0.0;
    double k_ess_sup = 0.0;  // max K over nondegenerate nodes
    bool finite_distortion = false;
    std::string verdict;
};

FiniteDistortionReport finite_distortion_report(const MappingField& f, int stencil_order = 4);

/// Distortion of H = h o xi^{-1} at xi(z), from the Beltrami coefficients of
/// xi and h at z:
///   K(xi,H) = K(z,xi) K(z,h) [1 - 4 Re(mu_xi conj(mu_h)) / ((1+|mu_xi|^2)(1+|mu_h|^2))].
/// Throws DomainError unless both moduli are below one.
double compose_distortion(cplx mu_xi, cplx mu_h);

}  // namespace mfd
