#include "mfd/energy.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mfd/error.hpp"
#include "mfd/interp.hpp"
#include "mfd/reduce.hpp"

namespace mfd {
namespace {

void check_degeneracy(const EnergyResult& r, const char* what) {
    if (r.degenerate_fraction > kMaxDegenerateFraction) {
        throw DegeneracyError(std::string(what) + ": degenerate fraction " +
                                  std::to_string(r.degenerate_fraction) + " exceeds threshold",
                              r.degenerate_fraction);
    }
}

}  // namespace

EnergyResult energy_direct(const MappingField& f, const ConvexProfile& psi, const WeightField& w,
                           int stencil_order) {
    return energy_direct(wirtinger_derivatives(f, stencil_order), psi, w);
}

EnergyResult energy_direct(const WirtingerField& derivs, const ConvexProfile& psi,
                           const WeightField& w) {
    const auto& g = *derivs.grid;
    const auto K = distortion(derivs);
    EnergyResult r;
    std::vector<double> terms;
    terms.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (K.degenerate[k]) {
            ++r.degenerate_nodes;
            continue;
        }
        if (!K.defined[k]) continue;
        const double lam = w(g.node(k));
        if (!(lam <= kWeightCeiling)) {
            ++r.excluded_nodes;
            r.excluded_area += g.cell_area();
            continue;
        }
        terms.push_back(psi(K.K[k]) * lam * g.cell_area());
        ++r.nodes_used;
    }
    r.degenerate_fraction = K.degenerate_fraction();
    check_degeneracy(r, "energy_direct");
    r.value = pairwise_sum(terms);
    return r;
}

EnergyResult energy_inverse(const MappingField& h, const ConvexProfile& psi, const WeightField& w,
                            int stencil_order) {
    return energy_inverse(h, wirtinger_derivatives(h, stencil_order), psi, w);
}

EnergyResult energy_inverse(const MappingField& h, const WirtingerField& derivs,
                            const ConvexProfile& psi, const WeightField& w) {
    const auto& g = h.grid();
    const auto K = distortion(derivs);
    EnergyResult r;
    std::vector<std::size_t> offenders;
    std::vector<double> terms;
    terms.reserve(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (K.degenerate[k]) {
            ++r.degenerate_nodes;
            continue;
        }
        if (!K.defined[k]) continue;
        const cplx image = h[k];
        if (!w.in_domain(image)) {
            offenders.push_back(k);
            continue;
        }
        const double lam = w(image);
        if (!(lam <= kWeightCeiling)) {
            ++r.excluded_nodes;
            r.excluded_area += g.cell_area();
            continue;
        }
        terms.push_back(psi(K.K[k]) * lam * derivs.jacobian[k] * g.cell_area());
        ++r.nodes_used;
    }
    r.degenerate_fraction = K.degenerate_fraction();
    check_degeneracy(r, "energy_inverse");
    if (!offenders.empty()) {
        throw RangeError("energy_inverse: " + std::to_string(offenders.size()) +
                             " image points outside the weight domain",
                         0.0, std::move(offenders));
    }
    r.value = pairwise_sum(terms);
    return r;
}

CovGap cov_gap(const MappingField& f, const MappingField& f_inverse, const ConvexProfile& psi,
               const WeightField& w, double pairing_tol) {
    CovGap out;
    const FieldInterpolator interp(f);
    const auto& gi = f_inverse.grid();
    for (std::size_t k = 0; k < gi.size(); ++k) {
        if (!f_inverse.active(k)) continue;
        const auto back = interp(f_inverse[k]);
        if (!back) {
            throw PairingError("cov_gap: f cannot be evaluated at f_inverse(node " +
                               std::to_string(k) + ")");
        }
        out.inverse_consistency = std::max(out.inverse_consistency, std::abs(*back - gi.node(k)));
    }
    if (out.inverse_consistency > pairing_tol) {
        throw PairingError("cov_gap: maps are not mutually inverse (sup error " +
                           std::to_string(out.inverse_consistency) + ")");
    }
    out.direct = energy_direct(f, psi, w).value;
    out.inverse = energy_inverse(f_inverse, psi, w).value;
    out.gap = std::abs(out.direct - out.inverse) / out.direct;
    return out;
}

}  // namespace mfd
