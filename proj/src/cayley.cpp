#include "mfd/cayley.hpp"

#include <cmath>

#include "mfd/error.hpp"
#include "mfd/interp.hpp"

namespace mfd {
namespace {

const cplx I{0.0, 1.0};

ResampledMap finish(GridPtr grid, std::vector<cplx> values,
                    std::vector<std::uint8_t> active, double max_masked_fraction) {
    ResampledMap out{MappingField(grid, std::move(values), std::move(active)), 0, 0.0};
    out.masked = grid->inside_count() - out.map.active_count();
    out.masked_fraction = static_cast<double>(out.masked) / grid->inside_count();
    if (out.masked_fraction > max_masked_fraction) {
        throw TruncationError("conjugation masked " + std::to_string(out.masked_fraction * 100.0) +
                                  "% of nodes; enlarge the half-plane truncation",
                              out.masked_fraction);
    }
    return out;
}

}  // namespace

cplx cayley(cplx z) {
    if (z == cplx{-1.0, 0.0}) throw PoleError("cayley: pole at z = -1");
    return -I * (z - 1.0) / (z + 1.0);
}

cplx cayley_inv(cplx w) {
    if (w == -I) throw PoleError("cayley_inv: pole at w = -i");
    return (I - w) / (w + I);
}

cplx cayley_derivative(cplx z) {
    if (z == cplx{-1.0, 0.0}) throw PoleError("cayley_derivative: pole at z = -1");
    const cplx s = z + 1.0;
    return -2.0 * I / (s * s);
}

WeightField pullback_weight(const WeightField& eta) {
    return WeightField::custom(
        "pullback(" + eta.name() + ")",
        [eta](cplx w) {
            const cplx s = w + 1.0;
            const double m = std::norm(s);
            return eta(cayley(w)) * 4.0 / (m * m);
        },
        [eta](cplx w) { return w != cplx{-1.0, 0.0} && eta.in_domain(cayley(w)); });
}

ResampledMap conjugate_map(const MappingField& h_half, GridPtr disk_grid,
                           double max_masked_fraction) {
    const FieldInterpolator interp(h_half);
    const auto& half = h_half.grid();
    const auto& g = *disk_grid;
    std::vector<cplx> values(g.size(), cplx{});
    std::vector<std::uint8_t> active(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const cplx w = g.node(k);
        if (w == cplx{-1.0, 0.0}) continue;
        const cplx z = cayley(w);
        if (!half.contains(z)) continue;
        const auto hz = interp(z);
        if (!hz || *hz == -I) continue;
        values[k] = cayley_inv(*hz);
        active[k] = 1;
    }
    return finish(disk_grid, std::move(values), std::move(active), max_masked_fraction);
}

ResampledMap conjugate_to_half_plane(const MappingField& g_disk, GridPtr half_grid,
                                     double max_masked_fraction) {
    const FieldInterpolator interp(g_disk);
    const auto& g = *half_grid;
    std::vector<cplx> values(g.size(), cplx{});
    std::vector<std::uint8_t> active(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const cplx z = g.node(k);
        if (z == -I) continue;
        const cplx w = cayley_inv(z);
        const auto gw = interp(w);
        if (!gw || *gw == cplx{-1.0, 0.0}) continue;
        values[k] = cayley(*gw);
        active[k] = 1;
    }
    return finish(half_grid, std::move(values), std::move(active), max_masked_fraction);
}

QuadraticDifferentialField transport_differential(const std::function<cplx(cplx)>& phi_half,
                                                  GridPtr disk_grid) {
    return QuadraticDifferentialField::sample(
        std::move(disk_grid),
        [&](cplx w) {
            if (w == cplx{-1.0, 0.0}) return cplx{NAN, NAN};
            const cplx d = cayley_derivative(w);
            return phi_half(cayley(w)) * d * d;
        },
        "transported");
}

QuadraticDifferentialField transport_differential(const QuadraticDifferentialField& phi_half,
                                                  GridPtr disk_grid) {
    const FieldInterpolator interp(phi_half.grid, phi_half.phi, phi_half.valid);
    const auto& half = *phi_half.grid;
    auto q = QuadraticDifferentialField::sample(
        std::move(disk_grid),
        [&](cplx w) {
            if (w == cplx{-1.0, 0.0}) return cplx{NAN, NAN};
            const cplx z = cayley(w);
            if (!half.contains(z)) return cplx{NAN, NAN};
            const auto v = interp(z);
            if (!v) return cplx{NAN, NAN};
            const cplx d = cayley_derivative(w);
            return *v * d * d;
        },
        phi_half.weight_tag + ":transported");
    return q;
}

}  // namespace mfd
