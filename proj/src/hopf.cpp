#include "mfd/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfd/energy.hpp"
#include "mfd/error.hpp"
#include "mfd/reduce.hpp"

namespace mfd {

std::size_t QuadraticDifferentialField::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

QuadraticDifferentialField QuadraticDifferentialField::sample(GridPtr grid,
                                                              const std::function<cplx(cplx)>& phi,
                                                              std::string weight_tag) {
    QuadraticDifferentialField q;
    q.phi.assign(grid->size(), cplx{});
    q.valid.assign(grid->size(), 0);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (!grid->inside(k)) continue;
        const cplx v = phi(grid->node(k));
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) {
            q.phi[k] = v;
            q.valid[k] = 1;
        }
    }
    q.grid = std::move(grid);
    q.weight_tag = std::move(weight_tag);
    return q;
}

QuadraticDifferentialField hopf_differential(const MappingField& h, const ConvexProfile& psi,
                                             const WeightField& w, HopfForm form,
                                             int stencil_order) {
    return hopf_differential(h, wirtinger_derivatives(h, stencil_order), psi, w, form);
}

QuadraticDifferentialField hopf_differential(const MappingField& h, const WirtingerField& derivs,
                                             const ConvexProfile& psi, const WeightField& w,
                                             HopfForm form) {
    const auto& g = h.grid();
    QuadraticDifferentialField q;
    q.grid = h.grid_ptr();
    q.phi.assign(g.size(), cplx{});
    q.valid.assign(g.size(), 0);
    q.weight_tag = w.name();
    std::size_t degenerate = 0;
    std::size_t with_data = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!derivs.ok(k)) continue;
        ++with_data;
        if (!(derivs.jacobian[k] > 0.0)) {
            ++degenerate;
            continue;
        }
        const cplx hbar = derivs.fzbar[k];
        const double lam = w(h[k]);
        const bool weighted = lam <= kWeightCeiling;
        if (hbar == cplx{0.0, 0.0}) {
            q.valid[k] = 1;
            if (weighted) q.magnitude = std::max(q.magnitude, psi.deriv(1.0) * std::norm(derivs.fz[k]) * lam);
            continue;
        }
        if (!weighted) continue;
        const double K = (std::norm(derivs.fz[k]) + std::norm(hbar)) / derivs.jacobian[k];
        const cplx second = form == HopfForm::Conjugated ? std::conj(hbar) : hbar;
        const double dpsi = psi.deriv(K);
        q.phi[k] = dpsi * derivs.fz[k] * second * lam;
        q.valid[k] = std::isfinite(q.phi[k].real()) && std::isfinite(q.phi[k].imag()) ? 1 : 0;
        if (q.valid[k]) q.magnitude = std::max(q.magnitude, dpsi * std::norm(derivs.fz[k]) * lam);
    }
    const double frac = with_data == 0 ? 0.0 : static_cast<double>(degenerate) / with_data;
    if (frac > kMaxDegenerateFraction) {
        throw DegeneracyError("hopf_differential: degenerate fraction " + std::to_string(frac) +
                                  " exceeds threshold",
                              frac);
    }
    return q;
}

DbarReport dbar_residual(const QuadraticDifferentialField& phi,
                         const std::function<bool(cplx)>& region) {
    const auto& g = *phi.grid;
    const int n = g.n();
    std::size_t in_region = 0;
    std::size_t valid_in_region = 0;
    double scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k) || (region && !region(g.node(k)))) continue;
        ++in_region;
        if (phi.valid[k]) {
            ++valid_in_region;
            scale = std::max(scale, std::abs(phi.phi[k]));
        }
    }
    if (in_region == 0 || static_cast<double>(valid_in_region) < 0.99 * in_region) {
        throw CoverageError("dbar_residual: differential defined on too few nodes (" +
                            std::to_string(valid_in_region) + " of " + std::to_string(in_region) +
                            ")");
    }
    scale = std::max(scale, phi.magnitude);
    auto usable = [&](int i, int j) {
        if (i < 0 || j < 0 || i >= n || j >= n) return false;
        const std::size_t k = g.index(i, j);
        return phi.valid[k] != 0 && (!region || region(g.node(k)));
    };
    auto at = [&](int i, int j) { return phi.phi[g.index(i, j)]; };
    const cplx I{0.0, 1.0};
    DbarReport r;
    const double rounding_floor =
        1e3 * std::numeric_limits<double>::epsilon() * scale / std::min(g.hx(), g.hy());
    std::size_t failing = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            bool full = usable(i, j);
            for (int d = 1; d <= 2 && full; ++d) {
                full = usable(i - d, j) && usable(i + d, j) && usable(i, j - d) && usable(i, j + d);
            }
            if (!full) continue;
            ++r.nodes;
            const cplx dx4 = (at(i - 2, j) - 8.0 * at(i - 1, j) + 8.0 * at(i + 1, j) - at(i + 2, j)) /
                             (12.0 * g.hx());
            const cplx dy4 = (at(i, j - 2) - 8.0 * at(i, j - 1) + 8.0 * at(i, j + 1) - at(i, j + 2)) /
                             (12.0 * g.hy());
            const cplx dx2 = (at(i + 1, j) - at(i - 1, j)) / (2.0 * g.hx());
            const cplx dy2 = (at(i, j + 1) - at(i, j - 1)) / (2.0 * g.hy());
            const cplx dbar4 = 0.5 * (dx4 + I * dy4);
            const cplx dbar2 = 0.5 * (dx2 + I * dy2);
            r.max_dbar = std::max(r.max_dbar, std::abs(dbar4));
            r.truncation_estimate = std::max(r.truncation_estimate, std::abs(dbar4 - dbar2));
            // For smooth holomorphic data dbar4 is O(h^4) while the two stencils
            // differ by O(h^2); a genuine dbar makes them agree instead.
            if (std::abs(dbar4) > 10.0 * std::abs(dbar4 - dbar2) + rounding_floor) ++failing;
            const cplx mean = 0.25 * (at(i - 1, j) + at(i + 1, j) + at(i, j - 1) + at(i, j + 1));
            r.mean_value_gap = std::max(r.mean_value_gap, std::abs(at(i, j) - mean));
        }
    }
    r.threshold = 10.0 * r.truncation_estimate + rounding_floor;
    r.failing_nodes = failing;
    r.holomorphic = failing == 0 && r.max_dbar <= r.threshold;
    return r;
}

double l1_mass(const QuadraticDifferentialField& phi) {
    std::vector<double> terms;
    const double area = phi.grid->cell_area();
    for (std::size_t k = 0; k < phi.phi.size(); ++k) {
        if (phi.valid[k]) terms.push_back(std::abs(phi.phi[k]) * area);
    }
    return pairwise_sum(terms);
}

namespace {

double distance_to_boundary(const DomainGrid& g, cplx z) {
    if (g.kind() == DomainKind::Disk) return 1.0 - std::abs(z);
    const auto& b = g.box();
    return std::min({z.real() - b.x0, b.x1 - z.real(), z.imag() - b.y0, b.y1 - z.imag()});
}

}  // namespace

L1MassReport l1_mass(const std::function<QuadraticDifferentialField(int)>& phi_at,
                     const std::vector<int>& resolutions) {
    if (resolutions.size() < 2) throw ConfigError("l1_mass needs at least two refinement levels");
    L1MassReport r;
    r.resolutions = resolutions;
    QuadraticDifferentialField last;
    for (int n : resolutions) {
        last = phi_at(n);
        r.mass.push_back(l1_mass(last));
    }
    const auto& g = *last.grid;
    std::size_t peak = 0;
    double peak_value = -1.0;
    for (std::size_t k = 0; k < last.phi.size(); ++k) {
        if (last.valid[k] && std::abs(last.phi[k]) > peak_value) {
            peak_value = std::abs(last.phi[k]);
            peak = k;
        }
    }
    r.concentration_point = g.node(peak);
    const bool near_boundary = distance_to_boundary(g, r.concentration_point) <= 3.0 * g.spacing();
    std::vector<double> near_terms;
    for (std::size_t k = 0; k < last.phi.size(); ++k) {
        if (last.valid[k] && std::abs(g.node(k) - r.concentration_point) <= 0.25) {
            near_terms.push_back(std::abs(last.phi[k]) * g.cell_area());
        }
    }
    const double total = r.mass.back();
    r.concentration_share = total > 0.0 ? pairwise_sum(near_terms) / total : 0.0;
    r.divergent = r.mass.back() > 2.0 * r.mass.front() && near_boundary &&
                  r.concentration_share > 0.5;
    r.verdict = r.divergent ? "divergent" : "bounded";
    return r;
}

cplx mobius(const MobiusParams& m, cplx w) {
    return std::polar(1.0, m.theta) * (w - m.a) / (1.0 - std::conj(m.a) * w);
}

double mobius_invariance_gap(const MappingField& h, const ConvexProfile& psi,
                             const MobiusParams& m, double region_radius) {
    if (!(std::abs(m.a) < 1.0)) throw DomainError("Mobius parameter must satisfy |a| < 1");
    const auto& g = h.grid();
    std::vector<cplx> moved(h.values().begin(), h.values().end());
    std::vector<std::size_t> offenders;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!h.active(k)) continue;
        if (std::abs(h[k]) > 1.0 + 1e-12) {
            offenders.push_back(k);
            continue;
        }
        moved[k] = mobius(m, h[k]);
        if (std::abs(moved[k]) > 1.0 + 1e-12) offenders.push_back(k);
    }
    if (!offenders.empty()) {
        throw RangeError("mobius_invariance_gap: image leaves the closed disk", 1.0,
                         std::move(offenders));
    }
    const auto w = WeightField::hyperbolic_disk();
    const auto phi_h = hopf_differential(h, psi, w);
    const auto phi_m = hopf_differential(h.with_values(std::move(moved)), psi, w);
    double gap = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!phi_h.valid[k] || !phi_m.valid[k]) continue;
        if (std::abs(g.node(k)) > region_radius || g.boundary_adjacent(k, 4)) continue;
        gap = std::max(gap, std::abs(phi_h.phi[k] - phi_m.phi[k]));
    }
    return gap;
}

}  // namespace mfd
