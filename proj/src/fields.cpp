#include "mfd/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfd/error.hpp"
#include "mfd/reduce.hpp"
#include "mfd/stencil.hpp"

namespace mfd {

MappingField::MappingField(GridPtr grid, std::vector<cplx> values)
    : MappingField(grid, std::move(values), grid->inside_mask()) {}

MappingField::MappingField(GridPtr grid, std::vector<cplx> values,
                           std::vector<std::uint8_t> active)
    : grid_(std::move(grid)), values_(std::move(values)), active_(std::move(active)) {
    validate_and_trace();
}

void MappingField::validate_and_trace() {
    const auto& g = *grid_;
    if (values_.size() != g.size() || active_.size() != g.size()) {
        throw DataError("mapping field size does not match its grid");
    }
    active_count_ = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (active_[k] && !g.inside(k)) active_[k] = 0;
        if (!active_[k]) continue;
        if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag())) {
            throw DataError("non-finite mapping value at node " + std::to_string(k));
        }
        ++active_count_;
    }
    boundary_trace_.clear();
    boundary_trace_.reserve(g.boundary_nodes().size());
    for (std::size_t k : g.boundary_nodes()) boundary_trace_.push_back(values_[k]);
}

MappingField MappingField::sample(GridPtr grid, const std::function<cplx(cplx)>& map) {
    std::vector<cplx> values(grid->size(), cplx{0.0, 0.0});
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (grid->inside(k)) values[k] = map(grid->node(k));
    }
    return MappingField(grid, std::move(values));
}

MappingField MappingField::with_values(std::vector<cplx> values) const {
    return MappingField(grid_, std::move(values), active_);
}

std::size_t WirtingerField::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

WirtingerField WirtingerField::analytic(GridPtr grid,
                                        const std::function<std::pair<cplx, cplx>(cplx)>& derivs,
                                        const std::vector<std::uint8_t>* mask) {
    WirtingerField w;
    const std::size_t size = grid->size();
    w.fz.assign(size, cplx{});
    w.fzbar.assign(size, cplx{});
    w.jacobian.assign(size, 0.0);
    w.valid.assign(size, 0);
    for (std::size_t k = 0; k < size; ++k) {
        const bool use = mask ? (*mask)[k] != 0 : grid->inside(k);
        if (!use) continue;
        const auto [a, b] = derivs(grid->node(k));
        w.fz[k] = a;
        w.fzbar[k] = b;
        w.jacobian[k] = std::norm(a) - std::norm(b);
        w.valid[k] = 1;
    }
    w.grid = std::move(grid);
    return w;
}

std::optional<std::pair<cplx, cplx>> wirtinger_at(const DomainGrid& g,
                                                   std::span<const cplx> vals,
                                                   const std::vector<std::uint8_t>& active, int i,
                                                   int j, int stencil_order) {
    const int n = g.n();
    auto dx = line_derivative<cplx>(
        stencil_order, g.hx(),
        [&](int d) { return i + d >= 0 && i + d < n && active[g.index(i + d, j)] != 0; },
        [&](int d) { return vals[g.index(i + d, j)]; });
    if (!dx) return std::nullopt;
    auto dy = line_derivative<cplx>(
        stencil_order, g.hy(),
        [&](int d) { return j + d >= 0 && j + d < n && active[g.index(i, j + d)] != 0; },
        [&](int d) { return vals[g.index(i, j + d)]; });
    if (!dy) return std::nullopt;
    const cplx I{0.0, 1.0};
    return std::pair<cplx, cplx>{0.5 * (*dx - I * *dy), 0.5 * (*dx + I * *dy)};
}

WirtingerField wirtinger_derivatives(const MappingField& f, int stencil_order) {
    if (stencil_order != 2 && stencil_order != 4) {
        throw ConfigError("stencil order must be 2 or 4");
    }
    const auto& g = f.grid();
    const int n = g.n();
    WirtingerField w;
    w.grid = f.grid_ptr();
    w.fz.assign(g.size(), cplx{});
    w.fzbar.assign(g.size(), cplx{});
    w.jacobian.assign(g.size(), 0.0);
    w.valid.assign(g.size(), 0);
    const auto vals = f.values();

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = g.index(i, j);
            if (!f.active(k)) continue;
            const auto d = wirtinger_at(g, vals, f.active_mask(), i, j, stencil_order);
            if (!d) continue;
            w.fz[k] = d->first;
            w.fzbar[k] = d->second;
            w.jacobian[k] = std::norm(w.fz[k]) - std::norm(w.fzbar[k]);
            w.valid[k] = 1;
        }
    }
    return w;
}

double distortion_value(cplx fz, cplx fzbar) {
    const double a = std::norm(fz);
    const double b = std::norm(fzbar);
    const double jac = a - b;
    if (!(jac > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (a + b) / jac;
}

double distortion_from_mu(cplx mu) {
    const double m2 = std::norm(mu);
    if (!(m2 < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    return (1.0 + m2) / (1.0 - m2);
}

std::size_t DistortionField::degenerate_count() const {
    return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), std::uint8_t{1}));
}

std::size_t DistortionField::defined_count() const {
    return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), std::uint8_t{1}));
}

double DistortionField::degenerate_fraction() const {
    const std::size_t bad = degenerate_count();
    const std::size_t total = bad + defined_count();
    return total == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(total);
}

DistortionField distortion(const WirtingerField& w) {
    DistortionField d;
    d.grid = w.grid;
    const std::size_t size = w.fz.size();
    d.K.assign(size, std::numeric_limits<double>::quiet_NaN());
    d.degenerate.assign(size, 0);
    d.defined.assign(size, 0);
    for (std::size_t k = 0; k < size; ++k) {
        if (!w.ok(k)) continue;
        if (w.jacobian[k] > 0.0) {
            d.K[k] = (std::norm(w.fz[k]) + std::norm(w.fzbar[k])) / w.jacobian[k];
            d.defined[k] = 1;
        } else {
            d.degenerate[k] = 1;
        }
    }
    return d;
}

BeltramiField beltrami(const WirtingerField& w) {
    BeltramiField b;
    b.grid = w.grid;
    const std::size_t size = w.fz.size();
    b.mu.assign(size, cplx{});
    b.valid.assign(size, 0);
    for (std::size_t k = 0; k < size; ++k) {
        if (!w.ok(k) || w.fz[k] == cplx{0.0, 0.0}) continue;
        b.mu[k] = w.fzbar[k] / w.fz[k];
        b.valid[k] = 1;
    }
    return b;
}

DistortionField distortion_from_beltrami(const BeltramiField& mu) {
    DistortionField d;
    d.grid = mu.grid;
    const std::size_t size = mu.mu.size();
    d.K.assign(size, std::numeric_limits<double>::quiet_NaN());
    d.degenerate.assign(size, 0);
    d.defined.assign(size, 0);
    for (std::size_t k = 0; k < size; ++k) {
        if (!mu.valid[k]) continue;
        const double m2 = std::norm(mu.mu[k]);
        if (m2 < 1.0) {
            d.K[k] = (1.0 + m2) / (1.0 - m2);
            d.defined[k] = 1;
        } else {
            d.degenerate[k] = 1;
        }
    }
    return d;
}

FiniteDistortionReport finite_distortion_report(const MappingField& f, int stencil_order) {
    const auto w = wirtinger_derivatives(f, stencil_order);
    const auto d = distortion(w);
    FiniteDistortionReport r;
    std::vector<double> jac_terms;
    for (std::size_t k = 0; k < w.fz.size(); ++k) {
        if (!w.ok(k)) continue;
        ++r.node_count;
        jac_terms.push_back(std::abs(w.jacobian[k]) * f.grid().cell_area());
        if (d.degenerate[k]) {
            ++r.degenerate_count;
        } else if (d.defined[k]) {
            r.k_ess_sup = std::max(r.k_ess_sup, d.K[k]);
        }
    }
    r.jacobian_l1 = pairwise_sum(jac_terms);
    r.degenerate_fraction =
        r.node_count == 0 ? 0.0 : static_cast<double>(r.degenerate_count) / r.node_count;
    r.finite_distortion = r.node_count > 0 && r.degenerate_count == 0;
    r.verdict = r.finite_distortion ? "finite distortion (discrete)" : "degenerate nodes present";
    return r;
}

double compose_distortion(cplx mu_xi, cplx mu_h) {
    const double a = std::norm(mu_xi);
    const double b = std::norm(mu_h);
    if (!(a < 1.0) || !(b < 1.0)) {
        throw DomainError("compose_distortion requires |mu| < 1");
    }
    const double k_xi = (1.0 + a) / (1.0 - a);
    const double k_h = (1.0 + b) / (1.0 - b);
    const double cross = (mu_xi * std::conj(mu_h)).real();
    return k_xi * k_h * (1.0 - 4.0 * cross / ((1.0 + a) * (1.0 + b)));
}

}  // namespace mfd
