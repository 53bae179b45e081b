#include "mfd/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "mfd/energy.hpp"
#include "mfd/error.hpp"
#include "mfd/interp.hpp"
#include "mfd/reduce.hpp"

namespace mfd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node energy state of a map, updated one bump window at a time.
// Inner derivatives are difference quotients of the energy, so their
// rounding floor grows with it.
double derivative_threshold(double grad_tol, double energy) {
    return grad_tol * std::max(1.0, std::abs(energy));
}

class VariationEvaluator {
public:
    VariationEvaluator(const MappingField& h, const ConvexProfile& psi, const WeightField& w,
                       int order)
        : grid_(h.grid_ptr()),
          active_(h.active_mask()),
          values_(h.values().begin(), h.values().end()),
          scratch_(values_),
          psi_(psi),
          w_(w),
          order_(order),
          energy_(grid_->size(), 0.0),
          jac_(grid_->size(), kInf),
          counted_(grid_->size(), 0) {
        const auto d = wirtinger_derivatives(h, order);
        for (std::size_t k = 0; k < grid_->size(); ++k) {
            if (!active_[k] || !d.ok(k)) continue;
            counted_[k] = 1;
            jac_[k] = d.jacobian[k];
            energy_[k] = node_energy(values_[k], d.fz[k], d.fzbar[k]);
        }
        refresh();
    }

    double energy() const { return total_; }
    double min_jacobian() const { return min_jac_; }
    const std::vector<cplx>& values() const { return values_; }

    struct Trial {
        double delta = 0.0;  // energy change
        double min_jacobian = kInf;  // over the window
        std::vector<std::pair<std::size_t, cplx>> moved;
        std::vector<std::size_t> window;
        std::vector<double> window_energy;
        std::vector<double> window_jac;
    };

    // Energy change of h o (id + t phi). RangeError when a displaced node
    // cannot be resampled.
    Trial trial(const Bump& b, double t) const {
        Trial tr;
        const DomainGrid& g = *grid_;
        int i0 = g.n(), i1 = -1, j0 = g.n(), j1 = -1;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!active_[k]) continue;
            const cplx z = g.node(k);
            if (std::abs(z.real() - b.center.real()) >= b.radius ||
                std::abs(z.imag() - b.center.imag()) >= b.radius)
                continue;
            const cplx v = b.value(z);
            if (v == cplx(0.0, 0.0)) continue;
            const auto r = interp_->operator()(z + t * v);
            if (!r) throw RangeError("displaced node cannot be resampled", 0.0, {k});
            tr.moved.emplace_back(k, *r);
            i0 = std::min(i0, g.col(k));
            i1 = std::max(i1, g.col(k));
            j0 = std::min(j0, g.row(k));
            j1 = std::max(j1, g.row(k));
        }
        if (tr.moved.empty()) return tr;
        for (const auto& [k, v] : tr.moved) scratch_[k] = v;
        std::vector<double> diffs;
        for (int j = std::max(0, j0 - order_); j <= std::min(g.n() - 1, j1 + order_); ++j)
            for (int i = std::max(0, i0 - order_); i <= std::min(g.n() - 1, i1 + order_); ++i) {
                const std::size_t k = g.index(i, j);
                if (!counted_[k]) continue;
                const auto d = wirtinger_at(g, scratch_, active_, i, j, order_);
                double e = kInf, J = -kInf;
                if (d) {
                    J = std::norm(d->first) - std::norm(d->second);
                    e = node_energy(scratch_[k], d->first, d->second);
                }
                tr.window.push_back(k);
                tr.window_energy.push_back(e);
                tr.window_jac.push_back(J);
                tr.min_jacobian = std::min(tr.min_jacobian, J);
                diffs.push_back(e - energy_[k]);
            }
        for (const auto& [k, v] : tr.moved) scratch_[k] = values_[k];
        tr.delta = pairwise_sum(diffs);
        if (!std::isfinite(tr.delta)) tr.delta = kInf;
        return tr;
    }

    void accept(const Trial& tr) {
        for (const auto& [k, v] : tr.moved) {
            values_[k] = v;
            scratch_[k] = v;
        }
        for (std::size_t m = 0; m < tr.window.size(); ++m) {
            energy_[tr.window[m]] = tr.window_energy[m];
            jac_[tr.window[m]] = tr.window_jac[m];
        }
        refresh();
    }

    MappingField field() const { return MappingField(grid_, values_, active_); }

private:
    double node_energy(cplx hk, cplx fz, cplx fzbar) const {
        const double J = std::norm(fz) - std::norm(fzbar);
        if (!(J > 0.0)) return kInf;
        const double lam = w_(hk);
        if (!std::isfinite(lam)) return kInf;
        const double K = (std::norm(fz) + std::norm(fzbar)) / J;
        return psi_(K) * lam * J * grid_->cell_area();
    }

    void refresh() {
        std::vector<double> e;
        min_jac_ = kInf;
        for (std::size_t k = 0; k < grid_->size(); ++k) {
            if (!counted_[k]) continue;
            e.push_back(energy_[k]);
            min_jac_ = std::min(min_jac_, jac_[k]);
        }
        total_ = pairwise_sum(e);
        interp_ = std::make_unique<FieldInterpolator>(grid_, values_, active_);
    }

    GridPtr grid_;
    std::vector<std::uint8_t> active_;
    std::vector<cplx> values_;
    mutable std::vector<cplx> scratch_;
    ConvexProfile psi_;
    WeightField w_;
    int order_;
    std::vector<double> energy_;
    std::vector<double> jac_;
    std::vector<std::uint8_t> counted_;
    double total_ = 0.0;
    double min_jac_ = kInf;
    std::unique_ptr<FieldInterpolator> interp_;
};

InnerDerivative derivative_at(const VariationEvaluator& ev, const Bump& b, double delta) {
    auto central = [&](double d) {
        const double up = ev.trial(b, d).delta;
        const double down = ev.trial(b, -d).delta;
        return (up - down) / (2.0 * d);
    };
    const double coarse = central(delta);
    const double fine = central(0.5 * delta);
    InnerDerivative out;
    out.value = (4.0 * fine - coarse) / 3.0;
    out.error = std::abs(fine - coarse) / 3.0;
    return out;
}

double dbar_of(const MappingField& h, const ConvexProfile& psi, const WeightField& w, int order) {
    try {
        return dbar_residual(hopf_differential(h, psi, w, HopfForm::Conjugated, order)).max_dbar;
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

double inner_variation_energy(const MappingField& h, const Bump& phi, double t,
                              const ConvexProfile& psi, const WeightField& w, int stencil_order) {
    const VariationEvaluator ev(h, psi, w, stencil_order);
    if (t == 0.0) return ev.energy();
    const auto tr = ev.trial(phi, t);
    if (!(tr.min_jacobian > 0.0)) return kInf;
    return ev.energy() + tr.delta;
}

InnerDerivative inner_derivative(const MappingField& h, const Bump& phi, const ConvexProfile& psi,
                                 const WeightField& w, double delta, int stencil_order) {
    const VariationEvaluator ev(h, psi, w, stencil_order);
    return derivative_at(ev, phi, delta);
}

MinimizeResult minimize(const std::vector<cplx>& boundary_trace, const MappingField& start,
                        const ConvexProfile& psi, const WeightField& w,
                        const MinimizeOptions& options) {
    if (boundary_trace != start.boundary_trace())
        throw PairingError("start does not carry the prescribed boundary values");
    VariationEvaluator ev(start, psi, w, options.stencil_order);
    if (!(ev.min_jacobian() > options.j_floor) || !std::isfinite(ev.energy()))
        throw DegeneracyError("start map is degenerate: min J = " +
                                  std::to_string(ev.min_jacobian()),
                              1.0);
    const BumpBasis basis = BumpBasis::dyadic(start.grid(), options.basis_levels);

    DescentTrace trace;
    trace.steps.push_back({0, 0, ev.energy(), 0.0, 0, ev.min_jacobian(),
                           dbar_of(start, psi, w, options.stencil_order)});
    int iteration = 0;
    bool any_direction_first = false;
    trace.termination = "max_sweeps";
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        trace.sweeps = sweep;
        double max_derivative = 0.0;
        int accepted = 0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const Bump& b = basis[i];
            InnerDerivative D;
            try {
                D = derivative_at(ev, b, options.delta);
            } catch (const RangeError&) {
                continue;
            }
            max_derivative = std::max(max_derivative, std::abs(D.value));
            if (std::abs(D.value) <= derivative_threshold(options.grad_tol, ev.energy())) continue;
            if (sweep == 1) any_direction_first = true;

            // Newton step from the curvature of the sampled energies, then
            // backtracking.
            const double s = D.value > 0.0 ? -1.0 : 1.0;
            double t = options.max_step;
            try {
                const double up = ev.trial(b, options.delta).delta;
                const double down = ev.trial(b, -options.delta).delta;
                const double curv = (up + down) / (options.delta * options.delta);
                if (curv > 0.0) t = std::min(options.max_step, std::abs(D.value) / curv);
            } catch (const RangeError&) {
            }
            for (int bt = 0; bt < options.max_backtracks; ++bt, t *= 0.5) {
                VariationEvaluator::Trial tr;
                try {
                    tr = ev.trial(b, s * t);
                } catch (const RangeError&) {
                    continue;
                }
                if (!(tr.delta < 0.0) || !(tr.min_jacobian > options.j_floor)) continue;
                const double before = ev.energy();
                ev.accept(tr);
                if (!(ev.energy() < before)) {
                    throw Error("energy failed to decrease at an accepted step");
                }
                ++accepted;
                ++iteration;
                const MappingField now = ev.field();
                trace.steps.push_back({iteration, sweep, ev.energy(), s * t, i, ev.min_jacobian(),
                                       dbar_of(now, psi, w, options.stencil_order)});
                break;
            }
        }
        trace.max_derivative = max_derivative;
        if (max_derivative <= derivative_threshold(options.grad_tol, ev.energy())) {
            trace.termination = "stationary";
            break;
        }
        if (accepted == 0) {
            if (sweep == 1 && any_direction_first)
                throw StallError("no admissible descent step from the start map");
            trace.termination = "no_descent";
            break;
        }
    }
    MappingField out = ev.field();
    if (out.boundary_trace() != boundary_trace)
        throw Error("boundary values changed during descent");
    return {std::move(out), std::move(trace)};
}

StationarityReport stationarity_vs_holomorphy(const MappingField& h, const ConvexProfile& psi,
                                              const WeightField& w, const BumpBasis& basis,
                                              double grad_tol, double delta) {
    StationarityReport r;
    const VariationEvaluator ev(h, psi, w, 4);
    r.derivative_threshold = derivative_threshold(grad_tol, ev.energy());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double d = std::abs(derivative_at(ev, basis[i], delta).value);
        if (d > r.max_derivative) {
            r.max_derivative = d;
            r.argmax = i;
        }
    }
    r.dbar = dbar_residual(hopf_differential(h, psi, w));
    r.stationary = r.max_derivative <= r.derivative_threshold;
    r.holomorphic = r.dbar.holomorphic;
    r.consistent = r.stationary == r.holomorphic;
    return r;
}

}  // namespace mfd
