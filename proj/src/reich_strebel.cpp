#include "mfd/reich_strebel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfd/energy.hpp"
#include "mfd/error.hpp"
#include "mfd/interp.hpp"
#include "mfd/reduce.hpp"

namespace mfd {

QuadraticDifferentialField HolomorphicDifferential::sample(GridPtr grid) const {
    return QuadraticDifferentialField::sample(grid, phi, name);
}

HolomorphicDifferential parse_differential(const std::string& name) {
    if (name == "1") return {"1", [](cplx) { return cplx(1.0, 0.0); }};
    if (name == "w") return {"w", [](cplx w) { return w; }};
    if (name == "w2") return {"w2", [](cplx w) { return w * w; }};
    if (name == "1+w3") return {"1+w3", [](cplx w) { return 1.0 + w * w * w; }};
    throw ConfigError("unknown differential: " + name);
}

std::vector<HolomorphicDifferential> standard_differentials() {
    return {parse_differential("1"), parse_differential("w"), parse_differential("w2"),
            parse_differential("1+w3")};
}

void finalize(InequalityReport& report, double tol) {
    report.tolerance = tol;
    report.slack = report.rhs - report.lhs;
    report.holds = report.slack >= -tol * std::max(std::abs(report.lhs), 1.0);
    report.verdict = report.holds ? "holds" : "violated";
}

namespace {

double boundary_gap(const MappingField& f) {
    const auto& nodes = f.grid().boundary_nodes();
    const auto& trace = f.boundary_trace();
    double gap = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        gap = std::max(gap, std::abs(trace[i] - f.grid().node(nodes[i])));
    return gap;
}

struct PhiStats {
    double eps = 0.0;
    double dbar = 0.0;
    bool holomorphic = false;
    double l1 = 0.0;
};

PhiStats phi_stats(GridPtr grid, const HolomorphicDifferential& phi) {
    PhiStats s;
    const QuadraticDifferentialField field = phi.sample(grid);
    double peak = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k)
        if (field.valid[k]) peak = std::max(peak, std::abs(field.phi[k]));
    s.eps = 1e-12 * peak;
    s.l1 = l1_mass(field);
    try {
        const DbarReport d = dbar_residual(field);
        s.dbar = d.max_dbar;
        s.holomorphic = d.holomorphic;
    } catch (const CoverageError&) {
        s.dbar = std::numeric_limits<double>::infinity();
    }
    return s;
}

// Nodes used by the integral inequalities: active, derivative data, J > 0.
struct NodeSet {
    std::vector<std::size_t> nodes;
    std::size_t degenerate = 0;
};

NodeSet usable_nodes(const MappingField& f, const WirtingerField& d) {
    NodeSet out;
    std::size_t seen = 0;
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
        if (!f.active(k) || !d.ok(k)) continue;
        ++seen;
        if (!(d.jacobian[k] > 0.0)) {
            ++out.degenerate;
            continue;
        }
        out.nodes.push_back(k);
    }
    const double frac = seen ? static_cast<double>(out.degenerate) / seen : 1.0;
    if (frac > kMaxDegenerateFraction)
        throw DegeneracyError("map is degenerate or orientation reversing on " +
                                  std::to_string(out.degenerate) + " of " +
                                  std::to_string(seen) + " nodes",
                              frac);
    return out;
}

InequalityReport base_report(const std::string& name, const MappingField& f, const PhiStats& ps,
                             std::size_t degenerate) {
    InequalityReport r;
    r.inequality = name;
    r.boundary_gap = boundary_gap(f);
    r.phi_dbar = ps.dbar;
    r.phi_holomorphic = ps.holomorphic;
    r.phi_l1 = ps.l1;
    r.degenerate_nodes = degenerate;
    return r;
}

}  // namespace

InequalityReport rs_sides(const MappingField& f, const WirtingerField& derivs,
                          const HolomorphicDifferential& phi, double tol) {
    const NodeSet set = usable_nodes(f, derivs);
    const PhiStats ps = phi_stats(f.grid_ptr(), phi);
    InequalityReport r = base_report("reich-strebel", f, ps, set.degenerate);
    const double dA = f.grid().cell_area();
    std::vector<double> lhs, rhs;
    double excluded = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k : set.nodes) {
        const cplx p = phi(f.grid().node(k));
        const double a = std::abs(p);
        if (a < ps.eps) {
            excluded += dA;
            continue;
        }
        const cplx dir = p / a;
        const double pf = std::abs(phi(f[k]));
        const double A = std::abs(derivs.fz[k] - dir * derivs.fzbar[k]);
        const double l = a * dA;
        const double rr = std::sqrt(pf) * std::sqrt(a) * A * dA;
        lhs.push_back(l);
        rhs.push_back(rr);
        if (rr - l < worst) {
            worst = rr - l;
            r.worst_node = k;
        }
    }
    r.lhs = pairwise_sum(lhs);
    r.rhs = pairwise_sum(rhs);
    r.worst_node_slack = lhs.empty() ? 0.0 : worst;
    r.excluded_area = excluded;
    finalize(r, tol);
    return r;
}

InequalityReport rs_sides(const MappingField& f, const HolomorphicDifferential& phi, double tol,
                          int stencil_order) {
    return rs_sides(f, wirtinger_derivatives(f, stencil_order), phi, tol);
}

LowerBounds rs_lower_bounds(const MappingField& f, const WirtingerField& derivs,
                            const HolomorphicDifferential& phi, double tol) {
    const NodeSet set = usable_nodes(f, derivs);
    const PhiStats ps = phi_stats(f.grid_ptr(), phi);
    const double dA = f.grid().cell_area();
    std::vector<double> mass, mass_f_jac, root, quad, jac;
    double excluded = 0.0;
    for (std::size_t k : set.nodes) {
        const cplx p = phi(f.grid().node(k));
        const double a = std::abs(p);
        if (a < ps.eps) {
            excluded += dA;
            continue;
        }
        const cplx dir = p / a;
        const double pf = std::abs(phi(f[k]));
        const double A = std::abs(derivs.fz[k] - dir * derivs.fzbar[k]);
        const double J = derivs.jacobian[k];
        mass.push_back(a * dA);
        mass_f_jac.push_back(pf * J * dA);
        root.push_back(std::sqrt(pf) * std::sqrt(a) * A * dA);
        quad.push_back(pf * A * A * dA);
        jac.push_back(a * A * A / J * dA);
    }
    const double M = pairwise_sum(mass);
    const double Mf = pairwise_sum(mass_f_jac);
    const double R = pairwise_sum(root);

    LowerBounds out;
    out.quadratic = base_report("reich-strebel quadratic", f, ps, set.degenerate);
    out.quadratic.lhs = M;
    out.quadratic.rhs = pairwise_sum(quad);
    out.quadratic.terms = {{"cauchy_schwarz", M > 0.0 ? R * R / M : 0.0},
                           {"root_integral", R},
                           {"phi_mass", M}};
    out.quadratic.excluded_area = excluded;
    finalize(out.quadratic, tol);

    out.jacobian = base_report("reich-strebel jacobian", f, ps, set.degenerate);
    out.jacobian.lhs = M;
    out.jacobian.rhs = pairwise_sum(jac);
    out.jacobian.terms = {{"cauchy_schwarz", Mf > 0.0 ? R * R / Mf : 0.0},
                          {"root_integral", R},
                          {"pulled_mass", Mf}};
    out.jacobian.excluded_area = excluded;
    finalize(out.jacobian, tol);
    return out;
}

double alignment_residual(const BeltramiField& mu, const QuadraticDifferentialField& phi) {
    const DomainGrid& g = *mu.grid;
    double peak = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (phi.valid[k]) peak = std::max(peak, std::abs(phi.phi[k]));
    const double eps = 1e-12 * peak;
    std::size_t considered = 0, vanishing = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k) || !mu.valid[k]) continue;
        ++considered;
        const double a = phi.valid[k] ? std::abs(phi.phi[k]) : 0.0;
        if (!(a > eps)) {
            ++vanishing;
            continue;
        }
        const cplx target = std::abs(mu.mu[k]) * std::conj(phi.phi[k]) / a;
        worst = std::max(worst, std::abs(mu.mu[k] - target));
    }
    if (considered == 0 || static_cast<double>(vanishing) > 0.01 * considered)
        throw CoverageError("differential vanishes on " + std::to_string(vanishing) + " of " +
                            std::to_string(considered) + " nodes");
    return worst;
}

double alignment_residual(const MappingField& h, const QuadraticDifferentialField& phi,
                          int stencil_order) {
    return alignment_residual(beltrami(wirtinger_derivatives(h, stencil_order)), phi);
}

InequalityReport pointwise_teich(const MappingField& f, const WirtingerField& df,
                                 const WirtingerField& dg, const HolomorphicDifferential& phi,
                                 double tol) {
    const NodeSet set = usable_nodes(f, df);
    const PhiStats ps = phi_stats(f.grid_ptr(), phi);
    InequalityReport r = base_report("pointwise teichmueller", f, ps, set.degenerate);
    const double dA = f.grid().cell_area();
    std::vector<double> lhs, mid, rhs;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t dominance = 0, misaligned = 0, equality = 0, skipped = 0;
    for (std::size_t k : set.nodes) {
        if (!dg.ok(k) || !(dg.jacobian[k] > 0.0)) {
            ++skipped;
            continue;
        }
        const cplx p = phi(f[k]);
        const double a = std::abs(p);
        if (!(a > ps.eps)) {
            ++skipped;
            continue;
        }
        const cplx e = p / a;
        const cplx fz = df.fz[k], fzb = df.fzbar[k];
        const cplx gz = dg.fz[k], gzb = dg.fzbar[k];
        const double Jf = df.jacobian[k], Jg = dg.jacobian[k];
        const cplx mu_f = fzb / fz;
        const cplx mu_g = gzb / gz;
        const double kf = std::abs(mu_f);
        const double kg = std::abs(mu_g);

        const double L = std::norm((1.0 - kf) * (gz * std::conj(fz) - e * gzb * fz) / Jf);
        const double s = std::abs(gz) + std::abs(gzb);
        const double M = (1.0 - kf) * (1.0 - kf) * s * s * std::norm(fz) / (Jf * Jf);
        const double R = Jg / Jf;
        lhs.push_back(L * dA);
        mid.push_back(M * dA);
        rhs.push_back(R * dA);
        const double node_slack = std::min(M - L, R - M);
        if (node_slack < worst) {
            worst = node_slack;
            r.worst_node = k;
        }
        if (kg > kf * (1.0 + 1e-12) + 1e-15) ++dominance;
        const cplx mu_inv = -fzb / std::conj(fz);
        if (std::abs(mu_inv - std::abs(mu_inv) * std::conj(e)) > 1e-6) ++misaligned;
        if (std::abs(mu_f - mu_g) <= 1e-9) ++equality;
    }
    r.lhs = pairwise_sum(lhs);
    r.rhs = pairwise_sum(rhs);
    r.worst_node_slack = lhs.empty() ? 0.0 : worst;
    r.hypothesis_violations = dominance + misaligned;
    r.terms = {{"middle", pairwise_sum(mid)},
               {"dominance_violations", static_cast<double>(dominance)},
               {"alignment_violations", static_cast<double>(misaligned)},
               {"equality_nodes", static_cast<double>(equality)},
               {"nodes", static_cast<double>(lhs.size())},
               {"skipped_nodes", static_cast<double>(skipped)}};
    finalize(r, tol);
    // The chain is pointwise: a single node below -tol breaks it.
    if (!lhs.empty() && worst < -tol) {
        r.holds = false;
        r.verdict = "violated";
    }
    return r;
}

EnergyGapReport energy_gap(const MappingField& h, const MappingField& H, const ConvexProfile& psi,
                           const WeightField& w, double pairing_tol, int stencil_order) {
    EnergyGapReport rep;
    const DomainGrid& g = h.grid();
    const FieldInterpolator HI(H);
    if (pairing_tol < 0.0)
        pairing_tol = g.kind() == DomainKind::Disk ? g.spacing() : 1e-6;

    // Boundary values must agree: compare h with H interpolated at h's
    // boundary nodes.
    for (std::size_t k : g.boundary_nodes()) {
        if (!h.active(k)) continue;
        const auto v = HI(g.node(k));
        if (!v) {
            rep.boundary_mismatch = std::numeric_limits<double>::infinity();
            break;
        }
        rep.boundary_mismatch = std::max(rep.boundary_mismatch, std::abs(*v - h[k]));
    }
    if (!(rep.boundary_mismatch <= pairing_tol))
        throw PairingError("boundary values of h and H differ by " +
                           std::to_string(rep.boundary_mismatch));

    rep.energy_h = energy_inverse(h, psi, w, stencil_order).value;
    rep.energy_H = energy_inverse(H, psi, w, stencil_order).value;
    rep.gap = rep.energy_H - rep.energy_h;
    rep.tolerance = std::max(1e-8, kGapToleranceConstant * g.spacing() * g.spacing());

    const WirtingerField dh = wirtinger_derivatives(h, stencil_order);
    const QuadraticDifferentialField phi = hopf_differential(h, dh, psi, w);
    rep.phi_l1 = l1_mass(phi);
    try {
        rep.phi_dbar = dbar_residual(phi);
    } catch (const CoverageError&) {
        rep.phi_dbar.holomorphic = false;
    }
    rep.certified = rep.phi_dbar.holomorphic && std::isfinite(rep.phi_l1);

    double peak = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (phi.valid[k]) peak = std::max(peak, std::abs(phi.phi[k]));
    const double eps = 1e-12 * peak;

    const double dA = g.cell_area();
    std::vector<double> t1, t2, pulled;
    std::size_t attempted = 0, failed = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!h.active(k) || !dh.ok(k) || !(dh.jacobian[k] > 0.0)) continue;
        const double lam = w(h[k]);
        if (!std::isfinite(lam) || lam > kWeightCeiling) {
            ++rep.skipped_nodes;
            continue;
        }
        ++attempted;
        const cplx z = g.node(k);
        auto inv = invert_point(HI, h[k], z);
        if (!inv) {
            // Second chance: seed from the H node whose value is closest.
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < H.grid().size(); ++m) {
                if (!H.active(m)) continue;
                const double d = std::abs(H[m] - h[k]);
                if (d < bd) {
                    bd = d;
                    best = m;
                }
            }
            inv = invert_point(HI, h[k], H.grid().node(best));
        }
        const auto grad = inv ? HI.with_gradient(inv->point) : std::nullopt;
        if (!inv || !grad) {
            ++failed;
            continue;
        }
        rep.inversion_residual = std::max(rep.inversion_residual, inv->residual);
        rep.max_xi_displacement = std::max(rep.max_xi_displacement, std::abs(inv->point - z));

        const cplx a = 0.5 * (grad->dx - cplx(0.0, 1.0) * grad->dy);  // H_zeta
        const cplx b = 0.5 * (grad->dx + cplx(0.0, 1.0) * grad->dy);  // H_zetabar
        const double JH = std::norm(a) - std::norm(b);
        const cplx hz = dh.fz[k], hzb = dh.fzbar[k];
        if (!(JH > 0.0)) {
            ++failed;
            continue;
        }
        const cplx xz = (std::conj(a) * hz - b * std::conj(hzb)) / JH;
        const cplx xzb = (std::conj(a) * hzb - b * std::conj(hz)) / JH;
        const double Jx = std::norm(xz) - std::norm(xzb);
        if (!(Jx > 0.0)) {
            ++failed;
            continue;
        }
        rep.max_xi_zbar = std::max(rep.max_xi_zbar, std::abs(xzb));

        const double Jh = dh.jacobian[k];
        const double Kh = distortion_value(hz, hzb);
        const cplx mu_h = hzb / hz;
        const cplx mu_x = xzb / xz;
        double KH;
        try {
            KH = compose_distortion(mu_x, mu_h);
        } catch (const DomainError&) {
            ++failed;
            continue;
        }
        const double dpsi = psi.deriv(Kh);
        const double diff = psi(KH) - psi(Kh);
        const double linear = (KH - Kh) * dpsi;
        if (diff - linear < -1e-12 * (std::abs(psi(KH)) + std::abs(psi(Kh)) + 1.0))
            ++rep.convexity_violations;

        const double n1 = 2.0 * std::pow(std::abs(hz) - std::abs(hzb), 2) * std::norm(xzb) / Jx *
                          dpsi * lam;
        if (n1 < 0.0) ++rep.negative_term1_nodes;
        double n2 = 0.0;
        const double pa = phi.valid[k] ? std::abs(phi.phi[k]) : 0.0;
        if (pa > eps) {
            const cplx e = phi.phi[k] / pa;
            n2 = 2.0 * (std::norm(xz - e * xzb) / Jx - 1.0) * pa;
        }
        const double bound = linear * Jh * lam;
        rep.identity_mismatch =
            std::max(rep.identity_mismatch,
                     std::abs(bound - (n1 + n2)) / std::max(1.0, std::abs(bound)));
        t1.push_back(n1 * dA);
        t2.push_back(n2 * dA);
        pulled.push_back(diff * Jh * lam * dA);
        ++rep.nodes;
    }
    if (attempted > 0 && static_cast<double>(failed) > 0.01 * attempted)
        throw InvertibilityError("inversion of H failed at " + std::to_string(failed) + " of " +
                                 std::to_string(attempted) + " nodes");
    rep.skipped_nodes += failed;
    rep.term1 = pairwise_sum(t1);
    rep.term2 = pairwise_sum(t2);
    rep.pulled_gap = pairwise_sum(pulled);
    const double scale = std::max(1.0, std::abs(rep.energy_h));
    rep.bound_holds = rep.pulled_gap >= rep.term1 + rep.term2 - rep.tolerance * scale &&
                      rep.gap >= -rep.tolerance * scale;
    if (!rep.certified)
        rep.verdict = "hypotheses unmet";
    else
        rep.verdict = rep.bound_holds ? "gap bound holds" : "gap bound violated";
    return rep;
}

UniquenessReport uniqueness_verdict(const MappingField& h, const MappingField& H,
                                    const ConvexProfile& psi, const WeightField& w,
                                    double pairing_tol) {
    UniquenessReport u;
    u.gap = energy_gap(h, H, psi, w, pairing_tol);
    if (!u.gap.certified) {
        u.verdict = "hypotheses unmet";
        return u;
    }
    const double tol = u.gap.tolerance * std::max(1.0, std::abs(u.gap.energy_h));
    if (std::abs(u.gap.gap) <= tol) {
        const double root = std::sqrt(tol);
        u.coincide = u.gap.term1 <= tol && u.gap.max_xi_zbar <= root &&
                     u.gap.max_xi_displacement <= root;
    }
    u.verdict = u.coincide ? "maps coincide (discrete)" : "distinct";
    return u;
}

RandomMapGenerator::RandomMapGenerator(GridPtr grid, std::uint64_t seed, int levels)
    : grid_(std::move(grid)), basis_(BumpBasis::dyadic(*grid_, levels)), rng_(seed) {
    if (grid_->kind() != DomainKind::Disk)
        throw ConfigError("random boundary-identity maps are generated on the disk");
}

ClosedFormMap RandomMapGenerator::next() {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> target_dist(0.3, 0.9);
    std::bernoulli_distribution keep(0.35);
    std::vector<std::pair<std::size_t, cplx>> coeffs;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        const double c = normal(rng_);
        if (keep(rng_)) coeffs.emplace_back(i, cplx(c, 0.0));
    }
    if (coeffs.empty()) coeffs.emplace_back(0, cplx(1.0, 0.0));
    const double target = target_dist(rng_);

    auto stats = [&](double scale) {
        std::vector<std::pair<std::size_t, cplx>> scaled = coeffs;
        for (auto& [i, c] : scaled) c *= scale;
        const ClosedFormMap f = bump_perturbation(basis_, scaled);
        double dev = 0.0, minJ = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < grid_->size(); ++k) {
            if (!grid_->inside(k)) continue;
            const auto [fz, fzb] = f.derivs(grid_->node(k));
            dev = std::max(dev, std::abs(fz - 1.0) + std::abs(fzb));
            minJ = std::min(minJ, std::norm(fz) - std::norm(fzb));
        }
        return std::pair<double, double>{dev, minJ};
    };
    const double dev = stats(1.0).first;
    double scale = dev > 0.0 ? target / dev : 1.0;
    for (int it = 0; it < 200 && stats(scale).second < 0.1; ++it) scale *= 0.8;
    for (auto& [i, c] : coeffs) c *= scale;
    ClosedFormMap f = bump_perturbation(basis_, coeffs);
    f.name = "random-bump";
    return f;
}

}  // namespace mfd
