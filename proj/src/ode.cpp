#include "mfd/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd {

namespace {

double height_weight(const WeightField& eta, double s) { return eta(cplx(0.0, s)); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("profile spec: '" + key + "' is not a number: " + text);
    }
    if (used != text.size() || !std::isfinite(v))
        throw ConfigError("profile spec: '" + key + "' is not a finite number: " + text);
    return v;
}

}  // namespace

std::string to_string(Branch b) {
    switch (b) {
        case Branch::Identity: return "identity";
        case Branch::Contracting: return "contracting";
        case Branch::Expanding: return "expanding";
    }
    return "?";
}

Branch branch_for(double lambda) {
    if (lambda > 0.0) return Branch::Contracting;
    if (lambda < 0.0) return Branch::Expanding;
    return Branch::Identity;
}

double stretch_density(const ConvexProfile& psi, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("stretch must be positive and finite");
    const double K = 0.5 * (t + 1.0 / t);
    return psi.deriv(K) * (1.0 - t * t);
}

DensityLimit stretch_density_limit(const ConvexProfile& psi) {
    DensityLimit out;
    double last = 0.0;
    for (int k = 1; k <= 60; ++k) {
        const double t = std::ldexp(1.0, -k);
        double v;
        try {
            v = stretch_density(psi, t);
        } catch (const std::exception&) {
            out.infinite = true;
            return out;
        }
        if (!std::isfinite(v) || v > 1e12) {
            out.infinite = true;
            return out;
        }
        last = v;
    }
    out.value = last;
    return out;
}

double stretch_for_density(const ConvexProfile& psi, double y, Branch branch) {
    if (!std::isfinite(y)) throw RangeError("density target is not finite");
    switch (branch) {
        case Branch::Identity:
            if (y != 0.0) throw RangeError("identity branch requires a zero target");
            return 1.0;
        case Branch::Contracting: {
            if (y < 0.0) throw RangeError("contracting branch requires a nonnegative target");
            if (y == 0.0) return 1.0;
            const DensityLimit M = stretch_density_limit(psi);
            if (!M.infinite && y >= M.value)
                throw RangeError("density target outside the contracting range", M.value);
            // F decreases from M at 0+ to 0 at 1; find lo with F(lo) > y.
            double lo = 0.5;
            double hi = 1.0;
            while (true) {
                double f;
                try {
                    f = stretch_density(psi, lo);
                } catch (const std::exception&) {
                    f = std::numeric_limits<double>::infinity();
                }
                if (!std::isfinite(f) || f > y) break;
                hi = lo;
                lo *= 0.5;
                if (lo < 1e-300)
                    throw RangeError("density target outside the contracting range",
                                     M.infinite ? 0.0 : M.value);
            }
            for (int it = 0; it < 2000; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                double f;
                try {
                    f = stretch_density(psi, mid);
                } catch (const std::exception&) {
                    f = std::numeric_limits<double>::infinity();
                }
                if (f > y)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        case Branch::Expanding: {
            if (y > 0.0) throw RangeError("expanding branch requires a nonpositive target");
            if (y == 0.0) return 1.0;
            // F decreases from 0 at 1 towards -inf; find hi with F(hi) < y.
            double lo = 1.0;
            double hi = 2.0;
            while (true) {
                double f;
                try {
                    f = stretch_density(psi, hi);
                } catch (const std::exception&) {
                    f = -std::numeric_limits<double>::infinity();
                }
                if (!std::isfinite(f) || f < y) break;
                lo = hi;
                hi *= 2.0;
                if (hi > 1e300) throw RangeError("density target outside the expanding range");
            }
            for (int it = 0; it < 2000; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                double f;
                try {
                    f = stretch_density(psi, mid);
                } catch (const std::exception&) {
                    f = -std::numeric_limits<double>::infinity();
                }
                if (f > y)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw RangeError("unknown branch");
}

double OdeProfile::speed(double u) const {
    if (branch == Branch::Identity) return 1.0;
    const double e = height_weight(eta, u);
    if (std::isinf(e)) return 1.0;  // target 4 lambda / eta = 0
    if (!(e > 0.0)) throw DomainError("weight must be positive");
    const double target = 4.0 * lambda / e;
    if (branch == Branch::Contracting && !limit.infinite && target >= limit.value)
        throw RangeError("range exhausted: 4 lambda / eta(u) reached the limit", limit.value);
    return stretch_for_density(psi, target, branch);
}

namespace {

double rk4_step(const OdeProfile& p, double u, double du0, double h) {
    const double k1 = du0;
    const double k2 = p.speed(u + 0.5 * h * k1);
    const double k3 = p.speed(u + 0.5 * h * k2);
    const double k4 = p.speed(u + h * k3);
    return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct DoubledStep {
    double u;
    double error;
};

// One step of size h as two halves, extrapolated against the full step.
DoubledStep doubled_step(const OdeProfile& p, double u, double du0, double h) {
    const double full = rk4_step(p, u, du0, h);
    const double half = rk4_step(p, u, du0, 0.5 * h);
    const double two = rk4_step(p, half, p.speed(half), 0.5 * h);
    const double diff = two - full;
    return {two + diff / 15.0, std::abs(diff) / 15.0};
}

// Within a relative 1e-9 of the top of F's range the slope is below ~1e-4
// of its initial value and the remaining rise in u is at rounding level.
bool near_limit(const OdeProfile& p, double u) {
    if (p.branch != Branch::Contracting || p.limit.infinite) return false;
    const double e = height_weight(p.eta, u);
    if (!std::isfinite(e)) return false;
    return 4.0 * p.lambda / e >= p.limit.value * (1.0 - 1e-9);
}

}  // namespace

double OdeProfile::u_at(double y) const {
    if (branch == Branch::Identity) {
        if (y < 0.0 || y > y_requested) throw RangeError("height outside the solved range");
        return y;
    }
    if (samples.empty()) throw RangeError("empty profile");
    const double top = samples.back().y;
    if (y < 0.0 || y > top * (1.0 + 1e-14)) throw RangeError("height outside the solved range", top);
    auto it = std::upper_bound(samples.begin(), samples.end(), y,
                               [](double v, const OdeSample& s) { return v < s.y; });
    const OdeSample& s = *std::prev(it);
    const double h = y - s.y;
    if (h <= 0.0) return s.u;
    // Re-integrate from the previous accepted node; h never exceeds the
    // accepted step there, so the local error stays within tolerance.
    try {
        return doubled_step(*this, s.u, s.du, h).u;
    } catch (const RangeError&) {
        // Too close to an exhaustion point: cubic Hermite on the last interval.
        if (it == samples.end()) return s.u;
        const OdeSample& e = *it;
        const double H = e.y - s.y;
        const double t = h / H;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * s.u + h10 * H * s.du + h01 * e.u + h11 * H * e.du;
    }
}

double OdeProfile::distortion_at(double y) const {
    const double t = du_at(y);
    return 0.5 * (t + 1.0 / t);
}

OdeProfile solve_profile(const ConvexProfile& psi, const WeightField& eta, double lambda,
                         double y_max, const StepControl& control) {
    if (!(y_max > 0.0) || !std::isfinite(y_max)) throw ConfigError("y_max must be positive");
    if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
    OdeProfile p;
    p.psi = psi;
    p.eta = eta;
    p.lambda = lambda;
    p.branch = branch_for(lambda);
    p.limit = stretch_density_limit(psi);
    p.y_requested = y_max;
    p.control = control;

    if (p.branch == Branch::Identity) {
        p.samples = {{0.0, 0.0, 1.0}, {y_max, y_max, 1.0}};
        return p;
    }

    double y = 0.0;
    double u = 0.0;
    double du = p.speed(0.0);
    p.samples.push_back({y, u, du});
    double h = std::min(control.initial_step, y_max);
    std::size_t steps = 0;
    while (y < y_max) {
        if (++steps > control.max_steps) throw StallError("profile solver exceeded max_steps");
        h = std::min(h, y_max - y);
        DoubledStep st{};
        double du_new = 0.0;
        bool failed = false;
        try {
            st = doubled_step(p, u, du, h);
            du_new = p.speed(st.u);
        } catch (const RangeError&) {
            failed = true;
        }
        const double scale = control.tolerance * std::max(1.0, std::abs(u));
        if (failed || !std::isfinite(st.u)) {
            h *= 0.25;
            if (h < control.min_step * std::max(1.0, y)) {
                p.exhausted = true;
                break;
            }
            continue;
        }
        if (st.error > scale) {
            const double f = std::max(0.1, 0.9 * std::pow(scale / st.error, 0.2));
            h *= f;
            if (h < control.min_step * std::max(1.0, y)) {
                p.exhausted = true;
                break;
            }
            continue;
        }
        const bool stuck = st.u == u;
        y = (y_max - y <= h) ? y_max : y + h;
        u = st.u;
        du = du_new;
        p.samples.push_back({y, u, du});
        if (p.branch == Branch::Expanding && u > OdeProfile::kEscapeHeight) {
            p.escaped = true;
            break;
        }
        if (!(du > 0.0) || stuck || near_limit(p, u)) {
            p.exhausted = true;
            break;
        }
        const double grow = st.error > 0.0 ? 0.9 * std::pow(scale / st.error, 0.2) : 4.0;
        h *= std::clamp(grow, 0.2, 4.0);
    }
    return p;
}

ProfileSpec parse_profile_spec(const std::string& spec) {
    ProfileSpec out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("profile spec: expected key=value: " + item);
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (key == "psi")
            out.psi = ConvexProfile::parse(value);
        else if (key == "eta")
            out.eta = WeightField::parse(value);
        else if (key == "lambda")
            out.lambda = parse_double(key, value);
        else if (key == "ymax") {
            out.y_max = parse_double(key, value);
            if (!(out.y_max > 0.0)) throw ConfigError("profile spec: ymax must be positive");
        } else
            throw ConfigError("profile spec: unknown key '" + key + "'");
    }
    return out;
}

std::string to_string(Surjectivity s) {
    switch (s) {
        case Surjectivity::Surjective: return "surjective";
        case Surjectivity::NotSurjective: return "not-surjective";
        case Surjectivity::NoSolution: return "no-solution";
    }
    return "?";
}

namespace {

// 8-point Gauss-Legendre on [a, b], split into `parts` panels.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int parts) {
    static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                0.9602898564975363};
    static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                0.1012285362903763};
    double sum = 0.0;
    const double step = (b - a) / parts;
    for (int p = 0; p < parts; ++p) {
        const double lo = a + p * step;
        const double c = lo + 0.5 * step;
        const double r = 0.5 * step;
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += w[k] * (f(c - r * x[k]) + f(c + r * x[k]));
        sum += r * s;
    }
    return sum;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double d = n * sxx - sx * sx;
    if (d == 0.0) throw DataError("degenerate fit");
    return (n * sxy - sx * sy) / d;
}

}  // namespace

SurjectivityReport surjectivity_diagnosis(const OdeProfile& profile) {
    SurjectivityReport r;
    r.horizon = std::max(profile.y_requested, 1e3);
    r.u_end = profile.samples.empty() ? 0.0 : profile.samples.back().u;

    if (profile.exhausted) {
        r.verdict = Surjectivity::NoSolution;
        return r;
    }
    const double yend = profile.y_reached();
    if (profile.branch != Branch::Identity && yend > 0.0) {
        std::vector<double> lx, ly;
        for (int k = 0; k <= 32; ++k) {
            const double y = yend * std::pow(0.25, 1.0 - k / 32.0);
            const double u = profile.u_at(y);
            if (u > 0.0) {
                lx.push_back(std::log(y));
                ly.push_back(std::log(u));
            }
        }
        if (lx.size() >= 2) r.trajectory_exponent = fit_slope(lx, ly);
    } else {
        r.trajectory_exponent = 1.0;
    }
    r.distortion_end = profile.distortion_at(yend);
    const double k_mid = profile.distortion_at(0.5 * yend);
    r.quasiconformal = std::isfinite(r.distortion_end) &&
                       r.distortion_end <= k_mid * (1.0 + 1e-6) + 1e-12;

    const double x = r.horizon;
    const auto G = [&](double t) { return profile.speed(t); };
    try {
        // Cumulative integral on dyadic panels ending at x.
        double lo = x;
        int m = 0;
        while (lo > 1e-3) {
            lo *= 0.5;
            ++m;
        }
        double acc = gauss_legendre(G, 0.0, lo, 4);
        std::vector<double> at;  // I(x / 2^k) for k = m-1 .. 0
        double a = lo;
        for (int k = m - 1; k >= 0; --k) {
            const double b = x * std::ldexp(1.0, -k);
            acc += gauss_legendre(G, a, b, 8);
            a = b;
            if (k <= 3) at.push_back(acc);
        }
        r.tail_integrals = at;  // x/8, x/4, x/2, x
    } catch (const RangeError&) {
        r.verdict = Surjectivity::NoSolution;
        return r;
    }
    const auto& I = r.tail_integrals;
    const double d0 = I[1] - I[0];
    const double d1 = I[2] - I[1];
    const double d2 = I[3] - I[2];
    r.tail_exponent_previous = 1.0 - std::log2(d1 / d0);
    r.tail_exponent = 1.0 - std::log2(d2 / d1);

    double proxy = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 16; ++k) {
        const double s = x * (0.5 + 0.5 * k / 16.0);
        proxy = std::min(proxy, height_weight(profile.eta, s) * profile.psi.deriv(s));
    }
    r.eta_psi_proxy = proxy;

    r.verdict = r.tail_exponent <= 1.1 ? Surjectivity::Surjective : Surjectivity::NotSurjective;
    return r;
}

MappingField build_half_plane_map(const OdeProfile& profile, GridPtr grid) {
    std::vector<cplx> values(grid->size(), cplx(0.0, 0.0));
    std::vector<double> row_u(grid->n());
    for (int j = 0; j < grid->n(); ++j) {
        bool any = false;
        for (int i = 0; i < grid->n() && !any; ++i) any = grid->inside(i, j);
        if (any) row_u[j] = profile.u_at(grid->y(j));
    }
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (!grid->inside(k)) continue;
        values[k] = cplx(grid->x(grid->col(k)), row_u[grid->row(k)]);
    }
    return MappingField(grid, std::move(values));
}

WirtingerField half_plane_map_derivatives(const OdeProfile& profile, GridPtr grid) {
    std::vector<double> row_du(grid->n(), 1.0);
    for (int j = 0; j < grid->n(); ++j) {
        bool any = false;
        for (int i = 0; i < grid->n() && !any; ++i) any = grid->inside(i, j);
        if (any) row_du[j] = profile.du_at(grid->y(j));
    }
    const double y0 = grid->box().y0;
    const double hy = grid->hy();
    return WirtingerField::analytic(grid, [&](cplx z) {
        int j = static_cast<int>(std::floor((z.imag() - y0) / hy));
        j = std::clamp(j, 0, grid->n() - 1);
        const double t = row_du[j];
        return std::pair<cplx, cplx>{cplx(0.5 * (1.0 + t), 0.0), cplx(0.5 * (1.0 - t), 0.0)};
    });
}

double ah_residual(const MappingField& h, const WirtingerField& derivs, const ConvexProfile& psi,
                   const WeightField& eta, double lambda) {
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < h.grid().size(); ++k) {
        if (!h.active(k) || !derivs.ok(k)) continue;
        if (!(derivs.jacobian[k] > 0.0)) continue;
        const double e = eta(h[k]);
        if (!std::isfinite(e)) continue;
        const double K = distortion_value(derivs.fz[k], derivs.fzbar[k]);
        const cplx phi = 4.0 * psi.deriv(K) * derivs.fz[k] * std::conj(derivs.fzbar[k]) * e;
        worst = std::max(worst, std::abs(phi - 4.0 * lambda));
        ++used;
    }
    if (used == 0) throw DataError("no nodes available for the residual");
    return worst;
}

double ah_residual(const MappingField& h, const ConvexProfile& psi, const WeightField& eta,
                   double lambda, int stencil_order) {
    return ah_residual(h, wirtinger_derivatives(h, stencil_order), psi, eta, lambda);
}

HarmonicClosedForm harmonic_closed_form(double lambda) {
    if (lambda > 0.0)
        throw DomainError("closed form covers the expanding and identity branches only");
    return HarmonicClosedForm{lambda};
}

double HarmonicClosedForm::u(double y) const {
    const double c = std::sqrt(-lambda);
    if (c == 0.0) return y;
    return std::sinh(2.0 * c * y) / (2.0 * c);
}

double HarmonicClosedForm::du(double y) const {
    return std::cosh(2.0 * std::sqrt(-lambda) * y);
}

double HarmonicClosedForm::distortion(double y) const {
    const double t = du(y);
    return (1.0 + t * t) / (2.0 * t);
}

double HarmonicClosedForm::distortion_at_height(double s) const {
    const double c2 = -lambda;
    return (1.0 + 2.0 * c2 * s * s) / std::sqrt(1.0 + 4.0 * c2 * s * s);
}

double loglog_slope(const OdeProfile& profile, double s_lo, double s_hi) {
    if (!(s_lo > 0.0) || !(s_hi > s_lo)) throw ConfigError("need 0 < s_lo < s_hi");
    if (s_hi > profile.y_reached()) throw RangeError("fit window past the solved range",
                                                     profile.y_reached());
    std::vector<double> lx, ly;
    const int n = 64;
    for (int k = 0; k < n; ++k) {
        const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(k) / (n - 1));
        const double u = profile.u_at(s);
        if (!(u > 0.0)) throw DataError("nonpositive profile value in fit window");
        lx.push_back(std::log(s));
        ly.push_back(std::log(u));
    }
    return fit_slope(lx, ly);
}

double power2_exponent(const OdeProfile& profile, double s_lo, double s_hi) {
    if (profile.psi.family() != ConvexProfile::Family::Power || profile.psi.parameter() != 2.0 ||
        profile.eta.kind() != WeightField::Kind::HyperbolicHalfPlane)
        throw ConfigError("power2_exponent needs psi=power:2 and eta=hyp-half");
    return loglog_slope(profile, s_lo, s_hi);
}

}  // namespace mfd
