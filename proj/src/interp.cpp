#include "mfd/interp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mfd {
namespace {

constexpr int kWidth = 5;

// Lagrange basis values and first derivatives at local coordinate s for the
// nodes 0..4.
void basis(double s, std::array<double, kWidth>& L, std::array<double, kWidth>& dL) {
    for (int m = 0; m < kWidth; ++m) {
        double denom = 1.0;
        for (int l = 0; l < kWidth; ++l) {
            if (l != m) denom *= static_cast<double>(m - l);
        }
        double prod = 1.0;
        for (int l = 0; l < kWidth; ++l) {
            if (l != m) prod *= (s - l);
        }
        L[m] = prod / denom;
        double d = 0.0;
        for (int q = 0; q < kWidth; ++q) {
            if (q == m) continue;
            double term = 1.0;
            for (int l = 0; l < kWidth; ++l) {
                if (l != m && l != q) term *= (s - l);
            }
            d += term;
        }
        dL[m] = d / denom;
    }
}

// Absorbs the rounding of the coordinate transform only; a wider snap
// stalls Newton inversion below the snap width.
double snap(double s) {
    const double r = std::round(s);
    return std::abs(s - r) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s))
               ? r
               : s;
}

std::vector<int> candidate_starts(double s, int n) {
    std::vector<int> starts;
    const int c = static_cast<int>(std::lround(s));
    for (int off : {-2, -1, -3, 0, -4}) {
        const int st = std::clamp(c + off, 0, n - kWidth);
        if (std::find(starts.begin(), starts.end(), st) == starts.end()) starts.push_back(st);
    }
    std::stable_sort(starts.begin(), starts.end(), [s](int a, int b) {
        return std::abs(a + 2 - s) < std::abs(b + 2 - s);
    });
    return starts;
}

}  // namespace

FieldInterpolator::FieldInterpolator(GridPtr grid, std::vector<cplx> values,
                                     std::vector<std::uint8_t> usable, double max_extrapolation)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      usable_(std::move(usable)),
      max_extrapolation_(max_extrapolation) {}

FieldInterpolator::FieldInterpolator(const MappingField& f, double max_extrapolation)
    : FieldInterpolator(f.grid_ptr(), std::vector<cplx>(f.values().begin(), f.values().end()),
                        f.active_mask(), max_extrapolation) {}

bool FieldInterpolator::window_usable(int i0, int j0) const {
    for (int b = 0; b < kWidth; ++b) {
        for (int a = 0; a < kWidth; ++a) {
            if (!usable_[grid_->index(i0 + a, j0 + b)]) return false;
        }
    }
    return true;
}

std::optional<FieldInterpolator::Window> FieldInterpolator::locate(cplx p) const {
    const auto& g = *grid_;
    const double s = snap((p.real() - g.box().x0) / g.hx() - 0.5);
    const double t = snap((p.imag() - g.box().y0) / g.hy() - 0.5);
    if (!std::isfinite(s) || !std::isfinite(t)) return std::nullopt;
    const int n = g.n();
    if (s < -0.5 - max_extrapolation_ || s > n - 0.5 + max_extrapolation_) return std::nullopt;
    if (t < -0.5 - max_extrapolation_ || t > n - 0.5 + max_extrapolation_) return std::nullopt;
    const auto xs = candidate_starts(s, n);
    const auto ys = candidate_starts(t, n);
    struct Cand {
        int i0, j0;
        double score;
    };
    std::vector<Cand> cands;
    for (int i0 : xs) {
        for (int j0 : ys) {
            const double ds = std::abs(i0 + 2 - s);
            const double dt = std::abs(j0 + 2 - t);
            cands.push_back({i0, j0, std::max(ds, dt) + 1e-3 * (ds + dt)});
        }
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.score < b.score; });
    for (const auto& c : cands) {
        const double ls = s - c.i0;
        const double lt = t - c.j0;
        if (ls < -max_extrapolation_ || ls > 4 + max_extrapolation_) continue;
        if (lt < -max_extrapolation_ || lt > 4 + max_extrapolation_) continue;
        if (window_usable(c.i0, c.j0)) return Window{c.i0, c.j0, ls, lt};
    }
    return std::nullopt;
}

std::optional<InterpolatedValue> FieldInterpolator::with_gradient(cplx p) const {
    const auto w = locate(p);
    if (!w) return std::nullopt;
    std::array<double, kWidth> Lx, dLx, Ly, dLy;
    basis(w->s, Lx, dLx);
    basis(w->t, Ly, dLy);
    InterpolatedValue out{{}, {}, {}};
    for (int b = 0; b < kWidth; ++b) {
        cplx row{}, drow{};
        for (int a = 0; a < kWidth; ++a) {
            const cplx v = values_[grid_->index(w->i0 + a, w->j0 + b)];
            row += Lx[a] * v;
            drow += dLx[a] * v;
        }
        out.value += Ly[b] * row;
        out.dx += Ly[b] * drow;
        out.dy += dLy[b] * row;
    }
    out.dx /= grid_->hx();
    out.dy /= grid_->hy();
    return out;
}

std::optional<cplx> FieldInterpolator::operator()(cplx p) const {
    const auto w = locate(p);
    if (!w) return std::nullopt;
    std::array<double, kWidth> Lx, dLx, Ly, dLy;
    basis(w->s, Lx, dLx);
    basis(w->t, Ly, dLy);
    cplx acc{};
    for (int b = 0; b < kWidth; ++b) {
        cplx row{};
        for (int a = 0; a < kWidth; ++a) row += Lx[a] * values_[grid_->index(w->i0 + a, w->j0 + b)];
        acc += Ly[b] * row;
    }
    return acc;
}

std::optional<InversionResult> invert_point(const FieldInterpolator& F, cplx target, cplx seed,
                                            double tol, int max_iter) {
    cplx p = seed;
    const double scale = 1.0 + std::abs(target);
    for (int it = 0; it <= max_iter; ++it) {
        const auto v = F.with_gradient(p);
        if (!v) return std::nullopt;
        const cplx r = target - v->value;
        if (std::abs(r) <= tol * scale) return InversionResult{p, std::abs(r), it};
        if (it == max_iter) break;
        const double a = v->dx.real(), b = v->dy.real();
        const double c = v->dx.imag(), d = v->dy.imag();
        const double det = a * d - b * c;
        if (!(std::abs(det) > 1e-300)) return std::nullopt;
        const double dxs = (d * r.real() - b * r.imag()) / det;
        const double dys = (-c * r.real() + a * r.imag()) / det;
        p += cplx{dxs, dys};
    }
    return std::nullopt;
}

}  // namespace mfd
