#include "mfd/bumps.hpp"

#include <algorithm>
#include <cmath>

#include "mfd/error.hpp"

namespace mfd {

double bump_profile(double s) {
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / q);
}

double bump_profile_deriv(double s) {
    const double q = 1.0 - s * s;
    if (q <= 0.0) return 0.0;
    return bump_profile(s) * (-2.0 * s / (q * q));
}

namespace {

// sup over the unit square of |grad B(s)B(t)|, by dense sampling followed by
// local refinement around the best sample.
double unit_gradient_sup() {
    static const double value = [] {
        auto g = [](double s, double t) {
            const double a = bump_profile_deriv(s) * bump_profile(t);
            const double b = bump_profile(s) * bump_profile_deriv(t);
            return std::hypot(a, b);
        };
        double best = 0.0, bs = 0.0, bt = 0.0;
        const int m = 400;
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                const double s = -1.0 + 2.0 * i / m;
                const double t = -1.0 + 2.0 * j / m;
                const double v = g(s, t);
                if (v > best) {
                    best = v;
                    bs = s;
                    bt = t;
                }
            }
        double step = 2.0 / m;
        for (int round = 0; round < 40; ++round) {
            for (int i = -4; i <= 4; ++i)
                for (int j = -4; j <= 4; ++j) {
                    const double s = bs + i * step / 4;
                    const double t = bt + j * step / 4;
                    const double v = g(s, t);
                    if (v > best) {
                        best = v;
                        bs = s;
                        bt = t;
                    }
                }
            step *= 0.5;
        }
        return best;
    }();
    return value;
}

}  // namespace

cplx Bump::value(cplx z) const {
    const double s = (z.real() - center.real()) / radius;
    const double t = (z.imag() - center.imag()) / radius;
    return amplitude * (bump_profile(s) * bump_profile(t));
}

std::pair<cplx, cplx> Bump::derivs(cplx z) const {
    const double s = (z.real() - center.real()) / radius;
    const double t = (z.imag() - center.imag()) / radius;
    const double bx = bump_profile_deriv(s) * bump_profile(t) / radius;
    const double by = bump_profile(s) * bump_profile_deriv(t) / radius;
    const cplx bz(0.5 * bx, -0.5 * by);
    const cplx bzbar(0.5 * bx, 0.5 * by);
    return {amplitude * bz, amplitude * bzbar};
}

double Bump::gradient_bound() const { return std::abs(amplitude) * unit_gradient_sup() / radius; }

BumpBasis BumpBasis::dyadic(const DomainGrid& grid, int levels) {
    if (levels < 1 || levels > 6) throw ConfigError("basis levels must be in 1..6");
    BumpBasis basis;
    const Box& b = grid.box();
    // Each element lives on its dyadic square enlarged by half, so that
    // neighbouring supports overlap and no grid line is fixed by the whole
    // basis. The core is sized so the enlarged level-1 supports stay well
    // inside the domain.
    switch (grid.kind()) {
        case DomainKind::Disk:
            basis.core_ = {-0.5, 0.5, -0.5, 0.5};
            break;
        case DomainKind::Rectangle:
        case DomainKind::HalfPlane: {
            const double mx = 0.15 * b.width();
            const double my = 0.15 * b.height();
            basis.core_ = {b.x0 + mx, b.x1 - mx, b.y0 + my, b.y1 - my};
            break;
        }
    }
    const Box& c = basis.core_;
    const double sup = unit_gradient_sup();
    for (int level = 1; level <= levels; ++level) {
        const int m = 1 << level;
        const double rx = c.width() / (2.0 * m);
        const double ry = c.height() / (2.0 * m);
        const double r = 1.5 * std::min(rx, ry);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                const cplx centre(c.x0 + (2 * i + 1) * rx, c.y0 + (2 * j + 1) * ry);
                const double amp = 0.9 * r / sup;
                basis.elements_.push_back({centre, r, cplx(amp, 0.0)});
                basis.elements_.push_back({centre, r, cplx(0.0, amp)});
            }
    }
    return basis;
}

}  // namespace mfd
