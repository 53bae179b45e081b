#include "mfd/maps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfd/cayley.hpp"
#include "mfd/error.hpp"

namespace mfd {

MappingField ClosedFormMap::sample(GridPtr grid) const { return MappingField::sample(grid, map); }

WirtingerField ClosedFormMap::derivatives(GridPtr grid,
                                          const std::vector<std::uint8_t>* mask) const {
    return WirtingerField::analytic(grid, derivs, mask);
}

std::optional<cplx> newton_inverse(const ClosedFormMap& f, cplx target, cplx seed, double tol,
                                   int max_iter) {
    cplx p = seed;
    for (int it = 0; it < max_iter; ++it) {
        const cplx r = target - f(p);
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) return std::nullopt;
        if (std::abs(r) <= tol * std::max(1.0, std::abs(target))) return p;
        const auto [fz, fzbar] = f.derivs(p);
        const double J = std::norm(fz) - std::norm(fzbar);
        if (!(std::abs(J) > 0.0)) return std::nullopt;
        cplx step = (std::conj(fz) * r - fzbar * std::conj(r)) / J;
        // Damp large steps; the closed forms here are mild.
        const double len = std::abs(step);
        if (len > 0.25) step *= 0.25 / len;
        p += step;
    }
    const cplx r = target - f(p);
    if (std::abs(r) <= 1e3 * tol * std::max(1.0, std::abs(target))) return p;
    return std::nullopt;
}

MappingField sample_inverse(const ClosedFormMap& f, GridPtr grid) {
    std::vector<cplx> values(grid->size(), cplx(0.0, 0.0));
    std::size_t failed = 0;
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (!grid->inside(k)) continue;
        const cplx w = grid->node(k);
        const auto p = newton_inverse(f, w, w);
        if (!p) {
            ++failed;
            continue;
        }
        values[k] = *p;
    }
    if (failed > 0)
        throw InvertibilityError("Newton inversion of " + f.name + " failed at " +
                                 std::to_string(failed) + " nodes");
    return MappingField(grid, std::move(values));
}

ClosedFormMap identity_map() {
    return {"identity", [](cplx z) { return z; },
            [](cplx) { return std::pair<cplx, cplx>{1.0, 0.0}; }};
}

ClosedFormMap affine_map(cplx a, cplx b) {
    std::ostringstream name;
    name << "affine(" << a << "," << b << ")";
    return {name.str(), [a, b](cplx z) { return a * z + b * std::conj(z); },
            [a, b](cplx) { return std::pair<cplx, cplx>{a, b}; }};
}

ClosedFormMap linear_stretch(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("stretch factor must be positive");
    const cplx a(0.5 * (1.0 + alpha), 0.0);
    const cplx b(0.5 * (1.0 - alpha), 0.0);
    ClosedFormMap m = affine_map(a, b);
    m.name = "linear(" + std::to_string(alpha) + ")";
    return m;
}

ClosedFormMap cayley_stretch(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("stretch factor must be positive");
    const double a = 0.5 * (1.0 + alpha);
    const double b = 0.5 * (1.0 - alpha);
    auto h = [a, b](cplx w) { return a * w + b * std::conj(w); };
    return {"galpha(" + std::to_string(alpha) + ")",
            [h](cplx z) { return cayley_inv(h(cayley(z))); },
            [h, a, b](cplx z) {
                const cplx w = cayley(z);
                const cplx d = cayley_derivative(z);
                // (psi^{-1})'(v) = 1 / psi'(psi^{-1}(v))
                const cplx back = 1.0 / cayley_derivative(cayley_inv(h(w)));
                return std::pair<cplx, cplx>{back * a * d, back * b * std::conj(d)};
            }};
}

ClosedFormMap radial_power(double a) {
    if (!(a > -1.0)) throw ConfigError("radial exponent must exceed -1");
    return {"radial(" + std::to_string(a) + ")",
            [a](cplx z) {
                const double r = std::abs(z);
                return r == 0.0 ? z : z * std::pow(r, a);
            },
            [a](cplx z) {
                const double r = std::abs(z);
                if (r == 0.0) return std::pair<cplx, cplx>{a == 0.0 ? 1.0 : 0.0, 0.0};
                const double ra = std::pow(r, a);
                return std::pair<cplx, cplx>{(1.0 + 0.5 * a) * ra, 0.5 * a * ra * z / std::conj(z)};
            }};
}

ClosedFormMap disk_shear(double c) {
    return {"shear(" + std::to_string(c) + ")",
            [c](cplx z) { return z + c * (1.0 - std::norm(z)) * std::conj(z); },
            [c](cplx z) {
                const cplx zb = std::conj(z);
                return std::pair<cplx, cplx>{1.0 - c * zb * zb, c * (1.0 - 2.0 * z * zb)};
            }};
}

ClosedFormMap square_sine(double eps) {
    constexpr double pi = std::numbers::pi;
    const cplx dir(1.0, 0.5);
    return {"sine(" + std::to_string(eps) + ")",
            [eps, dir](cplx z) {
                return z + eps * dir * std::sin(pi * z.real()) * std::sin(pi * z.imag());
            },
            [eps, dir](cplx z) {
                const double sx = std::sin(pi * z.real()), cx = std::cos(pi * z.real());
                const double sy = std::sin(pi * z.imag()), cy = std::cos(pi * z.imag());
                const double bx = pi * cx * sy;
                const double by = pi * sx * cy;
                const cplx bz(0.5 * bx, -0.5 * by);
                const cplx bzbar(0.5 * bx, 0.5 * by);
                return std::pair<cplx, cplx>{1.0 + eps * dir * bz, eps * dir * bzbar};
            }};
}

ClosedFormMap bump_perturbation(const BumpBasis& basis,
                                const std::vector<std::pair<std::size_t, cplx>>& coeffs) {
    std::vector<std::pair<Bump, cplx>> terms;
    for (const auto& [i, c] : coeffs) {
        if (i >= basis.size()) throw ConfigError("basis index out of range");
        terms.emplace_back(basis[i], c);
    }
    return {"bump-perturbation",
            [terms](cplx z) {
                cplx v = z;
                for (const auto& [b, c] : terms) v += c * b.value(z);
                return v;
            },
            [terms](cplx z) {
                cplx fz = 1.0, fzbar = 0.0;
                for (const auto& [b, c] : terms) {
                    const auto [dz, dzbar] = b.derivs(z);
                    fz += c * dz;
                    fzbar += c * dzbar;
                }
                return std::pair<cplx, cplx>{fz, fzbar};
            }};
}

ClosedFormMap basis_bump(const DomainGrid& grid, cplx c) {
    ClosedFormMap m = bump_perturbation(BumpBasis::dyadic(grid, 3), {{0, c}});
    std::ostringstream name;
    name << "bump(" << c.real();
    if (c.imag() != 0.0) name << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    name << ")";
    m.name = name.str();
    return m;
}

ClosedFormMap conjugation_map() {
    return {"conj", [](cplx z) { return std::conj(z); },
            [](cplx) { return std::pair<cplx, cplx>{0.0, 1.0}; }};
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad number in map spec: " + spec);
        }
        if (used != item.size()) throw ConfigError("bad number in map spec: " + spec);
        out.push_back(v);
    }
    return out;
}

}  // namespace

ClosedFormMap parse_map(const std::string& spec, const DomainGrid& grid) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::vector<double> args =
        colon == std::string::npos ? std::vector<double>{} : parse_numbers(spec.substr(colon + 1), spec);
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw ConfigError("map '" + head + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (head == "identity") {
        want(0);
        return identity_map();
    }
    if (head == "conj") {
        want(0);
        return conjugation_map();
    }
    if (head == "affine") {
        want(4);
        return affine_map({args[0], args[1]}, {args[2], args[3]});
    }
    if (head == "linear") {
        want(1);
        return linear_stretch(args[0]);
    }
    if (head == "galpha") {
        want(1);
        return cayley_stretch(args[0]);
    }
    if (head == "radial") {
        want(1);
        return radial_power(args[0]);
    }
    if (head == "shear") {
        want(1);
        return disk_shear(args[0]);
    }
    if (head == "sine") {
        want(1);
        return square_sine(args[0]);
    }
    if (head == "bump") {
        want(1);
        return basis_bump(grid, cplx(args[0], 0.0));
    }
    throw ConfigError("unknown map family: " + spec);
}

}  // namespace mfd
