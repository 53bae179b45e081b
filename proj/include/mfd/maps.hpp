#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfd/bumps.hpp"
#include "mfd/fields.hpp"

namespace mfd {

/// A map known in closed form together with its Wirtinger derivatives.
struct ClosedFormMap {
    std::string name;
    std::function<cplx(cplx)> map;
    std::function<std::pair<cplx, cplx>(cplx)> derivs;  // (f_z, f_zbar)

    cplx operator()(cplx z) const { return map(z); }
    MappingField sample(GridPtr grid) const;
    WirtingerField derivatives(GridPtr grid,
                               const std::vector<std::uint8_t>* mask = nullptr) const;
};

/// Newton's method on the closed form: solves f(p) = target from `seed`.
std::optional<cplx> newton_inverse(const ClosedFormMap& f, cplx target, cplx seed,
                                   double tol = 1e-14, int max_iter = 60);

/// Samples f^{-1} on the grid by Newton inversion seeded at each node.
/// InvertibilityError if any inside node fails to converge.
MappingField sample_inverse(const ClosedFormMap& f, GridPtr grid);

ClosedFormMap identity_map();
// a z + b zbar
ClosedFormMap affine_map(cplx a, cplx b);
// x + i alpha y on the half-plane
ClosedFormMap linear_stretch(double alpha);
// g_alpha = psi^{-1} o (x + i alpha y) o psi on the disk, psi the Cayley map
ClosedFormMap cayley_stretch(double alpha);
// z |z|^a; fixes the unit circle pointwise
ClosedFormMap radial_power(double a);
// z + c (1 - |z|^2) zbar; fixes the unit circle pointwise
ClosedFormMap disk_shear(double c);
// z + eps (1 + i/2) sin(pi x) sin(pi y) on the unit square; identity on its boundary
ClosedFormMap square_sine(double eps);
// z + sum c_i phi_i
ClosedFormMap bump_perturbation(const BumpBasis& basis,
                                const std::vector<std::pair<std::size_t, cplx>>& coeffs);
// z + c phi_0, with phi_0 the first element of the grid's 3-level bump basis
// (so |D(c phi_0)| <= 0.9 |c|).
ClosedFormMap basis_bump(const DomainGrid& grid, cplx c);
// Complex conjugation; reverses orientation.
ClosedFormMap conjugation_map();

/// "identity" | "affine:a_re,a_im,b_re,b_im" | "linear:alpha" | "galpha:alpha"
/// | "radial:a" | "shear:c" | "sine:eps" | "bump:c" (basis_bump) | "conj".
ClosedFormMap parse_map(const std::string& spec, const DomainGrid& grid);

}  // namespace mfd
