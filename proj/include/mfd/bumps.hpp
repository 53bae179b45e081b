#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mfd/grid.hpp"

namespace mfd {

// B(s) = exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside; B(0) = 1.
double bump_profile(double s);
double bump_profile_deriv(double s);

/// phi(z) = amplitude * B((x - cx)/r) B((y - cy)/r), a smooth vector field
/// supported on the closed square of half-width r around the centre.
struct Bump {
    cplx center;
    double radius;
    cplx amplitude;

    cplx value(cplx z) const;
    // (phi_z, phi_zbar)
    std::pair<cplx, cplx> derivs(cplx z) const;
    // sup |phi_z| + |phi_zbar|, the operator norm bound of D phi.
    double gradient_bound() const;
};

/// Tensor-product bumps on the dyadic subsquares of a core square, two per
/// square (real and imaginary directions). Level L contributes 4^L squares;
/// each support is its square enlarged by a factor 1.5 about the centre.
/// Each element is scaled so that |phi_z| + |phi_zbar| <= 0.9, which keeps
/// z + t phi a diffeomorphism for |t| < 1.
class BumpBasis {
public:
    // Core square: [-0.5, 0.5]^2 for the disk, the middle 70% of the box for
    // rectangles and half-plane bands.
    static BumpBasis dyadic(const DomainGrid& grid, int levels = 3);

    std::size_t size() const { return elements_.size(); }
    const Bump& operator[](std::size_t i) const { return elements_[i]; }
    const std::vector<Bump>& elements() const { return elements_; }
    const Box& core() const { return core_; }

private:
    std::vector<Bump> elements_;
    Box core_;
};

}  // namespace mfd
