#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "mfd/fields.hpp"
#include "mfd/grid.hpp"

namespace mfd {

struct InterpolatedValue {
    cplx value;
    cplx dx;  // derivative along x
    cplx dy;  // derivative along y
};

/// Tensor-product degree-4 Lagrange interpolation of complex node data.
///
/// The 5x5 window is centred on the nearest node and shifted inward when it
/// would leave the grid or touch an unusable node. Points up to
/// `max_extrapolation` cells outside the chosen window are still evaluated,
/// which covers the gap between the outermost disk nodes and the circle.
class FieldInterpolator {
public:
    FieldInterpolator(GridPtr grid, std::vector<cplx> values, std::vector<std::uint8_t> usable,
                      double max_extrapolation = 1.0);
    explicit FieldInterpolator(const MappingField& f, double max_extrapolation = 1.0);

    std::optional<cplx> operator()(cplx p) const;
    std::optional<InterpolatedValue> with_gradient(cplx p) const;

    const DomainGrid& grid() const { return *grid_; }

private:
    struct Window {
        int i0;
        int j0;
        double s;
        double t;
    };
    std::optional<Window> locate(cplx p) const;
    bool window_usable(int i0, int j0) const;

    GridPtr grid_;
    std::vector<cplx> values_;
    std::vector<std::uint8_t> usable_;
    double max_extrapolation_;
};

/// Solves target = F(p) by Newton's method on the interpolant of F, starting
/// from `seed`. Returns nullopt when the iteration leaves the interpolable
/// region, hits a singular Jacobian or fails to converge.
struct InversionResult {
    cplx point;
    double residual;
    int iterations;
};
std::optional<InversionResult> invert_point(const FieldInterpolator& F, cplx target, cplx seed,
                                            double tol = 1e-13, int max_iter = 50);

}  // namespace mfd
