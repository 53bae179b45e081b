#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mfd {

using cplx = std::complex<double>;

enum class DomainKind { Disk, HalfPlane, Rectangle };

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(const std::string& name);

// Axis-aligned bounding box [x0, x1] x [y0, y1].
struct Box {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// Geometric parameters of the three supported domains.
//  - Disk: unit disk, bounding box [-1,1]^2 (extents ignored).
//  - HalfPlane: band x in [-half_width, half_width], y in [y_min, y_max].
//  - Rectangle: the given box.
struct DomainSpec {
    DomainKind kind = DomainKind::Disk;
    int resolution = 64;
    double half_width = 20.0;
    double y_min = 1e-3;
    double y_max = 20.0;
    Box rect{0.0, 1.0, 0.0, 1.0};

    static DomainSpec disk(int n);
    static DomainSpec half_plane(int n, double half_width, double y_min, double y_max);
    static DomainSpec rectangle(int n, Box box);
};

/// Uniform cell-centred Cartesian grid with an inside mask.
///
/// The bounding box is split into n x n cells and each node sits at a cell
/// centre, so the midpoint rule integrates with weight `cell_area()` per
/// inside node. Nodes are stored row-major: index = j * n + i where i runs
/// along x and j along y.
class DomainGrid {
public:
    static std::shared_ptr<const DomainGrid> build(const DomainSpec& spec);

    DomainKind kind() const { return spec_.kind; }
    const DomainSpec& spec() const { return spec_; }
    int n() const { return spec_.resolution; }
    std::size_t size() const { return static_cast<std::size_t>(n()) * n(); }
    const Box& box() const { return box_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double spacing() const { return hx_ > hy_ ? hx_ : hy_; }
    double cell_area() const { return hx_ * hy_; }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n() + i; }
    int col(std::size_t k) const { return static_cast<int>(k % n()); }
    int row(std::size_t k) const { return static_cast<int>(k / n()); }
    double x(int i) const { return box_.x0 + (i + 0.5) * hx_; }
    double y(int j) const { return box_.y0 + (j + 0.5) * hy_; }
    cplx node(std::size_t k) const { return {x(col(k)), y(row(k))}; }

    bool inside(std::size_t k) const { return inside_[k] != 0; }
    bool inside(int i, int j) const {
        return i >= 0 && j >= 0 && i < n() && j < n() && inside_[index(i, j)] != 0;
    }
    // Whether the open domain (not the grid) contains the point.
    bool contains(cplx z) const;

    const std::vector<std::uint8_t>& inside_mask() const { return inside_; }
    std::size_t inside_count() const { return inside_count_; }
    double masked_area() const { return static_cast<double>(inside_count_) * cell_area(); }

    // Inside nodes with at least one 4-neighbour outside the grid or the mask.
    const std::vector<std::size_t>& boundary_nodes() const { return boundary_; }
    // True when the centred stencil of the given half-width (1 for order 2,
    // 2 for order 4) is missing a neighbour along x or y.
    bool boundary_adjacent(std::size_t k, int stencil_order) const;

private:
    explicit DomainGrid(const DomainSpec& spec);

    DomainSpec spec_;
    Box box_;
    double hx_ = 0.0;
    double hy_ = 0.0;
    std::vector<std::uint8_t> inside_;
    std::size_t inside_count_ = 0;
    std::vector<std::size_t> boundary_;
};

using GridPtr = std::shared_ptr<const DomainGrid>;

}  // namespace mfd
