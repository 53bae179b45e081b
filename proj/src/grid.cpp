#include "mfd/grid.hpp"

#include <cmath>

#include "mfd/error.hpp"

namespace mfd {

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::Disk: return "disk";
        case DomainKind::HalfPlane: return "half-plane";
        case DomainKind::Rectangle: return "rectangle";
    }
    return "unknown";
}

DomainKind parse_domain_kind(const std::string& name) {
    if (name == "disk") return DomainKind::Disk;
    if (name == "half-plane" || name == "halfplane") return DomainKind::HalfPlane;
    if (name == "rectangle" || name == "rect") return DomainKind::Rectangle;
    throw ConfigError("unknown domain kind '" + name + "'");
}

DomainSpec DomainSpec::disk(int n) {
    DomainSpec s;
    s.kind = DomainKind::Disk;
    s.resolution = n;
    return s;
}

DomainSpec DomainSpec::half_plane(int n, double half_width, double y_min, double y_max) {
    DomainSpec s;
    s.kind = DomainKind::HalfPlane;
    s.resolution = n;
    s.half_width = half_width;
    s.y_min = y_min;
    s.y_max = y_max;
    return s;
}

DomainSpec DomainSpec::rectangle(int n, Box box) {
    DomainSpec s;
    s.kind = DomainKind::Rectangle;
    s.resolution = n;
    s.rect = box;
    return s;
}

std::shared_ptr<const DomainGrid> DomainGrid::build(const DomainSpec& spec) {
    return std::shared_ptr<const DomainGrid>(new DomainGrid(spec));
}

DomainGrid::DomainGrid(const DomainSpec& spec) : spec_(spec) {
    if (spec.resolution < 8) {
        throw ConfigError("grid resolution must be at least 8");
    }
    switch (spec.kind) {
        case DomainKind::Disk:
            box_ = {-1.0, 1.0, -1.0, 1.0};
            break;
        case DomainKind::HalfPlane:
            if (!(spec.half_width > 0.0)) throw ConfigError("half-plane extent X must be positive");
            if (!(spec.y_min >= 0.0)) throw ConfigError("half-plane y_min must be non-negative");
            if (!(spec.y_min < spec.y_max)) throw ConfigError("half-plane requires y_min < Y");
            box_ = {-spec.half_width, spec.half_width, spec.y_min, spec.y_max};
            break;
        case DomainKind::Rectangle:
            if (!(spec.rect.x0 < spec.rect.x1) || !(spec.rect.y0 < spec.rect.y1)) {
                throw ConfigError("rectangle extents must be positive");
            }
            box_ = spec.rect;
            break;
    }
    const int n = spec.resolution;
    hx_ = box_.width() / n;
    hy_ = box_.height() / n;

    inside_.assign(size(), 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = index(i, j);
            if (kind() == DomainKind::Disk) {
                const double r2 = x(i) * x(i) + y(j) * y(j);
                inside_[k] = r2 < 1.0 ? 1 : 0;
            } else {
                inside_[k] = 1;
            }
            inside_count_ += inside_[k];
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (!inside(i, j)) continue;
            if (!inside(i - 1, j) || !inside(i + 1, j) || !inside(i, j - 1) || !inside(i, j + 1)) {
                boundary_.push_back(index(i, j));
            }
        }
    }
}

bool DomainGrid::contains(cplx z) const {
    switch (kind()) {
        case DomainKind::Disk: return std::norm(z) < 1.0;
        case DomainKind::HalfPlane:
        case DomainKind::Rectangle:
            return z.real() >= box_.x0 && z.real() <= box_.x1 && z.imag() >= box_.y0 &&
                   z.imag() <= box_.y1;
    }
    return false;
}

bool DomainGrid::boundary_adjacent(std::size_t k, int stencil_order) const {
    const int w = stencil_order >= 4 ? 2 : 1;
    const int i = col(k);
    const int j = row(k);
    for (int d = 1; d <= w; ++d) {
        if (!inside(i - d, j) || !inside(i + d, j) || !inside(i, j - d) || !inside(i, j + d)) {
            return true;
        }
    }
    return false;
}

}  // namespace mfd
