#include "mfd/weight.hpp"

#include <cmath>
#include <limits>

#include "mfd/error.hpp"

namespace mfd {

WeightField::WeightField(Kind kind, std::string name, std::function<double(cplx)> weight,
                         std::function<bool(cplx)> domain)
    : kind_(kind), name_(std::move(name)), weight_(std::move(weight)), domain_(std::move(domain)) {}

WeightField WeightField::unit() {
    return {Kind::Unit, "unit", [](cplx) { return 1.0; }, [](cplx) { return true; }};
}

WeightField WeightField::hyperbolic_disk() {
    return {Kind::HyperbolicDisk, "hyp-disk",
            [](cplx z) {
                const double d = 1.0 - std::norm(z);
                return 1.0 / (d * d);
            },
            [](cplx z) { return std::norm(z) < 1.0; }};
}

WeightField WeightField::hyperbolic_half_plane() {
    return {Kind::HyperbolicHalfPlane, "hyp-half",
            [](cplx z) { return 1.0 / (z.imag() * z.imag()); },
            [](cplx z) { return z.imag() > 0.0; }};
}

WeightField WeightField::cayley() {
    return {Kind::Cayley, "cayley",
            [](cplx z) {
                const double m = std::norm(z + 1.0);
                return 4.0 / (m * m);
            },
            [](cplx z) { return z != cplx{-1.0, 0.0}; }};
}

WeightField WeightField::custom(std::string name, std::function<double(cplx)> weight,
                                std::function<bool(cplx)> domain) {
    return {Kind::Custom, std::move(name), std::move(weight), std::move(domain)};
}

WeightField WeightField::parse(const std::string& spec) {
    if (spec == "unit") return unit();
    if (spec == "hyp-disk") return hyperbolic_disk();
    if (spec == "hyp-half") return hyperbolic_half_plane();
    if (spec == "cayley") return cayley();
    throw ConfigError("unknown weight '" + spec + "' (expected unit | hyp-disk | hyp-half | cayley)");
}

double WeightField::operator()(cplx z) const {
    if (!domain_(z)) return std::numeric_limits<double>::infinity();
    return weight_(z);
}

std::vector<double> WeightField::sample(const DomainGrid& grid) const {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.inside(k)) out[k] = (*this)(grid.node(k));
    }
    return out;
}

}  // namespace mfd
