#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mfd/grid.hpp"

namespace mfd {

/// Positive area weight: lambda on the disk or eta on the half-plane.
///
/// Built-ins: unit (1), hyp-disk (1-|z|^2)^-2, hyp-half Im(z)^-2 and cayley
/// 4/|z+1|^4. Evaluation outside the weight's domain returns +inf. The
/// minimisation problems are usually posed with lambda >= 1; this class
/// accepts any positive weight.
class WeightField {
public:
    enum class Kind { Unit, HyperbolicDisk, HyperbolicHalfPlane, Cayley, Custom };

    static WeightField unit();
    static WeightField hyperbolic_disk();
    static WeightField hyperbolic_half_plane();
    static WeightField cayley();
    static WeightField custom(std::string name, std::function<double(cplx)> weight,
                              std::function<bool(cplx)> domain);
    // "unit" | "hyp-disk" | "hyp-half" | "cayley"
    static WeightField parse(const std::string& spec);

    double operator()(cplx z) const;
    bool in_domain(cplx z) const { return domain_(z); }
    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    std::vector<double> sample(const DomainGrid& grid) const;

private:
    WeightField(Kind kind, std::string name, std::function<double(cplx)> weight,
                std::function<bool(cplx)> domain);

    Kind kind_;
    std::string name_;
    std::function<double(cplx)> weight_;
    std::function<bool(cplx)> domain_;
};

}  // namespace mfd
