#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mfd {

/// Convex increasing profile Psi together with Psi' and Psi''.
///
/// Built-ins are "linear" (t), "power:p" (t^p, p >= 1) and "exp:p" (e^{pt},
/// p > 0). Note e^{pt} >= t on [1, inf) only for p >= 1/e.
class ConvexProfile {
public:
    enum class Family { Linear, Power, Exponential, Custom };

    static ConvexProfile linear();
    static ConvexProfile power(double p);
    static ConvexProfile exponential(double p);
    static ConvexProfile custom(std::string name, std::function<double(double)> value,
                                std::function<double(double)> first,
                                std::function<double(double)> second);
    // Parses "linear" | "power:p" | "exp:p".
    static ConvexProfile parse(const std::string& spec);

    double operator()(double t) const;
    double deriv(double t) const;
    double second(double t) const;
    // t Psi'(t) / Psi(t), computed without overflow for the exponential family.
    double elasticity(double t) const;

    Family family() const { return family_; }
    double parameter() const { return p_; }
    const std::string& name() const { return name_; }

private:
    ConvexProfile(Family family, double p, std::string name);

    Family family_;
    double p_;
    std::string name_;
    std::function<double(double)> value_;
    std::function<double(double)> first_;
    std::function<double(double)> second_;
};

struct GrowthReport {
    std::vector<double> t;
    std::vector<double> ratio;  // t Psi'(t) / Psi(t)
    bool bounded = true;
    std::string trend;  // "bounded" | "unbounded"
};

// Samples t Psi'(t)/Psi(t) on [1, t_max] and classifies the trend.
GrowthReport growth_diagnostic(const ConvexProfile& psi, double t_max);

}  // namespace mfd
