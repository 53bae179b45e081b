#include "mfd/profile.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "mfd/error.hpp"

namespace mfd {
namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_number(const std::string& text, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end == text.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ConfigError("cannot parse number '" + text + "' in " + context);
    }
    return v;
}

}  // namespace

ConvexProfile::ConvexProfile(Family family, double p, std::string name)
    : family_(family), p_(p), name_(std::move(name)) {}

ConvexProfile ConvexProfile::linear() {
    ConvexProfile c(Family::Linear, 1.0, "linear");
    c.value_ = [](double t) { return t; };
    c.first_ = [](double) { return 1.0; };
    c.second_ = [](double) { return 0.0; };
    return c;
}

ConvexProfile ConvexProfile::power(double p) {
    if (!(p >= 1.0)) throw ConfigError("power profile needs p >= 1");
    ConvexProfile c(Family::Power, p, "power:" + short_number(p));
    c.value_ = [p](double t) { return std::pow(t, p); };
    c.first_ = [p](double t) { return p * std::pow(t, p - 1.0); };
    c.second_ = [p](double t) { return p == 1.0 ? 0.0 : p * (p - 1.0) * std::pow(t, p - 2.0); };
    return c;
}

ConvexProfile ConvexProfile::exponential(double p) {
    if (!(p > 0.0)) throw ConfigError("exponential profile needs p > 0");
    ConvexProfile c(Family::Exponential, p, "exp:" + short_number(p));
    c.value_ = [p](double t) { return std::exp(p * t); };
    c.first_ = [p](double t) { return p * std::exp(p * t); };
    c.second_ = [p](double t) { return p * p * std::exp(p * t); };
    return c;
}

ConvexProfile ConvexProfile::custom(std::string name, std::function<double(double)> value,
                                   std::function<double(double)> first,
                                   std::function<double(double)> second) {
    ConvexProfile c(Family::Custom, 0.0, std::move(name));
    c.value_ = std::move(value);
    c.first_ = std::move(first);
    c.second_ = std::move(second);
    return c;
}

ConvexProfile ConvexProfile::parse(const std::string& spec) {
    if (spec == "linear") return linear();
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string head = spec.substr(0, colon);
        const double p = parse_number(spec.substr(colon + 1), "profile '" + spec + "'");
        if (head == "power") return power(p);
        if (head == "exp") return exponential(p);
    }
    throw ConfigError("unknown profile '" + spec + "' (expected linear | power:p | exp:p)");
}

double ConvexProfile::operator()(double t) const { return value_(t); }
double ConvexProfile::deriv(double t) const { return first_(t); }
double ConvexProfile::second(double t) const { return second_(t); }

double ConvexProfile::elasticity(double t) const {
    switch (family_) {
        case Family::Linear: return 1.0;
        case Family::Power: return p_;
        case Family::Exponential: return p_ * t;
        case Family::Custom: break;
    }
    return t * first_(t) / value_(t);
}

GrowthReport growth_diagnostic(const ConvexProfile& psi, double t_max) {
    if (!(t_max >= 10.0)) throw ConfigError("growth diagnostic needs t_max >= 10");
    GrowthReport r;
    constexpr int kSamples = 64;
    for (int k = 0; k < kSamples; ++k) {
        const double t = std::pow(t_max, static_cast<double>(k) / (kSamples - 1));
        r.t.push_back(t);
        r.ratio.push_back(psi.elasticity(t));
    }
    // Bounded trend: the ratio settles (changes by < 5% over the last
    // doubling of t). Exponential growth doubles it instead.
    const double last = r.ratio.back();
    const double mid = psi.elasticity(t_max / 2.0);
    r.bounded = std::isfinite(last) && std::abs(last - mid) <= 0.05 * std::abs(last);
    r.trend = r.bounded ? "bounded" : "unbounded";
    return r;
}

}  // namespace mfd
