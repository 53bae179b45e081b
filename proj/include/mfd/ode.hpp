#pragma once

#include <string>
#include <vector>

#include "mfd/fields.hpp"
#include "mfd/profile.hpp"
#include "mfd/weight.hpp"

namespace mfd {

// Maps of the form h(x + iy) = x + i u(y) on the half-plane. For such a map
// with stretch t = u'(y), the Hopf density (without the weight) is
//     F(t) = Psi'((1 + t^2) / (2t)) (1 - t^2),
// and a constant differential Phi = lambda means F(u') eta(u) = 4 lambda.

enum class Branch {
    Identity,     // lambda = 0, u' = 1
    Contracting,  // lambda > 0, u' in (0, 1)
    Expanding,    // lambda < 0, u' in (1, inf)
};

std::string to_string(Branch b);
Branch branch_for(double lambda);

// F(t); DomainError for t <= 0.
double stretch_density(const ConvexProfile& psi, double t);

struct DensityLimit {
    double value = 0.0;  // lim_{t -> 0+} F(t) when finite
    bool infinite = false;
};

// lim_{t->0+} F(t) by sampling t = 2^-k; declared infinite above 1e12.
DensityLimit stretch_density_limit(const ConvexProfile& psi);

/// Inverse of F on the given branch by bracketed bisection, accurate to
/// |F(t) - y| <= 1e-13 (1 + |y|). RangeError (carrying M) when y is outside
/// the branch's range: (0, M) contracting, (-inf, 0) expanding.
double stretch_for_density(const ConvexProfile& psi, double y, Branch branch);

struct StepControl {
    double tolerance = 1e-10;  // local error per step, relative to max(1, |u|)
    double initial_step = 1e-3;
    double min_step = 1e-13;
    std::size_t max_steps = 2'000'000;
};

struct OdeSample {
    double y;
    double u;
    double du;
};

/// Solution of u' = G(u) = F^{-1}(4 lambda / eta(u)), u(0) = 0.
class OdeProfile {
public:
    ConvexProfile psi = ConvexProfile::linear();
    WeightField eta = WeightField::unit();  // evaluated at i*s; depends on the height s only
    double lambda = 0.0;
    Branch branch = Branch::Identity;
    DensityLimit limit;
    double y_requested = 0.0;
    StepControl control;
    std::vector<OdeSample> samples;
    // Range exhaustion: 4 lambda / eta(u) reached the top of F's range, so
    // the solution stops at a finite height and cannot be continued.
    bool exhausted = false;
    // Expanding branch only: u passed kEscapeHeight before y_max. The
    // solution runs off to infinity, so the stop is not a failure.
    bool escaped = false;
    static constexpr double kEscapeHeight = 1e150;

    double y_reached() const { return samples.empty() ? 0.0 : samples.back().y; }
    // G(u); throws RangeError past exhaustion.
    double speed(double u) const;
    // Solution value and slope at any y in [0, y_reached()].
    double u_at(double y) const;
    double du_at(double y) const { return speed(u_at(y)); }
    double distortion_at(double y) const;
};

OdeProfile solve_profile(const ConvexProfile& psi, const WeightField& eta, double lambda,
                         double y_max, const StepControl& control = {});

struct ProfileSpec {
    ConvexProfile psi = ConvexProfile::linear();
    WeightField eta = WeightField::unit();
    double lambda = 0.0;
    double y_max = 1e3;
};

// "psi=<name>;eta=<name>;lambda=<float>;ymax=<float>"; missing keys keep
// their defaults, unknown keys raise ConfigError.
ProfileSpec parse_profile_spec(const std::string& spec);

enum class Surjectivity { Surjective, NotSurjective, NoSolution };
std::string to_string(Surjectivity s);

struct SurjectivityReport {
    Surjectivity verdict = Surjectivity::NoSolution;
    // Divergence test of  I(x) = int_0^x G(t) dt  at x, x/2, x/4, x/8.
    double horizon = 0.0;
    std::vector<double> tail_integrals;
    double tail_exponent = 0.0;  // q with G(t) ~ t^-q, from the last doubling
    double tail_exponent_previous = 0.0;
    // Solved trajectory.
    double u_end = 0.0;
    double trajectory_exponent = 0.0;  // d log u / d log y over [y/4, y]
    double eta_psi_proxy = 0.0;        // min of eta(s) Psi'(s) over [x/2, x]
    bool quasiconformal = false;
    double distortion_end = 0.0;
};

/// Classifies the profile through the divergence of int_0^inf G(t) dt: the
/// integral diverges when the fitted tail exponent q satisfies q <= 1.1
/// (q = 1 is the logarithmic borderline).
///
/// The integral is taken along G's own argument. The trajectory of
/// u' = G(u) itself obeys y = int_0^u dv / G(v), so `u_end` and
/// `trajectory_exponent` are reported separately and can grow even when the
/// integral converges.
SurjectivityReport surjectivity_diagnosis(const OdeProfile& profile);

/// h(x + iy) = x + i u(y) on the grid. RangeError if the grid extends past
/// the solved range.
MappingField build_half_plane_map(const OdeProfile& profile, GridPtr grid);
// h_z = (1 + u')/2, h_zbar = (1 - u')/2 with u' = G(u(y)).
WirtingerField half_plane_map_derivatives(const OdeProfile& profile, GridPtr grid);

/// max over nodes of |4 Psi'(K) h_z conj(h_zbar) eta(Im h) - 4 lambda|.
double ah_residual(const MappingField& h, const WirtingerField& derivs, const ConvexProfile& psi,
                   const WeightField& eta, double lambda);
double ah_residual(const MappingField& h, const ConvexProfile& psi, const WeightField& eta,
                   double lambda, int stencil_order = 4);

/// Closed form for Psi(t) = t, eta = s^-2 and lambda <= 0, where the
/// equation reduces to u' = sqrt(1 - 4 lambda u^2), u(0) = 0:
///     u(y) = sinh(2 c y) / (2 c),   c = sqrt(-lambda),
/// so that y(u) = arcsinh(2 c u) / (2 c). The distortion at height y is
/// (1 + u'^2) / (2 u'); as a function of the image height s = u(y) it reads
/// (1 + 2 c^2 s^2) / sqrt(1 + 4 c^2 s^2).
struct HarmonicClosedForm {
    double lambda = 0.0;

    double u(double y) const;
    double du(double y) const;
    double distortion(double y) const;
    double distortion_at_height(double s) const;
};
HarmonicClosedForm harmonic_closed_form(double lambda);

// Least-squares slope of log u against log y over [s_lo, s_hi].
double loglog_slope(const OdeProfile& profile, double s_lo, double s_hi);
// The same, restricted to Psi = t^2 and eta = Im^-2.
double power2_exponent(const OdeProfile& profile, double s_lo, double s_hi);

}  // namespace mfd
