#pragma once

// One-dimensional bump profiles and the functions omega = phi o dist_p built
// from them. Everything is a C^2 piecewise polynomial in t (or in dist^2), so
// values and two derivatives are exact.

#include "ricci_lab/fields.hpp"

#include <array>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ricci_lab {

/// Value and first two derivatives of a function of one variable.
struct Eval3 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// One verified bound: `worst` is the sampled extreme of the checked quantity,
/// `margin` its signed distance to `bound` (positive means satisfied).
/// Closed inequalities (strict = false) also pass with zero margin.
struct Certificate {
    std::string name;
    std::string relation;
    double bound = 0.0;
    std::string grid;
    double worst = 0.0;
    double margin = 0.0;
    bool strict = true;
    /// Where the worst value was attained (t, or a chart point).
    Vec witness;

    bool passed() const { return strict ? margin > 0.0 : margin >= 0.0; }
};

bool all_passed(const std::vector<Certificate>& certs);
/// First failing certificate, if any.
std::optional<Certificate> first_failure(const std::vector<Certificate>& certs);

/// Quintic smoothstep s(u) = 6u^5 - 15u^4 + 10u^3 on [0,1] and its antiderivatives.
Eval3 smoothstep(double u);
double smoothstep_integral(double u);         // int_0^u s
double smoothstep_double_integral(double u);  // int_0^u int_0^v s

inline constexpr double kRampMaxSlope = 1.875;                           // max s'
inline const double kRampMaxCurvature = 10.0 / std::numbers::sqrt3;      // max |s''|

/// lambda = 1 on [-eta, eta], 0 outside [-2eta, 2eta], quintic ramp between.
struct CutoffFunction {
    double eta = 0.0;
    /// Exact max(|lambda|, |lambda'|, |lambda''|).
    double c2_bound = 0.0;

    Eval3 operator()(double t) const;
};

/// Smallest C^2 norm the quintic ramp attains at this eta.
double cutoff_c2_norm(double eta);

/// Throws InfeasibilityError (with the minimal achievable K) if cutoff_c2_norm(eta) >= K.
CutoffFunction build_cutoff(double eta, double K);

/// phi = lambda f + (1 - lambda) g at t.
Eval3 glue(const CutoffFunction& lambda, const Eval3& f, const Eval3& g, double t);

/// delta such that |f - g|_{C^1} < delta forces |f - phi|_{C^1} < eps and
/// |phi'' - (lambda f'' + (1 - lambda) g'')| < eps for the glued phi.
/// The error terms are (1 - lambda)(g - f), its derivative, and 2 lambda'(f - g)' + lambda''(f - g).
inline double gluing_delta(double epsilon, const CutoffFunction& lambda) {
    return epsilon / (3.0 * lambda.c2_bound + 1.0);
}

/// h = C on [-tau, tau], supported in [-nu, nu], quintic ramps between.
struct PlateauFunction {
    double C = 0.0;
    double tau = 0.0;
    double nu = 0.0;

    Eval3 operator()(double t) const;
    /// f(t) = int_0^t int_0^s h, returned with f' and f'' = h.
    Eval3 second_antiderivative(double t) const;
    double integral() const { return C * (tau + nu); }
};

PlateauFunction build_plateau(double C, double nu, double tau);

/// phi = lambda f with f'' = h_nu; phi = (C/2) t^2 on [-tau, tau].
struct BumpProfile {
    double C = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    double nu = 0.0;
    CutoffFunction cutoff;
    PlateauFunction plateau;
    std::vector<Certificate> certificates;

    Eval3 operator()(double t) const;
    bool certified() const { return all_passed(certificates); }
};

/// Checks preconditions (InputError / InfeasibilityError naming the inequality),
/// builds the profile and its certificates without throwing on certificate failure.
BumpProfile inspect_profile(double C, double epsilon, double eta, double tau);

/// As inspect_profile, but throws ConstructionError if a certificate fails.
BumpProfile build_profile(double C, double epsilon, double eta, double tau);

/// A base manifold with a closed-form squared distance from a center point.
struct DistanceModel {
    std::string name;
    MetricField metric;
    Vec center;
    /// dist_p^2 as a function of coordinate jets.
    std::function<Jet(std::span<const Jet>)> dist2;
    double injectivity_radius = 0.0;
    /// Tangential distance-Hessian error Hess_d(Y,Y) - 1/d for unit Y orthogonal to grad d.
    std::function<double(double)> tangential_hessian_error;
    /// Point at distance rho from the center in direction `dir` (unit, orthonormal frame at center).
    std::function<Vec(double rho, const Vec& dir)> point_at;
};

struct OmegaSampling {
    int directions = 12;
    int core_radii = 8;
    int shell_radii = 48;
};

/// omega = phi o dist_p, where phi is the profile built for (2C, eps eta^3, eta, tau),
/// so omega = C dist^2 on B(p, tau).
struct OmegaFunction {
    std::string base_model;
    Vec center;
    double C = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    BumpProfile profile;
    ScalarField field;
    std::function<Jet(std::span<const Jet>)> of_jets;
    SampleSet samples;
    std::vector<Certificate> certificates;

    Jet at(const Vec& x) const { return field.at(x); }
    bool certified() const { return all_passed(certificates); }
};

/// Composes the inner profile with dist^2 on jets.
Jet compose_profile_with_dist2(const BumpProfile& profile, const Jet& dist2);

OmegaFunction inspect_omega(const DistanceModel& model, double C, double epsilon, double eta, double tau,
                            const OmegaSampling& sampling = {});
/// Throws ConstructionError with the failing sample point if a certificate fails.
OmegaFunction build_omega(const DistanceModel& model, double C, double epsilon, double eta, double tau,
                          const OmegaSampling& sampling = {});

/// Largest tau the internal profile of build_omega accepts: eps eta^4 / (4|C|).
inline double omega_tau_limit(double C, double epsilon, double eta) {
    return epsilon * eta * eta * eta * eta / (4.0 * std::abs(C));
}

/// A chart map between coordinate jets (used for projections).
using ChartMap = std::function<std::array<Jet, kMaxDim>(std::span<const Jet>)>;

/// omega o pi on the total space chart.
ScalarField pullback_omega(const OmegaFunction& omega, const ChartMap& projection, const std::string& total_chart,
                           const ChartBox& total_domain);

} // namespace ricci_lab
