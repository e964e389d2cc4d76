#include "ricci_lab/profile_builder.hpp"

#include "ricci_lab/errors.hpp"
#include "ricci_lab/exec.hpp"
#include "ricci_lab/metric_calculus.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ricci_lab {

bool all_passed(const std::vector<Certificate>& certs) {
    return std::all_of(certs.begin(), certs.end(), [](const Certificate& c) { return c.passed(); });
}

std::optional<Certificate> first_failure(const std::vector<Certificate>& certs) {
    for (const Certificate& c : certs)
        if (!c.passed()) return c;
    return std::nullopt;
}

Eval3 smoothstep(double u) {
    if (u <= 0.0) return {0.0, 0.0, 0.0};
    if (u >= 1.0) return {1.0, 0.0, 0.0};
    const double u2 = u * u;
    return {u2 * u * (10.0 + u * (-15.0 + 6.0 * u)), 30.0 * u2 * (1.0 - u) * (1.0 - u),
            60.0 * u * (2.0 * u - 1.0) * (u - 1.0)};
}

double smoothstep_integral(double u) {
    u = std::clamp(u, 0.0, 1.0);
    const double u4 = u * u * u * u;
    return u4 * (2.5 + u * (-3.0 + u));
}

double smoothstep_double_integral(double u) {
    u = std::clamp(u, 0.0, 1.0);
    const double u5 = u * u * u * u * u;
    return u5 * (0.5 + u * (-0.5 + u / 7.0));
}

Eval3 CutoffFunction::operator()(double t) const {
    const double a = std::abs(t);
    if (a <= eta) return {1.0, 0.0, 0.0};
    if (a >= 2.0 * eta) return {0.0, 0.0, 0.0};
    const Eval3 s = smoothstep((a - eta) / eta);
    const double sign = t < 0.0 ? -1.0 : 1.0;
    return {1.0 - s.v, -sign * s.d1 / eta, -s.d2 / (eta * eta)};
}

double cutoff_c2_norm(double eta) {
    return std::max({1.0, kRampMaxSlope / eta, kRampMaxCurvature / (eta * eta)});
}

CutoffFunction build_cutoff(double eta, double K) {
    if (!(eta > 0.0)) throw InputError("cutoff: eta > 0 required");
    if (!(K > 1.0)) throw InputError("cutoff: K > 1 required");
    const double norm = cutoff_c2_norm(eta);
    if (!(norm < K)) {
        std::ostringstream os;
        os << "cutoff: C2 norm of the quintic ramp at eta = " << eta << " is " << norm
           << "; need K > " << norm;
        throw InfeasibilityError(os.str());
    }
    return CutoffFunction{eta, norm};
}

Eval3 glue(const CutoffFunction& lambda, const Eval3& f, const Eval3& g, double t) {
    const Eval3 l = lambda(t);
    const Eval3 d{f.v - g.v, f.d1 - g.d1, f.d2 - g.d2};
    return {g.v + l.v * d.v, g.d1 + l.d1 * d.v + l.v * d.d1, g.d2 + l.d2 * d.v + 2.0 * l.d1 * d.d1 + l.v * d.d2};
}

Eval3 PlateauFunction::operator()(double t) const {
    const double a = std::abs(t);
    if (a <= tau) return {C, 0.0, 0.0};
    if (a >= nu) return {0.0, 0.0, 0.0};
    const double w = nu - tau;
    const Eval3 s = smoothstep((a - tau) / w);
    const double sign = t < 0.0 ? -1.0 : 1.0;
    return {C * (1.0 - s.v), -sign * C * s.d1 / w, -C * s.d2 / (w * w)};
}

Eval3 PlateauFunction::second_antiderivative(double t) const {
    const double a = std::abs(t);
    const double sign = t < 0.0 ? -1.0 : 1.0;
    const double w = nu - tau;
    if (a <= tau) return {0.5 * C * a * a, sign * C * a, C};
    if (a <= nu) {
        const double r = a - tau;
        const double u = r / w;
        const double f = 0.5 * C * tau * tau + C * tau * r + C * (0.5 * r * r - w * w * smoothstep_double_integral(u));
        const double fp = C * tau + C * (r - w * smoothstep_integral(u));
        return {f, sign * fp, C * (1.0 - smoothstep(u).v)};
    }
    const double f_nu = 0.5 * C * tau * tau + C * tau * w + C * w * w * (0.5 - 1.0 / 7.0);
    const double slope = 0.5 * C * (tau + nu);
    return {f_nu + slope * (a - nu), sign * slope, 0.0};
}

PlateauFunction build_plateau(double C, double nu, double tau) {
    if (!(tau > 0.0) || !(tau < nu)) throw InputError("plateau: 0 < tau < nu required");
    return PlateauFunction{C, tau, nu};
}

Eval3 BumpProfile::operator()(double t) const {
    const Eval3 l = cutoff(t);
    if (l.v == 0.0 && l.d1 == 0.0 && l.d2 == 0.0) return {0.0, 0.0, 0.0};
    const Eval3 f = plateau.second_antiderivative(t);
    if (l.v == 1.0 && l.d1 == 0.0) return f;
    return {l.v * f.v, l.d1 * f.v + l.v * f.d1, l.d2 * f.v + 2.0 * l.d1 * f.d1 + l.v * f.d2};
}

namespace {

void check_profile_preconditions(double C, double epsilon, double eta, double tau) {
    if (!(std::abs(C) > 1.0)) throw InputError("|C| > 1 required");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon in (0,1) required");
    if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta in (0,1) required");
    if (!(tau > 0.0)) throw InputError("tau > 0 required");
    const double limit = epsilon * eta / (2.0 * std::abs(C));
    if (!(tau < limit)) {
        std::ostringstream os;
        os << "tau bound violated: need tau < eps*eta/(2|C|) = " << limit << ", got tau = " << tau;
        throw InfeasibilityError(os.str());
    }
}

struct Extreme {
    double value;
    double at;
};

/// Certificate grid for a profile: uniform, logarithmic, and the two transition bands.
std::vector<double> profile_grid(const BumpProfile& p, std::string& id) {
    std::vector<double> ts;
    const double top = 2.5 * p.eta;
    const int n_uniform = 20001, n_log = 4001, n_band = 2001, n_ramp = 4001;
    for (int i = 0; i < n_uniform; ++i) ts.push_back(top * i / (n_uniform - 1));
    const double lo = p.tau * 1e-2;
    for (int i = 0; i < n_log; ++i) ts.push_back(lo * std::pow(top / lo, static_cast<double>(i) / (n_log - 1)));
    for (int i = 0; i < n_band; ++i) ts.push_back(p.tau + (p.nu - p.tau) * i / (n_band - 1));
    for (int i = 0; i < n_ramp; ++i) ts.push_back(p.eta + p.eta * i / (n_ramp - 1));
    std::sort(ts.begin(), ts.end());
    std::ostringstream os;
    os << "profile-grid[0,2.5eta]:uniform" << n_uniform << "+log" << n_log << "+plateau-band" << n_band
       << "+ramp-band" << n_ramp;
    id = os.str();
    return ts;
}

Certificate make_upper(std::string name, std::string relation, double bound, const std::string& grid, Extreme worst,
                       bool strict) {
    Certificate c{std::move(name), std::move(relation), bound, grid, worst.value, bound - worst.value, strict, {}};
    c.witness = Vec::Constant(1, worst.at);
    return c;
}

Certificate make_lower(std::string name, std::string relation, double bound, const std::string& grid, Extreme worst,
                       bool strict) {
    Certificate c{std::move(name), std::move(relation), bound, grid, worst.value, worst.value - bound, strict, {}};
    c.witness = Vec::Constant(1, worst.at);
    return c;
}

std::vector<Certificate> profile_certificates(const BumpProfile& p) {
    std::string grid;
    const std::vector<double> ts = profile_grid(p, grid);
    const double sgn = p.C > 0.0 ? 1.0 : -1.0;
    Extreme c1{0.0, 0.0}, d2_min{std::numeric_limits<double>::infinity(), 0.0},
        d2_max{-std::numeric_limits<double>::infinity(), 0.0}, mono{std::numeric_limits<double>::infinity(), 0.0},
        core{0.0, 0.0}, support{0.0, 0.0};
    for (double t : ts) {
        const Eval3 e = p(t);
        const double c1v = std::max(std::abs(e.v), std::abs(e.d1));
        if (c1v > c1.value) c1 = {c1v, t};
        if (e.d2 < d2_min.value) d2_min = {e.d2, t};
        if (e.d2 > d2_max.value) d2_max = {e.d2, t};
        if (t <= p.eta && sgn * e.d1 < mono.value) mono = {sgn * e.d1, t};
        if (t <= p.tau) {
            const double dev = std::abs(e.v - 0.5 * p.C * t * t);
            if (dev > core.value) core = {dev, t};
        }
        if (t >= 2.0 * p.eta && std::abs(e.v) > support.value) support = {std::abs(e.v), t};
    }
    std::vector<Certificate> out;
    out.push_back(make_upper("c1_norm", "max(|phi|,|phi'|) < eps", p.epsilon, grid, c1, true));
    if (p.C > 0.0) {
        out.push_back(make_lower("second_derivative_lower", "phi'' > -eps", -p.epsilon, grid, d2_min, true));
        out.push_back(make_upper("second_derivative_upper", "phi'' <= C", p.C, grid, d2_max, false));
    } else {
        out.push_back(make_lower("second_derivative_lower", "phi'' >= C", p.C, grid, d2_min, false));
        out.push_back(make_upper("second_derivative_upper", "phi'' < eps", p.epsilon, grid, d2_max, true));
    }
    out.push_back(make_lower("monotone_on_[0,eta]", "sign(C) phi' >= 0 on [0,eta]", 0.0, grid, mono, false));
    out.push_back(make_upper("quadratic_core", "|phi - C t^2/2| = 0 on [0,tau]", 0.0, grid, core, false));
    out.push_back(make_upper("support", "phi = 0 for |t| >= 2 eta", 0.0, grid, support, false));
    return out;
}

} // namespace

BumpProfile inspect_profile(double C, double epsilon, double eta, double tau) {
    check_profile_preconditions(C, epsilon, eta, tau);
    BumpProfile p;
    p.C = C;
    p.epsilon = epsilon;
    p.eta = eta;
    p.tau = tau;
    // Geometric mean of the admissible interval (tau, eps eta / (2|C|)).
    p.nu = std::sqrt(tau * epsilon * eta / (2.0 * std::abs(C)));
    p.cutoff = CutoffFunction{eta, cutoff_c2_norm(eta)};
    p.plateau = build_plateau(C, p.nu, tau);
    p.certificates = profile_certificates(p);
    return p;
}

namespace {

std::string describe_failure(const Certificate& c) {
    std::ostringstream os;
    os << "certificate '" << c.name << "' failed: " << c.relation << " (bound " << c.bound << ", worst " << c.worst
       << ", margin " << c.margin << ", grid " << c.grid;
    if (c.witness.size() > 0) os << ", at (" << c.witness.transpose() << ")";
    os << ")";
    return os.str();
}

} // namespace

BumpProfile build_profile(double C, double epsilon, double eta, double tau) {
    BumpProfile p = inspect_profile(C, epsilon, eta, tau);
    if (auto bad = first_failure(p.certificates)) throw ConstructionError(describe_failure(*bad));
    return p;
}

Jet compose_profile_with_dist2(const BumpProfile& profile, const Jet& dist2) {
    const double u = dist2.v;
    const double d = std::sqrt(std::max(0.0, u));
    if (d <= profile.tau) return (0.5 * profile.C) * dist2;
    if (d >= 2.0 * profile.eta) return Jet(0.0);
    const Eval3 e = profile(d);
    // Phi(u) = phi(sqrt u)
    const double d1 = e.d1 / (2.0 * d);
    const double d2 = (e.d2 - e.d1 / d) / (4.0 * d * d);
    return chain(dist2, e.v, d1, d2);
}

namespace {

void check_omega_preconditions(const DistanceModel& model, double C, double epsilon, double eta, double tau) {
    check_profile_preconditions(C, epsilon, eta, tau);
    const double half = 0.5 * std::min(1.0, model.injectivity_radius);
    if (!(eta < half)) {
        std::ostringstream os;
        os << "eta too large for the injectivity radius of '" << model.name << "': need eta < " << half;
        throw InputError(os.str());
    }
    const double inner = omega_tau_limit(C, epsilon, eta);
    if (!(tau < inner)) {
        std::ostringstream os;
        os << "tau too large for the internal profile (eps -> eps*eta^3, C -> 2C): need tau < eps*eta^4/(4|C|) = "
           << inner << ", got tau = " << tau;
        throw InfeasibilityError(os.str());
    }
}

SampleSet omega_samples(const DistanceModel& model, double tau, double eta, const OmegaSampling& s) {
    SampleSet out;
    std::ostringstream id;
    id << "omega-samples:" << model.name << ":dirs=" << s.directions << ":core=" << s.core_radii
       << ":shell=" << s.shell_radii;
    out.id = id.str();
    out.points.push_back(model.center);
    std::vector<double> radii;
    for (int i = 0; i < s.core_radii; ++i)
        radii.push_back(tau * std::pow(1e-3, 1.0 - static_cast<double>(i) / std::max(1, s.core_radii - 1)) * 0.999);
    const double top = 2.5 * eta;
    const int half = s.shell_radii / 2;
    for (int i = 0; i < half; ++i)
        radii.push_back(tau * std::pow(top / tau, static_cast<double>(i + 1) / half));
    for (int i = 0; i < s.shell_radii - half; ++i)
        radii.push_back(tau + (top - tau) * (i + 0.5) / (s.shell_radii - half));
    for (int j = 0; j < s.directions; ++j) {
        const double theta = 2.0 * std::numbers::pi * (j + 0.25) / s.directions;
        const Vec dir = Eigen::Vector2d(std::cos(theta), std::sin(theta));
        for (double r : radii) {
            // Far shell points can leave the chart near its singular edge; the support check only needs the rest.
            const Vec x = model.point_at(r, dir);
            if (model.metric.domain.contains(x)) out.points.push_back(x);
        }
    }
    return out;
}

struct OmegaPointStats {
    double dist = 0.0;
    double value = 0.0;
    double grad_norm = 0.0;
    double hess_min = 0.0;
    double hess_max = 0.0;
};

} // namespace

OmegaFunction inspect_omega(const DistanceModel& model, double C, double epsilon, double eta, double tau,
                            const OmegaSampling& sampling) {
    check_omega_preconditions(model, C, epsilon, eta, tau);
    OmegaFunction w;
    w.base_model = model.name;
    w.center = model.center;
    w.C = C;
    w.epsilon = epsilon;
    w.eta = eta;
    w.tau = tau;
    w.profile = inspect_profile(2.0 * C, epsilon * eta * eta * eta, eta, tau);
    const BumpProfile profile = w.profile;
    const auto dist2 = model.dist2;
    w.of_jets = [profile, dist2](std::span<const Jet> y) { return compose_profile_with_dist2(profile, dist2(y)); };
    w.field = make_scalar_field(model.metric.chart_id, model.metric.domain, w.of_jets);
    w.samples = omega_samples(model, tau, eta, sampling);

    const MetricField g = model.metric;
    const ScalarField f = w.field;
    const auto stats = map_indices<OmegaPointStats>(w.samples.points.size(), [&](std::size_t i) {
        const Vec& x = w.samples.points[i];
        const JetMatrix gj = g.at(x);
        const Jet wx = f.at(x);
        const Mat gv = gj.value();
        const Mat H = hessian(wx, christoffel(gj), g.dim);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(H, gv, Eigen::EigenvaluesOnly);
        const Vec grad = gradient(wx, gv);
        const Jet d2 = dist2(coordinate_jets(x));
        OmegaPointStats s;
        s.dist = std::sqrt(std::max(0.0, d2.v));
        s.value = wx.v;
        s.grad_norm = std::sqrt(std::max(0.0, grad.dot(gv * grad)));
        s.hess_min = es.eigenvalues()[0];
        s.hess_max = es.eigenvalues()[es.eigenvalues().size() - 1];
        return s;
    });

    const std::string& grid = w.samples.id;
    auto worst_over = [&](auto select, auto score) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < stats.size(); ++i) {
            if (!select(stats[i])) continue;
            const double v = score(stats[i]);
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        return std::make_pair(best, arg);
    };
    auto add = [&](std::string name, std::string rel, double bound, double worst, std::size_t arg, bool upper,
                   bool strict) {
        Certificate c{std::move(name), std::move(rel), bound, grid, worst,
                      upper ? bound - worst : worst - bound, strict, w.samples.points[arg]};
        w.certificates.push_back(c);
    };
    auto all = [](const OmegaPointStats&) { return true; };

    {
        const auto [v, i] = worst_over([](const OmegaPointStats& s) { return s.dist == 0.0; },
                                       [](const OmegaPointStats& s) { return s.grad_norm; });
        add("gradient_at_center", "|grad omega|(p) = 0", 0.0, v, i, true, false);
    }
    const double lo = C > 0.0 ? -epsilon : 3.0 * C;
    const double hi = C > 0.0 ? 3.0 * C : epsilon;
    {
        const auto [v, i] = worst_over(all, [](const OmegaPointStats& s) { return -s.hess_min; });
        std::ostringstream rel;
        rel << "Hess omega(Z,Z) >= " << (C > 0.0 ? "-eps" : "3C") << " for unit Z";
        add("hessian_lower", rel.str(), lo, -v, i, false, false);
    }
    {
        const auto [v, i] = worst_over(all, [](const OmegaPointStats& s) { return s.hess_max; });
        std::ostringstream rel;
        rel << "Hess omega(Z,Z) <= " << (C > 0.0 ? "3C" : "eps") << " for unit Z";
        add("hessian_upper", rel.str(), hi, v, i, true, false);
    }
    {
        const auto core = [tau](const OmegaPointStats& s) { return s.dist <= tau; };
        if (C > 0.0) {
            const auto [v, i] = worst_over(core, [](const OmegaPointStats& s) { return -s.hess_min; });
            add("hessian_core", "Hess omega(Z,Z) >= C on B(p,tau)", C, -v, i, false, false);
        } else {
            const auto [v, i] = worst_over(core, [](const OmegaPointStats& s) { return s.hess_max; });
            add("hessian_core", "Hess omega(Z,Z) <= C on B(p,tau)", C, v, i, true, false);
        }
    }
    {
        const auto [v, i] = worst_over(all, [](const OmegaPointStats& s) {
            return std::max(std::abs(s.value), s.grad_norm);
        });
        add("c1_norm", "max(|omega|, |grad omega|) < eps", epsilon, v, i, true, true);
    }
    {
        const auto [v, i] = worst_over([eta](const OmegaPointStats& s) { return s.dist >= 2.0 * eta; },
                                       [](const OmegaPointStats& s) { return std::abs(s.value); });
        add("support", "omega = 0 outside B(p, 2 eta)", 0.0, std::max(0.0, v), i, true, false);
    }
    {
        const double err = std::abs(model.tangential_hessian_error(2.0 * eta));
        Certificate c{"eta_restriction", "|Hess_d(Y,Y) - 1/d| < sqrt(eta) at d = 2 eta", std::sqrt(eta),
                      "closed-form", err, std::sqrt(eta) - err, true, Vec::Constant(1, 2.0 * eta)};
        w.certificates.push_back(c);
    }
    for (const Certificate& c : w.profile.certificates) {
        Certificate pc = c;
        pc.name = "profile." + c.name;
        w.certificates.push_back(pc);
    }
    return w;
}

OmegaFunction build_omega(const DistanceModel& model, double C, double epsilon, double eta, double tau,
                          const OmegaSampling& sampling) {
    OmegaFunction w = inspect_omega(model, C, epsilon, eta, tau, sampling);
    if (auto bad = first_failure(w.certificates)) throw ConstructionError("omega: " + describe_failure(*bad));
    return w;
}

ScalarField pullback_omega(const OmegaFunction& omega, const ChartMap& projection, const std::string& total_chart,
                           const ChartBox& total_domain) {
    const auto of_jets = omega.of_jets;
    const int b = omega.field.dim;
    return make_scalar_field(total_chart, total_domain, [of_jets, projection, b](std::span<const Jet> x) {
        const auto y = projection(x);
        return of_jets(std::span<const Jet>(y.data(), static_cast<std::size_t>(b)));
    });
}

} // namespace ricci_lab
