#include <doctest.h>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/metric_calculus.hpp"
#include "ricci_lab/profile_builder.hpp"
#include "ricci_lab/submersion_models.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace ricci_lab;

namespace {

// Maximum of |s''| for s(u) = 6u^5 - 15u^4 + 10u^3, by brute sampling of the polynomial.
double ramp_curvature_by_sampling() {
    double m = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double u = i / 200000.0;
        m = std::max(m, std::abs(120 * u * u * u - 180 * u * u + 60 * u));
    }
    return m;
}

double sampled_cutoff_curvature(const CutoffFunction& l) {
    double m = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double t = l.eta + l.eta * i / 200000.0;
        m = std::max(m, std::abs(l(t).d2));
    }
    return m;
}

bool has_failure(const std::vector<Certificate>& certs, const std::string& name) {
    for (const auto& c : certs)
        if (c.name == name) return !c.passed();
    FAIL("certificate not found: " << name);
    return false;
}

} // namespace

TEST_CASE("cutoff: plateau, support and monotone ramp") {
    const CutoffFunction l = build_cutoff(0.1, 1000.0);
    CHECK(l(0.05).v == 1.0);
    CHECK(l(-0.05).v == 1.0);
    CHECK(l(0.25).v == 0.0);
    const Eval3 mid = l(0.15);
    CHECK(mid.v > 0.0);
    CHECK(mid.v < 1.0);
    CHECK(mid.d1 < 0.0);
    for (int i = 0; i <= 1000; ++i) {
        const double t = 0.1 + 0.1 * i / 1000.0;
        CHECK(l(t).v >= 0.0);
        CHECK(l(t).v <= 1.0);
    }
}

TEST_CASE("cutoff: eta^2 |lambda''| is the same constant at every eta") {
    const double expected = ramp_curvature_by_sampling();
    for (double eta : {0.05, 0.1, 0.3}) {
        const CutoffFunction l = build_cutoff(eta, 1e6);
        CHECK(sampled_cutoff_curvature(l) * eta * eta == doctest::Approx(expected).epsilon(1e-6));
        CHECK(l.c2_bound >= sampled_cutoff_curvature(l));
    }
}

TEST_CASE("cutoff: K too small reports the minimal achievable K") {
    try {
        build_cutoff(0.1, 50.0);
        FAIL("expected InfeasibilityError");
    } catch (const InfeasibilityError& e) {
        CHECK(std::string(e.what()).find("need K >") != std::string::npos);
    }
    CHECK_THROWS_AS(build_cutoff(-0.1, 50.0), InputError);
    CHECK_THROWS_AS(build_cutoff(0.1, 1.0), InputError);
}

TEST_CASE("plateau: values, sign and integral") {
    const PlateauFunction h = build_plateau(2.0, 0.1, 0.05);
    CHECK(h(0.0).v == 2.0);
    CHECK(h(0.2).v == 0.0);
    double integral = 0.0;
    const int n = 400000;
    const double dt = 0.4 / n;
    for (int i = 0; i < n; ++i) {
        const double t = -0.2 + (i + 0.5) * dt;
        CHECK(h(t).v >= 0.0);
        integral += h(t).v * dt;
    }
    CHECK(integral >= 2.0 * 2.0 * 0.05);
    CHECK(integral <= 2.0 * 2.0 * 0.1);
    CHECK(integral == doctest::Approx(h.integral()).epsilon(1e-7));
    CHECK_THROWS_AS(build_plateau(2.0, 0.05, 0.05), InputError);
    CHECK_THROWS_AS(build_plateau(2.0, 0.05, 0.1), InputError);
}

TEST_CASE("plateau: second antiderivative integrates h twice") {
    const PlateauFunction h = build_plateau(-3.0, 0.07, 0.02);
    // Trapezoid double integration from 0.
    const int n = 200000;
    const double T = 0.1, dt = T / n;
    double f1 = 0.0, f0 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = i * dt, b = a + dt;
        const double f1_next = f1 + 0.5 * dt * (h(a).v + h(b).v);
        f0 += 0.5 * dt * (f1 + f1_next);
        f1 = f1_next;
    }
    const Eval3 f = h.second_antiderivative(T);
    CHECK(f.d1 == doctest::Approx(f1).epsilon(1e-8));
    CHECK(f.v == doctest::Approx(f0).epsilon(1e-7));
}

TEST_CASE("profile: quadratic core and support") {
    const BumpProfile p = inspect_profile(2.0, 0.1, 0.2, 0.004);
    CHECK(p(0.002).v == doctest::Approx(4e-6).epsilon(1e-12));
    CHECK(p(0.5).v == 0.0);
    CHECK(p.nu > p.tau);
    CHECK(p.nu < 0.1 * 0.2 / 4.0);
}

TEST_CASE("profile: dense C1 norm stays below eps") {
    const BumpProfile p = inspect_profile(2.0, 0.1, 0.2, 0.004);
    double m = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const Eval3 e = p(0.5 * i / 100000.0);
        m = std::max({m, std::abs(e.v), std::abs(e.d1)});
    }
    CHECK(m < 0.1);
    CHECK_FALSE(has_failure(p.certificates, "c1_norm"));
}

TEST_CASE("profile: example parameters violate the lower phi'' bound") {
    // The ramp term 2 lambda' f' near t = eta is about -0.15 here, below -eps = -0.1.
    const BumpProfile p = inspect_profile(2.0, 0.1, 0.2, 0.004);
    CHECK(has_failure(p.certificates, "second_derivative_lower"));
    CHECK_FALSE(p.certified());
    CHECK_THROWS_AS(build_profile(2.0, 0.1, 0.2, 0.004), ConstructionError);
}

TEST_CASE("profile: small tau certifies for both signs of C") {
    for (double C : {2.0, -2.0, 5.0}) {
        const BumpProfile p = build_profile(C, 0.1, 0.2, 1e-5);
        CHECK(p.certified());
        CHECK(p(0.0).d2 == C);
        for (const auto& c : p.certificates) CHECK_MESSAGE(c.passed(), c.name);
    }
}

TEST_CASE("profile: analytic phi'' matches second differences") {
    const BumpProfile p = inspect_profile(3.0, 0.2, 0.3, 1e-3);
    const double h = 1e-5;
    double scale = 0.0, worst = 0.0;
    for (int i = 1; i < 2000; ++i) {
        const double t = 0.65 * i / 2000.0;
        const double fd = (p(t + h).v - 2.0 * p(t).v + p(t - h).v) / (h * h);
        scale = std::max(scale, std::abs(p(t).d2));
        worst = std::max(worst, std::abs(fd - p(t).d2));
        const double fd1 = (p(t + h).v - p(t - h).v) / (2.0 * h);
        CHECK(fd1 == doctest::Approx(p(t).d1).epsilon(1e-6).scale(1.0));
    }
    // Second differences carry O(h^2) truncation plus O(ulp / h^2) rounding.
    CHECK(worst / scale < 1e-4);
}

TEST_CASE("profile: second differences of a single polynomial piece are exact to 1e-8") {
    const BumpProfile p = inspect_profile(3.0, 0.2, 0.3, 1e-3);
    // Inside the cutoff ramp phi is a polynomial of degree <= 7, so the symmetric stencil
    // error is h^2/12 phi'''' + O(h^4); use a wide stencil relative to the piece and Richardson.
    for (double t : {0.35, 0.42, 0.51, 0.58}) {
        const double h = 1e-3;
        auto d2 = [&](double s) { return (p(t + s).v - 2.0 * p(t).v + p(t - s).v) / (s * s); };
        const double rich = (4.0 * d2(h / 2) - d2(h)) / 3.0;
        CHECK(std::abs(rich - p(t).d2) <= 1e-8 * std::max(1.0, std::abs(p(t).d2)));
    }
}

TEST_CASE("profile: preconditions") {
    CHECK_THROWS_AS(inspect_profile(1.0, 0.1, 0.2, 1e-4), InputError);
    CHECK_THROWS_AS(inspect_profile(2.0, 1.5, 0.2, 1e-4), InputError);
    CHECK_THROWS_AS(inspect_profile(2.0, 0.1, 1.2, 1e-4), InputError);
    try {
        inspect_profile(2.0, 0.1, 0.2, 0.006);
        FAIL("expected InfeasibilityError");
    } catch (const InfeasibilityError& e) {
        CHECK(std::string(e.what()).find("tau < eps*eta/(2|C|)") != std::string::npos);
    }
}

TEST_CASE("gluing: blend of C1-close functions stays close") {
    const CutoffFunction l = build_cutoff(0.2, 200.0);
    const double eps = 0.05;
    const double delta = gluing_delta(eps, l);
    // f and g differ by a C^2 function with C^1 size just below delta.
    auto f = [](double t) { return Eval3{std::sin(3 * t), 3 * std::cos(3 * t), -9 * std::sin(3 * t)}; };
    const double a = 0.99 * delta / 2.0;
    auto g = [&](double t) {
        const Eval3 ft = f(t);
        return Eval3{ft.v + a * std::cos(2 * t), ft.d1 - 2 * a * std::sin(2 * t), ft.d2 - 4 * a * std::cos(2 * t)};
    };
    double c1 = 0.0, c1_fg = 0.0, c0_2 = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double t = -0.6 + 1.2 * i / 20000.0;
        const Eval3 ft = f(t), gt = g(t), phi = glue(l, ft, gt, t);
        const Eval3 lt = l(t);
        c1_fg = std::max({c1_fg, std::abs(ft.v - gt.v), std::abs(ft.d1 - gt.d1)});
        c1 = std::max({c1, std::abs(ft.v - phi.v), std::abs(ft.d1 - phi.d1)});
        c0_2 = std::max(c0_2, std::abs(phi.d2 - (lt.v * ft.d2 + (1.0 - lt.v) * gt.d2)));
    }
    REQUIRE(c1_fg < delta);
    CHECK(c1 < eps);
    CHECK(c0_2 < eps);
}

TEST_CASE("omega: certified construction on S^2(1/2) for C = +-2") {
    const DistanceModel base = make_base_model("s2half");
    for (double C : {2.0, -2.0}) {
        const double eps = 0.5, eta = 0.1, tau = 2e-7;
        const OmegaFunction w = build_omega(base, C, eps, eta, tau);
        CHECK(w.certified());
        const Vec p = Vec::Zero(2);
        const Jet wp = w.at(p);
        CHECK(wp.v == 0.0);
        CHECK(gradient(wp, base.metric.at(p).value()).norm() == 0.0);
        // omega = C d^2 near p, so every unit direction has Hessian 2C at p.
        const Mat H = hessian(w.field, base.metric, p);
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(H, base.metric.at(p).value());
        CHECK(es.eigenvalues()[0] == doctest::Approx(2.0 * C).epsilon(1e-10));
        CHECK(es.eigenvalues()[1] == doctest::Approx(2.0 * C).epsilon(1e-10));

        const double lo = C > 0 ? -eps : 3.0 * C, hi = C > 0 ? 3.0 * C : eps;
        for (const Vec& x : w.samples.points) {
            const Mat g = base.metric.at(x).value();
            Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ex(hessian(w.field, base.metric, x), g);
            CHECK(ex.eigenvalues()[0] >= lo);
            CHECK(ex.eigenvalues()[1] <= hi);
        }
    }
}

TEST_CASE("omega: equals C dist^2 on the core ball") {
    const DistanceModel base = make_base_model("s2half");
    const OmegaFunction w = build_omega(base, 2.0, 0.5, 0.1, 2e-7);
    for (double r : {1e-8, 1e-7, 1.9e-7}) {
        const Vec x = base.point_at(r, Eigen::Vector2d(0.6, 0.8));
        CHECK(w.at(x).v == doctest::Approx(2.0 * r * r).epsilon(1e-8));
    }
    CHECK(w.at(base.point_at(0.21, Eigen::Vector2d(1.0, 0.0))).v == 0.0);
}

TEST_CASE("omega: parameter errors") {
    const DistanceModel base = make_base_model("s2half");
    CHECK_THROWS_AS(build_omega(base, 2.0, 0.5, 0.6, 1e-6), InputError);
    CHECK_THROWS_AS(build_omega(base, 2.0, 0.5, 0.1, 1e-5), InfeasibilityError);
    CHECK_THROWS_AS(build_omega(base, 0.5, 0.5, 0.1, 1e-7), InputError);
    // Distance Hessian error at 2 eta exceeds sqrt(eta) on S^2(1/2) for eta = 0.3.
    CHECK_THROWS_AS(build_omega(base, 2.0, 0.5, 0.3, 1e-6), ConstructionError);
}

TEST_CASE("omega: scaling eta keeps the Hessian window") {
    const DistanceModel base = make_base_model("s2");
    for (double eta : {0.1, 0.2}) {
        const double tau = 0.05 * omega_tau_limit(2.0, 0.5, eta);
        const OmegaFunction w = inspect_omega(base, 2.0, 0.5, eta, tau);
        for (const auto& c : w.certificates)
            if (c.name == "hessian_lower" || c.name == "hessian_upper") CHECK_MESSAGE(c.passed(), c.name);
    }
}

TEST_CASE("pullback: fiber constancy, horizontal gradient, sigma relation") {
    for (const std::string name : {"hopf", "berger:0.5"}) {
        const SubmersionModel m = make_model(name);
        const OmegaFunction w = build_omega(m.base_distance, -2.0, 0.5, 0.1, 2e-7);
        const ScalarField wt = pullback_omega(w, m.geometry.projection, m.geometry.total.chart_id,
                                              m.geometry.total.domain);
        const Vec y = m.base_distance.point_at(0.15, Eigen::Vector2d(0.8, -0.6));
        const Vec x1 = m.point_over(y, Vec::Constant(1, 0.3));
        const Vec x2 = m.point_over(y, Vec::Constant(1, -1.7));
        CHECK(std::abs(wt.at(x1).v - wt.at(x2).v) <= 1e-12);
        CHECK(wt.at(x1).v == doctest::Approx(w.at(y).v).epsilon(1e-14));

        const FundamentalTensors ft(m.geometry, x1);
        const Vec grad = gradient(wt, m.geometry.total, x1);
        CHECK((ft.vertical_projector() * grad).norm() <= 1e-10);
        const Mat H = hessian(wt, m.geometry.total, x1);
        const Vec U = m.geometry.vertical.col(0);
        const double lhs = U.dot(H * U);
        const double rhs = -ft.inner(ft.sigma(U, U), grad);
        CHECK(lhs == doctest::Approx(rhs).scale(1.0).epsilon(1e-9));
    }
}
