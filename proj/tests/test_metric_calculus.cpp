#include <doctest.h>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/metric_calculus.hpp"

#include <Eigen/LU>

#include <cmath>
#include <random>

using namespace ricci_lab;

namespace {

ChartBox box(int n, double lo, double hi) { return {Vec::Constant(n, lo), Vec::Constant(n, hi)}; }

MetricField euclidean(int n) {
    return make_matrix_field("flat", box(n, -10, 10), [n](std::span<const Jet>) {
        JetMatrix g(n);
        for (int i = 0; i < n; ++i) g(i, i) = Jet(1.0);
        return g;
    });
}

// Round S^2 of radius r in polar coordinates (theta, phi).
MetricField sphere2_polar(double r) {
    return make_matrix_field("s2-polar", box(2, -4, 4), [r](std::span<const Jet> x) {
        JetMatrix g(2);
        g(0, 0) = Jet(r * r);
        g(1, 1) = r * r * square(sin(x[0]));
        return g;
    });
}

// Unit S^3 in hyperspherical coordinates (psi, theta, phi).
MetricField sphere3() {
    return make_matrix_field("s3-hyper", box(3, -4, 4), [](std::span<const Jet> x) {
        JetMatrix g(3);
        const Jet s1 = square(sin(x[0]));
        g(0, 0) = Jet(1.0);
        g(1, 1) = s1;
        g(2, 2) = s1 * square(sin(x[1]));
        return g;
    });
}

// S^2(1) x S^2(1) in latitude/longitude charts.
MetricField s2xs2() {
    return make_matrix_field("s2xs2", box(4, -1.2, 1.2), [](std::span<const Jet> x) {
        JetMatrix g(4);
        g(0, 0) = Jet(1.0);
        g(1, 1) = square(cos(x[0]));
        g(2, 2) = Jet(1.0);
        g(3, 3) = square(cos(x[2]));
        return g;
    });
}

Vec random_vec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = N(rng);
    return v;
}

Vec random_point(int n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = U(rng);
    return v;
}

} // namespace

TEST_CASE("Christoffel symbols") {
    SUBCASE("Euclidean") {
        const Christoffel G = christoffel(euclidean(3), Vec::Constant(3, 0.4));
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) CHECK(G(k, i, j) == 0.0);
    }
    SUBCASE("round S^2 polar chart") {
        const double th = 0.7;
        const Christoffel G = christoffel(sphere2_polar(1.0), Eigen::Vector2d(th, 0.3));
        CHECK(G(0, 1, 1) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-14));
        CHECK(G(1, 0, 1) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-14));
    }
    SUBCASE("random diagonal metric against a finite-difference Koszul oracle") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> U(-1, 1);
        double a[3][3];
        for (auto& row : a)
            for (double& c : row) c = U(rng);
        auto coeff = [&](int i, const auto& x) { return exp(a[i][0] * x[0] + a[i][1] * sin(x[1]) + a[i][2] * x[2] * x[0]); };
        const MetricField g = make_matrix_field("diag", box(3, -2, 2), [&](std::span<const Jet> x) {
            JetMatrix m(3);
            for (int i = 0; i < 3; ++i) m(i, i) = coeff(i, x);
            return m;
        });
        auto gval = [&](const Vec& x) {
            Mat m = Mat::Zero(3, 3);
            for (int i = 0; i < 3; ++i) {
                using std::exp;
                using std::sin;
                m(i, i) = coeff(i, x);
            }
            return m;
        };
        for (int t = 0; t < 5; ++t) {
            const Vec x = random_point(3, rng, -0.8, 0.8);
            const double h = 1e-6;
            std::vector<Mat> dg(3);
            for (int k = 0; k < 3; ++k) {
                Vec xp = x, xm = x;
                xp[k] += h;
                xm[k] -= h;
                dg[static_cast<std::size_t>(k)] = (gval(xp) - gval(xm)) / (2 * h);
            }
            const Mat ginv = gval(x).inverse();
            const Christoffel G = christoffel(g, x);
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        double fd = 0.0;
                        for (int l = 0; l < 3; ++l)
                            fd += 0.5 * ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
                        CHECK(std::abs(G(k, i, j) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
                    }
            CHECK(metric_compatibility_residual(g.at(x), G) < 1e-12);
        }
    }
}

TEST_CASE("Riemann tensor on constant-curvature charts") {
    SUBCASE("flat") {
        const CurvaturePointData d = riemann(euclidean(4), Vec::Constant(4, 0.1));
        CHECK(d.riemann.max_abs() == 0.0);
    }
    SUBCASE("unit S^3 matches g o g") {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 20; ++t) {
            const Vec x = random_point(3, rng, 0.3, 2.8);
            const CurvaturePointData d = riemann(sphere3(), x);
            const Tensor4 oracle = kulkarni_nomizu_tensor(d.g, d.g);
            CHECK((d.riemann - oracle).max_abs() < 1e-10);
            CHECK(symmetry_residual(d.riemann) < 1e-8);
            const Vec u = random_vec(3, rng), v = random_vec(3, rng);
            CHECK(sectional(d, u, v) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK((d.ricci - 2.0 * d.g).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("S^2 of radius 1/2 has curvature 4") {
        std::mt19937_64 rng(6);
        for (int t = 0; t < 20; ++t) {
            const Vec x = random_point(2, rng, 0.3, 2.8);
            const CurvaturePointData d = riemann(sphere2_polar(0.5), x);
            CHECK(sectional(d, Vec::Unit(2, 0), Vec::Unit(2, 1)) == doctest::Approx(4.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("sectional curvature") {
    std::mt19937_64 rng(7);
    const CurvaturePointData prod = riemann(s2xs2(), Vec::Constant(4, 0.3));
    SUBCASE("mixed planes of a product are flat") {
        CHECK(std::abs(sectional(prod, Vec::Unit(4, 0), Vec::Unit(4, 3))) < 1e-14);
        CHECK(sectional(prod, Vec::Unit(4, 0), Vec::Unit(4, 1)) == doctest::Approx(1.0));
    }
    SUBCASE("invariant under change of basis of the plane") {
        for (int t = 0; t < 20; ++t) {
            const Vec u = random_vec(4, rng), v = random_vec(4, rng);
            const double a = 0.3 + std::abs(random_vec(1, rng)[0]), b = -1.7, c = random_vec(1, rng)[0];
            CHECK(sectional(prod, a * u, b * v + c * u) == doctest::Approx(sectional(prod, u, v)).epsilon(1e-9));
        }
    }
    SUBCASE("degenerate plane") {
        const Vec u = random_vec(4, rng);
        CHECK_THROWS_AS(sectional(prod, u, 2.0 * u), DegeneracyError);
    }
}

TEST_CASE("gradient and Hessian") {
    SUBCASE("constant function") {
        const Jet f = 3.0;
        CHECK(gradient(f, Mat::Identity(2, 2)).isZero());
        CHECK(hessian(f, Christoffel(2), 2).isZero());
    }
    SUBCASE("half squared norm in Euclidean space") {
        const Vec x = Eigen::Vector3d(0.3, -1.0, 2.0);
        const ScalarField f = make_scalar_field("flat", box(3, -10, 10), [](std::span<const Jet> y) {
            return 0.5 * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        });
        CHECK((gradient(f, euclidean(3), x) - x).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((hessian(f, euclidean(3), x) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("gradient is dual to the differential") {
        const MetricField g = s2xs2();
        const ScalarField f = make_scalar_field("s2xs2", box(4, -1.2, 1.2), [](std::span<const Jet> y) {
            return sin(y[0] * y[1]) + y[2] * exp(y[3]);
        });
        const Vec x = Eigen::Vector4d(0.2, 0.5, -0.3, 0.1);
        const Vec grad = gradient(f, g, x);
        const Jet fx = f.at(x);
        std::mt19937_64 rng(2);
        for (int t = 0; t < 5; ++t) {
            const Vec y = random_vec(4, rng);
            CHECK(std::abs(grad.dot(g.at(x).value() * y) - fx.d.head(4).dot(y)) < 1e-12);
        }
        const Mat H = hessian(f, g, x);
        CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("tangential Hessian of distance on the unit sphere is cot(d)") {
        // In polar coordinates centred at the pole, dist = theta; the unit vector
        // orthogonal to grad dist is d_phi / sin(theta).
        const ScalarField dist = make_scalar_field("s2-polar", box(2, -4, 4), [](std::span<const Jet> y) { return y[0]; });
        for (double d : {0.05, 0.2, 0.5, 1.0}) {
            const Mat H = hessian(dist, sphere2_polar(1.0), Eigen::Vector2d(d, 0.4));
            const double tangential = H(1, 1) / std::pow(std::sin(d), 2);
            CHECK(tangential == doctest::Approx(1.0 / std::tan(d)).epsilon(1e-12));
            CHECK(std::abs(tangential - 1.0 / d) <= d);
        }
    }
}

TEST_CASE("intermediate Ricci minima") {
    FrameSearchConfig cfg;
    cfg.seed = 17;
    SUBCASE("flat space") {
        const CurvaturePointData d = riemann(euclidean(3), Vec::Zero(3));
        for (int k = 1; k <= 2; ++k) CHECK(ric_k_min(d, k, cfg).value == doctest::Approx(0.0));
        CHECK_THROWS_AS(ric_k_min(d, 3, cfg), InputError);
    }
    SUBCASE("unit S^3, k = 2") {
        const CurvaturePointData d = riemann(sphere3(), Eigen::Vector3d(1.0, 0.8, 0.2));
        const RicKResult r = ric_k_min(d, 2, cfg);
        CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
        CHECK((r.frame.transpose() * d.g * r.frame - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(ric_k_min(d, 1, cfg).value == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("S^2 x S^2 against a Stiefel brute-force oracle") {
        const CurvaturePointData d = riemann(s2xs2(), Eigen::Vector4d(0.3, -0.2, 0.5, 0.1));
        const FrameSumProblem problem(d.op);
        for (int k = 1; k <= 3; ++k) {
            const RicKResult r = ric_k_min(d, k, cfg);
            FrameSearchConfig oracle_cfg = cfg;
            oracle_cfg.restarts = 20;
            oracle_cfg.max_iters = 4000;
            const double oracle = minimize_frame_sum_stiefel(problem, k, oracle_cfg).value;
            const double grid = grid_frame_sum_min(problem, k, 16);
            CHECK(r.value <= oracle + 1e-6);
            CHECK(r.value <= grid + 1e-12);
            // the frame achieves the reported value
            double sum = 0.0;
            for (int i = 1; i <= k; ++i) sum += sectional(d, r.frame.col(0), r.frame.col(i));
            CHECK(sum == doctest::Approx(r.value).epsilon(1e-10));
        }
        CHECK(std::abs(ric_k_min(d, 2, cfg).value) < 1e-9);
        CHECK(ric_k_min(d, 3, cfg).value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("monotonicity of normalised minima on constant curvature") {
        const CurvaturePointData d = riemann(sphere3(), Eigen::Vector3d(0.9, 1.1, 0.0));
        CHECK(ric_k_min(d, 1, cfg).value / 1.0 >= ric_k_min(d, 2, cfg).value / 2.0 - 1e-9);
    }
}
