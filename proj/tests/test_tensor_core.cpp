#include <doctest.h>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/tensor_core.hpp"

#include <cmath>
#include <random>

using namespace ricci_lab;

namespace {

Mat random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = N(rng);
    return 0.5 * (a + a.transpose());
}

Mat random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = N(rng);
    return a * a.transpose() + 0.5 * Mat::Identity(n, n);
}

Vec random_vec(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = N(rng);
    return v;
}

} // namespace

TEST_CASE("Kulkarni-Nomizu of the identity with itself") {
    const Mat g = Mat::Identity(3, 3);
    const Vec e1 = Vec::Unit(3, 0), e2 = Vec::Unit(3, 1);
    CHECK(kulkarni_nomizu(g, g, e1, e2, e2, e1) == doctest::Approx(1.0));
    CHECK(kulkarni_nomizu(g, g, e1, e2, e1, e2) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(kulkarni_nomizu(g, g, e1, e2, e1, Vec::Unit(4, 0)), InputError);
}

TEST_CASE("Kulkarni-Nomizu is symmetric in its factors and is a curvature tensor") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Mat a = random_symmetric(4, rng), b = random_symmetric(4, rng);
        const Tensor4 ab = kulkarni_nomizu_tensor(a, b);
        const Tensor4 ba = kulkarni_nomizu_tensor(b, a);
        CHECK((ab - ba).max_abs() < 1e-14);
        CHECK(symmetry_residual(ab) < 1e-14);
        const Vec u = random_vec(4, rng), v = random_vec(4, rng), w = random_vec(4, rng), z = random_vec(4, rng);
        CHECK(ab.eval(u, v, w, z) == doctest::Approx(kulkarni_nomizu(a, b, u, v, w, z)).epsilon(1e-12));
    }
}

TEST_CASE("wedge basis is lexicographic and bijective") {
    const WedgeBasis w(4);
    REQUIRE(w.size() == 6);
    int expect = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            CHECK(w.index(i, j) == expect);
            CHECK(w.pairs()[static_cast<std::size_t>(expect)] == std::make_pair(i, j));
            ++expect;
        }
    CHECK_THROWS_AS(w.index(2, 1), InputError);
}

TEST_CASE("curvature operator packing") {
    SUBCASE("g o g with identity g is the identity operator") {
        const Mat g = Mat::Identity(3, 3);
        const CurvatureOperator op = pack_curvature_operator(kulkarni_nomizu_tensor(g, g), g, Vec::Zero(3));
        CHECK((op.matrix - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
        const Vec ev = op.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(1.0));
    }
    SUBCASE("flat tensor packs to zero") {
        const CurvatureOperator op = pack_curvature_operator(Tensor4(3), Mat::Identity(3, 3), Vec::Zero(3));
        CHECK(op.matrix.isZero());
    }
    SUBCASE("pack then unpack reproduces R(u,v,v,u)") {
        std::mt19937_64 rng(5);
        const Mat g = random_spd(4, rng);
        const Tensor4 R = kulkarni_nomizu_tensor(random_symmetric(4, rng), random_symmetric(4, rng)) +
                          kulkarni_nomizu_tensor(random_symmetric(4, rng), g);
        const CurvatureOperator op = pack_curvature_operator(R, g, Vec::Zero(4));
        for (int t = 0; t < 20; ++t) {
            const Vec u = random_vec(4, rng), v = random_vec(4, rng);
            const double direct = R.eval(u, v, v, u);
            CHECK(std::abs(op.plane_form(u, v) - direct) < 1e-12 * std::max(1.0, std::abs(direct)));
            const Vec w = op.basis.wedge(u, v);
            const double area = u.dot(g * u) * v.dot(g * v) - std::pow(u.dot(g * v), 2);
            CHECK(w.dot(op.gram * w) == doctest::Approx(area).epsilon(1e-12));
        }
        CHECK(op.self_adjoint_residual() < 1e-15);
    }
    SUBCASE("symmetry violations are rejected") {
        Tensor4 R(3);
        R(0, 1, 1, 0) = 1.0;
        CHECK_THROWS_AS(pack_curvature_operator(R, Mat::Identity(3, 3), Vec::Zero(3)), ConsistencyError);
    }
    SUBCASE("frame packing agrees with coordinate packing on plane forms") {
        std::mt19937_64 rng(8);
        const Mat g = random_spd(3, rng);
        const Tensor4 R = kulkarni_nomizu_tensor(random_symmetric(3, rng), g);
        const Mat E = gram_schmidt(Mat::Identity(3, 3), g);
        const CurvatureOperator framed = pack_in_frame(R, E, Vec::Zero(3));
        const CurvatureOperator coord = pack_curvature_operator(R, g, Vec::Zero(3));
        const Vec a = random_vec(3, rng), b = random_vec(3, rng);
        CHECK(framed.plane_form(a, b) == doctest::Approx(coord.plane_form(E * a, E * b)).epsilon(1e-12));
        const Vec e1 = framed.eigenvalues(), e2 = coord.eigenvalues();
        CHECK((e1 - e2).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("gram_schmidt") {
    SUBCASE("identity is unchanged") {
        CHECK((gram_schmidt(Mat::Identity(3, 3), Mat::Identity(3, 3)) - Mat::Identity(3, 3)).isZero(1e-15));
    }
    SUBCASE("two vectors in the plane") {
        Mat V(2, 2);
        V << 1, 1, 0, 1;
        const Mat E = gram_schmidt(V, Mat::Identity(2, 2));
        CHECK((E - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("random frame with random metric") {
        std::mt19937_64 rng(9);
        const Mat g = random_spd(4, rng);
        Mat V(4, 4);
        for (int c = 0; c < 4; ++c) V.col(c) = random_vec(4, rng);
        const Mat E = gram_schmidt(V, g);
        CHECK((E.transpose() * g * E - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
        // idempotent
        CHECK((gram_schmidt(E, g) - E).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("rank deficiency") {
        Mat V(3, 2);
        V << 1, 2, 0, 0, 1, 2;
        CHECK_THROWS_AS(gram_schmidt(V, Mat::Identity(3, 3)), DegeneracyError);
    }
}

namespace {

MatrixField sphere_metric_field() {
    ChartBox box{Vec::Constant(2, -1.0), Vec::Constant(2, 1.0)};
    return make_matrix_field("s2", box, [](std::span<const Jet> x) {
        JetMatrix g(2);
        g(0, 0) = Jet(1.0);
        g(1, 1) = square(cos(x[0]));
        return g;
    });
}

SampleSet grid_samples() {
    SampleSet s{"grid-5x5", {}};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) s.points.push_back(Eigen::Vector2d(-0.8 + 0.4 * i, -0.8 + 0.4 * j));
    return s;
}

} // namespace

TEST_CASE("C0 and C1 norms") {
    const MatrixField g0 = sphere_metric_field();
    const SampleSet samples = grid_samples();
    SUBCASE("zero field") {
        MatrixField h = g0;
        h.eval = [](const Vec&) { return JetMatrix(2); };
        CHECK(c0_norm(h, g0, samples).value == 0.0);
        CHECK(c1_norm(h, g0, samples).value == 0.0);
    }
    SUBCASE("multiple of the background metric") {
        MatrixField h = g0;
        h.eval = [g0](const Vec& x) { return Jet(-0.37) * g0.eval(x); };
        CHECK(c0_norm(h, g0, samples).value == doctest::Approx(0.37).epsilon(1e-12));
        CHECK(c1_norm(h, g0, samples).value == doctest::Approx(0.37).epsilon(1e-12));
        CHECK(c0_norm(h, g0, samples).sample_set == "grid-5x5");
    }
    SUBCASE("C1 dominates C0 and sees the derivative") {
        // h = x0 * g0: nabla h = dx0 (x) g0, so the derivative term is 1.
        MatrixField h = g0;
        h.eval = [g0](const Vec& x) {
            const auto j = coordinate_jets(x);
            return j[0] * g0.eval(x);
        };
        const double c0 = c0_norm(h, g0, samples).value;
        const double c1 = c1_norm(h, g0, samples).value;
        CHECK(c0 == doctest::Approx(0.8));
        CHECK(c1 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(c0 <= c1);
    }
    SUBCASE("serial and parallel agree") {
        MatrixField h = g0;
        h.eval = [](const Vec& x) {
            const auto j = coordinate_jets(x);
            JetMatrix m(2);
            m(0, 0) = sin(j[0] * j[1]);
            m(0, 1) = m(1, 0) = 0.2 * j[1];
            m(1, 1) = exp(j[0]) - 1.0;
            return m;
        };
        CHECK(c1_norm(h, g0, samples, Exec::serial).value == c1_norm(h, g0, samples, Exec::parallel).value);
    }
}
