#include "ricci_lab/metric_calculus.hpp"

#include "ricci_lab/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace ricci_lab {

namespace {

Mat checked_inverse(const Mat& g) {
    Eigen::LDLT<Mat> ldlt(g);
    if (ldlt.info() != Eigen::Success || ldlt.isNegative() || !ldlt.isPositive())
        throw DegeneracyError("metric is not positive definite");
    const double dmin = ldlt.vectorD().minCoeff();
    const double dmax = ldlt.vectorD().maxCoeff();
    if (!(dmin > 1e-14 * dmax)) throw DegeneracyError("metric is singular to working precision");
    Mat inv = ldlt.solve(Mat::Identity(g.rows(), g.cols()));
    return 0.5 * (inv + inv.transpose());
}

/// Gamma_{l,ij} = 1/2 (d_i g_lj + d_j g_li - d_l g_ij).
double gamma_lower(const JetMatrix& g, int l, int i, int j) {
    return 0.5 * (g(l, j).d[i] + g(l, i).d[j] - g(i, j).d[l]);
}

double gamma_lower_derivative(const JetMatrix& g, int m, int l, int i, int j) {
    return 0.5 * (g(l, j).h(m, i) + g(l, i).h(m, j) - g(i, j).h(m, l));
}

} // namespace

Christoffel christoffel(const JetMatrix& g) {
    const int n = g.dim();
    const Mat ginv = checked_inverse(g.value());
    Christoffel G(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += ginv(k, l) * gamma_lower(g, l, i, j);
                G(k, i, j) = s;
                G(k, j, i) = s;
            }
    return G;
}

Christoffel christoffel(const MetricField& g, const Vec& x) { return christoffel(g.at(x)); }

double metric_compatibility_residual(const JetMatrix& g, const Christoffel& gamma) {
    const int n = g.dim();
    double worst = 0.0;
    double scale = 1.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double r = g(i, j).d[k];
                scale = std::max(scale, std::abs(r));
                for (int l = 0; l < n; ++l) r -= gamma(l, k, i) * g(l, j).v + gamma(l, k, j) * g(i, l).v;
                worst = std::max(worst, std::abs(r));
            }
    return worst / scale;
}

CurvaturePointData curvature_from_jets(const JetMatrix& g, const Vec& x) {
    const int n = g.dim();
    CurvaturePointData out;
    out.x = x;
    out.g = g.value();
    out.g_inv = checked_inverse(out.g);
    out.gamma = christoffel(g);
    const Mat& ginv = out.g_inv;
    const Christoffel& G = out.gamma;

    // d_m g^{dl} = -g^{dp} (d_m g_pq) g^{ql}
    std::vector<Mat> dginv(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) dginv[static_cast<std::size_t>(m)] = -ginv * g.partial(m) * ginv;

    // dG(m, d, b, c) = d_m Gamma^d_bc
    std::vector<double> dG(static_cast<std::size_t>(n * n * n * n), 0.0);
    auto dg_at = [&](int m, int d, int b, int c) -> double& {
        return dG[static_cast<std::size_t>(((m * n + d) * n + b) * n + c)];
    };
    for (int m = 0; m < n; ++m)
        for (int d = 0; d < n; ++d)
            for (int b = 0; b < n; ++b)
                for (int c = b; c < n; ++c) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += dginv[static_cast<std::size_t>(m)](d, l) * gamma_lower(g, l, b, c) +
                             ginv(d, l) * gamma_lower_derivative(g, m, l, b, c);
                    dg_at(m, d, b, c) = s;
                    dg_at(m, d, c, b) = s;
                }

    // Rup(d, c, a, b): d-component of R(d_a, d_b) d_c.
    Tensor4 Rup(n);
    for (int d = 0; d < n; ++d)
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double s = dg_at(a, d, b, c) - dg_at(b, d, a, c);
                    for (int e = 0; e < n; ++e) s += G(d, a, e) * G(e, b, c) - G(d, b, e) * G(e, a, c);
                    Rup(d, c, a, b) = s;
                }

    out.riemann = Tensor4(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < n; ++e) s += out.g(d, e) * Rup(e, c, a, b);
                    out.riemann(a, b, c, d) = s;
                }

    out.ricci = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            double s = 0.0;
            for (int a = 0; a < n; ++a) s += Rup(a, c, a, b);
            out.ricci(b, c) = s;
        }
    out.ricci = 0.5 * (out.ricci + out.ricci.transpose());
    out.op = pack_curvature_operator(out.riemann, out.g, x);
    return out;
}

CurvaturePointData riemann(const MetricField& g, const Vec& x) { return curvature_from_jets(g.at(x), x); }

double sectional(const CurvaturePointData& data, const Vec& u, const Vec& v) {
    const auto n = data.g.rows();
    if (u.size() != n || v.size() != n) throw InputError("sectional: dimension mismatch");
    const double uu = u.dot(data.g * u);
    const double vv = v.dot(data.g * v);
    const double uv = u.dot(data.g * v);
    const double area2 = uu * vv - uv * uv;
    if (!(area2 >= kDegeneratePlane * std::max(1.0, uu * vv))) throw DegeneracyError("sectional: degenerate plane");
    return data.riemann.eval(u, v, v, u) / area2;
}

double sectional(const CurvaturePointData& data, const TangentVector& u, const TangentVector& v) {
    if (u.base_point.size() != v.base_point.size() || u.base_point != v.base_point)
        throw InputError("sectional: vectors at different base points");
    return sectional(data, u.components, v.components);
}

Vec gradient(const Jet& f, const Mat& g) {
    const auto n = g.rows();
    return checked_inverse(g) * f.d.head(n);
}

Mat hessian(const Jet& f, const Christoffel& gamma, int n) {
    Mat H(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = f.h(i, j);
            for (int k = 0; k < n; ++k) s -= gamma(k, i, j) * f.d[k];
            H(i, j) = s;
        }
    return 0.5 * (H + H.transpose());
}

Vec gradient(const ScalarField& f, const MetricField& g, const Vec& x) {
    if (f.dim != g.dim) throw InputError("gradient: field and metric dimensions differ");
    return gradient(f.at(x), g.at(x).value());
}

Mat hessian(const ScalarField& f, const MetricField& g, const Vec& x) {
    if (f.dim != g.dim) throw InputError("hessian: field and metric dimensions differ");
    return hessian(f.at(x), christoffel(g, x), g.dim);
}

RicKResult ric_k_min(const CurvaturePointData& data, int k, const FrameSearchConfig& cfg) {
    const int n = static_cast<int>(data.g.rows());
    if (k < 1 || k > n - 1) throw InputError("ric_k_min: k must lie in [1, n-1]");
    const FrameSumProblem problem(data.op);
    RicKResult out;
    if (k == n - 1) {
        // Sum over a full orthonormal complement is Ric(u,u): take the lowest eigenvector.
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(data.ricci, data.g);
        if (es.info() != Eigen::Success) throw DegeneracyError("ric_k_min: Ricci eigenproblem failed");
        const Vec u_coord = es.eigenvectors().col(0);
        // Express u in the problem's orthonormal coordinates.
        const Mat F = problem.to_coordinates(Mat::Identity(n, n));
        Vec u = F.fullPivLu().solve(u_coord);
        u.normalize();
        Mat vs;
        const double v = problem.inner_min(u, k, &vs);
        Mat X(n, k + 1);
        X.col(0) = u;
        X.rightCols(k) = vs;
        out.value = v;
        out.frame = problem.to_coordinates(X);
        return out;
    }
    const FrameSumResult r = minimize_frame_sum(problem, k, cfg);
    out.value = r.value;
    out.frame = r.frame;
    return out;
}

} // namespace ricci_lab
