#include "ricci_lab/tensor_core.hpp"

#include "ricci_lab/errors.hpp"
#include "ricci_lab/metric_calculus.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ricci_lab {

double Tensor4::eval(const Vec& u, const Vec& v, const Vec& w, const Vec& z) const {
    double s = 0.0;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            const double ab = u[a] * v[b];
            if (ab == 0.0) continue;
            for (int c = 0; c < n_; ++c)
                for (int d = 0; d < n_; ++d) s += (*this)(a, b, c, d) * ab * w[c] * z[d];
        }
    return s;
}

double Tensor4::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

Tensor4& Tensor4::operator+=(const Tensor4& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Tensor4& Tensor4::operator-=(const Tensor4& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Tensor4& Tensor4::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

double kulkarni_nomizu(const Mat& alpha, const Mat& beta, const Vec& v1, const Vec& v2,
                       const Vec& v3, const Vec& v4) {
    const auto n = alpha.rows();
    if (alpha.cols() != n || beta.rows() != n || beta.cols() != n || v1.size() != n ||
        v2.size() != n || v3.size() != n || v4.size() != n)
        throw InputError("kulkarni_nomizu: dimension mismatch");
    auto f = [](const Mat& m, const Vec& x, const Vec& y) { return x.dot(m * y); };
    return 0.5 * (f(alpha, v1, v4) * f(beta, v2, v3) + f(alpha, v2, v3) * f(beta, v1, v4)) -
           0.5 * (f(alpha, v1, v3) * f(beta, v2, v4) + f(alpha, v2, v4) * f(beta, v1, v3));
}

double kulkarni_nomizu(const TwoTensor& alpha, const TwoTensor& beta, const TangentVector& v1,
                       const TangentVector& v2, const TangentVector& v3, const TangentVector& v4) {
    for (const TangentVector* v : {&v2, &v3, &v4})
        if (v->base_point.size() != v1.base_point.size() || v->base_point != v1.base_point)
            throw InputError("kulkarni_nomizu: vectors at different base points");
    return kulkarni_nomizu(alpha.entries, beta.entries, v1.components, v2.components, v3.components,
                           v4.components);
}

Tensor4 kulkarni_nomizu_tensor(const Mat& alpha, const Mat& beta) {
    const int n = static_cast<int>(alpha.rows());
    if (beta.rows() != n) throw InputError("kulkarni_nomizu_tensor: dimension mismatch");
    Tensor4 r(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    r(a, b, c, d) = 0.5 * (alpha(a, d) * beta(b, c) + alpha(b, c) * beta(a, d)) -
                                    0.5 * (alpha(a, c) * beta(b, d) + alpha(b, d) * beta(a, c));
    return r;
}

double symmetry_residual(const Tensor4& R) {
    const int n = R.dim();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const double r = R(a, b, c, d);
                    worst = std::max({worst, std::abs(r + R(b, a, c, d)), std::abs(r + R(a, b, d, c)),
                                      std::abs(r - R(c, d, a, b)),
                                      std::abs(r + R(b, c, a, d) + R(c, a, b, d))});
                }
    return worst / std::max(1.0, R.max_abs());
}

WedgeBasis::WedgeBasis(int n) : n_(n) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
}

int WedgeBasis::index(int i, int j) const {
    if (i < 0 || j >= n_ || i >= j) throw InputError("WedgeBasis::index needs 0 <= i < j < n");
    // Rows before i hold (n-1) + (n-2) + ... + (n-i) pairs.
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

Vec WedgeBasis::wedge(const Vec& u, const Vec& v) const {
    Vec w(size());
    for (int p = 0; p < size(); ++p) {
        const auto [i, j] = pairs_[static_cast<std::size_t>(p)];
        w[p] = u[i] * v[j] - u[j] * v[i];
    }
    return w;
}

double CurvatureOperator::plane_form(const Vec& u, const Vec& v) const {
    const Vec w = basis.wedge(u, v);
    return form(w, w);
}

Vec CurvatureOperator::eigenvalues() const {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(matrix, gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw DegeneracyError("curvature operator: Gram not positive definite");
    return es.eigenvalues();
}

double CurvatureOperator::operator_norm() const {
    const Vec ev = eigenvalues();
    return ev.size() == 0 ? 0.0 : std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double CurvatureOperator::self_adjoint_residual() const {
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() / std::max(1.0, matrix.cwiseAbs().maxCoeff());
}

Mat wedge_gram(const Mat& g, const WedgeBasis& basis) {
    const int m = basis.size();
    Mat G(m, m);
    for (int p = 0; p < m; ++p) {
        const auto [i, j] = basis.pairs()[static_cast<std::size_t>(p)];
        for (int q = 0; q < m; ++q) {
            const auto [k, l] = basis.pairs()[static_cast<std::size_t>(q)];
            G(p, q) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
        }
    }
    return G;
}

namespace {

Mat pack_matrix(const Tensor4& R, const WedgeBasis& basis) {
    const int m = basis.size();
    Mat B(m, m);
    for (int p = 0; p < m; ++p) {
        const auto [i, j] = basis.pairs()[static_cast<std::size_t>(p)];
        for (int q = 0; q < m; ++q) {
            const auto [k, l] = basis.pairs()[static_cast<std::size_t>(q)];
            B(p, q) = R(i, j, l, k);
        }
    }
    return B;
}

void check_symmetries(const Tensor4& R, double tol) {
    const double res = symmetry_residual(R);
    if (res > tol) {
        std::ostringstream os;
        os << "curvature tensor symmetry residual " << res << " exceeds " << tol;
        throw ConsistencyError(os.str());
    }
}

} // namespace

CurvatureOperator pack_curvature_operator(const Tensor4& R, const Mat& g, const Vec& base_point, double tol) {
    if (g.rows() != R.dim()) throw InputError("pack_curvature_operator: dimension mismatch");
    check_symmetries(R, tol);
    CurvatureOperator op;
    op.base_point = base_point;
    op.basis = WedgeBasis(R.dim());
    op.frame = Mat::Identity(R.dim(), R.dim());
    op.vector_metric = g;
    op.matrix = pack_matrix(R, op.basis);
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose());
    op.gram = wedge_gram(g, op.basis);
    return op;
}

Tensor4 change_frame(const Tensor4& R, const Mat& E) {
    const int n = R.dim();
    if (E.rows() != n || E.cols() != n) throw InputError("change_frame: frame must be square");
    // Contract one slot at a time.
    Tensor4 t1(n), t2(n), t3(n), out(n);
    auto contract = [&](const Tensor4& in, Tensor4& o, int slot) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        double s = 0.0;
                        for (int e = 0; e < n; ++e) {
                            int idx[4] = {a, b, c, d};
                            const int free_index = idx[slot];
                            idx[slot] = e;
                            s += in(idx[0], idx[1], idx[2], idx[3]) * E(e, free_index);
                        }
                        o(a, b, c, d) = s;
                    }
    };
    contract(R, t1, 0);
    contract(t1, t2, 1);
    contract(t2, t3, 2);
    contract(t3, out, 3);
    return out;
}

CurvatureOperator pack_in_frame(const Tensor4& R, const Mat& E, const Vec& base_point, double tol) {
    check_symmetries(R, tol);
    const Tensor4 Rf = change_frame(R, E);
    CurvatureOperator op;
    op.base_point = base_point;
    op.basis = WedgeBasis(R.dim());
    op.frame = E;
    op.vector_metric = Mat::Identity(R.dim(), R.dim());
    op.matrix = pack_matrix(Rf, op.basis);
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose());
    op.gram = Mat::Identity(op.basis.size(), op.basis.size());
    return op;
}

Mat gram_schmidt(const Mat& vectors, const Mat& g) {
    const auto n = vectors.rows();
    if (g.rows() != n || g.cols() != n) throw InputError("gram_schmidt: metric dimension mismatch");
    Mat out = vectors;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        const double original = std::sqrt(std::max(0.0, vectors.col(c).dot(g * vectors.col(c))));
        // Two passes of modified Gram-Schmidt keep the result orthonormal to 1e-15.
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index j = 0; j < c; ++j) out.col(c) -= out.col(j).dot(g * out.col(c)) * out.col(j);
        const double nrm2 = out.col(c).dot(g * out.col(c));
        if (!(nrm2 > 1e-24 * std::max(1e-300, original * original)) || !(nrm2 > 0.0))
            throw DegeneracyError("gram_schmidt: vectors are linearly dependent");
        out.col(c) /= std::sqrt(nrm2);
    }
    return out;
}

std::vector<TangentVector> gram_schmidt(const std::vector<TangentVector>& vectors, const TwoTensor& g) {
    if (vectors.empty()) return {};
    const auto n = g.entries.rows();
    Mat V(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].components.size() != n) throw InputError("gram_schmidt: dimension mismatch");
        V.col(static_cast<Eigen::Index>(i)) = vectors[i].components;
    }
    const Mat E = gram_schmidt(V, g.entries);
    std::vector<TangentVector> out = vectors;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].components = E.col(static_cast<Eigen::Index>(i));
    return out;
}

namespace {

/// F with F^T g F = I.
Mat orthonormal_frame(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw InputError("norm: background metric is not positive definite");
    const Mat L = llt.matrixL();
    return L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(g.rows(), g.cols()));
}

} // namespace

double c0_pointwise(const Mat& h, const Mat& g0) {
    const Mat F = orthonormal_frame(g0);
    const Mat hs = F.transpose() * (0.5 * (h + h.transpose())) * F;
    Eigen::SelfAdjointEigenSolver<Mat> es(hs, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double c1_pointwise(const JetMatrix& h, const JetMatrix& g0) {
    const int n = g0.dim();
    const Christoffel gamma = christoffel(g0);
    const Mat hv = h.value();
    const Mat F = orthonormal_frame(g0.value());

    std::vector<Mat> nabla(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Mat t = h.partial(k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l) t(i, j) -= gamma(l, k, i) * hv(l, j) + gamma(l, k, j) * hv(i, l);
        nabla[static_cast<std::size_t>(k)] = t;
    }
    // T_a = (nabla_{F_a} h) in the orthonormal frame.
    std::vector<Mat> T(static_cast<std::size_t>(n), Mat::Zero(n, n));
    double scale = 0.0;
    for (int a = 0; a < n; ++a) {
        Mat s = Mat::Zero(n, n);
        for (int k = 0; k < n; ++k) s += F(k, a) * nabla[static_cast<std::size_t>(k)];
        s = F.transpose() * (0.5 * (s + s.transpose())) * F;
        T[static_cast<std::size_t>(a)] = s;
        scale += s.squaredNorm();
    }
    if (scale == 0.0) return 0.0;

    auto objective = [&](const Vec& u) {
        double f = 0.0;
        for (const Mat& t : T) {
            const double q = u.dot(t * u);
            f += q * q;
        }
        return f;
    };
    // Shifted power iteration for the quartic form sum_a (u^T T_a u)^2 on the sphere;
    // the shift makes each step non-decreasing.
    const double shift = 3.0 * scale;
    std::vector<Vec> starts;
    for (int i = 0; i < n; ++i) starts.push_back(Vec::Unit(n, i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            starts.push_back((Vec::Unit(n, i) + Vec::Unit(n, j)).normalized());
            starts.push_back((Vec::Unit(n, i) - Vec::Unit(n, j)).normalized());
        }
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    for (int r = 0; r < 4; ++r) {
        Vec u(n);
        for (int i = 0; i < n; ++i) u[i] = normal(rng);
        starts.push_back(u.normalized());
    }
    double best = 0.0;
    for (Vec u : starts) {
        double f = objective(u);
        for (int it = 0; it < 200; ++it) {
            Vec next = shift * u;
            for (const Mat& t : T) next += u.dot(t * u) * (t * u);
            next.normalize();
            const double fn = objective(next);
            const bool converged = fn - f <= 1e-15 * std::max(1.0, f);
            u = next;
            f = std::max(f, fn);
            if (converged) break;
        }
        best = std::max(best, f);
    }
    return std::sqrt(best);
}

namespace {

template <class PointNorm>
NormEstimate sampled_norm(const MatrixField& h, const MetricField& g0, const SampleSet& samples, Exec exec,
                          PointNorm&& point_norm) {
    if (samples.points.empty()) throw InputError("norm: empty sample set");
    if (h.dim != g0.dim) throw InputError("norm: field and metric dimensions differ");
    const auto vals = map_indices<double>(
        samples.points.size(),
        [&](std::size_t i) {
            const Vec& x = samples.points[i];
            return point_norm(h.at(x), g0.at(x));
        },
        exec);
    NormEstimate est;
    est.sample_set = samples.id;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] > vals[worst]) worst = i;
    est.value = vals[worst];
    est.worst_point = samples.points[worst];
    return est;
}

} // namespace

NormEstimate c0_norm(const MatrixField& h, const MetricField& g0, const SampleSet& samples, Exec exec) {
    return sampled_norm(h, g0, samples, exec,
                        [](const JetMatrix& hj, const JetMatrix& gj) { return c0_pointwise(hj.value(), gj.value()); });
}

NormEstimate c1_norm(const MatrixField& h, const MetricField& g0, const SampleSet& samples, Exec exec) {
    return sampled_norm(h, g0, samples, exec, [](const JetMatrix& hj, const JetMatrix& gj) {
        return std::max(c0_pointwise(hj.value(), gj.value()), c1_pointwise(hj, gj));
    });
}

} // namespace ricci_lab
