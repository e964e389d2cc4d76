#pragma once

// Point-wise multilinear algebra: (0,4) tensors, Kulkarni-Nomizu products,
// the wedge basis, curvature operators, Gram-Schmidt, and sampled C0/C1 norms
// of symmetric 2-tensor fields.

#include "ricci_lab/exec.hpp"
#include "ricci_lab/fields.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ricci_lab {

struct TangentVector {
    std::string chart_id;
    Vec base_point;
    Vec components;
};

struct TwoTensor {
    Vec base_point;
    Mat entries;
    bool symmetric = true;
};

/// Dense (0,4) tensor R_abcd, n <= kMaxDim.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), a_(static_cast<std::size_t>(n * n * n * n), 0.0) {}

    int dim() const { return n_; }
    double& operator()(int a, int b, int c, int d) { return a_[index(a, b, c, d)]; }
    double operator()(int a, int b, int c, int d) const { return a_[index(a, b, c, d)]; }

    /// R(u, v, w, z) for coordinate vectors.
    double eval(const Vec& u, const Vec& v, const Vec& w, const Vec& z) const;
    double max_abs() const;

    Tensor4& operator+=(const Tensor4& o);
    Tensor4& operator-=(const Tensor4& o);
    Tensor4& operator*=(double s);

private:
    std::size_t index(int a, int b, int c, int d) const {
        return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
    }
    int n_ = 0;
    std::vector<double> a_;
};

inline Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
inline Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
inline Tensor4 operator*(double s, Tensor4 a) { return a *= s; }

/// (alpha o beta)(v1, v2, v3, v4); g o g is the curvature tensor of curvature one.
double kulkarni_nomizu(const Mat& alpha, const Mat& beta, const Vec& v1, const Vec& v2,
                       const Vec& v3, const Vec& v4);
double kulkarni_nomizu(const TwoTensor& alpha, const TwoTensor& beta, const TangentVector& v1,
                       const TangentVector& v2, const TangentVector& v3, const TangentVector& v4);
Tensor4 kulkarni_nomizu_tensor(const Mat& alpha, const Mat& beta);

/// Largest violation of the algebraic curvature symmetries (including first
/// Bianchi), divided by max(1, max|R|).
double symmetry_residual(const Tensor4& R);

/// Lexicographic basis {(i,j) : i < j} of the second exterior power.
class WedgeBasis {
public:
    WedgeBasis() = default;
    explicit WedgeBasis(int n);

    int dim() const { return n_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    /// Position of (i, j), i < j.
    int index(int i, int j) const;

    /// Coordinates of u ^ v: w_(ij) = u_i v_j - u_j v_i.
    Vec wedge(const Vec& u, const Vec& v) const;

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> pairs_;
};

/// Self-adjoint form on bivectors. `matrix` holds B(w1, w2) and `gram` the inner
/// product of bivectors, both on the lexicographic basis built from the
/// columns of `frame` (identity frame means chart coordinates); `vector_metric`
/// is the metric on vectors in those coordinates. The operator itself is
/// gram^{-1} matrix; B(u^v, u^v) = R(u, v, v, u).
struct CurvatureOperator {
    Vec base_point;
    WedgeBasis basis;
    Mat frame;
    Mat vector_metric;
    Mat matrix;
    Mat gram;

    double form(const Vec& w1, const Vec& w2) const { return w1.dot(matrix * w2); }
    /// B(u^v, u^v) for vectors in frame coordinates.
    double plane_form(const Vec& u, const Vec& v) const;
    /// Eigenvalues of the operator (generalized problem matrix w = mu gram w), ascending.
    Vec eigenvalues() const;
    /// Largest |B(w, w)| / gram(w, w).
    double operator_norm() const;
    double self_adjoint_residual() const;
};

/// Bivector Gram matrix of g on the lexicographic basis.
Mat wedge_gram(const Mat& g, const WedgeBasis& basis);

/// Packs a (0,4) tensor into its curvature operator on the coordinate wedge basis.
/// Throws ConsistencyError when the symmetry residual exceeds `tol`.
CurvatureOperator pack_curvature_operator(const Tensor4& R, const Mat& g, const Vec& base_point,
                                          double tol = 1e-8);

/// Packs R expressed on the g-orthonormal frame E (columns): entries R(E_i,E_j,E_l,E_k),
/// identity Gram.
CurvatureOperator pack_in_frame(const Tensor4& R, const Mat& E, const Vec& base_point,
                                double tol = 1e-8);

/// Rewrites R in the frame E: R'(i,j,k,l) = R(E_i, E_j, E_k, E_l).
Tensor4 change_frame(const Tensor4& R, const Mat& E);

/// g-orthonormalizes the columns of `vectors` (same span, same order).
/// Throws DegeneracyError on rank deficiency.
Mat gram_schmidt(const Mat& vectors, const Mat& g);
std::vector<TangentVector> gram_schmidt(const std::vector<TangentVector>& vectors, const TwoTensor& g);

/// Result of a sampled norm: a lower bound for the true sup-norm.
struct NormEstimate {
    double value = 0.0;
    std::string sample_set;
    Vec worst_point;
};

/// max |h(u,u)| / g0(u,u) at one point (generalized eigenvalues of (h, g0)).
double c0_pointwise(const Mat& h, const Mat& g0);

/// max over unit u, w of |(nabla_w h)(u,u)| with the Levi-Civita connection of g0,
/// from jets of h and g0 at one point. Multistart ascent, so a lower bound.
double c1_pointwise(const JetMatrix& h, const JetMatrix& g0);

NormEstimate c0_norm(const MatrixField& h, const MetricField& g0, const SampleSet& samples,
                     Exec exec = Exec::parallel);
/// max of the C0 term and the covariant-derivative term over the samples.
NormEstimate c1_norm(const MatrixField& h, const MetricField& g0, const SampleSet& samples,
                     Exec exec = Exec::parallel);

} // namespace ricci_lab
