#pragma once

// Levi-Civita calculus on chart-presented metrics.
//
// Conventions: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
// R(X,Y,Z,W) = g(R(X,Y)Z, W), so sec(u,v) = R(u,v,v,u) / |u ^ v|^2 and
// Ric(Y,Z) = tr(X -> R(X,Y)Z).

#include "ricci_lab/fields.hpp"
#include "ricci_lab/frame_search.hpp"
#include "ricci_lab/tensor_core.hpp"

#include <vector>

namespace ricci_lab {

/// Gamma^k_ij stored as (k, i, j).
class Christoffel {
public:
    Christoffel() = default;
    explicit Christoffel(int n) : n_(n), a_(static_cast<std::size_t>(n * n * n), 0.0) {}

    int dim() const { return n_; }
    double& operator()(int k, int i, int j) { return a_[static_cast<std::size_t>((k * n_ + i) * n_ + j)]; }
    double operator()(int k, int i, int j) const { return a_[static_cast<std::size_t>((k * n_ + i) * n_ + j)]; }

private:
    int n_ = 0;
    std::vector<double> a_;
};

struct CurvaturePointData {
    Vec x;
    Mat g;
    Mat g_inv;
    Christoffel gamma;
    Tensor4 riemann;
    Mat ricci;
    CurvatureOperator op;
};

Christoffel christoffel(const JetMatrix& g);
Christoffel christoffel(const MetricField& g, const Vec& x);

/// Full curvature data at x. Throws DegeneracyError for a singular metric and
/// ConsistencyError if the computed tensor misses its symmetries.
CurvaturePointData curvature_from_jets(const JetMatrix& g, const Vec& x);
CurvaturePointData riemann(const MetricField& g, const Vec& x);

/// max |nabla_k g_ij| recomputed from the Christoffel symbols.
double metric_compatibility_residual(const JetMatrix& g, const Christoffel& gamma);

/// |u ^ v|^2 below this is a degenerate plane.
inline constexpr double kDegeneratePlane = 1e-14;

double sectional(const CurvaturePointData& data, const Vec& u, const Vec& v);
double sectional(const CurvaturePointData& data, const TangentVector& u, const TangentVector& v);

/// grad f with g(grad f, y) = df(y).
Vec gradient(const Jet& f, const Mat& g);
/// Hess f(X, Y) = X(Y f) - (nabla_X Y) f, as a symmetric matrix.
Mat hessian(const Jet& f, const Christoffel& gamma, int n);

Vec gradient(const ScalarField& f, const MetricField& g, const Vec& x);
Mat hessian(const ScalarField& f, const MetricField& g, const Vec& x);

struct RicKResult {
    double value = 0.0;
    /// Columns u, v_1, ..., v_k (chart coordinates, g-orthonormal).
    Mat frame;
};

/// Approximate min over g-orthonormal (k+1)-frames of sum_i sec(u, v_i).
/// For k = n-1 the minimum is the smallest Ricci eigenvalue and is exact.
RicKResult ric_k_min(const CurvaturePointData& data, int k, const FrameSearchConfig& cfg = {});

} // namespace ricci_lab
