#pragma once

// Built-in Riemannian submersions pi: M -> B on single charts, their horizontal
// lifts, and the fundamental tensors A, A*, S, sigma.
//
// In every built-in chart the fibers are coordinate lines or planes, so the
// vertical distribution is spanned by constant coordinate fields and pi is a
// coordinate projection (up to a constant linear map).

#include "ricci_lab/fields.hpp"
#include "ricci_lab/metric_calculus.hpp"
#include "ricci_lab/profile_builder.hpp"
#include "ricci_lab/tensor_core.hpp"

#include <random>
#include <string>
#include <vector>

namespace ricci_lab {

/// Metric data of a submersion: total and base metrics, projection, vertical span.
struct SubmersionGeometry {
    MetricField total;
    MetricField base;
    ChartMap projection;
    int base_dim = 0;
    /// Columns span the vertical distribution (constant coordinate fields).
    Mat vertical;

    int total_dim() const { return total.dim; }
    int fiber_dim() const { return static_cast<int>(vertical.cols()); }
    Vec project(const Vec& x) const;
};

struct SubmersionModel {
    std::string name;
    SubmersionGeometry geometry;
    /// Base with closed-form distance from the deformation center p.
    DistanceModel base_distance;
    double total_injectivity_radius = 0.0;
    /// A point of M over the base point y; `fiber` parametrizes the fiber.
    std::function<Vec(const Vec& y, const Vec& fiber)> point_over;
    /// Box inside the total chart used for global random samples.
    ChartBox sample_box;
};

/// Registry: "hopf", "berger:<t>", "product:s2xs2", "torus". `center` is p on the
/// base chart (defaults to the chart origin).
SubmersionModel make_model(const std::string& name, const Vec& center = Vec());
std::vector<std::string> model_names();

/// Base-only models for the conformal suite: "s2half" (base of the Hopf map),
/// "s2" (unit sphere), "flat".
DistanceModel make_base_model(const std::string& name, const Vec& center = Vec());

/// Per-point first-order data of the submersion: projectors, horizontal lifts of
/// base coordinate fields with their derivatives, and the Levi-Civita connection.
class FundamentalTensors {
public:
    FundamentalTensors(const SubmersionGeometry& geom, const Vec& x);

    const Vec& point() const { return x_; }
    const Mat& metric() const { return g_; }
    const Christoffel& christoffel() const { return gamma_; }
    const Mat& vertical_projector() const { return pv_; }
    const Mat& horizontal_projector() const { return ph_; }
    /// d pi at x (b x n).
    const Mat& differential() const { return dpi_; }
    /// Horizontal lifts of the base coordinate fields (n x b).
    const Mat& lifts() const { return lifts_; }

    Vec lift(const Vec& base_vector) const { return lifts_ * base_vector; }
    double inner(const Vec& a, const Vec& b) const { return a.dot(g_ * b); }
    /// nabla_X Y for the extension sum_k c_k L_k of Y, where c = dpi Y is constant.
    Vec nabla_basic(const Vec& X, const Vec& Y) const;
    /// nabla_X T for the constant-coefficient extension of T.
    Vec nabla_constant(const Vec& X, const Vec& T) const;

    Vec A(const Vec& X, const Vec& Y) const;
    Vec A_star(const Vec& X, const Vec& T) const;
    Vec S(const Vec& X, const Vec& T) const;
    Vec sigma(const Vec& T1, const Vec& T2) const;
    /// 1/2 [X, Y]^v for the basic extensions of X, Y.
    Vec half_bracket_vertical(const Vec& X, const Vec& Y) const;

    /// g-orthonormal frame: first b columns horizontal, then vertical.
    Mat adapted_frame() const;
    bool is_adapted(const Mat& frame, double tol = 1e-9) const;

private:
    int n_ = 0;
    int b_ = 0;
    Vec x_;
    Mat g_;
    Christoffel gamma_;
    Mat pv_, ph_, dpi_, lifts_;
    /// dlift_[m] = d_m of the lift matrix.
    std::vector<Mat> dlift_;
    Mat vertical_;
};

/// Validates the frame and returns the tensors (InputError if the frame is not adapted).
FundamentalTensors fundamental_tensors(const SubmersionGeometry& geom, const Vec& x, const Mat& frame);

/// Horizontal lift of a base tangent vector to x; InputError if pi(x) differs from v's base point.
TangentVector horizontal_lift(const SubmersionGeometry& geom, const TangentVector& v, const Vec& x);

struct SubmersionResiduals {
    double projector = 0.0;   // |dpi Pv|, |Pv^2 - Pv|, |g Pv - (g Pv)^T|
    double isometry = 0.0;    // |g(L_k, L_l) - g_B(e_k, e_l)|
    double a_antisymmetry = 0.0;
    double a_duality = 0.0;
    double sigma_symmetry = 0.0;
    double bracket = 0.0;     // |A - 1/2 [.,.]^v|
};

SubmersionResiduals submersion_residuals(const SubmersionGeometry& geom, const Vec& x);

/// |sec_B(u,v) - sec_M(lift u, lift v) - 3 |A_u v|^2| for a g_B-orthonormal pair at pi(x).
struct OneillCheck {
    double sec_base = 0.0;
    double sec_total = 0.0;
    double a_squared = 0.0;
    double residual = 0.0;
};
OneillCheck verify_oneill(const SubmersionGeometry& geom, const Vec& x, const Vec& u, const Vec& v);

/// For each sampled orthonormal (k+1)-frame on B at pi(x): sum sec_B - sum sec_M(lifts)
/// compared with 3 sum |A|^2. Returns the smallest gap and the largest deviation.
struct LiftedSumCheck {
    bool holds = false;
    double min_gap = 0.0;
    double max_deviation = 0.0;
    int frames = 0;
};
LiftedSumCheck verify_lifted_sum(const SubmersionGeometry& geom, const Vec& x, int k, int trials,
                                std::uint64_t seed);

/// Random g_B-orthonormal pair at a base point.
std::pair<Vec, Vec> random_orthonormal_pair(const Mat& g, std::mt19937_64& rng);

} // namespace ricci_lab
