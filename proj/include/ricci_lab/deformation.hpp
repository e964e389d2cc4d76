#pragma once

// Warped deformations of a Riemannian submersion pi: (M, g_M) -> (B, g_B):
//
//   g~_B = e^{2 w_h} g_B,
//   g~_M = e^{2 w~_h} g_M|HxH + e^{2 w~_v} g_M|VxV,
//   g^_M = e^{2 w~_h} g_M|HxH + g_M|VxV,
//
// with w~ = w o pi, together with closed-form predictions of their curvature
// (conformal change on the base, vertical warping on the total space) and the
// operator difference DR = R~_M - R_M in a g_M-orthonormal adapted frame.

#include "ricci_lab/metric_calculus.hpp"
#include "ricci_lab/profile_builder.hpp"
#include "ricci_lab/submersion_models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ricci_lab {

using JetFunction = std::function<Jet(std::span<const Jet>)>;

struct DeformationParams {
    Vec p;            // base point, chart coordinates (defaults to the chart origin)
    double K = 1.0;   // target: sec(g~_B) at p < -K
    double C_h = 6.0;
    double C_v = -56.0;
    double eps_h = 0.1;
    double eps_v = 0.1;
    double eta_h = 0.0;
    double eta_v = 0.0;
    double tau_h = 0.0;
    double tau_v = 0.0;
    /// Allowed loss in ric_k and C^1 budget for the metric change.
    double epsilon = 0.5;
    int k = 2;
    /// Switches for the identity / one-sided deformations.
    bool horizontal = true;
    bool vertical = true;
};

/// One admissibility inequality lhs < rhs (or lhs > rhs), evaluated.
struct AdmissibilityCheck {
    std::string name;
    std::string relation;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

/// Every inequality the parameters must satisfy, given the model.
/// lambda_hh = -6 C_h - 1 and lambda_hv = -C_v - 1.
std::vector<AdmissibilityCheck> check_admissibility(const SubmersionModel& model, const DeformationParams& params);

inline double lambda_hh(const DeformationParams& p) { return -6.0 * p.C_h - 1.0; }
inline double lambda_hv(const DeformationParams& p) { return -p.C_v - 1.0; }

/// e^{2 w} g for a function w on the same chart.
MetricField conformal_metric(const MetricField& g, const JetFunction& w, const std::string& chart_id);

/// e^{2 wh} g|HxH + e^{2 wv} g|VxV on the total chart (wh, wv functions of total coordinates).
MetricField warped_metric(const SubmersionGeometry& geom, const JetFunction& wh, const JetFunction& wv,
                          const std::string& chart_id);

/// wf o pi as a function of total coordinates.
JetFunction pull_back(const JetFunction& wf, const ChartMap& projection, int base_dim);

struct DeformedMetrics {
    DeformationParams params;
    std::vector<AdmissibilityCheck> admissibility;
    std::optional<OmegaFunction> omega_h;
    std::optional<OmegaFunction> omega_v;
    /// w_h on the base; w~_h, w~_v on the total space (zero when switched off).
    JetFunction wh_base;
    JetFunction wh_total;
    JetFunction wv_total;
    MetricField g_tilde_B;
    MetricField g_tilde_M;
    MetricField g_hat_M;
    /// (g_hat_M, g_tilde_B) and (g_tilde_M, g_tilde_B) as submersions with the model's vertical span.
    SubmersionGeometry hat;
    SubmersionGeometry tilde;
};

/// Checks admissibility (AdmissibilityError listing every violated inequality), builds both
/// omegas (ConstructionError on a failed certificate) and assembles the metrics.
DeformedMetrics build_deformation(const SubmersionModel& model, const DeformationParams& params);

/// Assembles the metrics from given base functions without any admissibility gate.
DeformedMetrics deformation_from_functions(const SubmersionModel& model, const JetFunction& wh_base,
                                           const JetFunction& wv_base);

/// e^{2w}(R - (2 Hess w - 2 dw (x) dw + |dw|^2 g) o g) at y: the (0,4) curvature of e^{2w} g.
Tensor4 conformal_curvature_predict(const MetricField& g_B, const JetFunction& w, const Vec& y);

/// Sectional curvature of e^{2w} g at y on a g-orthonormal pair.
double conformal_sectional_predict(const MetricField& g_B, const JetFunction& w, const Vec& y, const Vec& X,
                                   const Vec& Y);

/// The seven component families of the curvature of a vertically warped submersion metric.
enum class GwFamily { hhh_v, hhh_h, hvh_v, hvh_h, vvh_h, vvv_h, vvv_v };
const char* gw_family_name(GwFamily f);
inline constexpr GwFamily kGwFamilies[] = {GwFamily::hhh_v, GwFamily::hhh_h, GwFamily::hvh_v, GwFamily::hvh_h,
                                           GwFamily::vvh_h, GwFamily::vvv_h, GwFamily::vvv_v};

/// Predicts R~(a, b)c for g~ = g^|HxH + e^{2 phi~} g^|VxV from quantities of the submersion
/// (g^_M, g^_B) at one point: R^, R^_B, A^, A^*, S^, sigma^, grad^ phi~ and Hess^ phi~.
class GwPredictor {
public:
    GwPredictor(const SubmersionGeometry& hat, const JetFunction& phi_total, const Vec& x);

    /// Arguments in the family's order: (X,Y,Z), (X,T,Y), (T1,T2,X) or (T1,T2,T3).
    /// Throws InputError if an argument is not purely horizontal / vertical as required.
    Vec predict(GwFamily family, const Vec& a, const Vec& b, const Vec& c) const;

    /// The same component of the curvature of g^ itself (the phi = 0 value).
    Vec hat_component(GwFamily family, const Vec& a, const Vec& b, const Vec& c) const;

    const FundamentalTensors& tensors() const { return ft_; }

private:
    Vec curvature_vector(const CurvaturePointData& d, const Vec& a, const Vec& b, const Vec& c) const;
    void require(const Vec& v, bool horizontal, const char* what) const;

    SubmersionGeometry hat_;
    Vec x_;
    FundamentalTensors ft_;
    CurvaturePointData hat_data_;
    CurvaturePointData base_data_;
    Vec grad_;
    Mat hess_;
    double e2_ = 1.0;
};

/// R(a, b)c as a coordinate vector from (0,4) data.
Vec curvature_vector(const CurvaturePointData& d, const Vec& a, const Vec& b, const Vec& c);

/// R~(a,b)c split by family: the h or v part of the directly computed vector.
Vec gw_direct(GwFamily family, const CurvaturePointData& tilde, const FundamentalTensors& ft, const Vec& a,
              const Vec& b, const Vec& c);

/// Block statistics of a self-adjoint form on bivectors written in an orthonormal adapted
/// frame (first b vectors horizontal).
struct BlockStats {
    int b = 0;
    int n = 0;
    double vv_norm = 0.0;   // sup |D(U ^ V)| over unit vertical bivectors
    double hh_leak = 0.0;   // sup |D(X ^ Y)^{HV + VV}|
    double hv_leak = 0.0;   // sup |D(X ^ V)^{HH + VV}|
    double hh_min = 0.0;    // min g(D(X^Y), X^Y) over orthonormal horizontal pairs
    double hv_min = 0.0;    // min g(D(X^V), X^V) over unit X in H, V in V
    double hh_max = 0.0;
    double hv_max = 0.0;
};

BlockStats block_stats(const Mat& D, int n, int b);

struct DeltaR {
    Vec x;
    /// g_M-orthonormal adapted frame (columns; first b horizontal).
    Mat frame;
    /// (R~ - R)(E_i, E_j, E_l, E_k) on the lexicographic wedge basis of the frame.
    Mat matrix;
    BlockStats blocks;
};

/// DR at x on the g_M-orthonormal adapted frame. Both tensors are evaluated on the same
/// frame, so the block norms refer to the fixed g_M inner product.
DeltaR delta_R(const SubmersionModel& model, const DeformedMetrics& deformed, const Vec& x);

} // namespace ricci_lab
