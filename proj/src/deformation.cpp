#include "ricci_lab/deformation.hpp"

#include "ricci_lab/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace ricci_lab {

namespace {

Jet eval_jet(const JetFunction& f, const Vec& x) {
    const auto jets = coordinate_jets(x);
    return f(std::span<const Jet>(jets.data(), static_cast<std::size_t>(x.size())));
}

JetFunction zero_function() {
    return [](std::span<const Jet>) { return Jet(0.0); };
}

/// g|VxV = (g V)(V^T g V)^{-1}(g V)^T with exact derivatives (V constant).
JetMatrix vertical_block(const JetMatrix& g, const Mat& V) {
    const int n = g.dim();
    const int f = static_cast<int>(V.cols());
    std::array<std::array<Jet, kMaxDim>, kMaxDim> gV{};
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < f; ++a)
            for (int j = 0; j < n; ++j)
                if (V(j, a) != 0.0) gV[i][a] += V(j, a) * g(i, j);
    JetMatrix W(f);
    for (int a = 0; a < f; ++a)
        for (int c = 0; c < f; ++c)
            for (int i = 0; i < n; ++i)
                if (V(i, a) != 0.0) W(a, c) += V(i, a) * gV[i][c];
    const JetMatrix Winv = inverse(W);
    JetMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet s(0.0);
            for (int a = 0; a < f; ++a)
                for (int c = 0; c < f; ++c) s += gV[i][a] * Winv(a, c) * gV[j][c];
            out(i, j) = s;
            out(j, i) = s;
        }
    return out;
}

double max_abs_sec_at(const MetricField& g, const Vec& y) {
    const CurvaturePointData d = riemann(g, y);
    return d.op.eigenvalues().cwiseAbs().maxCoeff();
}

AdmissibilityCheck less(std::string name, std::string relation, double lhs, double rhs) {
    return {std::move(name), std::move(relation), lhs, rhs, lhs < rhs};
}

} // namespace

std::vector<AdmissibilityCheck> check_admissibility(const SubmersionModel& model, const DeformationParams& q) {
    std::vector<AdmissibilityCheck> out;
    const int n = model.geometry.total_dim(), b = model.geometry.base_dim;
    const double eta_max = 0.5 * std::min(1.0, model.base_distance.injectivity_radius);
    out.push_back(less("k_range", "b <= k <= n-1", 0.0, 1.0));
    out.back().lhs = q.k;
    out.back().rhs = n - 1;
    out.back().passed = q.k >= b && q.k <= n - 1;
    out.push_back(less("epsilon", "0 < epsilon", 0.0, q.epsilon));
    if (q.horizontal) {
        out.push_back(less("C_h", "C_h > 1", 1.0, q.C_h));
        out.push_back(less("eps_h", "eps_h < 1", q.eps_h, 1.0));
        out.back().passed = out.back().passed && q.eps_h > 0.0;
        out.push_back(less("eta_h", "eta_h < min(1, inj_B)/2", q.eta_h, eta_max));
        out.back().passed = out.back().passed && q.eta_h > 0.0;
        out.push_back(less("tau_h", "tau_h < eps_h eta_h / (2 C_h)", q.tau_h, q.eps_h * q.eta_h / (2.0 * q.C_h)));
        out.back().passed = out.back().passed && q.tau_h > 0.0;
        const double kt = 0.5 * q.K + max_abs_sec_at(model.geometry.base, model.base_distance.center) + 1.0;
        out.push_back(less("C_h_negativity", "C_h > K/2 + max|sec_B(p)| + 1", kt, q.C_h));
        if (q.vertical) out.push_back(less("supp_omega_h", "3 eta_h < tau_v (supp w_h inside the core of w_v)",
                                           3.0 * q.eta_h, q.tau_v));
    }
    if (q.vertical) {
        out.push_back(less("C_v", "C_v < -1", q.C_v, -1.0));
        out.push_back(less("eps_v", "eps_v < 1", q.eps_v, 1.0));
        out.back().passed = out.back().passed && q.eps_v > 0.0;
        out.push_back(less("eta_v", "eta_v < min(1, inj_B)/2", q.eta_v, eta_max));
        out.back().passed = out.back().passed && q.eta_v > 0.0;
        out.push_back(
            less("tau_v", "tau_v < eps_v eta_v / (2 |C_v|)", q.tau_v, q.eps_v * q.eta_v / (2.0 * std::abs(q.C_v))));
        out.back().passed = out.back().passed && q.tau_v > 0.0;
    }
    if (q.horizontal && q.vertical) {
        const double s = (b - 1) * lambda_hh(q) + lambda_hv(q);
        out.push_back(less("lambda_sum", "(b-1) lambda_hh + lambda_hv > 0, lambda_hh = -6C_h-1, lambda_hv = -C_v-1",
                           0.0, s));
    }
    return out;
}

MetricField conformal_metric(const MetricField& g, const JetFunction& w, const std::string& chart_id) {
    MetricField out;
    out.chart_id = chart_id;
    out.dim = g.dim;
    out.domain = g.domain;
    out.eval = [g, w](const Vec& x) {
        const JetMatrix m = g.at(x);
        const Jet e = exp(2.0 * eval_jet(w, x));
        return e * m;
    };
    return out;
}

MetricField warped_metric(const SubmersionGeometry& geom, const JetFunction& wh, const JetFunction& wv,
                          const std::string& chart_id) {
    MetricField out;
    out.chart_id = chart_id;
    out.dim = geom.total.dim;
    out.domain = geom.total.domain;
    const MetricField g = geom.total;
    const Mat V = geom.vertical;
    out.eval = [g, V, wh, wv](const Vec& x) {
        const JetMatrix m = g.at(x);
        const JetMatrix gv = vertical_block(m, V);
        const JetMatrix gh = m - gv;
        return exp(2.0 * eval_jet(wh, x)) * gh + exp(2.0 * eval_jet(wv, x)) * gv;
    };
    return out;
}

JetFunction pull_back(const JetFunction& wf, const ChartMap& projection, int base_dim) {
    return [wf, projection, base_dim](std::span<const Jet> x) {
        const auto y = projection(x);
        return wf(std::span<const Jet>(y.data(), static_cast<std::size_t>(base_dim)));
    };
}

DeformedMetrics deformation_from_functions(const SubmersionModel& model, const JetFunction& wh_base,
                                           const JetFunction& wv_base) {
    const SubmersionGeometry& geom = model.geometry;
    DeformedMetrics d;
    d.wh_base = wh_base;
    d.wh_total = pull_back(wh_base, geom.projection, geom.base_dim);
    d.wv_total = pull_back(wv_base, geom.projection, geom.base_dim);
    d.g_tilde_B = conformal_metric(geom.base, wh_base, geom.base.chart_id);
    d.g_tilde_M = warped_metric(geom, d.wh_total, d.wv_total, geom.total.chart_id);
    d.g_hat_M = warped_metric(geom, d.wh_total, zero_function(), geom.total.chart_id);
    d.hat = SubmersionGeometry{d.g_hat_M, d.g_tilde_B, geom.projection, geom.base_dim, geom.vertical};
    d.tilde = SubmersionGeometry{d.g_tilde_M, d.g_tilde_B, geom.projection, geom.base_dim, geom.vertical};
    return d;
}

DeformedMetrics build_deformation(const SubmersionModel& model, const DeformationParams& params) {
    DeformationParams q = params;
    if (q.p.size() == 0) q.p = model.base_distance.center;
    if (q.p.size() != model.base_distance.center.size() ||
        (q.p - model.base_distance.center).cwiseAbs().maxCoeff() > 0.0)
        throw InputError("deformation center differs from the model's distance center; rebuild the model at p");
    const auto checks = check_admissibility(model, q);
    std::ostringstream bad;
    for (const auto& c : checks)
        if (!c.passed) bad << "\n  " << c.name << ": " << c.relation << " (lhs " << c.lhs << ", rhs " << c.rhs << ")";
    if (!bad.str().empty()) throw AdmissibilityError("deformation parameters not admissible:" + bad.str());

    std::optional<OmegaFunction> wh, wv;
    if (q.horizontal) wh = build_omega(model.base_distance, q.C_h, q.eps_h, q.eta_h, q.tau_h);
    if (q.vertical) wv = build_omega(model.base_distance, q.C_v, q.eps_v, q.eta_v, q.tau_v);
    DeformedMetrics d = deformation_from_functions(model, wh ? wh->of_jets : zero_function(),
                                                   wv ? wv->of_jets : zero_function());
    d.params = q;
    d.admissibility = checks;
    d.omega_h = std::move(wh);
    d.omega_v = std::move(wv);
    return d;
}

Tensor4 conformal_curvature_predict(const MetricField& g_B, const JetFunction& w, const Vec& y) {
    const CurvaturePointData d = riemann(g_B, y);
    const int n = g_B.dim;
    const Jet wj = eval_jet(w, y);
    const Vec dw = wj.d.head(n);
    const Mat H = hessian(wj, d.gamma, n);
    const double dw2 = dw.dot(d.g_inv * dw);
    const Mat h = 2.0 * H - 2.0 * dw * dw.transpose() + dw2 * d.g;
    return std::exp(2.0 * wj.v) * (d.riemann - kulkarni_nomizu_tensor(h, d.g));
}

double conformal_sectional_predict(const MetricField& g_B, const JetFunction& w, const Vec& y, const Vec& X,
                                   const Vec& Y) {
    const CurvaturePointData d = riemann(g_B, y);
    const int n = g_B.dim;
    const Jet wj = eval_jet(w, y);
    const Vec dw = wj.d.head(n);
    const Mat H = hessian(wj, d.gamma, n);
    const double s = sectional(d, X, Y) - X.dot(H * X) - Y.dot(H * Y) + std::pow(dw.dot(X), 2) +
                     std::pow(dw.dot(Y), 2) - dw.dot(d.g_inv * dw);
    return std::exp(-2.0 * wj.v) * s;
}

const char* gw_family_name(GwFamily f) {
    switch (f) {
    case GwFamily::hhh_v: return "HHH^v";
    case GwFamily::hhh_h: return "HHH^h";
    case GwFamily::hvh_v: return "HVH^v";
    case GwFamily::hvh_h: return "HVH^h";
    case GwFamily::vvh_h: return "VVH^h";
    case GwFamily::vvv_h: return "VVV^h";
    case GwFamily::vvv_v: return "VVV^v";
    }
    return "?";
}

Vec curvature_vector(const CurvaturePointData& d, const Vec& a, const Vec& b, const Vec& c) {
    const int n = static_cast<int>(d.g.rows());
    Vec w(n);
    for (int l = 0; l < n; ++l) w[l] = d.riemann.eval(a, b, c, Vec::Unit(n, l));
    return d.g_inv * w;
}

GwPredictor::GwPredictor(const SubmersionGeometry& hat, const JetFunction& phi_total, const Vec& x)
    : hat_(hat), x_(x), ft_(hat, x), hat_data_(riemann(hat.total, x)), base_data_(riemann(hat.base, hat.project(x))) {
    const int n = hat.total_dim();
    const Jet phi = eval_jet(phi_total, x);
    grad_ = gradient(phi, hat_data_.g);
    hess_ = hessian(phi, hat_data_.gamma, n);
    e2_ = std::exp(2.0 * phi.v);
}

Vec GwPredictor::curvature_vector(const CurvaturePointData& d, const Vec& a, const Vec& b, const Vec& c) const {
    return ricci_lab::curvature_vector(d, a, b, c);
}

void GwPredictor::require(const Vec& v, bool horizontal, const char* what) const {
    const Vec off = horizontal ? Vec(ft_.vertical_projector() * v) : Vec(ft_.horizontal_projector() * v);
    if (std::sqrt(std::max(0.0, ft_.inner(off, off))) > 1e-9 * std::max(1.0, std::sqrt(ft_.inner(v, v))))
        throw InputError(std::string("gw_curvature_predict: argument ") + what + " must be " +
                         (horizontal ? "horizontal" : "vertical"));
}

Vec GwPredictor::hat_component(GwFamily family, const Vec& a, const Vec& b, const Vec& c) const {
    const Vec r = curvature_vector(hat_data_, a, b, c);
    switch (family) {
    case GwFamily::hhh_v:
    case GwFamily::hvh_v:
    case GwFamily::vvv_v: return ft_.vertical_projector() * r;
    default: return ft_.horizontal_projector() * r;
    }
}

Vec GwPredictor::predict(GwFamily family, const Vec& a, const Vec& b, const Vec& c) const {
    const FundamentalTensors& t = ft_;
    const Vec& gp = grad_;
    auto dphi = [&](const Vec& v) { return t.inner(gp, v); };
    switch (family) {
    case GwFamily::hhh_v: {
        require(a, true, "X");
        require(b, true, "Y");
        require(c, true, "Z");
        // [X, Y]^v = 2 A_X Y, so the Z-derivative term enters twice.
        return hat_component(family, a, b, c) + dphi(a) * t.A(b, c) - dphi(b) * t.A(a, c) - 2.0 * dphi(c) * t.A(a, b);
    }
    case GwFamily::hhh_h: {
        require(a, true, "X");
        require(b, true, "Y");
        require(c, true, "Z");
        const Mat& D = t.differential();
        const int bd = hat_.base_dim;
        Vec rb(bd);
        for (int l = 0; l < bd; ++l)
            rb[l] = base_data_.riemann.eval(D * a, D * b, D * c, Vec::Unit(bd, l));
        const Vec lifted = t.lift(base_data_.g_inv * rb);
        return e2_ * hat_component(family, a, b, c) + (1.0 - e2_) * lifted;
    }
    case GwFamily::hvh_v: {
        const Vec &X = a, &T = b, &Y = c;
        require(X, true, "X");
        require(T, false, "T");
        require(Y, true, "Y");
        return hat_component(family, X, T, Y) + (1.0 - e2_) * t.A(X, t.A_star(Y, T)) +
               (Y.dot(hess_ * X) + dphi(X) * dphi(Y)) * T - (dphi(X) * t.S(Y, T) + dphi(Y) * t.S(X, T));
    }
    case GwFamily::hvh_h: {
        const Vec &X = a, &T = b, &Y = c;
        require(X, true, "X");
        require(T, false, "T");
        require(Y, true, "Y");
        return e2_ * (hat_component(family, X, T, Y) - dphi(Y) * t.A_star(X, T) - 2.0 * dphi(X) * t.A_star(Y, T) +
                      t.inner(t.A(X, Y), T) * gp);
    }
    case GwFamily::vvh_h: {
        const Vec &T1 = a, &T2 = b, &X = c;
        require(T1, false, "T1");
        require(T2, false, "T2");
        require(X, true, "X");
        return e2_ * (hat_component(family, T1, T2, X) +
                      (1.0 - e2_) * (t.A_star(t.A_star(X, T1), T2) - t.A_star(t.A_star(X, T2), T1)));
    }
    case GwFamily::vvv_h: {
        require(a, false, "T1");
        require(b, false, "T2");
        require(c, false, "T3");
        return hat_component(family, a, b, c);
    }
    case GwFamily::vvv_v: {
        const Vec &T1 = a, &T2 = b, &T3 = c;
        require(T1, false, "T1");
        require(T2, false, "T2");
        require(T3, false, "T3");
        const Vec s23 = t.sigma(T2, T3), s13 = t.sigma(T1, T3);
        const Vec w = t.inner(T2, T3) * T1 - t.inner(T1, T3) * T2;
        return hat_component(family, T1, T2, T3) + (1.0 - e2_) * (t.S(s23, T1) - t.S(s13, T2)) +
               e2_ * (t.S(gp, w) - t.inner(gp, gp) * w + dphi(s23) * T1 - dphi(s13) * T2);
    }
    }
    throw InputError("unknown component family");
}

Vec gw_direct(GwFamily family, const CurvaturePointData& tilde, const FundamentalTensors& ft, const Vec& a,
              const Vec& b, const Vec& c) {
    const Vec r = curvature_vector(tilde, a, b, c);
    switch (family) {
    case GwFamily::hhh_v:
    case GwFamily::hvh_v:
    case GwFamily::vvv_v: return ft.vertical_projector() * r;
    default: return ft.horizontal_projector() * r;
    }
}

namespace {

double spectral_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()[0];
}

Mat select(const Mat& D, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            D(rows[i], cols[j]);
    return out;
}

/// Extreme of Q(x, v) = sum x_i x_j v_a v_c D[(i,a),(j,c)] over unit x, v by alternating eigenproblems.
double mixed_extreme(const Mat& D, const WedgeBasis& basis, int b, int f, bool minimize) {
    auto idx = [&](int i, int a) { return basis.index(i, b + a); };
    auto q_x = [&](const Vec& v) {
        Mat M = Mat::Zero(b, b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j)
                for (int a = 0; a < f; ++a)
                    for (int c = 0; c < f; ++c) M(i, j) += v[a] * v[c] * D(idx(i, a), idx(j, c));
        return Mat(0.5 * (M + M.transpose()));
    };
    auto q_v = [&](const Vec& x) {
        Mat M = Mat::Zero(f, f);
        for (int a = 0; a < f; ++a)
            for (int c = 0; c < f; ++c)
                for (int i = 0; i < b; ++i)
                    for (int j = 0; j < b; ++j) M(a, c) += x[i] * x[j] * D(idx(i, a), idx(j, c));
        return Mat(0.5 * (M + M.transpose()));
    };
    auto extreme = [&](const Mat& M, Vec& arg) {
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        const Eigen::Index k = minimize ? 0 : M.rows() - 1;
        arg = es.eigenvectors().col(k);
        return es.eigenvalues()[k];
    };
    double best = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (int s = 0; s < f; ++s) {
        Vec v = Vec::Unit(f, s), x;
        double val = 0.0;
        for (int it = 0; it < (f == 1 ? 1 : 50); ++it) {
            val = extreme(q_x(v), x);
            if (f > 1) val = extreme(q_v(x), v);
        }
        best = minimize ? std::min(best, val) : std::max(best, val);
    }
    return best;
}

} // namespace

BlockStats block_stats(const Mat& D, int n, int b) {
    const WedgeBasis basis(n);
    std::vector<int> hh, hv, vv;
    for (int q = 0; q < basis.size(); ++q) {
        const auto [i, j] = basis.pairs()[static_cast<std::size_t>(q)];
        const int h = (i < b) + (j < b);
        (h == 2 ? hh : h == 1 ? hv : vv).push_back(q);
    }
    BlockStats s;
    s.b = b;
    s.n = n;
    std::vector<int> all(static_cast<std::size_t>(basis.size()));
    for (int q = 0; q < basis.size(); ++q) all[static_cast<std::size_t>(q)] = q;
    auto concat = [](std::vector<int> a, const std::vector<int>& c) {
        a.insert(a.end(), c.begin(), c.end());
        return a;
    };
    s.vv_norm = spectral_norm(select(D, all, vv));
    s.hh_leak = spectral_norm(select(D, concat(hv, vv), hh));
    s.hv_leak = spectral_norm(select(D, concat(hh, vv), hv));
    if (!hh.empty()) {
        Eigen::SelfAdjointEigenSolver<Mat> es(select(D, hh, hh));
        s.hh_min = es.eigenvalues()[0];
        s.hh_max = es.eigenvalues()[es.eigenvalues().size() - 1];
    }
    if (!hv.empty()) {
        s.hv_min = mixed_extreme(D, basis, b, n - b, true);
        s.hv_max = mixed_extreme(D, basis, b, n - b, false);
    }
    return s;
}

DeltaR delta_R(const SubmersionModel& model, const DeformedMetrics& deformed, const Vec& x) {
    const FundamentalTensors ft(model.geometry, x);
    DeltaR out;
    out.x = x;
    out.frame = ft.adapted_frame();
    const CurvaturePointData R = riemann(model.geometry.total, x);
    const CurvaturePointData Rt = riemann(deformed.g_tilde_M, x);
    out.matrix = pack_in_frame(Rt.riemann, out.frame, x).matrix - pack_in_frame(R.riemann, out.frame, x).matrix;
    out.blocks = block_stats(out.matrix, model.geometry.total_dim(), model.geometry.base_dim);
    return out;
}

} // namespace ricci_lab
