#include "ricci_lab/submersion_models.hpp"

#include "ricci_lab/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

namespace ricci_lab {

Vec SubmersionGeometry::project(const Vec& x) const {
    const auto jets = coordinate_jets(x);
    const auto y = projection(std::span<const Jet>(jets.data(), static_cast<std::size_t>(x.size())));
    Vec out(base_dim);
    for (int i = 0; i < base_dim; ++i) out[i] = y[static_cast<std::size_t>(i)].v;
    return out;
}

namespace {

ChartBox make_box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
    ChartBox b;
    b.lower = Eigen::Map<const Vec>(lo.begin(), static_cast<Eigen::Index>(lo.size()));
    b.upper = Eigen::Map<const Vec>(hi.begin(), static_cast<Eigen::Index>(hi.size()));
    return b;
}

/// asin(sqrt z)^2 with two derivatives in z.
Eval3 arcsin_sqrt_squared(double z) {
    if (z < 0.1) {
        // sum_{n>=1} c_n z^n, c_n = 4^n / (2 n^2 binom(2n, n)); c_{n+1}/c_n = 2n^2 / ((n+1)(2n+1)).
        Eval3 e;
        double c = 1.0;
        double zm2 = 0.0, zm1 = 1.0;  // z^{n-2}, z^{n-1}
        for (int n = 1; n <= 80; ++n) {
            e.v += c * zm1 * z;
            e.d1 += n * c * zm1;
            e.d2 += n * (n - 1) * c * zm2;
            zm2 = zm1;
            zm1 *= z;
            c *= 2.0 * n * n / ((n + 1.0) * (2.0 * n + 1.0));
            if (n > 4 && c * zm2 < 1e-18) break;
        }
        return e;
    }
    const double a = std::asin(std::sqrt(z));
    const double q = z * (1.0 - z);
    return {a * a, a / std::sqrt(q), 1.0 / (2.0 * q) - a * (1.0 - 2.0 * z) / (2.0 * q * std::sqrt(q))};
}

/// Squared distance on the sphere of radius r in (latitude, longitude) from (x0, y0).
Jet sphere_dist2(const Jet& x, const Jet& y, double x0, double y0, double r) {
    const Jet sx = sin(0.5 * (x - Jet(x0)));
    const Jet sy = sin(0.5 * (y - Jet(y0)));
    const Jet z = sx * sx + std::cos(x0) * cos(x) * sy * sy;
    const Eval3 G = arcsin_sqrt_squared(z.v);
    return 4.0 * r * r * chain(z, G.v, G.d1, G.d2);
}

/// Metric r^2 (dx^2 + cos^2 x dy^2) on two coordinates starting at `offset`.
void sphere_block(JetMatrix& g, std::span<const Jet> x, int offset, double r) {
    g(offset, offset) = Jet(r * r);
    g(offset + 1, offset + 1) = r * r * square(cos(x[static_cast<std::size_t>(offset)]));
}

Vec sphere_point_at(double rho, const Vec& dir, double x0, double y0, double r) {
    const double phi = rho / r;
    if (phi < 1e-6) {
        return Eigen::Vector2d(x0 + phi * dir[0], y0 + phi * dir[1] / std::cos(x0));
    }
    const Eigen::Vector3d P(std::cos(x0) * std::cos(y0), std::cos(x0) * std::sin(y0), std::sin(x0));
    const Eigen::Vector3d e_lat(-std::sin(x0) * std::cos(y0), -std::sin(x0) * std::sin(y0), std::cos(x0));
    const Eigen::Vector3d e_lon(-std::sin(y0), std::cos(y0), 0.0);
    const Eigen::Vector3d q = std::cos(phi) * P + std::sin(phi) * (dir[0] * e_lat + dir[1] * e_lon);
    return Eigen::Vector2d(std::asin(std::clamp(q[2], -1.0, 1.0)), std::atan2(q[1], q[0]));
}

DistanceModel sphere_distance_model(std::string name, double r, const Vec& center, ChartBox box) {
    DistanceModel m;
    m.name = std::move(name);
    m.center = center;
    m.metric = make_matrix_field(m.name, std::move(box), [r](std::span<const Jet> x) {
        JetMatrix g(2);
        sphere_block(g, x, 0, r);
        return g;
    });
    const double x0 = center[0], y0 = center[1];
    m.dist2 = [x0, y0, r](std::span<const Jet> x) { return sphere_dist2(x[0], x[1], x0, y0, r); };
    m.injectivity_radius = std::numbers::pi * r;
    m.tangential_hessian_error = [r](double d) { return std::cos(d / r) / (r * std::sin(d / r)) - 1.0 / d; };
    m.point_at = [x0, y0, r](double rho, const Vec& dir) { return sphere_point_at(rho, dir, x0, y0, r); };
    return m;
}

DistanceModel flat_distance_model(std::string name, const Vec& center, ChartBox box, double inj) {
    DistanceModel m;
    m.name = std::move(name);
    m.center = center;
    m.metric = make_matrix_field(m.name, std::move(box), [](std::span<const Jet>) {
        JetMatrix g(2);
        g(0, 0) = Jet(1.0);
        g(1, 1) = Jet(1.0);
        return g;
    });
    const double x0 = center[0], y0 = center[1];
    m.dist2 = [x0, y0](std::span<const Jet> x) { return square(x[0] - Jet(x0)) + square(x[1] - Jet(y0)); };
    m.injectivity_radius = inj;
    m.tangential_hessian_error = [](double) { return 0.0; };
    m.point_at = [x0, y0](double rho, const Vec& dir) { return Eigen::Vector2d(x0 + rho * dir[0], y0 + rho * dir[1]); };
    return m;
}

Vec default_center(const Vec& center) { return center.size() == 0 ? Vec::Zero(2) : center; }

void check_center(const Vec& c, const ChartBox& box) {
    if (c.size() != 2) throw InputError("deformation center must have two coordinates");
    if (!box.contains(c)) throw InputError("deformation center lies outside the base chart");
}

/// Hopf chart (a, b, s) with eta = pi/4 + a, xi1 = s + b/2, xi2 = s - b/2 on S^3; the
/// Berger deformation scales the fiber length by t.
SubmersionModel hopf_like(const std::string& name, double t, const Vec& center_in) {
    const Vec center = default_center(center_in);
    const ChartBox base_box = make_box({-1.4, -3.2}, {1.4, 3.2});
    check_center(center, base_box);
    SubmersionModel m;
    m.name = name;
    const double t2m1 = t * t - 1.0;
    m.geometry.total = make_matrix_field(name, make_box({-0.7, -3.2, -3.2}, {0.7, 3.2, 3.2}),
                                         [t2m1](std::span<const Jet> x) {
                                             JetMatrix g(3);
                                             const Jet s2a = sin(2.0 * x[0]);
                                             const Jet off = -0.5 * s2a;
                                             g(0, 0) = Jet(1.0);
                                             g(1, 1) = Jet(0.25) + t2m1 * off * off;
                                             g(1, 2) = g(2, 1) = off * (t2m1 + 1.0);
                                             g(2, 2) = Jet(1.0 + t2m1);
                                             return g;
                                         });
    m.base_distance = sphere_distance_model("s2half", 0.5, center, base_box);
    m.geometry.base = m.base_distance.metric;
    m.geometry.base_dim = 2;
    m.geometry.projection = [](std::span<const Jet> x) {
        std::array<Jet, kMaxDim> y{};
        y[0] = 2.0 * x[0];
        y[1] = x[1];
        return y;
    };
    m.geometry.vertical = Vec::Unit(3, 2);
    m.total_injectivity_radius = std::numbers::pi * std::min(1.0, t);
    m.point_over = [](const Vec& y, const Vec& fiber) { return Eigen::Vector3d(0.5 * y[0], y[1], fiber[0]); };
    m.sample_box = make_box({-0.6, -3.0, -3.0}, {0.6, 3.0, 3.0});
    return m;
}

SubmersionModel product_s2xs2(const Vec& center_in) {
    const Vec center = default_center(center_in);
    const ChartBox base_box = make_box({-1.3, -3.2}, {1.3, 3.2});
    check_center(center, base_box);
    SubmersionModel m;
    m.name = "product:s2xs2";
    m.geometry.total = make_matrix_field(m.name, make_box({-1.3, -3.2, -1.3, -3.2}, {1.3, 3.2, 1.3, 3.2}),
                                         [](std::span<const Jet> x) {
                                             JetMatrix g(4);
                                             sphere_block(g, x, 0, 1.0);
                                             sphere_block(g, x, 2, 1.0);
                                             return g;
                                         });
    m.base_distance = sphere_distance_model("s2", 1.0, center, base_box);
    m.geometry.base = m.base_distance.metric;
    m.geometry.base_dim = 2;
    m.geometry.projection = [](std::span<const Jet> x) {
        std::array<Jet, kMaxDim> y{};
        y[0] = x[0];
        y[1] = x[1];
        return y;
    };
    Mat V = Mat::Zero(4, 2);
    V(2, 0) = 1.0;
    V(3, 1) = 1.0;
    m.geometry.vertical = V;
    m.total_injectivity_radius = std::numbers::pi;
    m.point_over = [](const Vec& y, const Vec& fiber) {
        return Eigen::Vector4d(y[0], y[1], fiber[0], fiber.size() > 1 ? fiber[1] : 0.0);
    };
    m.sample_box = make_box({-1.1, -3.0, -1.1, -3.0}, {1.1, 3.0, 1.1, 3.0});
    return m;
}

/// Heisenberg nilmanifold dx^2 + dy^2 + (dz - x dy)^2 over the flat torus (period 2 pi).
SubmersionModel torus_bundle(const Vec& center_in) {
    const Vec center = default_center(center_in);
    const ChartBox base_box = make_box({-3.2, -3.2}, {3.2, 3.2});
    check_center(center, base_box);
    SubmersionModel m;
    m.name = "torus";
    m.geometry.total = make_matrix_field(m.name, make_box({-3.2, -3.2, -3.2}, {3.2, 3.2, 3.2}),
                                         [](std::span<const Jet> x) {
                                             JetMatrix g(3);
                                             g(0, 0) = Jet(1.0);
                                             g(1, 1) = 1.0 + x[0] * x[0];
                                             g(1, 2) = g(2, 1) = -x[0];
                                             g(2, 2) = Jet(1.0);
                                             return g;
                                         });
    m.base_distance = flat_distance_model("flat-torus", center, base_box, std::numbers::pi);
    m.geometry.base = m.base_distance.metric;
    m.geometry.base_dim = 2;
    m.geometry.projection = [](std::span<const Jet> x) {
        std::array<Jet, kMaxDim> y{};
        y[0] = x[0];
        y[1] = x[1];
        return y;
    };
    m.geometry.vertical = Vec::Unit(3, 2);
    m.total_injectivity_radius = std::numbers::pi;
    m.point_over = [](const Vec& y, const Vec& fiber) { return Eigen::Vector3d(y[0], y[1], fiber[0]); };
    m.sample_box = make_box({-3.0, -3.0, -3.0}, {3.0, 3.0, 3.0});
    return m;
}

} // namespace

SubmersionModel make_model(const std::string& name, const Vec& center) {
    if (name == "hopf") return hopf_like("hopf", 1.0, center);
    if (name.rfind("berger:", 0) == 0) {
        double t = 0.0;
        try {
            std::size_t used = 0;
            t = std::stod(name.substr(7), &used);
            if (used != name.size() - 7) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError("berger model needs a numeric fiber scale, e.g. berger:0.5");
        }
        if (!(t > 0.0)) throw InputError("berger fiber scale must be positive");
        return hopf_like(name, t, center);
    }
    if (name == "product:s2xs2") return product_s2xs2(center);
    if (name == "torus") return torus_bundle(center);
    throw InputError("unknown model '" + name + "' (known: hopf, berger:<t>, product:s2xs2, torus)");
}

std::vector<std::string> model_names() { return {"hopf", "berger:<t>", "product:s2xs2", "torus"}; }

DistanceModel make_base_model(const std::string& name, const Vec& center) {
    const Vec c = default_center(center);
    if (name == "s2half") return sphere_distance_model("s2half", 0.5, c, make_box({-1.4, -3.2}, {1.4, 3.2}));
    if (name == "s2") return sphere_distance_model("s2", 1.0, c, make_box({-1.3, -3.2}, {1.3, 3.2}));
    if (name == "flat") return flat_distance_model("flat", c, make_box({-3.2, -3.2}, {3.2, 3.2}), std::numbers::pi);
    throw InputError("unknown base model '" + name + "' (known: s2half, s2, flat)");
}

FundamentalTensors::FundamentalTensors(const SubmersionGeometry& geom, const Vec& x)
    : n_(geom.total_dim()), b_(geom.base_dim), x_(x), vertical_(geom.vertical) {
    const JetMatrix gj = geom.total.at(x);
    g_ = gj.value();
    gamma_ = ricci_lab::christoffel(gj);

    const auto xj = coordinate_jets(x);
    const auto pj = geom.projection(std::span<const Jet>(xj.data(), static_cast<std::size_t>(n_)));
    dpi_ = Mat(b_, n_);
    std::vector<Mat> ddpi(static_cast<std::size_t>(n_), Mat(b_, n_));
    for (int i = 0; i < b_; ++i)
        for (int k = 0; k < n_; ++k) {
            dpi_(i, k) = pj[static_cast<std::size_t>(i)].d[k];
            for (int m = 0; m < n_; ++m) ddpi[static_cast<std::size_t>(m)](i, k) = pj[static_cast<std::size_t>(i)].h(k, m);
        }

    const Mat ginv = g_.inverse();
    const Mat M = dpi_ * ginv * dpi_.transpose();
    const Mat Minv = M.inverse();
    lifts_ = ginv * dpi_.transpose() * Minv;
    dlift_.resize(static_cast<std::size_t>(n_));
    for (int m = 0; m < n_; ++m) {
        const Mat& dD = ddpi[static_cast<std::size_t>(m)];
        const Mat dGinv = -ginv * gj.partial(m) * ginv;
        const Mat dM = dD * ginv * dpi_.transpose() + dpi_ * dGinv * dpi_.transpose() + dpi_ * ginv * dD.transpose();
        const Mat dMinv = -Minv * dM * Minv;
        dlift_[static_cast<std::size_t>(m)] =
            dGinv * dpi_.transpose() * Minv + ginv * dD.transpose() * Minv + ginv * dpi_.transpose() * dMinv;
    }
    const Mat& V = vertical_;
    pv_ = V * (V.transpose() * g_ * V).inverse() * V.transpose() * g_;
    ph_ = Mat::Identity(n_, n_) - pv_;
}

Vec FundamentalTensors::nabla_constant(const Vec& X, const Vec& T) const {
    Vec out = Vec::Zero(n_);
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out[k] += gamma_(k, i, j) * X[i] * T[j];
    return out;
}

Vec FundamentalTensors::nabla_basic(const Vec& X, const Vec& Y) const {
    const Vec c = dpi_ * Y;
    // Directional derivative of the extension sum_l c_l L_l along X.
    Vec dir = Vec::Zero(n_);
    for (int m = 0; m < n_; ++m) dir += X[m] * (dlift_[static_cast<std::size_t>(m)] * c);
    return dir + nabla_constant(X, lifts_ * c);
}

Vec FundamentalTensors::A(const Vec& X, const Vec& Y) const { return pv_ * nabla_basic(ph_ * X, ph_ * Y); }

Vec FundamentalTensors::A_star(const Vec& X, const Vec& T) const { return -(ph_ * nabla_constant(ph_ * X, pv_ * T)); }

Vec FundamentalTensors::S(const Vec& X, const Vec& T) const { return -(pv_ * nabla_basic(pv_ * T, ph_ * X)); }

Vec FundamentalTensors::sigma(const Vec& T1, const Vec& T2) const { return ph_ * nabla_constant(pv_ * T1, pv_ * T2); }

Vec FundamentalTensors::half_bracket_vertical(const Vec& X, const Vec& Y) const {
    const Vec a = dpi_ * X, c = dpi_ * Y;
    const Vec LX = lifts_ * a, LY = lifts_ * c;
    Vec br = Vec::Zero(n_);
    for (int m = 0; m < n_; ++m)
        br += LX[m] * (dlift_[static_cast<std::size_t>(m)] * c) - LY[m] * (dlift_[static_cast<std::size_t>(m)] * a);
    return 0.5 * (pv_ * br);
}

Mat FundamentalTensors::adapted_frame() const {
    Mat cols(n_, n_);
    cols.leftCols(b_) = lifts_;
    cols.rightCols(n_ - b_) = vertical_;
    return gram_schmidt(cols, g_);
}

bool FundamentalTensors::is_adapted(const Mat& frame, double tol) const {
    if (frame.rows() != n_ || frame.cols() != n_) return false;
    if ((frame.transpose() * g_ * frame - Mat::Identity(n_, n_)).cwiseAbs().maxCoeff() > tol) return false;
    for (int c = 0; c < n_; ++c) {
        const Vec off = c < b_ ? Vec(pv_ * frame.col(c)) : Vec(ph_ * frame.col(c));
        if (std::sqrt(std::max(0.0, off.dot(g_ * off))) > tol) return false;
    }
    return true;
}

FundamentalTensors fundamental_tensors(const SubmersionGeometry& geom, const Vec& x, const Mat& frame) {
    FundamentalTensors ft(geom, x);
    if (!ft.is_adapted(frame)) throw InputError("fundamental_tensors: frame is not an adapted orthonormal frame");
    return ft;
}

TangentVector horizontal_lift(const SubmersionGeometry& geom, const TangentVector& v, const Vec& x) {
    const Vec y = geom.project(x);
    if (v.components.size() != geom.base_dim || v.base_point.size() != geom.base_dim)
        throw InputError("horizontal_lift: base vector has the wrong dimension");
    if ((y - v.base_point).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff()))
        throw InputError("horizontal_lift: pi(x) differs from the base point of the vector");
    const FundamentalTensors ft(geom, x);
    return TangentVector{geom.total.chart_id, x, ft.lift(v.components)};
}

SubmersionResiduals submersion_residuals(const SubmersionGeometry& geom, const Vec& x) {
    const FundamentalTensors ft(geom, x);
    SubmersionResiduals r;
    const Mat& Pv = ft.vertical_projector();
    const Mat& g = ft.metric();
    r.projector = std::max({(ft.differential() * Pv).cwiseAbs().maxCoeff(), (Pv * Pv - Pv).cwiseAbs().maxCoeff(),
                            (g * Pv - (g * Pv).transpose()).cwiseAbs().maxCoeff()});
    const Mat gB = geom.base.at(geom.project(x)).value();
    const Mat& L = ft.lifts();
    r.isometry = (L.transpose() * g * L - gB).cwiseAbs().maxCoeff();
    const Mat E = ft.adapted_frame();
    const int n = geom.total_dim(), b = geom.base_dim;
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            const Vec Aij = ft.A(E.col(i), E.col(j));
            const Vec Aji = ft.A(E.col(j), E.col(i));
            r.a_antisymmetry = std::max(r.a_antisymmetry, (Aij + Aji).cwiseAbs().maxCoeff());
            r.bracket = std::max(r.bracket, (Aij - ft.half_bracket_vertical(E.col(i), E.col(j))).cwiseAbs().maxCoeff());
            for (int a = b; a < n; ++a) {
                const double lhs = ft.inner(ft.A_star(E.col(i), E.col(a)), E.col(j));
                const double rhs = ft.inner(E.col(a), Aij);
                r.a_duality = std::max(r.a_duality, std::abs(lhs - rhs));
            }
        }
    for (int a = b; a < n; ++a)
        for (int c = b; c < n; ++c)
            r.sigma_symmetry = std::max(r.sigma_symmetry,
                                        (ft.sigma(E.col(a), E.col(c)) - ft.sigma(E.col(c), E.col(a))).cwiseAbs().maxCoeff());
    return r;
}

OneillCheck verify_oneill(const SubmersionGeometry& geom, const Vec& x, const Vec& u, const Vec& v) {
    const Vec y = geom.project(x);
    const CurvaturePointData base = riemann(geom.base, y);
    const Mat& gB = base.g;
    if (std::abs(u.dot(gB * u) - 1.0) > 1e-8 || std::abs(v.dot(gB * v) - 1.0) > 1e-8 || std::abs(u.dot(gB * v)) > 1e-8)
        throw InputError("verify_oneill: (u, v) must be g_B-orthonormal");
    const CurvaturePointData total = riemann(geom.total, x);
    const FundamentalTensors ft(geom, x);
    const Vec U = ft.lift(u), V = ft.lift(v);
    OneillCheck c;
    c.sec_base = sectional(base, u, v);
    c.sec_total = sectional(total, U, V);
    const Vec a = ft.A(U, V);
    c.a_squared = ft.inner(a, a);
    c.residual = std::abs(c.sec_base - c.sec_total - 3.0 * c.a_squared);
    return c;
}

std::pair<Vec, Vec> random_orthonormal_pair(const Mat& g, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    const auto n = g.rows();
    Mat V(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        V(i, 0) = N(rng);
        V(i, 1) = N(rng);
    }
    const Mat E = gram_schmidt(V, g);
    return {E.col(0), E.col(1)};
}

LiftedSumCheck verify_lifted_sum(const SubmersionGeometry& geom, const Vec& x, int k, int trials,
                                 std::uint64_t seed) {
    const int b = geom.base_dim;
    if (k < 1 || k > b - 1) throw InputError("verify_lifted_sum: need 1 <= k <= b-1");
    const Vec y = geom.project(x);
    const CurvaturePointData base = riemann(geom.base, y);
    const CurvaturePointData total = riemann(geom.total, x);
    const FundamentalTensors ft(geom, x);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N;
    LiftedSumCheck out;
    out.min_gap = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Mat F(b, k + 1);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j <= k; ++j) F(i, j) = N(rng);
        const Mat E = gram_schmidt(F, base.g);
        double gap = 0.0, a2 = 0.0;
        const Vec U = ft.lift(E.col(0));
        for (int i = 1; i <= k; ++i) {
            const Vec Vi = ft.lift(E.col(i));
            gap += sectional(base, E.col(0), E.col(i)) - sectional(total, U, Vi);
            const Vec a = ft.A(U, Vi);
            a2 += ft.inner(a, a);
        }
        out.min_gap = std::min(out.min_gap, gap);
        out.max_deviation = std::max(out.max_deviation, std::abs(gap - 3.0 * a2));
        ++out.frames;
    }
    out.holds = out.min_gap >= -1e-8;
    return out;
}

} // namespace ricci_lab
