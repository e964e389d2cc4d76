#include "ricci_lab/frame_search.hpp"

#include "ricci_lab/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ricci_lab {

FrameSumProblem::FrameSumProblem(const Mat& B, const Mat& gv) : n_(static_cast<int>(gv.rows())), basis_(n_) {
    if (B.rows() != basis_.size() || B.cols() != basis_.size())
        throw InputError("frame search: form size does not match the wedge basis");
    Eigen::LLT<Mat> llt(gv);
    if (llt.info() != Eigen::Success) throw InputError("frame search: vector metric is not positive definite");
    const Mat L = llt.matrixL();
    F_ = L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n_, n_));
    const int m = basis_.size();
    Mat L2(m, m);
    for (int q = 0; q < m; ++q) {
        const auto [k, l] = basis_.pairs()[static_cast<std::size_t>(q)];
        L2.col(q) = basis_.wedge(F_.col(k), F_.col(l));
    }
    B_ = L2.transpose() * (0.5 * (B + B.transpose())) * L2;
}

FrameSumProblem::FrameSumProblem(const CurvatureOperator& op) : FrameSumProblem(op.matrix, op.vector_metric) {}

Mat FrameSumProblem::q_matrix(const Vec& u) const {
    Mat W(basis_.size(), n_);
    for (int b = 0; b < n_; ++b) W.col(b) = basis_.wedge(u, Vec::Unit(n_, b));
    return W.transpose() * B_ * W;
}

double FrameSumProblem::inner_min(const Vec& u, int k, Mat* vs) const {
    if (k < 1 || k > n_ - 1) throw InputError("frame search: k must lie in [1, n-1]");
    Eigen::HouseholderQR<Mat> qr(u);
    const Mat Q = qr.householderQ();
    const Mat P = Q.rightCols(n_ - 1);
    const Mat Qr = P.transpose() * q_matrix(u) * P;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Qr + Qr.transpose()));
    if (vs != nullptr) *vs = P * es.eigenvectors().leftCols(k);
    return es.eigenvalues().head(k).sum();
}

double FrameSumProblem::frame_sum(const Mat& X) const {
    double s = 0.0;
    for (Eigen::Index i = 1; i < X.cols(); ++i) {
        const Vec w = basis_.wedge(X.col(0), X.col(i));
        s += w.dot(B_ * w);
    }
    return s;
}

namespace {

Vec random_unit(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Vec u(n);
    do {
        for (int i = 0; i < n; ++i) u[i] = normal(rng);
    } while (u.norm() < 1e-12);
    return u.normalized();
}

/// Random pattern search on the unit sphere with step halving.
double polish_on_sphere(const FrameSumProblem& p, int k, Vec& u, double step, int budget, std::mt19937_64& rng) {
    const int n = p.dim();
    double f = p.inner_min(u, k);
    int fails = 0;
    for (int it = 0; it < budget && step > 1e-10; ++it) {
        const Vec t = random_unit(n, rng);
        const Vec cand = (u + step * t).normalized();
        const double fc = p.inner_min(cand, k);
        if (fc < f) {
            u = cand;
            f = fc;
            fails = 0;
        } else if (++fails >= 2 * n) {
            step *= 0.5;
            fails = 0;
        }
    }
    return f;
}

Mat orthonormal_columns(const Mat& A) {
    Eigen::HouseholderQR<Mat> qr(A);
    return qr.householderQ() * Mat::Identity(A.rows(), A.cols());
}

} // namespace

FrameSumResult minimize_frame_sum(const FrameSumProblem& p, int k, const FrameSearchConfig& cfg) {
    if (cfg.restarts < 1) throw InputError("frame search: restarts must be >= 1");
    const int n = p.dim();
    if (k < 1 || k > n - 1) throw InputError("frame search: k must lie in [1, n-1]");
    std::mt19937_64 rng(cfg.seed);

    std::vector<Vec> starts;
    for (int i = 0; i < n; ++i) starts.push_back(Vec::Unit(n, i));
    for (int r = 0; r < cfg.restarts; ++r) starts.push_back(random_unit(n, rng));

    FrameSumResult out;
    if (cfg.exhaustive_grid > 0) {
        Vec grid_u;
        out.grid_min = grid_frame_sum_min(p, k, cfg.exhaustive_grid, &grid_u);
        starts.push_back(grid_u);
    }

    double best = std::numeric_limits<double>::infinity();
    Vec best_u = starts.front();
    for (Vec u : starts) {
        const double f = polish_on_sphere(p, k, u, cfg.step, cfg.max_iters, rng);
        if (f < best) {
            best = f;
            best_u = u;
        }
    }
    Mat vs;
    out.search_min = p.inner_min(best_u, k, &vs);
    out.value = out.search_min;
    Mat X(n, k + 1);
    X.col(0) = best_u;
    X.rightCols(k) = vs;
    out.frame = p.to_coordinates(X);
    return out;
}

FrameSumResult minimize_frame_sum_stiefel(const FrameSumProblem& p, int k, const FrameSearchConfig& cfg) {
    if (cfg.restarts < 1) throw InputError("frame search: restarts must be >= 1");
    const int n = p.dim();
    if (k < 1 || k > n - 1) throw InputError("frame search: k must lie in [1, n-1]");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    auto gaussian = [&](int rows, int cols) {
        Mat G(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) G(i, j) = normal(rng);
        return G;
    };

    double best = std::numeric_limits<double>::infinity();
    Mat bestX;
    for (int r = 0; r < cfg.restarts; ++r) {
        Mat X = orthonormal_columns(gaussian(n, k + 1));
        double f = p.frame_sum(X);
        double step = cfg.step;
        int fails = 0;
        for (int it = 0; it < cfg.max_iters && step > 1e-10; ++it) {
            const Mat cand = orthonormal_columns(X + step * gaussian(n, k + 1));
            const double fc = p.frame_sum(cand);
            if (fc < f) {
                X = cand;
                f = fc;
                fails = 0;
            } else if (++fails >= 2 * n * (k + 1)) {
                step *= 0.5;
                fails = 0;
            }
        }
        if (f < best) {
            best = f;
            bestX = X;
        }
    }
    FrameSumResult out;
    out.stiefel_min = best;
    out.value = best;
    out.frame = p.to_coordinates(bestX);
    return out;
}

double grid_frame_sum_min(const FrameSumProblem& p, int k, int resolution, Vec* best_u) {
    const int n = p.dim();
    if (n < 2 || n > 5) throw InputError("exhaustive frame grid supports 2 <= n <= 5");
    if (resolution < 2) throw InputError("exhaustive frame grid needs resolution >= 2");
    const int angles = n - 1;
    // Hyperspherical angles: theta_1..theta_{n-2} in [0, pi], theta_{n-1} in [0, pi)
    // (u and -u give the same frame sums).
    long long total = 1;
    for (int a = 0; a < angles; ++a) total *= resolution;

    double best = std::numeric_limits<double>::infinity();
    Vec arg = Vec::Unit(n, 0);
    std::vector<int> idx(static_cast<std::size_t>(angles), 0);
    Vec u(n);
    for (long long c = 0; c < total; ++c) {
        long long rem = c;
        for (int a = 0; a < angles; ++a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(rem % resolution);
            rem /= resolution;
        }
        double sin_prod = 1.0;
        for (int a = 0; a < angles; ++a) {
            const int j = idx[static_cast<std::size_t>(a)];
            const double theta = a < angles - 1 ? std::numbers::pi * j / (resolution - 1)
                                                : std::numbers::pi * j / resolution;
            u[a] = sin_prod * std::cos(theta);
            sin_prod *= std::sin(theta);
        }
        u[n - 1] = sin_prod;
        const double nrm = u.norm();
        if (nrm < 1e-12) continue;
        const double f = p.inner_min(u / nrm, k);
        if (f < best) {
            best = f;
            arg = u / nrm;
        }
    }
    if (best_u != nullptr) *best_u = arg;
    return best;
}

} // namespace ricci_lab
