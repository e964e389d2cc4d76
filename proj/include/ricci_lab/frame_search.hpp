#pragma once

// Minimization of frame sums  sum_i B(u ^ v_i, u ^ v_i)  over orthonormal
// (k+1)-frames {u, v_1, ..., v_k}, for a symmetric form B on bivectors.
//
// For fixed unit u the inner minimum over v_1..v_k in u^perp is the sum of the
// k smallest eigenvalues of Q_u(v) = B(u^v, u^v) on u^perp (Ky Fan), so the
// search reduces to the unit sphere. A direct Stiefel search is kept as an
// independent cross-check.

#include "ricci_lab/fields.hpp"
#include "ricci_lab/tensor_core.hpp"

#include <cstdint>
#include <limits>

namespace ricci_lab {

struct FrameSearchConfig {
    int restarts = 8;
    int max_iters = 400;
    double step = 0.5;
    std::uint64_t seed = 1;
    /// Grid points per angle for the exhaustive sphere grid; 0 disables it.
    int exhaustive_grid = 0;
};

struct FrameSumResult {
    /// Best value found (minimum of all paths that ran).
    double value = 0.0;
    /// Columns u, v_1, ..., v_k in the caller's coordinates, g-orthonormal.
    Mat frame;
    double search_min = std::numeric_limits<double>::quiet_NaN();
    double grid_min = std::numeric_limits<double>::quiet_NaN();
    double stiefel_min = std::numeric_limits<double>::quiet_NaN();
};

/// The form B expressed on an orthonormal basis of (R^n, gv).
class FrameSumProblem {
public:
    /// B on the lexicographic wedge basis of coordinates whose vector metric is gv.
    FrameSumProblem(const Mat& B, const Mat& gv);
    explicit FrameSumProblem(const CurvatureOperator& op);

    int dim() const { return n_; }

    /// Q_u in orthonormal coordinates.
    Mat q_matrix(const Vec& u) const;
    /// Ky Fan inner minimum for unit u (orthonormal coordinates); optionally
    /// returns the minimizing v_i as columns.
    double inner_min(const Vec& u, int k, Mat* vs = nullptr) const;
    /// Frame sum for an orthonormal frame X (orthonormal coordinates).
    double frame_sum(const Mat& X) const;
    /// Maps orthonormal coordinates back to the caller's coordinates.
    Mat to_coordinates(const Mat& X) const { return F_ * X; }

private:
    int n_ = 0;
    WedgeBasis basis_;
    Mat B_;
    Mat F_;
};

/// Sphere search over u with restarts (Ky Fan inner minimum).
FrameSumResult minimize_frame_sum(const FrameSumProblem& p, int k, const FrameSearchConfig& cfg);

/// Direct random-restart search over orthonormal frames.
FrameSumResult minimize_frame_sum_stiefel(const FrameSumProblem& p, int k, const FrameSearchConfig& cfg);

/// Minimum of the Ky Fan objective over a hyperspherical grid (n <= 5).
double grid_frame_sum_min(const FrameSumProblem& p, int k, int resolution, Vec* best_u = nullptr);

} // namespace ricci_lab
