#pragma once

// Lower bounds for sums  sum_i <A(u_0 ^ u_i), u_0 ^ u_i>  over orthonormal frames:
// the block-eigenvalue enumeration criterion, its two corollaries for a
// horizontal/vertical splitting, the verification of DR against a model
// operator, and a brute-force frame oracle for cross-checks.

#include "ricci_lab/deformation.hpp"
#include "ricci_lab/frame_search.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace ricci_lab {

/// A self-adjoint map on the bivectors of V = V_1 + V_2 + V_3 acting on V_i ^ V_j by lambda_ij.
struct BlockSpectrum {
    std::array<int, 3> dims{0, 0, 0};
    std::array<std::array<double, 3>, 3> lambda{};

    int n() const { return dims[0] + dims[1] + dims[2]; }
    void set(int i, int j, double value) { lambda[i][j] = lambda[j][i] = value; }
    /// InputError unless dims are nonnegative, n >= 2 and lambda is symmetric.
    void validate() const;
};

struct RwResult {
    bool holds = false;
    /// Minimum of the linear forms over all admissible tuples and its argmin.
    double min_value = 0.0;
    int i = -1;  // 0-based block of u_0
    std::array<int, 3> counts{0, 0, 0};
};

/// Checks n_i1 lambda_i1 + n_i2 lambda_i2 + n_i3 lambda_i3 > c for every i with dim V_i >= 1 and
/// every tuple with n_ij <= dim V_j (j != i), n_ii <= dim V_i - 1 and sum k. On failure the
/// witness is the minimizing tuple. InputError for k outside [1, n-1].
RwResult reiser_wraith_bound(const BlockSpectrum& spec, int k, double c);

/// Threshold used by rw_contextual: delta = epsilon / n.
inline double rw_contextual_delta(double epsilon, int n) { return epsilon / n; }

/// lambda_12 > 0, (b-1) lambda_11 + lambda_12 > 0 and |lambda_22| < epsilon / n for
/// V = V_1 + V_2 with dim V_1 = b, dim V = n. PreconditionError if k < b.
bool rw_contextual(double lambda11, double lambda12, double lambda22, int b, int n, int k, double epsilon);

/// All three |lambda| < delta.
bool operator_norm_from_blocks(double lambda11, double lambda12, double lambda22, double delta);

/// The block operator on the lexicographic wedge basis of an orthonormal basis of V whose
/// first dims[0] vectors span V_1, the next dims[1] span V_2 and the rest V_3.
Mat assemble_block_operator(const BlockSpectrum& spec);

/// A spectrum with lambdas uniform in [lo, hi].
BlockSpectrum random_block_spectrum(std::array<int, 3> dims, double lo, double hi, std::mt19937_64& rng);

/// Seeded approximate minimum over orthonormal (k+1)-frames of the k-sum of B(u ^ v_i, u ^ v_i).
/// For n <= 5 and cfg.exhaustive_grid > 0 the hyperspherical grid runs as well.
FrameSumResult brute_force_sum_min(const Mat& B, const Mat& gv, int k, const FrameSearchConfig& cfg);

/// Threshold used for the block bounds of the DR verification: delta = epsilon / (6 n).
inline double delta_ric_delta(double epsilon, int n) { return epsilon / (6.0 * n); }

struct DeltaRicVerdict {
    BlockStats blocks;
    double delta = 0.0;
    double lambda_hh = 0.0;
    double lambda_hv = 0.0;
    /// Block bounds: VV norm and both leaks below delta, lower bounds by the lambdas.
    bool block_bounds = false;
    bool rw_sum = false;
    bool all_small = false;
    /// Hypothesis path: block_bounds and (rw_sum or all_small); concludes DR ric_k > -epsilon.
    bool hypothesis = false;
    /// Oracle path: frame search on DR directly.
    double oracle_min = 0.0;
    Mat oracle_frame;
    bool oracle_ok = false;
    /// False only when the hypotheses hold but the oracle finds a frame sum <= -epsilon.
    bool consistent = true;
};

/// D is DR on the lexicographic wedge basis of a g-orthonormal adapted frame (first b
/// horizontal). InputError when D is not square of size n(n-1)/2 or not symmetric;
/// PreconditionError when k < b.
DeltaRicVerdict verify_delta_ric(const Mat& D, int n, int b, int k, double epsilon, double lambda_hh,
                                 double lambda_hv, const FrameSearchConfig& cfg);

/// The lambdas to test at a point: the admissible ones inside the vertical plateau, and the
/// measured block minima capped at zero elsewhere (where the all-small branch must apply).
std::pair<double, double> region_lambdas(const BlockStats& blocks, const DeformationParams& params,
                                         bool in_vertical_plateau);

} // namespace ricci_lab
