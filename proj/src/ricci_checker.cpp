#include "ricci_lab/ricci_checker.hpp"

#include "ricci_lab/errors.hpp"

#include <cmath>
#include <limits>

namespace ricci_lab {

void BlockSpectrum::validate() const {
    for (int d : dims)
        if (d < 0) throw InputError("block dimensions must be nonnegative");
    if (n() < 2) throw InputError("block spectrum needs dim V >= 2");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (lambda[i][j] != lambda[j][i]) throw InputError("block eigenvalues must be symmetric in (i, j)");
}

RwResult reiser_wraith_bound(const BlockSpectrum& spec, int k, double c) {
    spec.validate();
    const int n = spec.n();
    if (k < 1 || k > n - 1) throw InputError("k must lie in [1, n-1]");
    RwResult best;
    best.min_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (spec.dims[i] == 0) continue;
        std::array<int, 3> cap = spec.dims;
        cap[i] -= 1;
        for (int a = 0; a <= cap[0]; ++a)
            for (int b = 0; b <= cap[1]; ++b) {
                const int r = k - a - b;
                if (r < 0 || r > cap[2]) continue;
                const double v = a * spec.lambda[i][0] + b * spec.lambda[i][1] + r * spec.lambda[i][2];
                if (v < best.min_value) {
                    best.min_value = v;
                    best.i = i;
                    best.counts = {a, b, r};
                }
            }
    }
    best.holds = best.min_value > c;
    return best;
}

bool rw_contextual(double lambda11, double lambda12, double lambda22, int b, int n, int k, double epsilon) {
    if (k < b) throw PreconditionError("rw_contextual needs k >= b");
    if (b < 1 || n <= b) throw InputError("need 1 <= b < n");
    return lambda12 > 0.0 && (b - 1) * lambda11 + lambda12 > 0.0 &&
           std::abs(lambda22) < rw_contextual_delta(epsilon, n);
}

bool operator_norm_from_blocks(double lambda11, double lambda12, double lambda22, double delta) {
    return std::abs(lambda11) < delta && std::abs(lambda12) < delta && std::abs(lambda22) < delta;
}

Mat assemble_block_operator(const BlockSpectrum& spec) {
    spec.validate();
    const int n = spec.n();
    std::vector<int> block(static_cast<std::size_t>(n));
    for (int v = 0, i = 0; i < 3; ++i)
        for (int d = 0; d < spec.dims[i]; ++d) block[static_cast<std::size_t>(v++)] = i;
    const WedgeBasis basis(n);
    Mat A = Mat::Zero(basis.size(), basis.size());
    for (int q = 0; q < basis.size(); ++q) {
        const auto [a, b] = basis.pairs()[static_cast<std::size_t>(q)];
        A(q, q) = spec.lambda[block[static_cast<std::size_t>(a)]][block[static_cast<std::size_t>(b)]];
    }
    return A;
}

BlockSpectrum random_block_spectrum(std::array<int, 3> dims, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(lo, hi);
    BlockSpectrum s;
    s.dims = dims;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) s.set(i, j, U(rng));
    return s;
}

FrameSumResult brute_force_sum_min(const Mat& B, const Mat& gv, int k, const FrameSearchConfig& cfg) {
    const FrameSumProblem p(B, gv);
    FrameSearchConfig c = cfg;
    if (p.dim() > 5) c.exhaustive_grid = 0;
    return minimize_frame_sum(p, k, c);
}

DeltaRicVerdict verify_delta_ric(const Mat& D, int n, int b, int k, double epsilon, double lambda_hh,
                                 double lambda_hv, const FrameSearchConfig& cfg) {
    const int m = n * (n - 1) / 2;
    if (D.rows() != m || D.cols() != m) throw InputError("DR matrix does not match the wedge dimension");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, D.cwiseAbs().maxCoeff()))
        throw InputError("DR matrix is not symmetric");
    if (b < 1 || b >= n) throw InputError("need 1 <= b < n");
    if (k < b || k > n - 1) throw PreconditionError("verification needs b <= k <= n-1");

    DeltaRicVerdict v;
    v.blocks = block_stats(D, n, b);
    v.delta = delta_ric_delta(epsilon, n);
    v.lambda_hh = lambda_hh;
    v.lambda_hv = lambda_hv;
    const double d = v.delta;
    // With b = 1 there are no horizontal planes and the HH bound is vacuous.
    const bool hh_ok = b < 2 || v.blocks.hh_min >= lambda_hh;
    v.block_bounds = v.blocks.vv_norm < d && v.blocks.hh_leak < d && v.blocks.hv_leak < d && hh_ok &&
                     v.blocks.hv_min >= lambda_hv;
    v.rw_sum = lambda_hv > 0.0 && (b - 1) * lambda_hh + lambda_hv > 0.0;
    v.all_small = std::abs(lambda_hh) < d && std::abs(lambda_hv) < d;
    v.hypothesis = v.block_bounds && (v.rw_sum || v.all_small);

    const FrameSumResult r = brute_force_sum_min(D, Mat::Identity(n, n), k, cfg);
    v.oracle_min = r.value;
    v.oracle_frame = r.frame;
    v.oracle_ok = r.value > -epsilon;
    v.consistent = !(v.hypothesis && !v.oracle_ok);
    return v;
}

std::pair<double, double> region_lambdas(const BlockStats& blocks, const DeformationParams& params,
                                         bool in_vertical_plateau) {
    if (in_vertical_plateau) return {lambda_hh(params), lambda_hv(params)};
    return {std::min(0.0, blocks.hh_min), std::min(0.0, blocks.hv_min)};
}

} // namespace ricci_lab
