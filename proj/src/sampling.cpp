#include "ricci_lab/sampling.hpp"

#include "ricci_lab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

namespace ricci_lab {

std::vector<Band> deformation_bands(const DeformationParams& q) {
    std::vector<Band> out{{"over_p", 0.0, 0.0}};
    auto add = [&](const char* id, double lo, double hi) {
        if (hi > 0.0 && hi > lo) out.push_back({id, lo, hi});
    };
    if (q.horizontal && q.tau_h > 0.0) {
        add("core_h", 1e-3 * q.tau_h, q.tau_h);
        add("shell_h", q.tau_h, 2.0 * q.eta_h);
    }
    if (q.vertical && q.tau_v > 0.0) {
        add("plateau_v", q.horizontal ? 2.0 * q.eta_h : 1e-3 * q.tau_v, q.tau_v);
        add("shell_v", q.tau_v, 2.0 * q.eta_v);
    }
    const double reach = std::max(q.vertical ? 2.0 * q.eta_v : 0.0, q.horizontal ? 2.0 * q.eta_h : 0.0);
    add("outside", reach, 2.0 * reach);
    return out;
}

namespace {

double band_radius(const Band& band, std::mt19937_64& rng) {
    if (band.r_max <= 0.0) return 0.0;
    std::uniform_real_distribution<double> U(0.0, 1.0);
    if (band.r_min <= 0.0) return band.r_max * U(rng);
    return band.r_min * std::pow(band.r_max / band.r_min, U(rng));
}

} // namespace

SampleSet base_band_samples(const DistanceModel& base, const Band& band, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    SampleSet s{band.id, {}};
    for (int i = 0; i < count; ++i) {
        const double rho = band_radius(band, rng);
        const double a = angle(rng);
        const Vec y = rho == 0.0 ? base.center : base.point_at(rho, Eigen::Vector2d(std::cos(a), std::sin(a)));
        if (base.metric.domain.contains(y)) s.points.push_back(y);
    }
    return s;
}

SampleSet total_band_samples(const SubmersionModel& model, const Band& band, int count, std::uint64_t seed) {
    const SampleSet base = base_band_samples(model.base_distance, band, count, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const int fiber_dim = model.geometry.total_dim() - model.geometry.base_dim;
    const ChartBox& box = model.sample_box;
    SampleSet s{band.id, {}};
    for (const Vec& y : base.points) {
        Vec f(fiber_dim);
        for (int j = 0; j < fiber_dim; ++j) {
            const int c = model.geometry.base_dim + j;
            f[j] = std::uniform_real_distribution<double>(box.lower[c], box.upper[c])(rng);
        }
        s.points.push_back(model.point_over(y, f));
    }
    return s;
}

SampleSet box_samples(const std::string& id, const ChartBox& box, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SampleSet s{id, {}};
    for (int i = 0; i < count; ++i) {
        Vec x(box.lower.size());
        for (Eigen::Index j = 0; j < x.size(); ++j)
            x[j] = std::uniform_real_distribution<double>(box.lower[j], box.upper[j])(rng);
        s.points.push_back(x);
    }
    return s;
}

SamplePlan make_sample_plan(const SubmersionModel& model, const DeformationParams& params, int per_set,
                            std::uint64_t seed) {
    if (per_set < 1) throw InputError("sample count must be positive");
    SamplePlan plan;
    plan.total.push_back(box_samples("global", model.sample_box, per_set, seed));
    ChartBox base_box = model.geometry.base.domain;
    base_box.lower *= 0.95;
    base_box.upper *= 0.95;
    plan.base.push_back(box_samples("global", base_box, per_set, seed + 1));
    std::uint64_t s = seed + 2;
    for (const Band& band : deformation_bands(params)) {
        plan.total.push_back(total_band_samples(model, band, per_set, s++));
        plan.base.push_back(base_band_samples(model.base_distance, band, per_set, s++));
    }
    return plan;
}

std::vector<RicKResult> ric_k_samples(const MetricField& g, const SampleSet& samples, int k,
                                      const FrameSearchConfig& cfg, Exec exec) {
    return map_indices<RicKResult>(
        samples.points.size(),
        [&](std::size_t i) {
            FrameSearchConfig c = cfg;
            c.seed = cfg.seed + i;
            return ric_k_min(riemann(g, samples.points[i]), k, c);
        },
        exec);
}

std::vector<RicciRange> ricci_range_samples(const MetricField& g, const SampleSet& samples, Exec exec) {
    return map_indices<RicciRange>(
        samples.points.size(),
        [&](std::size_t i) {
            const CurvaturePointData d = riemann(g, samples.points[i]);
            Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(d.ricci, d.g, Eigen::EigenvaluesOnly);
            return RicciRange{es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
        },
        exec);
}

SampleMin sample_min(const SampleSet& samples, const std::vector<double>& values) {
    SampleMin m{samples.id, static_cast<int>(values.size()), std::numeric_limits<double>::infinity(), -1};
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < m.value) {
            m.value = values[i];
            m.argmin = static_cast<int>(i);
        }
    return m;
}

} // namespace ricci_lab
