#pragma once

// Seeded sample sets around the deformation center and the per-point curvature
// kernels evaluated over them. Every kernel has a serial path used as the
// reference in tests and benchmarks; results are identical across paths.

#include "ricci_lab/deformation.hpp"
#include "ricci_lab/exec.hpp"
#include "ricci_lab/frame_search.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ricci_lab {

/// Base-distance band [r_min, r_max] around p, sampled log-uniformly (uniformly if r_min = 0).
struct Band {
    std::string id;
    double r_min = 0.0;
    double r_max = 0.0;
};

/// Bands matched to the scales of the deformation: the core and shell of w_h, the
/// plateau and shell of w_v, and a margin outside both supports.
std::vector<Band> deformation_bands(const DeformationParams& params);

/// Points of the base at distance in the band, in seeded random directions.
SampleSet base_band_samples(const DistanceModel& base, const Band& band, int count, std::uint64_t seed);

/// Points of M over base_band_samples, at seeded random fiber coordinates.
SampleSet total_band_samples(const SubmersionModel& model, const Band& band, int count, std::uint64_t seed);

/// Uniform points in a chart box.
SampleSet box_samples(const std::string& id, const ChartBox& box, int count, std::uint64_t seed);

/// Global samples plus one set per band, on M and on B.
struct SamplePlan {
    std::vector<SampleSet> total;
    std::vector<SampleSet> base;
};

SamplePlan make_sample_plan(const SubmersionModel& model, const DeformationParams& params, int per_set,
                            std::uint64_t seed);

/// min over frames of the k-sum of sectional curvatures, at each point.
/// Point i uses frame-search seed cfg.seed + i.
std::vector<RicKResult> ric_k_samples(const MetricField& g, const SampleSet& samples, int k,
                                      const FrameSearchConfig& cfg, Exec exec = Exec::parallel);

/// Smallest and largest Ricci eigenvalue (relative to g) at each point.
struct RicciRange {
    double min = 0.0;
    double max = 0.0;
};
std::vector<RicciRange> ricci_range_samples(const MetricField& g, const SampleSet& samples,
                                            Exec exec = Exec::parallel);

/// min over the set, with the attaining point.
struct SampleMin {
    std::string sample_set;
    int count = 0;
    double value = 0.0;
    int argmin = -1;
};
SampleMin sample_min(const SampleSet& samples, const std::vector<double>& values);

} // namespace ricci_lab
