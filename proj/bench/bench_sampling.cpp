// Serial reference vs OpenMP kernels on the shipped Hopf deformation:
// ric_k minimisation on M and the Ricci range on B over every sample set,
// plus a frame-search-bound ric_2 on S^2 x S^2.
// Exits 1 if the two paths disagree anywhere.

#include "ricci_lab/experiment.hpp"
#include "ricci_lab/exec.hpp"
#include "ricci_lab/sampling.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

using namespace ricci_lab;

namespace {

double seconds(const std::function<void()>& f, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs parallel sampling kernels"};
    int per_set = 100, reps = 3;
    app.add_option("--samples", per_set, "Points per sample set");
    app.add_option("--reps", reps, "Repetitions (best time reported)");
    CLI11_PARSE(app, argc, argv);

    const ExperimentConfig cfg = shipped_config();
    const SubmersionModel m = make_model(cfg.model);
    DeformationParams q = cfg.params;
    q.p = m.base_distance.center;
    const DeformedMetrics d = build_deformation(m, q);
    const SamplePlan plan = make_sample_plan(m, q, per_set, cfg.seed);

    std::size_t points = 0;
    for (const SampleSet& s : plan.total) points += s.points.size();
    std::printf("threads cap %d, %zu points on M, %d reps\n", thread_cap(), points, reps);
    std::printf("%-14s %12s %12s %9s %s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "equal");

    bool all_equal = true;
    auto run = [&](const char* name, auto&& kernel, auto&& same, const std::vector<SampleSet>& sets) {
        decltype(kernel(sets[0], Exec::serial)) a, b;
        double ts = 0, tp = 0;
        bool equal = true;
        for (const SampleSet& s : sets) {
            ts += seconds([&] { a = kernel(s, Exec::serial); }, reps);
            tp += seconds([&] { b = kernel(s, Exec::parallel); }, reps);
            for (std::size_t i = 0; i < a.size(); ++i) equal = equal && same(a[i], b[i]);
        }
        all_equal = all_equal && equal;
        std::printf("%-14s %12.4f %12.4f %9.2f %s\n", name, ts, tp, ts / tp, equal ? "yes" : "NO");
    };

    run(
        "ric_k(M)",
        [&](const SampleSet& s, Exec e) { return ric_k_samples(d.g_tilde_M, s, q.k, cfg.frames, e); },
        [](const RicKResult& x, const RicKResult& y) { return x.value == y.value; }, plan.total);
    run(
        "ricci_range(B)",
        [&](const SampleSet& s, Exec e) { return ricci_range_samples(d.g_tilde_B, s, e); },
        [](const RicciRange& x, const RicciRange& y) { return x.min == y.min && x.max == y.max; }, plan.base);
    // n = 4, k = 2 has no eigenvalue shortcut: every point runs the frame search.
    const SubmersionModel prod = make_model("product:s2xs2");
    const std::vector<SampleSet> box{box_samples("global", prod.sample_box, per_set, cfg.seed)};
    run(
        "ric_2(S2xS2)",
        [&](const SampleSet& s, Exec e) { return ric_k_samples(prod.geometry.total, s, 2, cfg.frames, e); },
        [](const RicKResult& x, const RicKResult& y) { return x.value == y.value; }, box);
    return all_equal ? 0 : 1;
}
