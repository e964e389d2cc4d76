// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ricci_lab/errors.hpp"
#include "ricci_lab/experiment.hpp"
#include "ricci_lab/metric_calculus.hpp"
#include "ricci_lab/profile_builder.hpp"
#include "ricci_lab/sampling.hpp"
#include "ricci_lab/submersion_models.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace ricci_lab;

namespace {

struct Verdict {
    bool passed = false;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// Sectional curvature against K (g o g) on random planes over a chart box.
double constant_curvature_error(const MetricField& g, const ChartBox& box, double K, int points, std::uint64_t seed) {
    const SampleSet s = box_samples("global", box, points, seed);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (const Vec& x : s.points) {
        const CurvaturePointData d = riemann(g, x);
        const auto [u, v] = random_orthonormal_pair(d.g, rng);
        const double oracle = K * kulkarni_nomizu(d.g, d.g, u, v, v, u);
        worst = std::max(worst, std::abs(sectional(d, u, v) - oracle) / std::abs(oracle));
    }
    return worst;
}

Verdict criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const SubmersionModel hopf = make_model("hopf");
    const double e3 = constant_curvature_error(hopf.geometry.total, hopf.sample_box, 1.0, 100, 11);
    const double e2 = constant_curvature_error(hopf.geometry.base, hopf.geometry.base.domain, 4.0, 100, 12);
    const double t = elapsed(t0);
    return {e3 < 1e-6 && e2 < 1e-6 && t < 10.0,
            "S^3 rel err " + fmt(e3) + ", S^2(1/2) rel err " + fmt(e2) + ", " + fmt(t) + " s"};
}

Verdict criterion_2() {
    bool ok = true;
    std::string detail;
    for (const char* model : {"hopf", "berger:0.5", "berger:2"}) {
        ExperimentConfig cfg;
        cfg.model = model;
        const RunOutcome r = run_verify("oneill", cfg, 50);
        ok = ok && r.passed;
        detail += std::string(detail.empty() ? "" : ", ") + model + " max residual " +
                  fmt(r.report.value("max_residual", std::nan("")));
    }
    return {ok, detail};
}

Verdict criterion_3(const RunOutcome& flagship) {
    ExperimentConfig cfg = shipped_config();
    cfg.model = "s2half";
    const RunOutcome r = run_verify("conformal", cfg, 20);
    const bool has_sec = flagship.report.contains("base");
    const double sec = has_sec ? flagship.report["base"]["sec_at_p"]["direct"].get<double>() : std::nan("");
    const double K = shipped_config().params.K;
    const Json& err = r.report["max_relative_error"];
    return {r.passed && r.report["builds"].size() == 3 && has_sec && sec < -K,
            "3 builds x 20 points, max rel err " + (err.is_number() ? fmt(err.get<double>()) : "n/a") +
                "; sec(g~_B)(p) = " + fmt(sec) + " < -" + fmt(K)};
}

Verdict criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome r = run_verify("gw", shipped_config(), 20);
    const double t = elapsed(t0);
    double worst = 0.0;
    int families = 0;
    for (const auto& [k, v] : r.report["max_relative_error"].items()) {
        ++families;
        worst = std::max(worst, v.is_number() ? v.get<double>() : INFINITY);
    }
    return {r.passed && families == 7 && t < 120.0,
            std::to_string(families) + " families, 20 points, max rel err " + fmt(worst) + ", " + fmt(t) + " s"};
}

Verdict criterion_5(RunOutcome& rw) {
    rw = run_verify("rw", shipped_config(), 100);
    const Json& gap = rw.report["min_frame_minus_bound"];
    return {rw.passed, "100 spectra, " + rw.report["agreements"].dump() + " agreements, min(frame min - bound) " +
                           (gap.is_number() ? fmt(gap.get<double>()) : "n/a") + " > -1e-3"};
}

Verdict criterion_6() {
    const ExperimentConfig cfg = shipped_config();
    const DistanceModel base = make_model(cfg.model).base_distance;
    const DeformationParams& q = cfg.params;
    bool ok = true;
    std::string detail;
    auto check = [&](const char* label, double C, double eps, double eta, double tau) {
        const OmegaFunction w = inspect_omega(base, C, eps, eta, tau);
        double least = INFINITY;
        for (const Certificate& c : w.certificates) {
            if (c.name == "hessian_lower" || c.name == "hessian_upper" || c.name == "hessian_core") {
                ok = ok && c.margin > 0.0;
                least = std::min(least, c.margin);
            }
        }
        ok = ok && w.certified() && std::isfinite(least);
        detail += std::string(detail.empty() ? "" : "; ") + label + " (C = " + fmt(C) + ") all " +
                  std::to_string(w.certificates.size()) + " certificates " + (w.certified() ? "pass" : "FAIL") +
                  ", least Hessian margin " + fmt(least);
    };
    check("omega_h", q.C_h, q.eps_h, q.eta_h, q.tau_h);
    check("omega_v", q.C_v, q.eps_v, q.eta_v, q.tau_v);
    return {ok, detail};
}

Verdict criterion_7(const RunOutcome& r, double seconds) {
    if (r.report.contains("error")) return {false, r.report["error"]["message"].get<std::string>()};
    const Json& c = r.report["conclusions"];
    const bool i = c["negative_curvature_at_p"].get<bool>();
    const bool ii = c["ric_k_positive"].get<bool>() && c["ric_k_within_epsilon"].get<bool>();
    const bool iii = c["base_ricci_both_signs"].get<bool>();
    const bool iv = c["c1_distance_below_epsilon"].get<bool>();
    const double eps = r.report["config"]["epsilon"].get<double>();
    std::string d = "(i) sec_p " + fmt(r.report["base"]["sec_at_p"]["direct"].get<double>()) + " (ii) min ric_2 " +
                    fmt(r.report["total"]["deformed_min"].get<double>(), 8) + " vs " +
                    fmt(r.report["total"]["undeformed_min"].get<double>(), 8) + " - " + fmt(eps) +
                    " (iii) Ricci both signs " + (iii ? "yes" : "no") + " (iv) C1 " +
                    fmt(r.report["c1_distance"]["total"]["value"].get<double>()) + " / " +
                    fmt(r.report["c1_distance"]["base"]["value"].get<double>()) + ", " + fmt(seconds) + " s";
    return {i && ii && iii && iv && r.passed && seconds < 600.0, d};
}

Verdict criterion_8(const RunOutcome& rw, const RunOutcome& flagship) {
    const RunOutcome rw2 = run_verify("rw", shipped_config(), 100);
    const RunOutcome fl2 = run_deform(shipped_config());
    const bool a = stable_dump(rw.report) == stable_dump(rw2.report);
    const bool b = stable_dump(flagship.report) == stable_dump(fl2.report);
    return {a && b, std::string("rw report ") + (a ? "identical" : "DIFFERS") + ", deform report " +
                        (b ? "identical" : "DIFFERS")};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* title, const std::function<Verdict()>& f) {
        Verdict v;
        try {
            v = f();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.passed) ++failures;
        std::printf("%s [%d] %s: %s\n", v.passed ? "PASS" : "FAIL", id, title, v.detail.c_str());
        std::fflush(stdout);
    };

    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome flagship = run_deform(shipped_config());
    const double flagship_seconds = elapsed(t0);
    RunOutcome rw;

    report(1, "curvature engine on constant-curvature spheres", criterion_1);
    report(2, "O'Neill horizontal identity", criterion_2);
    report(3, "conformal curvature prediction and negative curvature at p", [&] { return criterion_3(flagship); });
    report(4, "warped submersion curvature, seven families", criterion_4);
    report(5, "block spectrum frame-sum bound soundness", [&] { return criterion_5(rw); });
    report(6, "profile certificates for the shipped parameters", criterion_6);
    report(7, "flagship Hopf deformation", [&] { return criterion_7(flagship, flagship_seconds); });
    report(8, "determinism of reports", [&] { return criterion_8(rw, flagship); });

    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
