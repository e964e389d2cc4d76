// ricci_lab: profile, curvature, deform and verify runs with JSON reports.
//
// Exit codes: 0 when every certificate and verdict passed, 1 when a run
// completed with a failure (the report is still written), 2 for usage and
// input errors.

#include "ricci_lab/errors.hpp"
#include "ricci_lab/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

using namespace ricci_lab;

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text << '\n';
}

/// Config file (if any) first, then every flag given on the command line.
struct ConfigOptions {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key = value config file");
        for (const std::string& key : config_keys()) {
            auto* opt = app->add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { overrides[key] = v; }, "config key " + key);
            opt->type_name("VALUE");
        }
    }

    ExperimentConfig resolve(const ExperimentConfig& fallback) const {
        ExperimentConfig cfg = config_path.empty() ? fallback : load_config(config_path);
        for (const auto& [k, v] : overrides) apply_config_entry(cfg, k, v);
        return cfg;
    }
};

int report_exit(const Json& report, bool passed, const std::string& out_path) {
    write_text(out_path, report.dump(2));
    return passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for warped deformations of Riemannian submersions"};
    app.require_subcommand(1);

    // profile
    auto* profile = app.add_subcommand("profile", "Build a one-dimensional bump profile and certify it");
    double C = 2.0, epsilon = 0.1, eta = 0.2, tau = 0.004;
    int rows = 401;
    std::string out_dir = "profile_out";
    profile->add_option("--C", C, "Plateau constant (|C| > 1)");
    profile->add_option("--epsilon", epsilon, "C^1 budget");
    profile->add_option("--eta", eta, "Plateau radius of the cutoff");
    profile->add_option("--tau", tau, "Radius of the quadratic core");
    profile->add_option("--rows", rows, "CSV rows over [-2.5 eta, 2.5 eta]");
    profile->add_option("--out-dir", out_dir, "Directory for profile.csv and profile.json");

    // curvature
    auto* curvature = app.add_subcommand("curvature", "Curvature statistics of an undeformed model");
    ConfigOptions curv_opts;
    curv_opts.attach(curvature);
    std::string curv_out = "-";
    curvature->add_option("--out", curv_out, "Report path ('-' for stdout)");

    // deform
    auto* deform = app.add_subcommand("deform", "Build the deformation and check its conclusions");
    ConfigOptions deform_opts;
    deform_opts.attach(deform);
    bool search = false;
    int quick_samples = 40;
    std::string deform_out = "-";
    deform->add_flag("--search", search, "Search the admissible region for certified parameters first");
    deform->add_option("--search-samples", quick_samples, "Points per sample set while searching");
    deform->add_option("--out", deform_out, "Report path ('-' for stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "Run one verification suite");
    ConfigOptions verify_opts;
    verify_opts.attach(verify);
    std::string suite;
    int trials = 0;
    std::string verify_out = "-";
    verify->add_option("--suite", suite, "oneill | conformal | gw | rw")->required();
    verify->add_option("--trials", trials, "Points or spectra (suite default when omitted)");
    verify->add_option("--out", verify_out, "Report path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (profile->parsed()) {
            const ProfileOutcome r = run_profile(C, epsilon, eta, tau, rows);
            if (r.report.contains("error")) {
                std::cerr << "profile: " << r.report["error"]["message"].get<std::string>() << '\n';
                write_text((std::filesystem::path(out_dir) / "profile.json").string(), r.report.dump(2));
                return 2;
            }
            write_text((std::filesystem::path(out_dir) / "profile.csv").string(), r.csv);
            write_text((std::filesystem::path(out_dir) / "profile.json").string(), r.report.dump(2));
            std::cerr << "profile: certificates " << (r.passed ? "passed" : "FAILED") << '\n';
            return r.passed ? 0 : 1;
        }
        if (curvature->parsed()) {
            const RunOutcome r = run_curvature(curv_opts.resolve(ExperimentConfig{}));
            return report_exit(r.report, r.passed, curv_out);
        }
        if (deform->parsed()) {
            ExperimentConfig cfg = deform_opts.resolve(shipped_config());
            Json search_log;
            if (search) {
                const SearchOutcome s = search_parameters(cfg, quick_samples);
                std::cerr << "search: " << s.tried << " candidates, " << (s.found ? "witness found" : "none passed")
                          << '\n';
                search_log = Json{{"tried", s.tried}, {"found", s.found}, {"candidates", s.log}};
                if (s.found) cfg = s.witness;
            }
            RunOutcome r = run_deform(cfg);
            if (search) r.report["search"] = search_log;
            if (r.report.contains("error"))
                std::cerr << "deform: " << r.report["error"]["message"].get<std::string>() << '\n';
            else
                std::cerr << "deform: " << (r.passed ? "all conclusions hold" : "some conclusion FAILED") << '\n';
            return report_exit(r.report, r.passed, deform_out);
        }
        if (verify->parsed()) {
            ExperimentConfig fallback = shipped_config();
            if (suite == "conformal") fallback.model = "s2half";
            const ExperimentConfig cfg = verify_opts.resolve(fallback);
            const int n = trials > 0 ? trials : (suite == "rw" ? 100 : suite == "oneill" ? 50 : 20);
            const RunOutcome r = run_verify(suite, cfg, n);
            std::cerr << "verify " << suite << ": " << (r.passed ? "passed" : "FAILED") << '\n';
            return report_exit(r.report, r.passed, verify_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
