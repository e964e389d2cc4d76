#pragma once

// Experiment pipelines behind the command-line tool: configuration files,
// the profile, curvature, deform and verify runs, and their JSON reports.
// Reports keep insertion order and carry no timestamps outside "timing", so
// equal configs give byte-identical output once that field is dropped.

#include "ricci_lab/deformation.hpp"
#include "ricci_lab/frame_search.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ricci_lab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
    std::string model = "hopf";
    /// Base point of the deformation (empty: chart origin).
    Vec p;
    DeformationParams params;
    /// Points per sample set.
    int samples = 200;
    std::uint64_t seed = 7;
    FrameSearchConfig frames;
};

/// Keys accepted in config files and as flags of the same name.
const std::vector<std::string>& config_keys();

/// Parses "key = value" lines; '#' starts a comment. InputError on malformed lines.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Sets one key (InputError for unknown keys or bad values).
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig load_config(const std::string& path);

Json config_to_json(const ExperimentConfig& cfg);

/// A field evaluated as a - b.
MatrixField difference_field(const MatrixField& a, const MatrixField& b);

struct RunOutcome {
    Json report;
    bool passed = false;
};

/// Profile table (t, phi, phi', phi'') as CSV plus the certificate record.
struct ProfileOutcome {
    Json report;
    std::string csv;
    bool passed = false;
};
ProfileOutcome run_profile(double C, double epsilon, double eta, double tau, int rows);

/// Undeformed curvature statistics of a model: ric_k on M, Ricci range on B.
RunOutcome run_curvature(const ExperimentConfig& cfg);

/// Builds the deformation and reports curvature, distances, DR verdicts and the
/// four conclusions. Construction and admissibility failures are reported, not thrown.
RunOutcome run_deform(const ExperimentConfig& cfg);

/// Sweeps (eta_v, eps_v, eps_h, tau_v, eta_h, tau_h) on a logarithmic ladder ordered by the
/// admissibility inequalities and returns the first candidate whose quick run passes
/// every check; `quick_samples` points per set are used while searching.
struct SearchOutcome {
    bool found = false;
    ExperimentConfig witness;
    int tried = 0;
    Json log;
};
SearchOutcome search_parameters(const ExperimentConfig& base, int quick_samples);

/// Suites: "oneill", "conformal", "gw", "rw". InputError for an unknown suite.
/// `cfg` supplies the model (a base model name for "conformal"), the seed and, for "gw", the
/// deformation parameters.
RunOutcome run_verify(const std::string& suite, const ExperimentConfig& cfg, int trials);

/// The shipped Hopf parameter set (the contents of configs/hopf_default.cfg).
ExperimentConfig shipped_config();

/// The report with the "timing" field removed, serialized.
std::string stable_dump(const Json& report);

} // namespace ricci_lab
