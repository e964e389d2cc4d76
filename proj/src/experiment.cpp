#include "ricci_lab/experiment.hpp"

#include "ricci_lab/errors.hpp"
#include "ricci_lab/exec.hpp"
#include "ricci_lab/ricci_checker.hpp"
#include "ricci_lab/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace ricci_lab {

namespace {

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json to_json(const Mat& m) {
    Json a = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(to_json(Vec(m.col(j))));
    return a;
}

Json to_json(const Certificate& c) {
    Json j;
    j["name"] = c.name;
    j["relation"] = c.relation;
    j["bound"] = c.bound;
    j["worst"] = c.worst;
    j["margin"] = c.margin;
    j["passed"] = c.passed();
    j["sample_grid"] = c.grid;
    j["witness"] = to_json(c.witness);
    return j;
}

Json to_json(const std::vector<Certificate>& certs) {
    Json a = Json::array();
    for (const Certificate& c : certs) a.push_back(to_json(c));
    return a;
}

Json to_json(const AdmissibilityCheck& c) {
    Json j;
    j["name"] = c.name;
    j["relation"] = c.relation;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["passed"] = c.passed;
    return j;
}

Json error_json(const std::exception& e) {
    Json j;
    const char* type = dynamic_cast<const AdmissibilityError*>(&e)   ? "admissibility"
                       : dynamic_cast<const ConstructionError*>(&e)  ? "construction"
                       : dynamic_cast<const InfeasibilityError*>(&e) ? "infeasibility"
                       : dynamic_cast<const InputError*>(&e)         ? "input"
                                                                     : "other";
    j["type"] = type;
    j["message"] = e.what();
    return j;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw InputError("config key '" + key + "': not a number: '" + value + "'");
    }
    if (pos != value.size()) throw InputError("config key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != std::floor(v)) throw InputError("config key '" + key + "': integer expected");
    return static_cast<long long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw InputError("config key '" + key + "': boolean expected");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double base_distance_of(const SubmersionModel& m, const Vec& y) {
    return std::sqrt(std::max(0.0, m.base_distance.dist2(coordinate_jets(y)).v));
}

double sectional_at(const MetricField& g, const Vec& y) {
    const CurvaturePointData d = riemann(g, y);
    const Mat E = gram_schmidt(Mat::Identity(2, 2), d.g);
    return sectional(d, E.col(0), E.col(1));
}

/// Largest value not above x with one significant digit.
double floor_one_digit(double x) {
    const int e = static_cast<int>(std::floor(std::log10(x)));
    const int digit = std::max(1, static_cast<int>(std::floor(x / std::pow(10.0, e))));
    return std::stod(std::to_string(digit) + "e" + std::to_string(e));
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"model", "p",     "K",       "C_h",     "C_v",        "eps_h",
                                               "eps_v", "eta_h", "eta_v",   "tau_h",   "tau_v",      "epsilon",
                                               "k",     "samples", "seed", "horizontal", "vertical"};
    return keys;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InputError("config line " + std::to_string(number) + ": empty key or value");
        out[key] = value;
    }
    return out;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    DeformationParams& q = cfg.params;
    if (key == "model") {
        cfg.model = value;
    } else if (key == "p") {
        std::vector<double> xs;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) xs.push_back(parse_double(key, trim(item)));
        if (xs.size() != 2) throw InputError("config key 'p': expected two comma-separated coordinates");
        cfg.p = Eigen::Vector2d(xs[0], xs[1]);
    } else if (key == "K") {
        q.K = parse_double(key, value);
    } else if (key == "C_h") {
        q.C_h = parse_double(key, value);
    } else if (key == "C_v") {
        q.C_v = parse_double(key, value);
    } else if (key == "eps_h") {
        q.eps_h = parse_double(key, value);
    } else if (key == "eps_v") {
        q.eps_v = parse_double(key, value);
    } else if (key == "eta_h") {
        q.eta_h = parse_double(key, value);
    } else if (key == "eta_v") {
        q.eta_v = parse_double(key, value);
    } else if (key == "tau_h") {
        q.tau_h = parse_double(key, value);
    } else if (key == "tau_v") {
        q.tau_v = parse_double(key, value);
    } else if (key == "epsilon") {
        q.epsilon = parse_double(key, value);
    } else if (key == "k") {
        q.k = static_cast<int>(parse_int(key, value));
    } else if (key == "samples") {
        const long long s = parse_int(key, value);
        if (s < 1) throw InputError("config key 'samples': must be positive");
        cfg.samples = static_cast<int>(s);
    } else if (key == "seed") {
        const long long s = parse_int(key, value);
        if (s < 0) throw InputError("config key 'seed': must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "horizontal") {
        q.horizontal = parse_bool(key, value);
    } else if (key == "vertical") {
        q.vertical = parse_bool(key, value);
    } else {
        throw InputError("unknown config key '" + key + "'");
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    for (const auto& [k, v] : parse_key_values(in)) apply_config_entry(cfg, k, v);
    return cfg;
}

ExperimentConfig shipped_config() {
    ExperimentConfig cfg;
    cfg.model = "hopf";
    DeformationParams& q = cfg.params;
    q.K = 1.0;
    q.C_h = 6.0;
    q.C_v = -56.0;
    q.eps_h = 0.1;
    q.eps_v = 0.1;
    q.eta_v = 0.1;
    q.tau_v = 2e-9;
    q.eta_h = 6e-10;
    q.tau_h = 2e-41;
    q.epsilon = 0.5;
    q.k = 2;
    cfg.samples = 200;
    cfg.seed = 7;
    return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
    const DeformationParams& q = cfg.params;
    Json j;
    j["model"] = cfg.model;
    j["p"] = cfg.p.size() == 0 ? Json(nullptr) : to_json(cfg.p);
    j["K"] = q.K;
    j["C_h"] = q.C_h;
    j["C_v"] = q.C_v;
    j["eps_h"] = q.eps_h;
    j["eps_v"] = q.eps_v;
    j["eta_h"] = q.eta_h;
    j["eta_v"] = q.eta_v;
    j["tau_h"] = q.tau_h;
    j["tau_v"] = q.tau_v;
    j["epsilon"] = q.epsilon;
    j["k"] = q.k;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["horizontal"] = q.horizontal;
    j["vertical"] = q.vertical;
    return j;
}

MatrixField difference_field(const MatrixField& a, const MatrixField& b) {
    MatrixField out;
    out.chart_id = a.chart_id;
    out.dim = a.dim;
    out.domain = a.domain;
    out.eval = [a, b](const Vec& x) { return a.at(x) - b.at(x); };
    return out;
}

std::string stable_dump(const Json& report) {
    Json copy = report;
    copy.erase("timing");
    return copy.dump(2);
}

// ---------------------------------------------------------------- profile

ProfileOutcome run_profile(double C, double epsilon, double eta, double tau, int rows) {
    ProfileOutcome out;
    Json& r = out.report;
    r["kind"] = "profile";
    r["parameters"] = Json{{"C", C}, {"epsilon", epsilon}, {"eta", eta}, {"tau", tau}};
    try {
        const BumpProfile p = inspect_profile(C, epsilon, eta, tau);
        r["nu"] = p.nu;
        r["cutoff_c2_bound"] = p.cutoff.c2_bound;
        r["certificates"] = to_json(p.certificates);
        out.passed = p.certified();
        std::ostringstream csv;
        csv.precision(17);
        csv << "t,phi,dphi,ddphi\n";
        const int m = std::max(rows, 2);
        for (int i = 0; i < m; ++i) {
            const double t = -2.5 * eta + 5.0 * eta * i / (m - 1);
            const Eval3 e = p(t);
            csv << t << ',' << e.v << ',' << e.d1 << ',' << e.d2 << '\n';
        }
        out.csv = csv.str();
    } catch (const Error& e) {
        r["error"] = error_json(e);
        out.passed = false;
    }
    r["passed"] = out.passed;
    return out;
}

// ---------------------------------------------------------------- curvature

RunOutcome run_curvature(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    Json& r = out.report;
    r["kind"] = "curvature";
    r["config"] = config_to_json(cfg);
    try {
        const SubmersionModel m = make_model(cfg.model, cfg.p);
        const SampleSet total = box_samples("global", m.sample_box, cfg.samples, cfg.seed);
        const SampleSet base = box_samples("global", m.geometry.base.domain, cfg.samples, cfg.seed + 1);
        const auto ric = ric_k_samples(m.geometry.total, total, cfg.params.k, cfg.frames);
        std::vector<double> vals;
        for (const auto& x : ric) vals.push_back(x.value);
        const SampleMin mn = sample_min(total, vals);
        Json t;
        t["sample_set"] = total.id;
        t["count"] = mn.count;
        t["ric_k_min"] = mn.value;
        t["ric_k_max"] = *std::max_element(vals.begin(), vals.end());
        t["argmin_point"] = to_json(total.points[static_cast<std::size_t>(mn.argmin)]);
        r["total"] = t;
        const auto rr = ricci_range_samples(m.geometry.base, base);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& x : rr) {
            lo = std::min(lo, x.min);
            hi = std::max(hi, x.max);
        }
        r["base"] = Json{{"sample_set", base.id}, {"count", static_cast<int>(rr.size())}, {"ricci_min", lo},
                         {"ricci_max", hi}, {"sec_at_p", sectional_at(m.geometry.base, m.base_distance.center)}};
        out.passed = true;
    } catch (const Error& e) {
        r["error"] = error_json(e);
    }
    r["passed"] = out.passed;
    r["timing"] = Json{{"wall_seconds", elapsed_since(t0)}};
    return out;
}

// ---------------------------------------------------------------- deform

namespace {

struct DrRecord {
    BlockStats blocks;
    DeltaRicVerdict verdict;
};

Json deform_body(const SubmersionModel& m, const DeformedMetrics& d, const ExperimentConfig& cfg, bool& passed) {
    const DeformationParams& q = d.params;
    const int n = m.geometry.total_dim(), b = m.geometry.base_dim;
    Json r;
    r["admissibility"] = Json::array();
    for (const auto& c : d.admissibility) r["admissibility"].push_back(to_json(c));
    r["certificates"] = Json{{"omega_h", d.omega_h ? to_json(d.omega_h->certificates) : Json::array()},
                             {"omega_v", d.omega_v ? to_json(d.omega_v->certificates) : Json::array()}};
    bool certs_ok = (!d.omega_h || d.omega_h->certified()) && (!d.omega_v || d.omega_v->certified());

    const SamplePlan plan = make_sample_plan(m, q, cfg.samples, cfg.seed);
    const Vec p = m.base_distance.center;

    // Base.
    Json base;
    const double sec_p = sectional_at(d.g_tilde_B, p);
    const Mat Eb = gram_schmidt(Mat::Identity(b, b), m.geometry.base.at(p).value());
    base["sec_at_p"] = Json{{"sample_set", "center"},
                            {"direct", sec_p},
                            {"predicted", conformal_sectional_predict(m.geometry.base, d.wh_base, p, Eb.col(0), Eb.col(1))},
                            {"undeformed", sectional_at(m.geometry.base, p)}};
    bool negative_found = false, positive_found = false;
    const double supp_h = q.horizontal ? 2.0 * q.eta_h : 0.0;
    Json ricci = Json::array();
    for (const SampleSet& s : plan.base) {
        const auto rr = ricci_range_samples(d.g_tilde_B, s);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < rr.size(); ++i) {
            lo = std::min(lo, rr[i].min);
            hi = std::max(hi, rr[i].max);
            if (rr[i].min < 0.0) negative_found = true;
            if (rr[i].max > 0.0 && base_distance_of(m, s.points[i]) > supp_h) positive_found = true;
        }
        ricci.push_back(Json{{"sample_set", s.id}, {"count", static_cast<int>(rr.size())}, {"ricci_min", lo},
                             {"ricci_max", hi}});
    }
    base["ricci"] = ricci;
    base["ricci_signs"] = Json{{"negative_found", negative_found}, {"positive_away_from_supp_omega_h", positive_found}};
    r["base"] = base;

    // Total space: ric_k of both metrics and DR verdicts.
    Json ric = Json::array(), drs = Json::array();
    double min_tilde = std::numeric_limits<double>::infinity(), min_orig = min_tilde;
    bool verdicts_ok = true;
    for (const SampleSet& s : plan.total) {
        const auto rt = ric_k_samples(d.g_tilde_M, s, q.k, cfg.frames);
        const auto ro = ric_k_samples(m.geometry.total, s, q.k, cfg.frames);
        std::vector<double> vt, vo;
        for (const auto& x : rt) vt.push_back(x.value);
        for (const auto& x : ro) vo.push_back(x.value);
        const SampleMin mt = sample_min(s, vt), mo = sample_min(s, vo);
        min_tilde = std::min(min_tilde, mt.value);
        min_orig = std::min(min_orig, mo.value);
        const auto at = static_cast<std::size_t>(mt.argmin);
        ric.push_back(Json{{"sample_set", s.id},
                           {"count", mt.count},
                           {"deformed_min", mt.value},
                           {"deformed_argmin_point", to_json(s.points[at])},
                           {"deformed_argmin_frame", to_json(rt[at].frame)},
                           {"undeformed_min", mo.value}});

        const auto recs = map_indices<DrRecord>(s.points.size(), [&](std::size_t i) {
            const DeltaR dr = delta_R(m, d, s.points[i]);
            const bool plateau = q.vertical && base_distance_of(m, m.geometry.project(s.points[i])) < q.tau_v;
            const auto [lhh, lhv] = region_lambdas(dr.blocks, q, plateau);
            FrameSearchConfig fc = cfg.frames;
            fc.seed = cfg.frames.seed + i;
            return DrRecord{dr.blocks, verify_delta_ric(dr.matrix, n, b, q.k, q.epsilon, lhh, lhv, fc)};
        });
        Json row;
        row["sample_set"] = s.id;
        row["count"] = static_cast<int>(recs.size());
        double vv = 0, hhl = 0, hvl = 0, hh = std::numeric_limits<double>::infinity(), hv = hh, omin = hh;
        int hyp = 0, orc = 0, inconsistent = 0, rw = 0, small = 0;
        for (const DrRecord& x : recs) {
            vv = std::max(vv, x.blocks.vv_norm);
            hhl = std::max(hhl, x.blocks.hh_leak);
            hvl = std::max(hvl, x.blocks.hv_leak);
            hh = std::min(hh, x.blocks.hh_min);
            hv = std::min(hv, x.blocks.hv_min);
            omin = std::min(omin, x.verdict.oracle_min);
            hyp += x.verdict.hypothesis;
            orc += x.verdict.oracle_ok;
            inconsistent += !x.verdict.consistent;
            rw += x.verdict.hypothesis && x.verdict.rw_sum;
            small += x.verdict.hypothesis && !x.verdict.rw_sum && x.verdict.all_small;
        }
        row["vv_norm_max"] = vv;
        row["hh_leak_max"] = hhl;
        row["hv_leak_max"] = hvl;
        row["hh_min"] = hh;
        row["hv_min"] = hv;
        row["delta"] = delta_ric_delta(q.epsilon, n);
        row["hypothesis_holds"] = hyp;
        row["via_sum_condition"] = rw;
        row["via_all_small"] = small;
        row["oracle_min"] = omin;
        row["oracle_above_minus_epsilon"] = orc;
        row["inconsistent"] = inconsistent;
        drs.push_back(row);
        const int count = static_cast<int>(recs.size());
        verdicts_ok = verdicts_ok && hyp == count && orc == count && inconsistent == 0;
    }
    r["total"] = Json{{"k", q.k}, {"ric_k", ric}, {"deformed_min", min_tilde}, {"undeformed_min", min_orig}};
    r["delta_R"] = drs;

    // C^1 distances.
    NormEstimate dm{0.0, "", Vec()}, db{0.0, "", Vec()};
    const MatrixField diff_m = difference_field(d.g_tilde_M, m.geometry.total);
    const MatrixField diff_b = difference_field(d.g_tilde_B, m.geometry.base);
    for (const SampleSet& s : plan.total) {
        const NormEstimate e = c1_norm(diff_m, m.geometry.total, s);
        if (dm.sample_set.empty() || e.value > dm.value) dm = e;
    }
    for (const SampleSet& s : plan.base) {
        const NormEstimate e = c1_norm(diff_b, m.geometry.base, s);
        if (db.sample_set.empty() || e.value > db.value) db = e;
    }
    r["c1_distance"] = Json{{"total", Json{{"value", dm.value}, {"sample_set", dm.sample_set}, {"worst_point", to_json(dm.worst_point)}}},
                            {"base", Json{{"value", db.value}, {"sample_set", db.sample_set}, {"worst_point", to_json(db.worst_point)}}}};

    Json c;
    c["negative_curvature_at_p"] = sec_p < -q.K;
    c["ric_k_positive"] = min_tilde > 0.0;
    c["ric_k_within_epsilon"] = min_tilde >= min_orig - q.epsilon;
    c["base_ricci_both_signs"] = negative_found && positive_found;
    c["c1_distance_below_epsilon"] = dm.value < q.epsilon && db.value < q.epsilon;
    c["certificates_passed"] = certs_ok;
    c["delta_R_verdicts_passed"] = verdicts_ok;
    passed = true;
    for (const auto& [k, v] : c.items()) passed = passed && v.get<bool>();
    r["conclusions"] = c;
    return r;
}

} // namespace

RunOutcome run_deform(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome out;
    Json& r = out.report;
    r["kind"] = "deform";
    r["config"] = config_to_json(cfg);
    try {
        const SubmersionModel m = make_model(cfg.model, cfg.p);
        DeformationParams q = cfg.params;
        q.p = m.base_distance.center;
        const DeformedMetrics d = build_deformation(m, q);
        bool passed = false;
        const Json body = deform_body(m, d, cfg, passed);
        for (const auto& [k, v] : body.items()) r[k] = v;
        out.passed = passed;
    } catch (const Error& e) {
        r["error"] = error_json(e);
        out.passed = false;
    }
    r["passed"] = out.passed;
    r["timing"] = Json{{"wall_seconds", elapsed_since(t0)}};
    return out;
}

SearchOutcome search_parameters(const ExperimentConfig& base, int quick_samples) {
    SearchOutcome out;
    out.log = Json::array();
    const SubmersionModel m = make_model(base.model, base.p);
    const double eta_cap = 0.5 * std::min(1.0, m.base_distance.injectivity_radius);
    for (double eta_v : {0.2, 0.1, 0.05}) {
        if (eta_v >= eta_cap) continue;
        for (double eps_v : {0.1, 0.05})
            for (double eps_h : {0.1, 0.05})
                for (double fv : {0.05, 0.02, 0.005}) {
                    const double tau_v = floor_one_digit(fv * omega_tau_limit(base.params.C_v, eps_v, eta_v));
                    for (double gh : {0.9, 0.5}) {
                        const double eta_h = floor_one_digit(gh * tau_v / 3.0);
                        for (double fh : {0.05, 0.02, 0.005}) {
                            ExperimentConfig c = base;
                            DeformationParams& q = c.params;
                            q.eta_v = eta_v;
                            q.eps_v = eps_v;
                            q.eps_h = eps_h;
                            q.tau_v = tau_v;
                            q.eta_h = eta_h;
                            q.tau_h = floor_one_digit(fh * omega_tau_limit(q.C_h, eps_h, eta_h));
                            c.samples = quick_samples;
                            ++out.tried;
                            const RunOutcome run = run_deform(c);
                            Json entry = config_to_json(c);
                            entry["passed"] = run.passed;
                            if (run.report.contains("error")) entry["error"] = run.report["error"];
                            out.log.push_back(entry);
                            if (run.passed) {
                                c.samples = base.samples;
                                out.found = true;
                                out.witness = c;
                                return out;
                            }
                        }
                    }
                }
    }
    return out;
}

// ---------------------------------------------------------------- verify

namespace {

RunOutcome verify_oneill(const ExperimentConfig& cfg, int trials) {
    RunOutcome out;
    const SubmersionModel m = make_model(cfg.model);
    const SampleSet s = box_samples("global", m.sample_box, trials, cfg.seed);
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    Json rows = Json::array();
    for (const Vec& x : s.points) {
        const Mat gB = m.geometry.base.at(m.geometry.project(x)).value();
        const auto [u, v] = random_orthonormal_pair(gB, rng);
        const OneillCheck c = verify_oneill(m.geometry, x, u, v);
        worst = std::max(worst, c.residual);
        rows.push_back(Json{{"point", to_json(x)},
                            {"sec_base", c.sec_base},
                            {"sec_total", c.sec_total},
                            {"a_squared", c.a_squared},
                            {"residual", c.residual}});
    }
    out.passed = worst < 1e-6;
    out.report["sample_set"] = s.id;
    out.report["tolerance"] = 1e-6;
    out.report["max_residual"] = worst;
    out.report["checks"] = rows;
    return out;
}

RunOutcome verify_conformal(const ExperimentConfig& cfg, int points) {
    RunOutcome out;
    const DistanceModel base = make_base_model(cfg.model);
    struct Build {
        double C, eps, eta;
    };
    const double eta_cap = 0.5 * std::min(1.0, base.injectivity_radius);
    const std::vector<Build> builds{{2.0, 0.5, std::min(0.1, 0.5 * eta_cap)},
                                    {-3.0, 0.5, std::min(0.08, 0.4 * eta_cap)},
                                    {6.0, 0.3, std::min(0.05, 0.25 * eta_cap)}};
    double worst = 0.0;
    Json rows = Json::array();
    std::uint64_t seed = cfg.seed;
    for (const Build& bd : builds) {
        const double tau = floor_one_digit(0.02 * omega_tau_limit(bd.C, bd.eps, bd.eta));
        Json row{{"C", bd.C}, {"epsilon", bd.eps}, {"eta", bd.eta}, {"tau", tau}};
        try {
            const OmegaFunction w = build_omega(base, bd.C, bd.eps, bd.eta, tau);
            const MetricField gt = conformal_metric(base.metric, w.of_jets, base.metric.chart_id);
            std::vector<Vec> pts;
            for (const Band& band : {Band{"core", 0.0, tau}, Band{"shell", tau, 2.0 * bd.eta}}) {
                const SampleSet s = base_band_samples(base, band, (points + 1) / 2, seed++);
                pts.insert(pts.end(), s.points.begin(), s.points.end());
            }
            double e = 0.0;
            for (const Vec& y : pts) {
                const Tensor4 pred = conformal_curvature_predict(base.metric, w.of_jets, y);
                const Tensor4 direct = riemann(gt, y).riemann;
                e = std::max(e, (pred - direct).max_abs() / std::max(1.0, direct.max_abs()));
            }
            row["points"] = static_cast<int>(pts.size());
            row["sample_sets"] = Json::array({"core", "shell"});
            row["max_relative_error"] = e;
            row["sec_at_p"] = sectional_at(gt, base.center);
            worst = std::max(worst, e);
        } catch (const Error& e) {
            row["error"] = error_json(e);
            worst = std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
    }
    out.passed = worst < 1e-6;
    out.report["tolerance"] = 1e-6;
    out.report["max_relative_error"] = std::isfinite(worst) ? Json(worst) : Json(nullptr);
    out.report["builds"] = rows;
    return out;
}

RunOutcome verify_gw(const ExperimentConfig& cfg, int points) {
    RunOutcome out;
    const SubmersionModel m = make_model(cfg.model, cfg.p);
    DeformationParams q = cfg.params;
    q.p = m.base_distance.center;
    const DeformedMetrics d = build_deformation(m, q);
    const int n = m.geometry.total_dim(), b = m.geometry.base_dim;
    // Points spread over the scales of the deformation.
    std::vector<Vec> pts;
    std::vector<std::string> ids;
    const SamplePlan plan = make_sample_plan(m, q, std::max(1, points / 4), cfg.seed);
    for (std::size_t i = 0; pts.size() < static_cast<std::size_t>(points); ++i) {
        const SampleSet& s = plan.total[i % plan.total.size()];
        const std::size_t j = i / plan.total.size();
        if (j >= s.points.size()) {
            if (i > 100000) break;
            continue;
        }
        pts.push_back(s.points[j]);
        ids.push_back(s.id);
    }
    std::map<GwFamily, double> worst;
    for (GwFamily f : kGwFamilies) worst[f] = 0.0;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> N;
    auto combo = [&](const Mat& cols) {
        Vec c(cols.cols());
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = N(rng);
        return Vec(cols * c);
    };
    for (const Vec& x : pts) {
        const GwPredictor gw(d.hat, d.wv_total, x);
        const CurvaturePointData direct = riemann(d.g_tilde_M, x);
        const Mat E = gw.tensors().adapted_frame();
        const Mat H = E.leftCols(b), V = E.rightCols(n - b);
        for (GwFamily f : kGwFamilies) {
            const bool first_h = f == GwFamily::hhh_v || f == GwFamily::hhh_h || f == GwFamily::hvh_v || f == GwFamily::hvh_h;
            const bool second_h = f == GwFamily::hhh_v || f == GwFamily::hhh_h;
            const bool third_h = f != GwFamily::vvv_h && f != GwFamily::vvv_v;
            const Vec a = combo(first_h ? H : V), bb = combo(second_h ? H : V), c = combo(third_h ? H : V);
            const Vec pred = gw.predict(f, a, bb, c);
            const Vec dir = gw_direct(f, direct, gw.tensors(), a, bb, c);
            const double scale = std::max(1.0, std::sqrt(dir.dot(direct.g * dir)));
            const Vec diff = pred - dir;
            worst[f] = std::max(worst[f], std::sqrt(std::max(0.0, diff.dot(direct.g * diff))) / scale);
        }
    }
    Json fam;
    double all = 0.0;
    for (GwFamily f : kGwFamilies) {
        fam[gw_family_name(f)] = worst[f];
        all = std::max(all, worst[f]);
    }
    out.passed = all < 1e-5 && !pts.empty();
    out.report["tolerance"] = 1e-5;
    out.report["points"] = static_cast<int>(pts.size());
    Json sets = Json::array();
    for (const auto& id : ids) sets.push_back(id);
    out.report["point_sample_sets"] = sets;
    out.report["max_relative_error"] = fam;
    return out;
}

RunOutcome verify_rw(const ExperimentConfig& cfg, int trials) {
    RunOutcome out;
    std::mt19937_64 rng(cfg.seed);
    int agreements = 0;
    double worst_gap = std::numeric_limits<double>::infinity();
    Json rows = Json::array();
    for (int t = 0; t < trials; ++t) {
        const std::array<int, 3> dims = t % 2 == 0 ? std::array<int, 3>{2, 2, 0} : std::array<int, 3>{2, 3, 0};
        const BlockSpectrum s = random_block_spectrum(dims, -3.0, 3.0, rng);
        const int n = s.n();
        const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
        const RwResult rw = reiser_wraith_bound(s, k, -std::numeric_limits<double>::infinity());
        const double c = rw.min_value;
        FrameSearchConfig fc;
        fc.seed = cfg.seed + static_cast<std::uint64_t>(t);
        fc.restarts = 6;
        fc.exhaustive_grid = n <= 4 ? 24 : 10;
        const FrameSumResult fr = brute_force_sum_min(assemble_block_operator(s), Mat::Identity(n, n), k, fc);
        const double frame_min = std::isnan(fr.grid_min) ? fr.value : std::min(fr.value, fr.grid_min);
        const bool agree = frame_min > c - 1e-3;
        agreements += agree;
        worst_gap = std::min(worst_gap, frame_min - c);
        rows.push_back(Json{{"dims", Json::array({dims[0], dims[1], dims[2]})},
                            {"k", k},
                            {"certified_bound", c},
                            {"frame_min", frame_min},
                            {"agree", agree}});
    }
    out.passed = agreements == trials;
    out.report["trials"] = trials;
    out.report["agreements"] = agreements;
    out.report["tolerance"] = 1e-3;
    out.report["min_frame_minus_bound"] = trials > 0 ? Json(worst_gap) : Json(nullptr);
    out.report["spectra"] = rows;
    return out;
}

} // namespace

RunOutcome run_verify(const std::string& suite, const ExperimentConfig& cfg, int trials) {
    const auto t0 = std::chrono::steady_clock::now();
    if (trials < 1) throw InputError("trials must be positive");
    RunOutcome out;
    try {
        if (suite == "oneill") out = verify_oneill(cfg, trials);
        else if (suite == "conformal") out = verify_conformal(cfg, trials);
        else if (suite == "gw") out = verify_gw(cfg, trials);
        else if (suite == "rw") out = verify_rw(cfg, trials);
        else throw InputError("unknown suite '" + suite + "' (oneill, conformal, gw, rw)");
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        out.report["error"] = error_json(e);
        out.passed = false;
    }
    Json r;
    r["kind"] = "verify";
    r["suite"] = suite;
    r["model"] = cfg.model;
    r["seed"] = cfg.seed;
    for (const auto& [k, v] : out.report.items()) r[k] = v;
    r["passed"] = out.passed;
    r["timing"] = Json{{"wall_seconds", elapsed_since(t0)}};
    out.report = r;
    return out;
}

} // namespace ricci_lab
