#include "tumorfb/cli.hpp"

#include "tumorfb/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace tumorfb {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(&node), path_(std::move(path))
    {
        if (!node.is_object())
            throw ConfigError(where() + " must be an object");
    }

    bool has(const std::string& key) const { return node_->contains(key); }

    template <class T>
    void read(const std::string& key, T& dst)
    {
        if (!node_->contains(key)) return;
        used_.insert(key);
        try {
            dst = node_->at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    template <class Enum, class Convert>
    void read_enum(const std::string& key, Enum& dst, Convert convert)
    {
        if (!node_->contains(key)) return;
        std::string name;
        read(key, name);
        try {
            dst = convert(name);
        } catch (const InvalidArgument& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    Section child(const std::string& key)
    {
        used_.insert(key);
        static const json empty = json::object();
        return Section(node_->contains(key) ? node_->at(key) : empty, path_ + "." + key);
    }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        return node_->at(key);
    }

    std::string where(const std::string& key = {}) const { return key.empty() ? path_ : path_ + "." + key; }

    void finish() const
    {
        std::vector<std::string> unknown;
        for (const auto& [key, value] : node_->items())
            if (!used_.count(key)) unknown.push_back(key);
        if (unknown.empty()) return;
        std::string msg = "unknown key";
        msg += unknown.size() > 1 ? "s" : "";
        msg += " in " + path_ + ":";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

private:
    const json* node_;
    std::string path_;
    std::set<std::string> used_;
};

void parse_solver(Section s, SolverOpts& o)
{
    s.read("n_grid", o.n_grid);
    s.read("dt_init", o.dt_init);
    s.read("dt_max", o.dt_max);
    s.read("picard_tol", o.picard_tol);
    s.read("picard_max", o.picard_max);
    s.read_enum("scheme", o.scheme, time_scheme_from_string);
    s.read("extinction_floor", o.extinction_floor);
    s.read("stationary_rate", o.stationary_rate);
    s.read("bound_tol", o.bound_tol);
    s.read("max_principle_tol", o.max_principle_tol);
    s.read("dt_min", o.dt_min);
    s.read("record_outputs_only", o.record_outputs_only);
    s.finish();
    try {
        o.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(s.where() + ": " + e.what());
    }
}

ordered_json solver_json(const SolverOpts& o)
{
    ordered_json j;
    j["n_grid"] = o.n_grid;
    j["dt_init"] = o.dt_init;
    j["dt_max"] = o.dt_max;
    j["picard_tol"] = o.picard_tol;
    j["picard_max"] = o.picard_max;
    j["scheme"] = to_string(o.scheme);
    j["extinction_floor"] = o.extinction_floor;
    j["stationary_rate"] = o.stationary_rate;
    j["bound_tol"] = o.bound_tol;
    j["max_principle_tol"] = o.max_principle_tol;
    j["dt_min"] = o.dt_min;
    j["record_outputs_only"] = o.record_outputs_only;
    return j;
}

void parse_quasi(Section s, QuasiOptions& o)
{
    s.read("rtol", o.rtol);
    s.read("atol", o.atol);
    s.read("extinction_floor", o.extinction_floor);
    s.read("stationary_rate", o.stationary_rate);
    s.read("dt_init", o.dt_init);
    s.read("dt_min", o.dt_min);
    s.finish();
    if (!(o.rtol > 0.0) || !(o.atol > 0.0) || !(o.dt_init > 0.0) || !(o.dt_min > 0.0))
        throw ConfigError(s.where() + ": tolerances and steps must be positive");
}

ordered_json quasi_json(const QuasiOptions& o)
{
    ordered_json j;
    j["rtol"] = o.rtol;
    j["atol"] = o.atol;
    j["extinction_floor"] = o.extinction_floor;
    j["stationary_rate"] = o.stationary_rate;
    j["dt_init"] = o.dt_init;
    j["dt_min"] = o.dt_min;
    return j;
}

void require(bool ok, const Section& s, const std::string& what)
{
    if (!ok) throw ConfigError(s.where() + ": " + what);
}

std::vector<DataFamily> read_families(Section& s, const std::string& key, std::vector<DataFamily> fallback)
{
    if (!s.has(key)) return fallback;
    std::vector<std::string> names;
    s.read(key, names);
    std::vector<DataFamily> out;
    for (const auto& n : names) {
        try {
            out.push_back(data_family_from_string(n));
        } catch (const InvalidArgument& e) {
            throw ConfigError(s.where(key) + ": " + e.what());
        }
    }
    return out;
}

std::vector<OutcomeCase> read_cases(const json& node, const std::string& path)
{
    if (!node.is_array())
        throw ConfigError(path + " must be an array");
    std::vector<OutcomeCase> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        Section s(node[i], path + "[" + std::to_string(i) + "]");
        OutcomeCase oc;
        require(s.has("R0") && s.has("sigma_tilde") && s.has("c"), s, "cases need R0, sigma_tilde and c");
        s.read("R0", oc.R0);
        s.read("sigma_tilde", oc.sigma_tilde);
        s.read("c", oc.c);
        s.finish();
        require(oc.R0 > 0.0 && oc.sigma_tilde > 0.0 && oc.c >= 0.0, s, "need R0 > 0, sigma_tilde > 0, c >= 0");
        out.push_back(oc);
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j)
{
    write_text(path, j.dump(2) + "\n");
}

fs::path prepare_output(const ScenarioConfig& cfg)
{
    fs::path out(cfg.output);
    fs::create_directories(out);
    return out;
}

ordered_json nullable(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json landscape_json(const StationaryLandscape& land, double length_scale, double sigma_bar)
{
    ordered_json j;
    j["r_sharp"] = land.r_sharp / length_scale;
    j["theta_star"] = land.theta_star;
    j["theta_star_user_units"] = land.theta_star * sigma_bar;
    j["n_roots"] = land.roots.size();
    ordered_json roots = ordered_json::array();
    for (const auto& r : land.roots) {
        ordered_json e;
        e["radius"] = r.radius / length_scale;
        e["radius_scaled"] = r.radius;
        e["slope_sign"] = r.slope_sign;
        e["stability"] = to_string(r.stability);
        roots.push_back(e);
    }
    j["roots"] = roots;
    return j;
}

// Landscape of the scaled model with radii returned in user units.
StationaryLandscape user_landscape(const ModelParams& params, const SmoothingSpec& spec)
{
    const auto scaled = nondimensionalize(params, spec);
    auto land = find_stationary_radii(scaled.params.sigma_tilde, scaled.params, scaled.spec);
    const double k = scaled.factors.length;
    land.r_sharp /= k;
    for (auto& r : land.roots) r.radius /= k;
    land.params = params;
    land.spec = spec;
    return land;
}

std::string csv_row(std::initializer_list<std::string> cells)
{
    std::string row;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) row += ',';
        row += c;
        first = false;
    }
    row += '\n';
    return row;
}

std::string opt_cell(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

std::string status_tag(CheckStatus s)
{
    switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIP";
    }
    return "SKIP";
}

void print_report(const VerificationReport& report, std::ostream& log)
{
    for (const auto& c : report.checks) {
        log << std::left << std::setw(5) << status_tag(c.status) << ' ' << c.name << "  margin "
            << format_double(c.measured_margin) << "  " << c.details << '\n';
    }
    log << "pass " << report.count(CheckStatus::Pass) << ", fail " << report.count(CheckStatus::Fail)
        << ", skipped " << report.count(CheckStatus::Skipped) << '\n';
}

void prefix(VerificationReport& report, const std::string& tag)
{
    for (auto& c : report.checks) c.name = tag + "/" + c.name;
}

std::vector<OutcomeCase> default_cases(const ModelParams& scaled, const SmoothingSpec& spec, double c,
                                       std::size_t random_samples, std::uint64_t seed)
{
    std::vector<OutcomeCase> cases;
    const double st = scaled.sigma_tilde;
    const auto land = find_stationary_radii(st, scaled, spec);
    if (land.roots.size() == 2) {
        const double rs1 = *land.small_root(), rs2 = *land.large_root();
        cases.push_back({0.5 * rs1, st, c});
        cases.push_back({0.5 * (rs1 + rs2), st, c});
        cases.push_back({2.0 * rs2, st, c});
        cases.push_back({0.5 * rs1, st, 0.0});
        cases.push_back({2.0 * rs2, st, 0.0});
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> below(0.0, rs1), above(rs1, 10.0 * rs2);
        for (std::size_t i = 0; i < random_samples; ++i) {
            double r = below(rng);
            cases.push_back({r > 0.0 ? r : 0.5 * rs1, st, 0.0});
        }
        for (std::size_t i = 0; i < random_samples; ++i) {
            double r = above(rng);
            cases.push_back({r > rs1 ? r : 0.5 * (rs1 + rs2), st, 0.0});
        }
    } else {
        cases.push_back({1.0, st, c});
        cases.push_back({3.0, st, c});
        cases.push_back({3.0, st, 0.0});
    }
    cases.push_back({2.0, 1.2 * scaled.sigma_bar, c});
    if (land.theta_star < scaled.sigma_bar)
        cases.push_back({3.0, 0.5 * (land.theta_star + scaled.sigma_bar), c});
    return cases;
}

} // namespace

std::string_view to_string(DataFamily f)
{
    switch (f) {
    case DataFamily::QuadraticCompatible: return "quadratic";
    case DataFamily::ComparisonProfile: return "comparison";
    case DataFamily::QuarticBlend: return "quartic";
    }
    return "comparison";
}

DataFamily data_family_from_string(std::string_view name)
{
    if (name == "quadratic") return DataFamily::QuadraticCompatible;
    if (name == "comparison") return DataFamily::ComparisonProfile;
    if (name == "quartic") return DataFamily::QuarticBlend;
    throw InvalidArgument("unknown initial data family '" + std::string(name) +
                          "' (expected quadratic, comparison or quartic)");
}

InitialData make_initial_data(DataFamily family, double R0, std::size_t n, double blend_centre,
                              const ModelParams& params, const SmoothingSpec& spec)
{
    switch (family) {
    case DataFamily::QuadraticCompatible: return InitialData::quadratic_compatible(R0, n, params, spec);
    case DataFamily::ComparisonProfile: return InitialData::comparison_profile(R0, n, params, spec);
    case DataFamily::QuarticBlend: return InitialData::quartic_blend(R0, blend_centre, n, params, spec);
    }
    return InitialData::comparison_profile(R0, n, params, spec);
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ScenarioConfig parse_config(const json& doc)
{
    ScenarioConfig cfg;
    Section root(doc, "config");

    {
        Section m = root.child("model");
        m.read("c", cfg.params.c);
        m.read("lambda", cfg.params.lambda);
        m.read("mu", cfg.params.mu);
        m.read("sigma_tilde", cfg.params.sigma_tilde);
        m.read("sigma_bar", cfg.params.sigma_bar);
        m.read("gamma", cfg.params.gamma);
        m.read_enum("smoothing", cfg.smoothing, smoothing_kind_from_string);
        m.finish();
        try {
            cfg.params.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(m.where() + ": " + e.what());
        }
    }
    root.read("output", cfg.output);
    root.read("parallel", cfg.parallel);
    root.read("seed", cfg.seed);

    {
        Section b = root.child("bifurcation");
        b.read_enum("axis", cfg.bifurcation.axis, scan_axis_from_string);
        b.read("lo", cfg.bifurcation.lo);
        b.read("hi", cfg.bifurcation.hi);
        b.read("samples", cfg.bifurcation.samples);
        b.finish();
        auto& bc = cfg.bifurcation;
        require(bc.samples >= 1, b, "samples must be at least 1");
        require(bc.lo > 0.0, b, "scan range must stay positive");
        require(bc.samples == 1 || bc.lo < bc.hi, b, "need lo < hi");
    }

    {
        Section s = root.child("simulate");
        auto& sc = cfg.simulate;
        s.read("R0", sc.R0);
        s.read("t_end", sc.t_end);
        s.read_enum("initial_data", sc.family, data_family_from_string);
        s.read("blend_centre", sc.blend_centre);
        s.read("data_samples", sc.data_samples);
        s.read("snapshot_times", sc.snapshot_times);
        parse_solver(s.child("solver"), sc.solver);
        parse_quasi(s.child("quasi"), sc.quasi);
        s.finish();
        require(sc.R0 > 0.0 && sc.t_end > 0.0, s, "need R0 > 0 and t_end > 0");
        require(sc.data_samples >= 3, s, "data_samples must be at least 3");
        require(std::is_sorted(sc.snapshot_times.begin(), sc.snapshot_times.end()), s,
                "snapshot_times must be ascending");
    }

    {
        Section v = root.child("verify");
        auto& vc = cfg.verify;
        {
            Section b = v.child("bounds");
            b.read("c", vc.bounds.c);
            b.read("R0", vc.bounds.R0);
            b.read("t_end", vc.bounds.t_end);
            vc.bounds.families = read_families(b, "families", vc.bounds.families);
            b.finish();
            require(vc.bounds.c > 0.0 && vc.bounds.R0 > 0.0 && vc.bounds.t_end > 0.0, b,
                    "need c, R0 and t_end positive");
        }
        {
            Section m = v.child("matrix");
            m.read("c", vc.matrix.c);
            m.read("t_end", vc.matrix.t_end);
            m.read("small_c", vc.matrix.small_c);
            m.read("tol_conv_full", vc.matrix.tol_conv_full);
            m.read("random_samples", vc.matrix.random_samples);
            if (m.has("cases"))
                vc.matrix.cases = read_cases(m.raw("cases"), m.where("cases"));
            m.finish();
            require(vc.matrix.c >= 0.0 && vc.matrix.t_end > 0.0, m, "need c >= 0 and t_end > 0");
        }
        {
            Section s = v.child("scaling");
            s.read("R0", vc.scaling.R0);
            s.read("t_end", vc.scaling.t_end);
            s.read("c_values", vc.scaling.c_values);
            s.read("samples", vc.scaling.samples);
            s.finish();
            require(!vc.scaling.c_values.empty(), s, "c_values must not be empty");
        }
        {
            Section c = v.child("convergence");
            c.read("R0", vc.convergence.R0);
            c.read("t_end", vc.convergence.t_end);
            c.read("c", vc.convergence.c);
            c.read("n_coarse", vc.convergence.n_coarse);
            c.read("dt_coarse", vc.convergence.dt_coarse);
            c.finish();
        }
        {
            Section m = v.child("monotonicity");
            m.read("lo", vc.monotonicity.lo);
            m.read("hi", vc.monotonicity.hi);
            m.read("sigma_tilde", vc.monotonicity.sigma_tilde);
            m.read("samples", vc.monotonicity.samples);
            m.finish();
            require(vc.monotonicity.lo > 0.0, m, "gamma range must stay positive");
        }
        parse_solver(v.child("solver"), vc.solver);
        v.finish();
    }
    root.finish();
    return cfg;
}

ScenarioConfig load_config(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

ordered_json to_json(const ScenarioConfig& cfg)
{
    ordered_json j;
    ordered_json m;
    m["c"] = cfg.params.c;
    m["lambda"] = cfg.params.lambda;
    m["mu"] = cfg.params.mu;
    m["sigma_tilde"] = cfg.params.sigma_tilde;
    m["sigma_bar"] = cfg.params.sigma_bar;
    m["gamma"] = cfg.params.gamma;
    m["smoothing"] = to_string(cfg.smoothing);
    j["model"] = m;
    j["output"] = cfg.output;
    j["parallel"] = cfg.parallel;
    j["seed"] = cfg.seed;

    ordered_json b;
    b["axis"] = to_string(cfg.bifurcation.axis);
    b["lo"] = cfg.bifurcation.lo;
    b["hi"] = cfg.bifurcation.hi;
    b["samples"] = cfg.bifurcation.samples;
    j["bifurcation"] = b;

    const auto& sc = cfg.simulate;
    ordered_json s;
    s["R0"] = sc.R0;
    s["t_end"] = sc.t_end;
    s["initial_data"] = to_string(sc.family);
    s["blend_centre"] = sc.blend_centre;
    s["data_samples"] = sc.data_samples;
    s["snapshot_times"] = sc.snapshot_times;
    s["solver"] = solver_json(sc.solver);
    s["quasi"] = quasi_json(sc.quasi);
    j["simulate"] = s;

    const auto& vc = cfg.verify;
    ordered_json v;
    ordered_json vb;
    vb["c"] = vc.bounds.c;
    vb["R0"] = vc.bounds.R0;
    vb["t_end"] = vc.bounds.t_end;
    vb["families"] = ordered_json::array();
    for (auto f : vc.bounds.families) vb["families"].push_back(to_string(f));
    v["bounds"] = vb;
    ordered_json vm;
    vm["c"] = vc.matrix.c;
    vm["t_end"] = vc.matrix.t_end;
    vm["small_c"] = vc.matrix.small_c;
    vm["tol_conv_full"] = vc.matrix.tol_conv_full;
    vm["random_samples"] = vc.matrix.random_samples;
    if (vc.matrix.cases) {
        vm["cases"] = ordered_json::array();
        for (const auto& oc : *vc.matrix.cases)
            vm["cases"].push_back(ordered_json{{"R0", oc.R0}, {"sigma_tilde", oc.sigma_tilde}, {"c", oc.c}});
    }
    v["matrix"] = vm;
    ordered_json vs;
    vs["R0"] = vc.scaling.R0;
    vs["t_end"] = vc.scaling.t_end;
    vs["c_values"] = vc.scaling.c_values;
    vs["samples"] = vc.scaling.samples;
    v["scaling"] = vs;
    ordered_json vcv;
    vcv["R0"] = vc.convergence.R0;
    vcv["t_end"] = vc.convergence.t_end;
    vcv["c"] = vc.convergence.c;
    vcv["n_coarse"] = vc.convergence.n_coarse;
    vcv["dt_coarse"] = vc.convergence.dt_coarse;
    v["convergence"] = vcv;
    ordered_json vmo;
    vmo["lo"] = vc.monotonicity.lo;
    vmo["hi"] = vc.monotonicity.hi;
    vmo["sigma_tilde"] = vc.monotonicity.sigma_tilde;
    vmo["samples"] = vc.monotonicity.samples;
    v["monotonicity"] = vmo;
    v["solver"] = solver_json(vc.solver);
    j["verify"] = v;
    return j;
}

ordered_json to_json(const VerificationReport& report)
{
    ordered_json j;
    j["scenario"] = report.scenario;
    ordered_json summary;
    summary["pass"] = report.count(CheckStatus::Pass);
    summary["fail"] = report.count(CheckStatus::Fail);
    summary["skipped"] = report.count(CheckStatus::Skipped);
    j["summary"] = summary;
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["anchor"] = c.anchor;
        e["status"] = to_string(c.status);
        // JSON has no infinities; such margins are written as null.
        e["measured_margin"] = std::isfinite(c.measured_margin) ? ordered_json(c.measured_margin)
                                                                : ordered_json(nullptr);
        e["details"] = c.details;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["measurements"] = report.measurements;
    return j;
}

int cmd_stationary(const ScenarioConfig& cfg, std::ostream& log)
{
    const auto spec = cfg.spec();
    const auto scaled = nondimensionalize(cfg.params, spec);
    const auto land = find_stationary_radii(scaled.params.sigma_tilde, scaled.params, scaled.spec);
    const double k = scaled.factors.length;

    log << "gamma (scaled) " << format_double(scaled.params.gamma) << ", sigma_tilde/sigma_bar "
        << format_double(scaled.params.sigma_tilde) << '\n';
    log << "r_# " << format_double(land.r_sharp / k) << ", theta_* " << format_double(land.theta_star) << '\n';
    if (land.roots.empty()) {
        log << "no stationary solutions\n";
    } else {
        for (const auto& r : land.roots)
            log << "R_s = " << format_double(r.radius / k) << " (" << to_string(r.stability) << ")\n";
    }

    ordered_json j;
    j["config"] = to_json(cfg);
    j["landscape"] = landscape_json(land, k, cfg.params.sigma_bar);
    const auto out = prepare_output(cfg);
    write_json(out / "stationary.json", j);
    return 0;
}

int cmd_bifurcation(const ScenarioConfig& cfg, std::ostream& log)
{
    const auto& bc = cfg.bifurcation;
    const auto scaled = nondimensionalize(cfg.params, cfg.spec());
    const auto scan = scan_bifurcation(bc.axis, bc.lo, bc.hi, bc.samples, scaled.params, cfg.smoothing,
                                       std::max(1u, cfg.parallel));

    std::string csv = csv_row({"param_value", "r_sharp", "theta_star", "n_roots", "R_s1", "R_s2"});
    for (const auto& s : scan.samples) {
        if (!s.landscape) {
            csv += csv_row({format_double(s.value), "", "", "", "", ""});
            log << "sample " << format_double(s.value) << " failed: " << s.error << '\n';
            continue;
        }
        const auto& l = *s.landscape;
        csv += csv_row({format_double(s.value), format_double(l.r_sharp), format_double(l.theta_star),
                        std::to_string(l.roots.size()), opt_cell(l.small_root()), opt_cell(l.large_root())});
    }
    const auto out = prepare_output(cfg);
    write_text(out / "scan.csv", csv);

    int status = 0;
    if (bc.axis == ScanAxis::Gamma) {
        auto report = audit_gamma_monotonicity(scan);
        report.scenario = to_json(cfg);
        print_report(report, log);
        write_json(out / "bifurcation_report.json", to_json(report));
        status = report.any_failed() ? 1 : 0;
    }
    log << "wrote " << scan.samples.size() << " samples to " << (out / "scan.csv").string() << '\n';
    return status;
}

int cmd_simulate(const ScenarioConfig& cfg, std::ostream& log)
{
    const auto spec = cfg.spec();
    const auto& sc = cfg.simulate;
    const auto out = prepare_output(cfg);

    Trajectory traj;
    std::vector<std::pair<double, RadialProfile>> profiles;
    ClassifyOptions cls_opts;
    if (cfg.params.c == 0.0) {
        QuasiOptions q = sc.quasi;
        q.output_times = sc.snapshot_times;
        traj = integrate_quasi(sc.R0, sc.t_end, cfg.params, spec, q);
        cls_opts.extinction_floor = q.extinction_floor;
        // The quasi-stationary profile at a snapshot time is v at R(t).
        for (double ts : sc.snapshot_times) {
            const auto it = std::find(traj.times.begin(), traj.times.end(), ts);
            if (it == traj.times.end()) continue;
            const double R = traj.radii[static_cast<std::size_t>(it - traj.times.begin())];
            const auto v = InitialData::comparison_profile(R, sc.solver.n_grid, cfg.params, spec);
            profiles.emplace_back(ts, RadialProfile{v.sigma0, R});
        }
    } else {
        SolverOpts o = sc.solver;
        o.snapshot_times = sc.snapshot_times;
        const auto data = make_initial_data(sc.family, sc.R0, sc.data_samples, sc.blend_centre, cfg.params, spec);
        traj = simulate_full(data, sc.t_end, cfg.params, spec, o);
        profiles = traj.snapshots;
        cls_opts.tol_conv = cfg.verify.matrix.tol_conv_full;
        cls_opts.extinction_floor = o.extinction_floor;
    }

    std::string csv;
    const bool full = traj.has_diagnostics();
    csv = full ? csv_row({"t", "R", "dRdt", "sup_dev_from_v", "dt_used", "picard_iters", "u_min", "u_max"})
               : csv_row({"t", "R", "dRdt"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (full)
            csv += csv_row({format_double(traj.times[i]), format_double(traj.radii[i]), format_double(traj.rates[i]),
                            format_double(traj.sup_dev_from_v[i]), format_double(traj.dt_used[i]),
                            std::to_string(traj.picard_iters[i]), format_double(traj.u_min[i]),
                            format_double(traj.u_max[i])});
        else
            csv += csv_row({format_double(traj.times[i]), format_double(traj.radii[i]), format_double(traj.rates[i])});
    }
    write_text(out / "trajectory.csv", csv);

    ordered_json snapshot_files = ordered_json::array();
    for (const auto& [t, prof] : profiles) {
        std::string pcsv = csv_row({"y", "u"});
        for (std::size_t i = 0; i < prof.n(); ++i)
            pcsv += csv_row({format_double(prof.y(i)), format_double(prof.u[i])});
        const std::string name = "profile_t" + format_double(t) + ".csv";
        write_text(out / name, pcsv);
        snapshot_files.push_back(name);
    }

    ordered_json j;
    j["config"] = to_json(cfg);
    j["integrator"] = cfg.params.c == 0.0 ? "quasi_stationary" : "full_solver";
    j["termination"] = to_string(traj.termination);
    j["message"] = traj.message;
    j["samples"] = traj.size();
    j["final_time"] = traj.times.back();
    j["final_radius"] = traj.final_radius();
    j["final_rate"] = traj.final_rate();

    std::optional<StationaryLandscape> land;
    try {
        land = user_landscape(cfg.params, spec);
    } catch (const std::exception& e) {
        j["landscape_error"] = e.what();
    }
    ordered_json cls_json;
    if (land) {
        ordered_json lj;
        lj["theta_star"] = land->theta_star;
        lj["R_s1"] = nullable(land->small_root());
        lj["R_s2"] = nullable(land->large_root());
        j["landscape"] = lj;
        const auto cls = classify_limit(traj, *land, cls_opts);
        cls_json["outcome"] = to_string(cls.outcome);
        cls_json["limit"] = cls.outcome == Outcome::ConvergesTo ? ordered_json(cls.limit) : ordered_json(nullptr);
        cls_json["fitted_rate"] = nullable(cls.fitted_rate);
        cls_json["tol_conv"] = cls_opts.tol_conv;
        cls_json["tol_rate"] = cls_opts.tol_rate;
        log << "outcome " << to_string(cls.outcome);
        if (cls.outcome == Outcome::ConvergesTo) log << " (R_s2 = " << format_double(cls.limit) << ")";
        log << '\n';
    }
    j["classification"] = cls_json;
    j["snapshots"] = snapshot_files;
    write_json(out / "summary.json", j);

    log << "termination " << to_string(traj.termination) << " at t = " << format_double(traj.times.back())
        << ", R = " << format_double(traj.final_radius()) << '\n';
    if (traj.termination == Termination::Failed) {
        log << "integration failed: " << traj.message << '\n';
        return 1;
    }
    return 0;
}

VerificationReport run_verification_suite(const ScenarioConfig& cfg)
{
    const unsigned threads = std::max(1u, cfg.parallel);
    const auto scaled = nondimensionalize(cfg.params, cfg.spec());
    const ModelParams& p = scaled.params;
    const SmoothingSpec& spec = scaled.spec;
    const auto& vc = cfg.verify;

    VerificationReport report;
    report.scenario = to_json(cfg);

    // Bounds on the full solver for each family, and on the quasi-stationary flow.
    {
        ModelParams pb = p;
        pb.c = vc.bounds.c;
        std::vector<VerificationReport> parts(vc.bounds.families.size() + 1);
        parallel_for(parts.size(), threads, [&](std::size_t i) {
            const bool quasi = i == vc.bounds.families.size();
            const std::string tag = quasi ? "bounds/quasi" : "bounds/" + std::string(to_string(vc.bounds.families[i]));
            try {
                Trajectory traj;
                if (quasi) {
                    traj = integrate_quasi(vc.bounds.R0, vc.bounds.t_end, p, spec);
                } else {
                    const auto data = make_initial_data(vc.bounds.families[i], vc.bounds.R0, 201, 0.5, pb, spec);
                    traj = simulate_full(data, vc.bounds.t_end, pb, spec, vc.solver);
                }
                parts[i] = audit_bounds(traj, quasi ? p : pb);
                if (traj.termination == Termination::Failed) {
                    Check c;
                    c.name = "solver_run";
                    c.anchor = "a solution exists for all t > 0";
                    c.status = CheckStatus::Fail;
                    c.details = traj.message;
                    parts[i].checks.push_back(c);
                }
            } catch (const std::exception& e) {
                Check c;
                c.name = "solver_run";
                c.anchor = "a solution exists for all t > 0";
                c.status = CheckStatus::Skipped;
                c.details = e.what();
                parts[i].checks.push_back(c);
            }
            prefix(parts[i], tag);
        });
        for (const auto& part : parts) report.append(part);
    }

    // Outcome matrix.
    {
        MatrixOptions mo;
        mo.t_end = vc.matrix.t_end;
        mo.small_c = vc.matrix.small_c;
        mo.tol_conv_full = vc.matrix.tol_conv_full;
        mo.solver = vc.solver;
        const auto cases = vc.matrix.cases ? *vc.matrix.cases
                                           : default_cases(p, spec, vc.matrix.c, vc.matrix.random_samples, cfg.seed);
        auto part = outcome_matrix(cases, p, spec, mo, threads);
        prefix(part, "matrix");
        report.append(part);
    }

    // Linear-in-c scaling of the deviation from v.
    {
        VerificationReport part;
        try {
            const auto study = run_scaling_study(vc.scaling.R0, vc.scaling.t_end, vc.scaling.c_values, p, spec,
                                                 vc.solver, vc.scaling.samples, threads);
            part = judge_scaling(study);
            ordered_json sj;
            sj["c_values"] = study.c_values;
            sj["max_deviation"] = study.max_deviation;
            sj["ratios"] = study.ratios;
            sj["transient_end"] = study.transient_end;
            sj["slope_vs_c"] = study.fit.slope_vs_c;
            sj["residual"] = study.fit.residual;
            report.measurements["scaling"] = sj;
        } catch (const std::exception& e) {
            Check c;
            c.name = "scaling_study";
            c.anchor = "post-transient sup|sigma - v| grows linearly in c";
            c.status = CheckStatus::Skipped;
            c.details = e.what();
            part.checks.push_back(c);
        }
        prefix(part, "scaling");
        report.append(part);
    }

    // Discretization convergence.
    {
        VerificationReport part;
        ModelParams pc = p;
        pc.c = vc.convergence.c;
        try {
            const auto study = run_convergence_study(vc.convergence.R0, vc.convergence.t_end, vc.convergence.n_coarse,
                                                     vc.convergence.dt_coarse, pc, spec, threads);
            part = judge_convergence(study);
            ordered_json cj;
            cj["spatial_ratio"] = study.spatial_ratio;
            cj["backward_euler_ratio"] = study.be_ratio;
            cj["crank_nicolson_ratio"] = study.cn_ratio;
            report.measurements["convergence"] = cj;
        } catch (const NumericalError& e) {
            Check c;
            c.name = "convergence_runs";
            c.anchor = "the discretization converges";
            c.status = CheckStatus::Fail;
            c.details = e.what();
            part.checks.push_back(c);
        } catch (const InvalidArgument& e) {
            Check c;
            c.name = "convergence_runs";
            c.anchor = "the discretization converges";
            c.status = CheckStatus::Skipped;
            c.details = e.what();
            part.checks.push_back(c);
        }
        prefix(part, "convergence");
        report.append(part);
    }

    // Monotonicity of the landscape in gamma.
    {
        ModelParams pm = p;
        pm.sigma_tilde = vc.monotonicity.sigma_tilde;
        const auto scan = scan_bifurcation(ScanAxis::Gamma, vc.monotonicity.lo, vc.monotonicity.hi,
                                           vc.monotonicity.samples, pm, cfg.smoothing, threads);
        auto part = audit_gamma_monotonicity(scan);
        prefix(part, "monotonicity");
        report.append(part);
    }
    return report;
}

int cmd_verify(const ScenarioConfig& cfg, std::ostream& log)
{
    const auto report = run_verification_suite(cfg);
    print_report(report, log);
    const auto out = prepare_output(cfg);
    write_json(out / "report.json", to_json(report));
    return report.any_failed() ? 1 : 0;
}

} // namespace tumorfb
