#include "rabispec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "rabispec/bath.hpp"
#include "rabispec/errors.hpp"
#include "rabispec/rabi_ed.hpp"
#include "rabispec/vanvleck.hpp"

namespace rabispec::cli {

using nlohmann::json;

namespace {

bool is_map_mode(const std::string& mode) {
    return mode == "spectrum" || mode == "bessel-map" || mode == "coupling-map";
}

sweep::Axis axis(const std::string& name, double lo, double hi, std::size_t n) {
    return {name, lo, hi, n};
}

std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    if (!j.is_object()) {
        throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
    }
    for (const auto& item : j.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ConfigError(join_path(path, item.key()) + ": unknown key");
        }
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ConfigError(path + ": expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(path + ": must be finite");
    }
    return v;
}

long long get_integer(const json& j, const std::string& path, long long lo) {
    if (!j.is_number_integer()) {
        throw ConfigError(path + ": expected an integer");
    }
    const long long v = j.get<long long>();
    if (v < lo) {
        throw ConfigError(path + ": must be >= " + std::to_string(lo));
    }
    return v;
}

template <typename Setter>
void number_fields(const json& j, const std::string& path,
                   const std::vector<std::pair<std::string, double*>>& fields, Setter&& extra) {
    std::set<std::string> allowed;
    for (const auto& f : fields) {
        allowed.insert(f.first);
    }
    extra(allowed);
    check_keys(j, path, allowed);
    for (const auto& f : fields) {
        if (j.contains(f.first)) {
            *f.second = get_number(j.at(f.first), join_path(path, f.first));
        }
    }
}

sweep::Axis parse_axis(const json& j, const std::string& path) {
    check_keys(j, path, {"name", "min", "max", "points"});
    for (const char* k : {"name", "min", "max", "points"}) {
        if (!j.contains(k)) {
            throw ConfigError(join_path(path, k) + ": required");
        }
    }
    if (!j.at("name").is_string()) {
        throw ConfigError(join_path(path, "name") + ": expected a string");
    }
    sweep::Axis a;
    a.name = j.at("name").get<std::string>();
    a.min = get_number(j.at("min"), join_path(path, "min"));
    a.max = get_number(j.at("max"), join_path(path, "max"));
    a.points = static_cast<std::size_t>(get_integer(j.at("points"), join_path(path, "points"), 0));
    if (a.points == 0) {
        throw ConfigError(join_path(path, "points") + ": empty axis, at least 1 point required");
    }
    return a;
}

json axis_json(const sweep::Axis& a) {
    return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"points", a.points}};
}

std::string mode_name(niba::Mode m) {
    return m == niba::Mode::full ? "full" : "markov";
}

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

std::set<std::string> axis_names(const RunConfig& c) {
    return {c.axis1.name, c.axis2.name};
}

std::string label_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_header(std::ostream& out, const RunConfig& cfg, const std::string& columns) {
    out << "# " << kVersion << "\n";
    out << "# config: " << to_json(cfg).dump() << "\n";
    out << "# columns: " << columns << "\n";
}

unsigned resolve_workers(unsigned flag, const RunConfig& cfg) {
    if (flag > 0) {
        return flag;
    }
    if (cfg.numerics.workers > 0) {
        return cfg.numerics.workers;
    }
    if (const char* env = std::getenv("RABISPEC_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
        throw ConfigError(std::string("RABISPEC_WORKERS: expected a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// --- subcommands -----------------------------------------------------------

void run_map(const RunConfig& cfg, unsigned workers, std::ostream& out, std::ostream& log) {
    sweep::SpectrumNumerics num;
    num.mode = cfg.numerics.susceptibility;
    num.table.cutoff = cfg.numerics.quad_tol;
    num.table.mats_tol = cfg.numerics.mats_tol;
    num.table.tau_cap = cfg.numerics.tau_cap;
    const sweep::SpectrumEvaluator evaluator(cfg.model, cfg.baths, cfg.axis1, cfg.axis2, num);
    const sweep::SpectrumGrid grid = sweep::run_grid(cfg.axis1, cfg.axis2, evaluator.factory(), workers);
    if (grid.failures > 0) {
        log << "warning: " << grid.failures << " point(s) failed and are written as nan\n";
        for (const auto& line : grid.failure_log) {
            log << "  " << line << "\n";
        }
    }
    sweep::write_spectrum_csv(out, grid, to_json(cfg).dump(), kVersion);
}

void run_overlays(const RunConfig& cfg, std::ostream& out) {
    vanvleck::CorrectionPolicy policy;
    policy.include_second_order = cfg.numerics.corrections;
    policy.k_max = cfg.numerics.k_max;
    policy.p_max = cfg.numerics.p_max;
    policy.resonance_guard = cfg.numerics.resonance_guard;

    std::vector<std::pair<int, int>> branches;
    if (cfg.model.eps_d == 0.0) {
        branches = {{0, -1}, {0, 0}, {0, 1}};
    } else {
        branches = {{0, 0}, {0, -1}, {0, 1}, {-1, 0}, {1, 0}, {1, 1}, {-1, -1}};
    }
    write_header(out, cfg, "m,l,j,n,eps0,omega");
    for (const auto& [m, l] : branches) {
        const vanvleck::DoubletIndex idx{l, m, 0, 0};
        for (std::size_t i = 0; i < cfg.axis1.points; ++i) {
            const double e = cfg.axis1.value(i);
            double w = std::numeric_limits<double>::quiet_NaN();
            try {
                w = vanvleck::transition_frequency(idx, e, cfg.model, policy, true, cfg.baths);
            } catch (const NearResonanceError&) {
                // left as nan: the perturbative formula has a pole here
            }
            out << m << ',' << l << ",0,0," << sweep::format_number(e) << ',' << sweep::format_number(w) << '\n';
        }
    }
}

void run_ed(const RunConfig& cfg, std::ostream& out) {
    write_header(out, cfg, "eps0,level,energy,from_ground,from_first_excited");
    ModelParams p = cfg.model;
    for (std::size_t i = 0; i < cfg.axis1.points; ++i) {
        p.eps0 = cfg.axis1.value(i);
        const auto levels = ed::eigenvalues(ed::build_hamiltonian(p, cfg.numerics.n_fock));
        for (std::size_t k = 0; k < levels.size(); ++k) {
            out << sweep::format_number(p.eps0) << ',' << k << ',' << sweep::format_number(levels[k]) << ','
                << sweep::format_number(levels[k] - levels[0]) << ','
                << sweep::format_number(levels[k] - levels[1]) << '\n';
        }
    }
}

void run_qcheck(const RunConfig& cfg, std::ostream& out) {
    const EffectiveBath eff = effective_bath(cfg.model.g, cfg.model.omega_r, cfg.baths.kappa);
    const bath::StructuredQ q2(eff, cfg.baths.temp2, cfg.numerics.mats_tol);
    write_header(out, cfg, "tau,q1_re,q1_im,q2_re,q2_im");
    for (std::size_t i = 0; i < cfg.axis1.points; ++i) {
        const double t = cfg.axis1.value(i);
        const bath::QValue a = bath::q1(t, cfg.baths.alpha1, cfg.baths.omega_c, cfg.baths.temp1);
        const bath::Q2Value b = q2(t);
        out << sweep::format_number(t) << ',' << sweep::format_number(a.re) << ','
            << sweep::format_number(a.im) << ',' << sweep::format_number(b.re) << ','
            << sweep::format_number(b.im) << '\n';
    }
}

} // namespace

const std::vector<std::string>& modes() {
    static const std::vector<std::string> m{"spectrum", "bessel-map", "coupling-map", "overlays", "ed", "qcheck"};
    return m;
}

RunConfig default_config(const std::string& mode) {
    if (std::find(modes().begin(), modes().end(), mode) == modes().end()) {
        throw ConfigError("unknown subcommand '" + mode + "'");
    }
    RunConfig c;
    c.mode = mode;
    c.baths = strong_dissipation_preset();
    if (mode == "spectrum") {
        c.axis1 = axis("eps0", -3.0, 3.0, 201);
        c.axis2 = axis("omega_p", 0.015, 3.0, 201);
    } else if (mode == "bessel-map") {
        c.model.g = 0.5;
        c.model.omega_p = 0.55;
        c.axis1 = axis("eps_d", 0.0, 8.0, 101);
        c.axis2 = axis("eps0", -3.0, 3.0, 101);
    } else if (mode == "coupling-map") {
        c.axis1 = axis("g", 0.0, 1.5, 101);
        c.axis2 = axis("omega_p", 0.015, 3.0, 101);
    } else if (mode == "overlays" || mode == "ed") {
        c.axis1 = axis("eps0", -3.0, 3.0, 201);
    } else {
        c.axis1 = axis("tau", 0.0, 20.0, 201);
    }
    return c;
}

RunConfig apply_json(const json& j, RunConfig c) {
    check_keys(j, "", {"mode", "model", "baths", "sweep", "numerics", "output"});
    if (j.contains("mode")) {
        require(j.at("mode").is_string(), "mode: expected a string");
        const auto m = j.at("mode").get<std::string>();
        require(m == c.mode, "mode: config is for '" + m + "' but the subcommand is '" + c.mode + "'");
    }
    if (j.contains("model")) {
        ModelParams& p = c.model;
        number_fields(j.at("model"), "model",
                      {{"delta", &p.delta}, {"eps0", &p.eps0}, {"omega_r", &p.omega_r}, {"g", &p.g},
                       {"eps_d", &p.eps_d}, {"omega_d", &p.omega_d}, {"eps_p", &p.eps_p},
                       {"omega_p", &p.omega_p}},
                      [](std::set<std::string>&) {});
    }
    if (j.contains("baths")) {
        BathSpec& b = c.baths;
        number_fields(j.at("baths"), "baths",
                      {{"alpha1", &b.alpha1}, {"omega_c", &b.omega_c}, {"kappa", &b.kappa},
                       {"temp1", &b.temp1}, {"temp2", &b.temp2}},
                      [](std::set<std::string>&) {});
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(s, "sweep", {"axis1", "axis2"});
        if (s.contains("axis1")) {
            c.axis1 = parse_axis(s.at("axis1"), "sweep.axis1");
        }
        if (s.contains("axis2")) {
            c.axis2 = s.at("axis2").is_null() ? sweep::Axis{} : parse_axis(s.at("axis2"), "sweep.axis2");
        }
    }
    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        Numerics& u = c.numerics;
        number_fields(n, "numerics",
                      {{"quad_tol", &u.quad_tol}, {"mats_tol", &u.mats_tol}, {"tau_cap", &u.tau_cap},
                       {"resonance_guard", &u.resonance_guard}},
                      [](std::set<std::string>& a) {
                          a.insert({"k_max", "p_max", "corrections", "n_fock", "workers", "susceptibility"});
                      });
        if (n.contains("k_max")) u.k_max = static_cast<int>(get_integer(n.at("k_max"), "numerics.k_max", 1));
        if (n.contains("p_max")) u.p_max = static_cast<int>(get_integer(n.at("p_max"), "numerics.p_max", 1));
        if (n.contains("n_fock")) u.n_fock = static_cast<int>(get_integer(n.at("n_fock"), "numerics.n_fock", 2));
        if (n.contains("workers")) {
            u.workers = static_cast<unsigned>(get_integer(n.at("workers"), "numerics.workers", 0));
        }
        if (n.contains("corrections")) {
            require(n.at("corrections").is_boolean(), "numerics.corrections: expected a boolean");
            u.corrections = n.at("corrections").get<bool>();
        }
        if (n.contains("susceptibility")) {
            const json& v = n.at("susceptibility");
            require(v.is_string() && (v == "full" || v == "markov"),
                    "numerics.susceptibility: expected \"full\" or \"markov\"");
            u.susceptibility = v == "full" ? niba::Mode::full : niba::Mode::markov;
        }
    }
    if (j.contains("output")) {
        require(j.at("output").is_string(), "output: expected a string");
        c.output = j.at("output").get<std::string>();
    }
    return c;
}

void validate(const RunConfig& c) {
    try {
        c.model.validate();
        c.baths.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid parameter: ") + e.what());
    }
    const Numerics& n = c.numerics;
    require(n.quad_tol > 0.0 && n.quad_tol < 1.0, "numerics.quad_tol: must lie in (0, 1)");
    require(n.mats_tol > 0.0 && n.mats_tol < 1.0, "numerics.mats_tol: must lie in (0, 1)");
    require(n.tau_cap > 0.0, "numerics.tau_cap: must be > 0");
    require(n.resonance_guard > 0.0, "numerics.resonance_guard: must be > 0");
    require(n.n_fock >= 2 && n.n_fock <= 100, "numerics.n_fock: must lie in [2, 100]");

    auto check_axis = [](const sweep::Axis& a, const std::string& path) {
        try {
            a.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(path + ": " + e.what());
        }
    };
    check_axis(c.axis1, "sweep.axis1");
    if (is_map_mode(c.mode)) {
        check_axis(c.axis2, "sweep.axis2");
        for (const auto* a : {&c.axis1, &c.axis2}) {
            require(sweep::is_sweepable(a->name), "sweep: '" + a->name + "' is not a sweepable parameter");
        }
        require(c.axis1.name != c.axis2.name, "sweep: both axes sweep '" + c.axis1.name + "'");
        const auto names = axis_names(c);
        if (c.mode == "spectrum") {
            require(names == std::set<std::string>{"eps0", "omega_p"},
                    "sweep: spectrum requires eps0 and omega_p axes");
        } else if (c.mode == "bessel-map") {
            require(names.count("eps_d") == 1 && (names.count("eps0") == 1 || names.count("omega_p") == 1),
                    "sweep: bessel-map requires an eps_d axis and an eps0 or omega_p axis");
        } else {
            require(names.count("g") == 1 && (names.count("eps0") == 1 || names.count("omega_p") == 1),
                    "sweep: coupling-map requires a g axis and an eps0 or omega_p axis");
        }
        for (const auto* a : {&c.axis1, &c.axis2}) {
            if (a->name == "omega_p") {
                require(a->min > 0.0, "sweep: omega_p axis must stay > 0");
            }
            if (a->name == "g") {
                require(a->min >= 0.0, "sweep: g axis must stay >= 0");
            }
        }
        if (names.count("omega_p") == 0) {
            require(c.model.omega_p > 0.0, "model.omega_p: must be > 0");
        }
    } else {
        require(c.axis2.name.empty(), "sweep.axis2: not used by '" + c.mode + "'");
        if (c.mode == "qcheck") {
            require(c.axis1.name == "tau" && c.axis1.min >= 0.0, "sweep.axis1: qcheck requires a tau axis with min >= 0");
        } else {
            require(c.axis1.name == "eps0", "sweep.axis1: '" + c.mode + "' requires an eps0 axis");
        }
    }
}

json to_json(const RunConfig& c, bool runtime) {
    const ModelParams& p = c.model;
    const BathSpec& b = c.baths;
    const Numerics& n = c.numerics;
    json j;
    j["mode"] = c.mode;
    j["model"] = {{"delta", p.delta}, {"eps0", p.eps0},       {"omega_r", p.omega_r}, {"g", p.g},
                  {"eps_d", p.eps_d}, {"omega_d", p.omega_d}, {"eps_p", p.eps_p},     {"omega_p", p.omega_p}};
    j["baths"] = {{"alpha1", b.alpha1}, {"omega_c", b.omega_c}, {"kappa", b.kappa},
                  {"temp1", b.temp1},   {"temp2", b.temp2}};
    j["sweep"]["axis1"] = axis_json(c.axis1);
    if (!c.axis2.name.empty()) {
        j["sweep"]["axis2"] = axis_json(c.axis2);
    }
    j["numerics"] = {{"quad_tol", n.quad_tol},
                     {"mats_tol", n.mats_tol},
                     {"tau_cap", n.tau_cap},
                     {"k_max", n.k_max},
                     {"p_max", n.p_max},
                     {"resonance_guard", n.resonance_guard},
                     {"corrections", n.corrections},
                     {"n_fock", n.n_fock},
                     {"susceptibility", mode_name(n.susceptibility)}};
    if (runtime) {
        j["numerics"]["workers"] = n.workers;
        j["output"] = c.output;
    }
    return j;
}

// --- presets ---------------------------------------------------------------

namespace {

struct PresetSpec {
    std::string name;
    std::string mode;
    void (*apply)(RunConfig&);
    std::string panel_param; // empty: single panel
    std::vector<double> panel_values;
};

const std::vector<PresetSpec>& preset_table() {
    static const std::vector<PresetSpec> table{
        {"fig2b", "spectrum",
         [](RunConfig& c) {
             c.model.omega_r = 1.5;
             c.model.eps_d = 0.0;
         },
         "g", {0.2, 0.5, 1.0}},
        {"fig3", "spectrum",
         [](RunConfig& c) {
             c.model.omega_r = 1.5;
             c.model.g = 0.5;
             c.model.omega_d = 2.7;
         },
         "eps_d", {0.0, 2.0, 4.0}},
        {"fig4a", "bessel-map",
         [](RunConfig& c) {
             c.model.g = 0.5;
             c.model.omega_d = 2.7;
             c.model.omega_p = 0.55;
             c.baths.alpha1 = 0.1;
             c.baths.kappa = 0.05;
             c.axis1 = axis("eps_d", 0.0, 8.0, 101);
             c.axis2 = axis("eps0", -3.0, 3.0, 101);
         },
         "", {}},
        {"fig4b", "bessel-map",
         [](RunConfig& c) {
             c.model.g = 0.5;
             c.model.omega_d = 2.7;
             c.model.eps0 = 0.0;
             c.baths.alpha1 = 0.05;
             c.baths.kappa = 0.005;
             c.axis1 = axis("eps_d", 0.0, 8.0, 101);
             c.axis2 = axis("omega_p", 0.015, 3.0, 101);
         },
         "", {}},
        {"fig5a", "coupling-map",
         [](RunConfig& c) {
             c.model.eps0 = 0.0;
             c.model.eps_d = 0.0;
             c.axis1 = axis("g", 0.0, 1.5, 101);
             c.axis2 = axis("omega_p", 0.015, 3.0, 101);
         },
         "", {}},
        {"fig5b", "coupling-map",
         [](RunConfig& c) {
             c.model.eps0 = 0.0;
             c.model.eps_d = 4.0;
             c.model.omega_d = 2.7;
             c.axis1 = axis("g", 0.0, 1.5, 101);
             c.axis2 = axis("omega_p", 0.015, 3.0, 101);
         },
         "", {}},
    };
    return table;
}

const PresetSpec& find_preset(const std::string& name) {
    for (const auto& p : preset_table()) {
        if (p.name == name) {
            return p;
        }
    }
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& p : preset_table()) {
            v.push_back(p.name);
        }
        return v;
    }();
    return names;
}

RunConfig preset_base(const std::string& name, const RunConfig& base) {
    const PresetSpec& p = find_preset(name);
    if (p.mode != base.mode) {
        throw ConfigError("preset '" + name + "' belongs to subcommand '" + p.mode + "', not '" + base.mode + "'");
    }
    RunConfig c = base;
    c.baths = strong_dissipation_preset();
    p.apply(c);
    if (c.output.empty()) {
        c.output = name + ".csv";
    }
    return c;
}

std::vector<Panel> preset_panels(const std::string& name, const RunConfig& cfg) {
    if (name.empty()) {
        return {{"", cfg}};
    }
    const PresetSpec& p = find_preset(name);
    if (p.panel_param.empty()) {
        return {{"", cfg}};
    }
    std::vector<Panel> out;
    for (double v : p.panel_values) {
        RunConfig c = cfg;
        if (p.panel_param == "g") {
            c.model.g = v;
        } else {
            c.model.eps_d = v;
        }
        out.push_back({p.panel_param + label_number(v), c});
    }
    return out;
}

std::string panel_path(const std::string& output, const std::string& label) {
    if (label.empty() || output.empty() || output == "-") {
        return output;
    }
    const std::filesystem::path p(output);
    std::filesystem::path q = p.parent_path() / (p.stem().string() + "_" + label + p.extension().string());
    return q.string();
}

void run_panel(const RunConfig& cfg, unsigned workers, std::ostream& out, std::ostream& log) {
    validate(cfg);
    for (const auto& w : cfg.model.warnings()) {
        log << "warning: " << w << "\n";
    }
    if (is_map_mode(cfg.mode)) {
        run_map(cfg, workers, out, log);
    } else if (cfg.mode == "overlays") {
        run_overlays(cfg, out);
    } else if (cfg.mode == "ed") {
        run_ed(cfg, out);
    } else {
        run_qcheck(cfg, out);
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transmission spectra of the driven dissipative Rabi model", "rabispec"};
    std::string mode;
    std::string config_path;
    std::string out_path;
    std::string preset;
    unsigned workers = 0;
    bool dry_run = false;
    app.add_option("subcommand", mode, "spectrum | bessel-map | coupling-map | overlays | ed | qcheck")
        ->required();
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_path, "output CSV path ('-' for stdout)");
    app.add_option("--workers", workers, "worker threads (default: config, RABISPEC_WORKERS, cores)");
    app.add_option("--preset", preset, "built-in parameter preset");
    app.add_flag("--dry-run", dry_run, "print the resolved configuration and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kConfigError;
    }

    std::vector<Panel> panels;
    unsigned n_workers = 1;
    try {
        RunConfig cfg = default_config(mode);
        if (!preset.empty()) {
            cfg = preset_base(preset, cfg);
        }
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("cannot open config file '" + config_path + "'");
            }
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            cfg = apply_json(j, cfg);
        }
        if (!out_path.empty()) {
            cfg.output = out_path;
        }
        n_workers = resolve_workers(workers, cfg);
        cfg.numerics.workers = n_workers;
        panels = preset_panels(preset, cfg);
        for (auto& p : panels) {
            p.config.output = panel_path(cfg.output, p.label);
            validate(p.config);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    if (dry_run) {
        json j = json::array();
        for (const auto& p : panels) {
            j.push_back({{"label", p.label}, {"config", to_json(p.config, true)}});
        }
        out << j.dump(2) << "\n";
        return kSuccess;
    }

    try {
        for (const auto& p : panels) {
            const std::string& path = p.config.output;
            if (path.empty() || path == "-") {
                run_panel(p.config, n_workers, out, err);
                continue;
            }
            // Write to a buffer first so a failed run leaves no partial file.
            std::ostringstream buffer;
            run_panel(p.config, n_workers, buffer, err);
            std::ofstream file(path);
            if (!file) {
                throw ConfigError("cannot write output file '" + path + "'");
            }
            file << buffer.str();
            err << "wrote " << path << "\n";
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kSuccess;
}

} // namespace rabispec::cli
