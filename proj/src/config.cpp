#include "gradflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gradflow/csv.hpp"

namespace gradflow {

namespace {

struct TomlValue {
    enum Kind { Number, String, Boolean, Array } kind = Number;
    double num = 0.0;
    std::string str;
    bool boolean = false;
    std::vector<double> array;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

TomlValue parse_value(const std::string& raw, const std::string& where) {
    TomlValue v;
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("empty value for " + where);
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ConfigError("unterminated string for " + where);
        v.kind = TomlValue::String;
        v.str = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = TomlValue::Boolean;
        v.boolean = (s == "true");
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError("unterminated array for " + where);
        v.kind = TomlValue::Array;
        std::string inner = s.substr(1, s.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                v.array.push_back(std::stod(item));
            } catch (...) {
                throw ConfigError("non-numeric array entry for " + where);
            }
        }
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(s, &used);
        if (used != s.size()) throw ConfigError("trailing characters in value for " + where);
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("cannot parse value for " + where);
    }
    return v;
}

using Section = std::map<std::string, TomlValue>;

std::map<std::string, Section> parse_toml(const std::string& text) {
    std::map<std::string, Section> doc;
    std::string section;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("bad section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            doc[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        doc[section][key] = parse_value(line.substr(eq + 1), section + "." + key);
    }
    return doc;
}

double want_num(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::Number) throw ConfigError(where + " must be a number");
    return v.num;
}
std::string want_str(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::String) throw ConfigError(where + " must be a string");
    return v.str;
}
bool want_bool(const TomlValue& v, const std::string& where) {
    if (v.kind != TomlValue::Boolean) throw ConfigError(where + " must be true/false");
    return v.boolean;
}
std::vector<double> want_array(const TomlValue& v, const std::string& where) {
    if (v.kind == TomlValue::Array) return v.array;
    if (v.kind == TomlValue::Number) return {v.num};
    throw ConfigError(where + " must be an array");
}

int expected_state_dim(const RunConfig::Potential& p) {
    if (p.kind == "vector_double_well") return 2;
    if (p.kind == "quadratic" && p.params.count("n"))
        return static_cast<int>(p.params.at("n"));
    return 1;
}

}  // namespace

Grid RunConfig::make_grid() const {
    Grid g;
    g.mode = grid.mode;
    g.space_dim = grid.dim;
    g.extent = grid.extent;
    g.resolution = grid.resolution;
    return g;
}

void RunConfig::finalize() {
    static const std::vector<std::string> kinds = {"quadratic", "bistable", "tilted_bistable",
                                                   "vector_double_well"};
    if (std::find(kinds.begin(), kinds.end(), potential.kind) == kinds.end())
        throw ConfigError("unknown potential kind: " + potential.kind);
    static const std::vector<std::string> ic_kinds = {"gaussian_bump", "plateau_bump", "constant",
                                                      "file"};
    if (std::find(ic_kinds.begin(), ic_kinds.end(), initial_condition.kind) == ic_kinds.end())
        throw ConfigError("unknown initial_condition kind: " + initial_condition.kind);

    Grid g = make_grid();
    try {
        g.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const int n = expected_state_dim(potential);
    if (initial_condition.kind != "file") {
        if (initial_condition.amplitude.empty()) initial_condition.amplitude.assign(n, 1.0);
        if (static_cast<int>(initial_condition.amplitude.size()) != n)
            throw ConfigError("initial_condition.amplitude size must match the state dimension");
    }
    if (!potential.m_guess.empty() && static_cast<int>(potential.m_guess.size()) != n)
        throw ConfigError("potential.m_guess size must match the state dimension");
    if (initial_condition.kind == "constant" && initial_condition.offset.empty())
        initial_condition.offset.assign(n, 0.0);

    const double limit = cfl_limit(g);
    if (solver.dt <= 0.0) {
        // Integer number of steps per time unit keeps report times exact.
        solver.dt = 1.0 / std::ceil(1.0 / limit);
    } else if (solver.dt > limit + 1e-15) {
        throw ConfigError("solver.dt = " + format_double(solver.dt) +
                          " violates the CFL bound 0.9*h^2/(2*d) = " + format_double(limit));
    }
    if (solver.t_end <= 0.0) throw ConfigError("solver.t_end must be positive");
    const auto total_steps = static_cast<long long>(std::llround(solver.t_end / solver.dt));
    if (total_steps < 10) throw ConfigError("t_end spans fewer than 10 steps");
    if (solver.snapshot_stride <= 0)
        solver.snapshot_stride = std::max(1LL, total_steps / 200);
    if (diagnostics.series_stride <= 0) {
        const double target = diagnostics.firewall_panel ? 0.01 : 0.05;
        diagnostics.series_stride =
            std::max(1, static_cast<int>(std::floor(target / solver.dt)));
    }
    for (double c : diagnostics.c_list)
        if (c < 0.0) throw ConfigError("diagnostics.c_list entries must be nonnegative");
    if (diagnostics.firewall_fit_c2 != 0.0 &&
        diagnostics.firewall_fit_c2 <= diagnostics.firewall_fit_c1)
        throw ConfigError("firewall_fit_c2 must exceed firewall_fit_c1");
    if (diagnostics.fit_window_frac <= 0.0 || diagnostics.fit_window_frac >= 1.0 ||
        diagnostics.cauchy_window_frac <= 0.0 || diagnostics.cauchy_window_frac >= 1.0)
        throw ConfigError("window fractions must be in (0,1)");
    if (std::find(diagnostics.c_list.begin(), diagnostics.c_list.end(), 0.0) ==
        diagnostics.c_list.end())
        diagnostics.c_list.insert(diagnostics.c_list.begin(), 0.0);
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    const auto doc = parse_toml(text);
    RunConfig cfg;
    cfg.name = name;
    for (const auto& [sec, kv] : doc) {
        if (sec.empty()) {
            for (const auto& [k, v] : kv) {
                if (k == "name") cfg.name = want_str(v, k);
                else if (k == "seed") cfg.seed = static_cast<unsigned>(want_num(v, k));
                else throw ConfigError("unknown top-level key: " + k);
            }
        } else if (sec == "potential") {
            for (const auto& [k, v] : kv) {
                if (k == "kind") cfg.potential.kind = want_str(v, k);
                else if (k == "m_guess") cfg.potential.m_guess = want_array(v, k);
                else cfg.potential.params[k] = want_num(v, "potential." + k);
            }
        } else if (sec == "grid") {
            for (const auto& [k, v] : kv) {
                if (k == "mode") {
                    const std::string m = want_str(v, k);
                    if (m == "radial") cfg.grid.mode = GridMode::Radial;
                    else if (m == "cartesian") cfg.grid.mode = GridMode::Cartesian;
                    else throw ConfigError("grid.mode must be radial or cartesian");
                } else if (k == "dim") cfg.grid.dim = static_cast<int>(want_num(v, k));
                else if (k == "extent") cfg.grid.extent = want_num(v, k);
                else if (k == "resolution") cfg.grid.resolution = static_cast<int>(want_num(v, k));
                else throw ConfigError("unknown grid key: " + k);
            }
        } else if (sec == "solver") {
            for (const auto& [k, v] : kv) {
                if (k == "dt") cfg.solver.dt = want_num(v, k);
                else if (k == "scheme") {
                    const std::string m = want_str(v, k);
                    if (m == "euler") cfg.solver.scheme = Scheme::ExplicitEuler;
                    else if (m == "rk4") cfg.solver.scheme = Scheme::RK4;
                    else throw ConfigError("solver.scheme must be euler or rk4");
                } else if (k == "t_end") cfg.solver.t_end = want_num(v, k);
                else if (k == "snapshot_stride")
                    cfg.solver.snapshot_stride = static_cast<int>(want_num(v, k));
                else throw ConfigError("unknown solver key: " + k);
            }
        } else if (sec == "initial_condition") {
            for (const auto& [k, v] : kv) {
                if (k == "kind") cfg.initial_condition.kind = want_str(v, k);
                else if (k == "amplitude") cfg.initial_condition.amplitude = want_array(v, k);
                else if (k == "radius") cfg.initial_condition.radius = want_num(v, k);
                else if (k == "width") cfg.initial_condition.width = want_num(v, k);
                else if (k == "sigma") cfg.initial_condition.sigma = want_num(v, k);
                else if (k == "offset") cfg.initial_condition.offset = want_array(v, k);
                else if (k == "path") cfg.initial_condition.path = want_str(v, k);
                else throw ConfigError("unknown initial_condition key: " + k);
            }
        } else if (sec == "diagnostics") {
            for (const auto& [k, v] : kv) {
                if (k == "series_stride")
                    cfg.diagnostics.series_stride = static_cast<int>(want_num(v, k));
                else if (k == "c_list") cfg.diagnostics.c_list = want_array(v, k);
                else if (k == "trav_c_list") cfg.diagnostics.trav_c_list = want_array(v, k);
                else if (k == "trav_c_auto") cfg.diagnostics.trav_c_auto = want_bool(v, k);
                else if (k == "probes") cfg.diagnostics.probes = want_array(v, k);
                else if (k == "firewall_panel") cfg.diagnostics.firewall_panel = want_bool(v, k);
                else if (k == "firewall_fit_c1") cfg.diagnostics.firewall_fit_c1 = want_num(v, k);
                else if (k == "firewall_fit_c2") cfg.diagnostics.firewall_fit_c2 = want_num(v, k);
                else if (k == "c_hom_estimate") cfg.diagnostics.c_hom_estimate = want_num(v, k);
                else if (k == "fit_window_frac") cfg.diagnostics.fit_window_frac = want_num(v, k);
                else if (k == "cauchy_window_frac")
                    cfg.diagnostics.cauchy_window_frac = want_num(v, k);
                else throw ConfigError("unknown diagnostics key: " + k);
            }
        } else if (sec == "output") {
            for (const auto& [k, v] : kv) {
                if (k == "directory") cfg.output.directory = want_str(v, k);
                else if (k == "write_series") cfg.output.write_series = want_bool(v, k);
                else if (k == "write_snapshots") cfg.output.write_snapshots = want_bool(v, k);
                else throw ConfigError("unknown output key: " + k);
            }
        } else {
            throw ConfigError("unknown section: [" + sec + "]");
        }
    }
    cfg.finalize();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_config_text(ss.str(), name);
}

std::vector<std::string> preset_names() {
    return {"quadratic-gaussian", "bistable-balanced-collapse", "tilted-bistable-subcritical",
            "tilted-bistable-supercritical", "vector-double-well"};
}

bool is_preset(const std::string& name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.name = name;
    if (name == "quadratic-gaussian") {
        cfg.potential.kind = "quadratic";
        cfg.potential.m_guess = {0.0};
        cfg.grid = {GridMode::Radial, 2, 12.0, 256};
        cfg.solver.t_end = 8.0;
        cfg.initial_condition.kind = "gaussian_bump";
        cfg.initial_condition.amplitude = {1.0};
        cfg.initial_condition.sigma = 1.0;
        cfg.diagnostics.firewall_fit_c1 = 0.1;
        cfg.diagnostics.firewall_fit_c2 = 1.0;
    } else if (name == "bistable-balanced-collapse") {
        cfg.potential.kind = "bistable";
        cfg.potential.m_guess = {1.0};
        cfg.grid = {GridMode::Radial, 2, 20.0, 256};
        cfg.solver.t_end = 44.0;
        cfg.initial_condition.kind = "plateau_bump";
        cfg.initial_condition.amplitude = {-2.0};
        cfg.initial_condition.radius = 6.0;
        cfg.initial_condition.width = 1.5;
    } else if (name == "tilted-bistable-subcritical") {
        cfg.potential.kind = "tilted_bistable";
        cfg.potential.params["a"] = 0.1;
        cfg.potential.m_guess = {-1.0};
        cfg.grid = {GridMode::Radial, 2, 16.0, 192};
        cfg.solver.t_end = 30.0;
        cfg.initial_condition.kind = "plateau_bump";
        cfg.initial_condition.amplitude = {2.0};
        cfg.initial_condition.radius = 2.0;
        cfg.initial_condition.width = 1.2;
    } else if (name == "tilted-bistable-supercritical") {
        cfg.potential.kind = "tilted_bistable";
        cfg.potential.params["a"] = 0.1;
        cfg.potential.m_guess = {-1.0};
        cfg.grid = {GridMode::Radial, 2, 110.0, 512};
        cfg.solver.t_end = 480.0;
        cfg.initial_condition.kind = "plateau_bump";
        cfg.initial_condition.amplitude = {2.0};
        cfg.initial_condition.radius = 8.0;
        cfg.initial_condition.width = 1.5;
        cfg.diagnostics.firewall_panel = false;
    } else if (name == "vector-double-well") {
        cfg.potential.kind = "vector_double_well";
        cfg.potential.params["a"] = 0.1;
        cfg.potential.m_guess = {-1.05, 0.0};
        cfg.grid = {GridMode::Radial, 2, 48.0, 384};
        cfg.solver.t_end = 90.0;
        cfg.initial_condition.kind = "plateau_bump";
        cfg.initial_condition.amplitude = {2.0, 0.3};
        cfg.initial_condition.radius = 3.0;
        cfg.initial_condition.width = 1.2;
        cfg.diagnostics.firewall_panel = false;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    cfg.finalize();
    return cfg;
}

RunConfig load_config(const std::string& name_or_path) {
    if (is_preset(name_or_path)) return preset(name_or_path);
    return parse_config_file(name_or_path);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["seed"] = cfg.seed;
    j["potential"] = {{"kind", cfg.potential.kind},
                      {"params", cfg.potential.params},
                      {"m_guess", cfg.potential.m_guess}};
    j["grid"] = {{"mode", cfg.grid.mode == GridMode::Radial ? "radial" : "cartesian"},
                 {"dim", cfg.grid.dim},
                 {"extent", cfg.grid.extent},
                 {"resolution", cfg.grid.resolution}};
    j["solver"] = {{"dt", cfg.solver.dt},
                   {"scheme", cfg.solver.scheme == Scheme::RK4 ? "rk4" : "euler"},
                   {"t_end", cfg.solver.t_end},
                   {"snapshot_stride", cfg.solver.snapshot_stride}};
    j["initial_condition"] = {{"kind", cfg.initial_condition.kind},
                              {"amplitude", cfg.initial_condition.amplitude},
                              {"radius", cfg.initial_condition.radius},
                              {"width", cfg.initial_condition.width},
                              {"sigma", cfg.initial_condition.sigma},
                              {"offset", cfg.initial_condition.offset},
                              {"path", cfg.initial_condition.path}};
    j["diagnostics"] = {{"series_stride", cfg.diagnostics.series_stride},
                        {"c_list", cfg.diagnostics.c_list},
                        {"trav_c_list", cfg.diagnostics.trav_c_list},
                        {"trav_c_auto", cfg.diagnostics.trav_c_auto},
                        {"probes", cfg.diagnostics.probes},
                        {"firewall_panel", cfg.diagnostics.firewall_panel},
                        {"firewall_fit_c1", cfg.diagnostics.firewall_fit_c1},
                        {"firewall_fit_c2", cfg.diagnostics.firewall_fit_c2},
                        {"c_hom_estimate", cfg.diagnostics.c_hom_estimate},
                        {"fit_window_frac", cfg.diagnostics.fit_window_frac},
                        {"cauchy_window_frac", cfg.diagnostics.cauchy_window_frac}};
    j["output"] = {{"directory", cfg.output.directory},
                   {"write_series", cfg.output.write_series},
                   {"write_snapshots", cfg.output.write_snapshots}};
    return j;
}

std::string config_to_toml(const RunConfig& cfg) {
    std::ostringstream o;
    auto arr = [](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
        return s + "]";
    };
    o << "name = \"" << cfg.name << "\"\nseed = " << cfg.seed << "\n\n[potential]\nkind = \""
      << cfg.potential.kind << "\"\n";
    for (const auto& [k, v] : cfg.potential.params) o << k << " = " << format_double(v) << "\n";
    if (!cfg.potential.m_guess.empty()) o << "m_guess = " << arr(cfg.potential.m_guess) << "\n";
    o << "\n[grid]\nmode = \"" << (cfg.grid.mode == GridMode::Radial ? "radial" : "cartesian")
      << "\"\ndim = " << cfg.grid.dim << "\nextent = " << format_double(cfg.grid.extent)
      << "\nresolution = " << cfg.grid.resolution << "\n";
    o << "\n[solver]\ndt = " << format_double(cfg.solver.dt) << "\nscheme = \""
      << (cfg.solver.scheme == Scheme::RK4 ? "rk4" : "euler")
      << "\"\nt_end = " << format_double(cfg.solver.t_end)
      << "\nsnapshot_stride = " << cfg.solver.snapshot_stride << "\n";
    o << "\n[initial_condition]\nkind = \"" << cfg.initial_condition.kind << "\"\n";
    if (!cfg.initial_condition.amplitude.empty())
        o << "amplitude = " << arr(cfg.initial_condition.amplitude) << "\n";
    o << "radius = " << format_double(cfg.initial_condition.radius)
      << "\nwidth = " << format_double(cfg.initial_condition.width)
      << "\nsigma = " << format_double(cfg.initial_condition.sigma) << "\n";
    if (!cfg.initial_condition.offset.empty())
        o << "offset = " << arr(cfg.initial_condition.offset) << "\n";
    if (!cfg.initial_condition.path.empty())
        o << "path = \"" << cfg.initial_condition.path << "\"\n";
    o << "\n[diagnostics]\nseries_stride = " << cfg.diagnostics.series_stride
      << "\nc_list = " << arr(cfg.diagnostics.c_list)
      << "\ntrav_c_list = " << arr(cfg.diagnostics.trav_c_list)
      << "\ntrav_c_auto = " << (cfg.diagnostics.trav_c_auto ? "true" : "false");
    if (!cfg.diagnostics.probes.empty()) o << "\nprobes = " << arr(cfg.diagnostics.probes);
    o << "\nfirewall_panel = " << (cfg.diagnostics.firewall_panel ? "true" : "false")
      << "\nfirewall_fit_c1 = " << format_double(cfg.diagnostics.firewall_fit_c1)
      << "\nfirewall_fit_c2 = " << format_double(cfg.diagnostics.firewall_fit_c2)
      << "\nc_hom_estimate = " << format_double(cfg.diagnostics.c_hom_estimate)
      << "\nfit_window_frac = " << format_double(cfg.diagnostics.fit_window_frac)
      << "\ncauchy_window_frac = " << format_double(cfg.diagnostics.cauchy_window_frac) << "\n";
    o << "\n[output]\ndirectory = \"" << cfg.output.directory
      << "\"\nwrite_series = " << (cfg.output.write_series ? "true" : "false")
      << "\nwrite_snapshots = " << (cfg.output.write_snapshots ? "true" : "false") << "\n";
    return o.str();
}

}  // namespace gradflow
