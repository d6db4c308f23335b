#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradflow/field.hpp"
#include "gradflow/solver.hpp"

#include "json.hpp"

namespace gradflow {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string name = "run";
    unsigned seed = 12345;

    struct Potential {
        std::string kind = "quadratic";
        std::map<std::string, double> params;
        Vec m_guess;  // empty: use the built-in guesses
    } potential;

    struct GridSection {
        GridMode mode = GridMode::Radial;
        int dim = 2;
        double extent = 10.0;
        int resolution = 256;
    } grid;

    struct Solver {
        double dt = 0.0;  // 0: auto (CFL limit rounded to an integer step count)
        Scheme scheme = Scheme::RK4;
        double t_end = 1.0;
        int snapshot_stride = 0;  // 0: auto (~200 snapshots)
    } solver;

    struct InitialCondition {
        std::string kind = "gaussian_bump";  // plateau_bump | constant | file
        Vec amplitude;                       // per state component
        double radius = 1.0;                 // plateau radius
        double width = 1.0;                  // plateau interface width
        double sigma = 1.0;                  // gaussian width
        Vec offset;                          // constant shift from m
        std::string path;                    // file kind: snapshot CSV
    } initial_condition;

    struct Diagnostics {
        int series_stride = 0;  // 0: auto (<= 0.01 time units with panel, else 0.05)
        std::vector<double> c_list = {0.0, 0.25};  // ball radius laws R = c t
        std::vector<double> trav_c_list = {0.0};   // weighted traveling frames
        bool trav_c_auto = true;  // add a frame at 80% of the admissible speed
        std::vector<double> probes;  // firewall probe radii (empty: auto panel)
        bool firewall_panel = true;
        double firewall_fit_c1 = 0.0;  // both zero: fit disabled
        double firewall_fit_c2 = 0.0;
        double c_hom_estimate = 0.0;  // <= 0: unknown
        double fit_window_frac = 0.5;
        double cauchy_window_frac = 0.25;
    } diagnostics;

    struct Output {
        std::string directory = "out";
        bool write_series = true;
        bool write_snapshots = true;
    } output;

    Grid make_grid() const;
    // Resolves auto dt/strides; throws ConfigError on violations (CFL bound
    // named in the message).
    void finalize();
};

RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path);

// Built-in scenario presets.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
RunConfig preset(const std::string& name);
// Resolves either a preset name or a config file path.
RunConfig load_config(const std::string& name_or_path);

nlohmann::json config_to_json(const RunConfig& cfg);
std::string config_to_toml(const RunConfig& cfg);

}  // namespace gradflow
