#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>

#include "gradflow/comparison.hpp"
#include "gradflow/config.hpp"
#include "gradflow/diagnostics.hpp"
#include "gradflow/firewall.hpp"

namespace gradflow {

// Every constant the run derives from the potential before time stepping.
struct RunConstants {
    std::vector<MinimumPoint> minima;
    MinimumPoint m;  // far-field minimum
    CoercivityConstants coercivity;
    FirewallConstants firewall;
    QBarTrace qbar;
    double r_max_infty = 0.0;
    double r_att_infty = 0.0;
    double c_noesc = 0.0;      // from the trajectory sup-norm bound
    double c_noesc_att = 0.0;  // uniform variant from the attracting radius
    double c_noesc_linear_cutoff = 0.0;  // cutoff-profile sensitivity report
    double lambda_local = 0.0;
    double delta = 0.0, delta_prime = 0.0, delta_second = 0.0;
};

struct MonitorResult {
    std::string name;
    double value = 0.0;      // measured (signed residual, min margin, ...)
    double threshold = 0.0;  // pass when value <= threshold
    bool pass = false;
};

struct PipelineResult {
    RunConfig config;
    std::shared_ptr<PotentialSpec> potential;
    RunConstants constants;
    std::map<std::string, FunctionalSeries> series;
    std::vector<FieldState> snapshots;
    EscapeTrack track;
    DichotomyReport report;
    HomFlags hom;
    std::vector<MonitorResult> monitors;

    SupersolutionParams sandwich_params;
    bool sandwich_initial_ok = false;
    double sandwich_worst = 0.0;
    double subsolution_worst = 0.0;
    double supersolution_worst = 0.0;

    std::optional<ExponentialFit> firewall_fit;
    DecayFit ut_decay;
    DecayFit ut_decay_beyond;  // region |x| >= c_ref t

    double max_principle_worst = 0.0;
    double d_esc_calibrated = 0.0;  // escape threshold; 0 when unconstrained
    bool d_esc_constrained = false;

    double c_ref = 0.0;  // ball-energy law the verdict uses

    const FunctionalSeries& get(const std::string& name) const;
};

// Derives all constants without time stepping (the `constants` verb).
struct ConstantsReport {
    RunConstants constants;
    nlohmann::json to_json() const;
    std::string to_table() const;
};

ConstantsReport compute_constants(const RunConfig& cfg, std::ostream* log = nullptr);

// Full run: simulate, record functionals, evaluate monitors, produce the
// dichotomy verdict. Deterministic for a fixed config.
PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr);

// Writes run.json, series/*.csv and snapshots/*.csv under `outdir`.
void write_artifacts(const PipelineResult& result, const std::string& outdir);

nlohmann::json result_to_json(const PipelineResult& result);

// Builds the configured initial state (far field clamped to m).
FieldState build_initial_state(const RunConfig& cfg, const PotentialSpec& p,
                               const MinimumPoint& m);

}  // namespace gradflow
