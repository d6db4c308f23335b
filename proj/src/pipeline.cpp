#include "gradflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gradflow {

namespace fs = std::filesystem;

namespace {

struct Setup {
    std::shared_ptr<PotentialSpec> potential;
    RunConstants constants;
    FieldState initial;
    std::optional<ComparisonSetup> cmp_max;
};

MinimumPoint resolve_far_field(PotentialSpec& p, const RunConfig& cfg,
                               std::vector<MinimumPoint>& minima) {
    if (cfg.potential.m_guess.empty()) return minima.front();
    MinimumPoint m = find_minimum(p, cfg.potential.m_guess);
    for (const auto& known : minima)
        if (dist(known.m, m.m) < 1e-6) return known;
    m.escape_distance = escape_distance(p, m);
    minima.push_back(m);
    return m;
}

Setup prepare(const RunConfig& cfg, std::ostream* log) {
    Setup s;
    s.potential = std::make_shared<PotentialSpec>(
        make_potential(cfg.potential.kind, cfg.potential.params));
    PotentialSpec& p = *s.potential;
    RunConstants& rc = s.constants;
    rc.minima = analyze_minima(p, log);
    rc.m = resolve_far_field(p, cfg, rc.minima);
    rc.coercivity = coercivity_scan(p, rc.minima);
    s.initial = build_initial_state(cfg, p, rc.m);
    rc.qbar = qbar_bound(s.initial, rc.coercivity);
    rc.r_max_infty = rc.qbar.sup_state_bound();
    rc.r_att_infty = rc.qbar.attracting_radius();
    rc.firewall = firewall_constants(p, rc.m, rc.coercivity, rc.r_max_infty, cfg.grid.dim,
                                     cfg.diagnostics.c_hom_estimate);
    s.cmp_max = build_comparison(p, rc.m, rc.r_max_infty, p.state_dim);
    rc.c_noesc = s.cmp_max->c_noesc_value;
    rc.lambda_local = s.cmp_max->params.lambda;
    rc.delta = s.cmp_max->params.delta;
    rc.delta_prime = s.cmp_max->params.delta_prime;
    rc.delta_second = s.cmp_max->params.delta_second;
    const ComparisonSetup cmp_att = build_comparison(p, rc.m, rc.r_att_infty, p.state_dim);
    rc.c_noesc_att = cmp_att.c_noesc_value;
    const ComparisonSetup cmp_lin =
        build_comparison(p, rc.m, rc.r_max_infty, p.state_dim, CutoffProfile::Linear);
    rc.c_noesc_linear_cutoff = cmp_lin.c_noesc_value;
    return s;
}

FieldState read_snapshot_csv(const std::string& path, const Grid& g, int n) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read initial-condition file: " + path);
    FieldState s;
    s.grid = g;
    s.n = n;
    s.values.reserve(g.num_points() * n);
    std::string line;
    std::getline(in, line);  // header
    const int coord_cols = (g.mode == GridMode::Radial) ? 1 : g.space_dim;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col++ < coord_cols) continue;
            s.values.push_back(std::stod(cell));
        }
    }
    if (s.values.size() != g.num_points() * static_cast<std::size_t>(n))
        throw ConfigError("initial-condition file does not match the configured grid");
    return s;
}

double series_min(const FunctionalSeries& s) {
    double lo = std::numeric_limits<double>::infinity();
    for (double v : s.values) lo = std::min(lo, v);
    return lo;
}

}  // namespace

FieldState build_initial_state(const RunConfig& cfg, const PotentialSpec& p,
                               const MinimumPoint& m) {
    const Grid g = cfg.make_grid();
    const int n = p.state_dim;
    const auto& ic = cfg.initial_condition;
    if (ic.kind == "file") {
        FieldState s = read_snapshot_csv(ic.path, g, n);
        for (std::size_t pt = 0; pt < s.num_points(); ++pt)
            if (g.is_boundary(pt))
                for (int j = 0; j < n; ++j) s.values[pt * n + j] = m.m[j];
        return s;
    }
    FieldState s = make_constant_state(g, m.m);
    for (std::size_t pt = 0; pt < s.num_points(); ++pt) {
        if (g.is_boundary(pt)) continue;
        const double r = g.radius_of(pt);
        double bump = 0.0;
        if (ic.kind == "gaussian_bump")
            bump = std::exp(-r * r / (2.0 * ic.sigma * ic.sigma));
        else if (ic.kind == "plateau_bump")
            bump = 0.5 * (1.0 - std::tanh((r - ic.radius) / ic.width));
        for (int j = 0; j < n; ++j) {
            const double a = (ic.kind == "constant") ? ic.offset[j] : ic.amplitude[j] * bump;
            s.values[pt * n + j] = m.m[j] + a;
        }
    }
    return s;
}

ConstantsReport compute_constants(const RunConfig& cfg, std::ostream* log) {
    RunConfig c = cfg;
    c.finalize();
    ConstantsReport rep;
    rep.constants = prepare(c, log).constants;
    return rep;
}

nlohmann::json ConstantsReport::to_json() const {
    const RunConstants& rc = constants;
    nlohmann::json j;
    j["m"] = rc.m.m;
    j["lambda_min"] = rc.m.lambda_min;
    j["d_esc"] = rc.m.escape_distance;
    j["v_at_m"] = rc.m.v_at_m;
    j["eps_coerc"] = rc.coercivity.eps_coerc;
    j["k_coerc"] = rc.coercivity.k_coerc;
    j["q_low_hull"] = rc.coercivity.q_low_hull;
    j["w_en"] = rc.coercivity.w_en;
    j["kappa0"] = rc.firewall.kappa0;
    j["nu_f0"] = rc.firewall.nu_f0;
    j["k_f0"] = rc.firewall.k_f0;
    j["kappa"] = rc.firewall.kappa;
    j["c_cut"] = rc.firewall.c_cut;
    j["nu_f"] = rc.firewall.nu_f;
    j["k_ef"] = rc.firewall.k_ef;
    j["r_max_infty"] = rc.r_max_infty;
    j["r_att_infty"] = rc.r_att_infty;
    j["lambda_local"] = rc.lambda_local;
    j["delta"] = rc.delta;
    j["delta_prime"] = rc.delta_prime;
    j["delta_second"] = rc.delta_second;
    j["c_noesc"] = rc.c_noesc;
    j["c_noesc_att"] = rc.c_noesc_att;
    j["c_noesc_linear_cutoff"] = rc.c_noesc_linear_cutoff;
    nlohmann::json minima = nlohmann::json::array();
    for (const auto& mp : rc.minima)
        minima.push_back({{"m", mp.m},
                          {"lambda_min", mp.lambda_min},
                          {"d_esc", mp.escape_distance},
                          {"v_at_m", mp.v_at_m}});
    j["minima"] = minima;
    return j;
}

std::string ConstantsReport::to_table() const {
    const nlohmann::json j = to_json();
    std::ostringstream o;
    o << std::left;
    for (const auto& [key, value] : j.items()) {
        if (key == "minima") continue;
        o << std::setw(24) << key << " " << value.dump() << "\n";
    }
    return o.str();
}

const FunctionalSeries& PipelineResult::get(const std::string& name) const {
    const auto it = series.find(name);
    if (it == series.end()) throw std::runtime_error("no series named " + name);
    return it->second;
}

PipelineResult run_pipeline(const RunConfig& cfg_in, std::ostream* log) {
    PipelineResult R;
    RunConfig cfg = cfg_in;
    cfg.finalize();
    R.config = cfg;

    Setup setup = prepare(cfg, log);
    const PotentialSpec& p = *setup.potential;
    R.potential = setup.potential;
    const RunConstants& rc = setup.constants;
    R.constants = rc;
    const MinimumPoint& m = rc.m;
    const Grid grid = cfg.make_grid();
    const double h = grid.spacing();
    const int n = p.state_dim;
    const bool radial = grid.mode == GridMode::Radial;

    SolverConfig scfg{cfg.solver.dt, cfg.solver.scheme, cfg.solver.t_end,
                      cfg.solver.snapshot_stride};
    const Stepper stepper(p, m.m, scfg);
    FieldState state = setup.initial;

    // Traveling-frame speeds: validated explicit list plus the automatic
    // almost-standing frame at 80% of the admissible speed.
    std::vector<double> trav_cs;
    const double c_admissible =
        std::min({std::sqrt(m.lambda_min) / 4.0, rc.firewall.kappa / 20.0,
                  rc.firewall.c_cut / 6.0});
    for (double c : cfg.diagnostics.trav_c_list) {
        std::string why;
        if (!frame_speed_conditions_hold(c, rc.firewall.kappa, rc.firewall.c_cut, m.lambda_min,
                                         &why))
            throw ConfigError("trav_c_list entry " + format_double(c) + " rejected: " + why);
        if (c > 0.0 && !radial)
            throw ConfigError("nonzero traveling frames need a radial grid");
        trav_cs.push_back(c);
    }
    if (cfg.diagnostics.trav_c_auto && radial) {
        const double c_auto = 0.8 * c_admissible;
        if (std::find(trav_cs.begin(), trav_cs.end(), c_auto) == trav_cs.end())
            trav_cs.push_back(c_auto);
    }

    // Firewall probe panel (radial grids).
    std::vector<double> probes = cfg.diagnostics.probes;
    const bool panel_series = cfg.diagnostics.firewall_panel && radial;
    if (radial && probes.empty()) probes = default_probe_panel(grid);
    std::unique_ptr<Firewall0Evaluator> fw0;
    if (radial) fw0 = std::make_unique<Firewall0Evaluator>(grid, probes, rc.firewall.kappa0);

    const bool do_fw_fit = cfg.diagnostics.firewall_fit_c2 > cfg.diagnostics.firewall_fit_c1 &&
                           cfg.diagnostics.firewall_fit_c2 > 0.0 && radial;
    std::unique_ptr<Firewall0Evaluator> fw0_shell;
    if (do_fw_fit) {
        std::vector<double> all_radii(grid.num_points());
        for (std::size_t k = 0; k < all_radii.size(); ++k) all_radii[k] = k * h;
        fw0_shell = std::make_unique<Firewall0Evaluator>(grid, all_radii, rc.firewall.kappa0);
    }

    R.c_ref = 0.0;
    for (double c : cfg.diagnostics.c_list) R.c_ref = std::max(R.c_ref, c);

    auto& S = R.series;
    auto series_key_c = [](const std::string& base, double c) {
        return base + "_c" + format_double(c);
    };

    const auto total_steps = static_cast<long long>(std::llround(cfg.solver.t_end / cfg.solver.dt));
    const int series_stride = cfg.diagnostics.series_stride;
    const int snap_stride = cfg.solver.snapshot_stride;

    R.max_principle_worst = -std::numeric_limits<double>::infinity();

    auto sample = [&](const FieldState& st) {
        const double t = st.time;
        const PointFields f = compute_point_fields(st, p, m, stepper);
        S["sup_q"].push(t, sup_q(st));
        S["qbar"].push(t, rc.qbar.at(t));
        R.max_principle_worst =
            std::max(R.max_principle_worst, S["sup_q"].values.back() - S["qbar"].values.back());
        double sup_ut = 0.0;
        for (std::size_t pt = 0; pt < st.num_points(); ++pt)
            sup_ut = std::max(sup_ut, f.ut_sq[pt]);
        sup_ut = std::sqrt(sup_ut);
        S["sup_ut"].push(t, sup_ut);
        S["energy_plain"].push(t, domain_integral(st, f.e_dag));
        S["dissipation_plain"].push(t, domain_integral(st, f.ut_sq));

        const SigmaDescriptor sigma = sigma_esc(st, m);
        const double band = 10.0 * h;
        const double hom_tol = 0.5 * m.escape_distance;
        const double rh = hom_radius(st, m, band, hom_tol);
        R.track.times.push_back(t);
        R.track.r_esc_outer.push_back(sigma.outer_radius);
        R.track.sigma_empty.push_back(sigma.empty ? 1 : 0);
        R.track.r_hom.push_back(rh);
        R.track.r_esc_hom.push_back(r_esc_within(st, m, rh));

        std::vector<double> ut_abs(st.num_points());
        for (std::size_t pt = 0; pt < st.num_points(); ++pt) ut_abs[pt] = std::sqrt(f.ut_sq[pt]);
        S["sup_ut_beyond"].push(t, max_beyond_radius(st, R.c_ref * t, ut_abs));

        for (double c : cfg.diagnostics.c_list) {
            const double radius = std::min(c * t, grid.extent);
            S[series_key_c("energy_ball", c)].push(t, energy_ball(st, f, radius));
            S[series_key_c("dissipation_ball", c)].push(t, dissipation_ball(st, f, radius));
            S[series_key_c("boundary_ball", c)].push(t, boundary_term(st, f, radius));
        }

        std::vector<double> sigma_profile(sigma.mask.begin(), sigma.mask.end());
        std::vector<double> fire_profile(st.num_points());
        for (std::size_t pt = 0; pt < st.num_points(); ++pt)
            fire_profile[pt] = rc.coercivity.w_en * f.e_dag[pt] + f.q_half[pt];
        for (double c : trav_cs) {
            WeightParams w;
            w.kappa = rc.firewall.kappa;
            w.c_cut = rc.firewall.c_cut;
            w.frame_velocity.assign(grid.space_dim, 0.0);
            w.frame_velocity[0] = c;
            S[series_key_c("energy_trav", c)].push(t, localized_energy(st, f, w));
            S[series_key_c("dissipation_trav", c)].push(t, localized_dissipation(st, f, w));
            S[series_key_c("firewall_trav", c)].push(
                t, weighted_integral(st, fire_profile, w, WeightKind::Psi));
            S[series_key_c("pollution_trav", c)].push(
                t, weighted_integral(st, sigma_profile, w, WeightKind::Psi));
        }
        if (fw0 && panel_series) {
            for (std::size_t k = 0; k < fw0->num_probes(); ++k) {
                S["firewall0_probe" + std::to_string(k)].push(t, fw0->value(f, k));
                S["pollution_probe" + std::to_string(k)].push(
                    t, fw0->pollution(sigma.mask, k));
            }
        }
    };

    for (long long i = 0; i <= total_steps; ++i) {
        state.time = static_cast<double>(i) * cfg.solver.dt;
        if (i % series_stride == 0 || i == total_steps) sample(state);
        if (i % snap_stride == 0 || i == total_steps) R.snapshots.push_back(state);
        if (i < total_steps) stepper.step(state);
    }

    // Snapshot-cadence diagnostics: firewall coercivity, the sup-shell
    // firewall series, sandwich and subsolution monitors.
    R.sandwich_params = setup.cmp_max->params;
    bool sandwich_applicable = true;
    try {
        R.sandwich_params.r_esc_init =
            choose_r_esc_init(setup.initial, m, R.sandwich_params.gamma_prime());
    } catch (const std::exception&) {
        sandwich_applicable = false;
    }
    double coerc_worst = -std::numeric_limits<double>::infinity();
    double coerc_scale = 0.0;
    double edge_tail_worst = -std::numeric_limits<double>::infinity();
    double edge_tail_scale = 0.0;
    R.sandwich_worst = -std::numeric_limits<double>::infinity();
    R.subsolution_worst = -std::numeric_limits<double>::infinity();
    double d2_min = std::numeric_limits<double>::infinity();
    for (const FieldState& snap : R.snapshots) {
        const PointFields f = compute_point_fields(snap, p, m, stepper);
        if (fw0) {
            for (std::size_t k = 0; k < fw0->num_probes(); ++k) {
                const Firewall0Coercivity fc = fw0->coercivity(f, rc.coercivity.w_en, k);
                coerc_worst = std::max(coerc_worst, fc.rhs - fc.lhs);
                coerc_scale = std::max(coerc_scale, std::abs(fc.lhs));
            }
            if (fw0->num_probes() >= 2) {
                const double outer = fw0->value(f, fw0->num_probes() - 1);
                const double inner = fw0->value(f, fw0->num_probes() - 2);
                edge_tail_worst = std::max(edge_tail_worst, outer - inner);
                edge_tail_scale = std::max({edge_tail_scale, std::abs(outer), std::abs(inner)});
            }
            // Escape-threshold calibration: smallest firewall value seen at a
            // probe whose state has escaped.
            const std::vector<double> dev = deviation_profile(snap, m);
            for (std::size_t k = 0; k < fw0->num_probes(); ++k) {
                const auto node = static_cast<std::size_t>(
                    std::min<double>(std::lround(fw0->probe_radius(k) / h),
                                     double(grid.num_points() - 1)));
                if (dev[node] > m.escape_distance)
                    d2_min = std::min(d2_min, fw0->value(f, k));
            }
        }
        if (fw0_shell) {
            const double c2 = cfg.diagnostics.firewall_fit_c2;
            double sup = 0.0;
            for (std::size_t k = 0; k < fw0_shell->num_probes(); ++k)
                if (fw0_shell->probe_radius(k) >= c2 * snap.time)
                    sup = std::max(sup, fw0_shell->value(f, k));
            S["firewall0_supshell"].push(snap.time, sup);
        }
        if (sandwich_applicable) {
            R.sandwich_worst =
                std::max(R.sandwich_worst, sandwich_excess(snap, m, R.sandwich_params));
            R.subsolution_worst = std::max(
                R.subsolution_worst, subsolution_residual(snap, m, stepper, setup.cmp_max->vddag));
        }
    }
    R.sandwich_initial_ok = sandwich_applicable;
    if (d2_min < std::numeric_limits<double>::infinity()) {
        R.d_esc_calibrated = std::sqrt(d2_min);
        R.d_esc_constrained = true;
    }

    // Supersolution certificate at the computed c_noesc.
    R.supersolution_worst =
        supersolution_residual(setup.cmp_max->vddag, n, setup.cmp_max->params);

    // Fits and the verdict.
    R.report = dichotomy_verdict(R.track, R.get(series_key_c("energy_ball", R.c_ref)),
                                 R.get("sup_ut"), h, cfg.diagnostics.fit_window_frac);
    const double t_window = cfg.solver.t_end * cfg.diagnostics.fit_window_frac;
    R.hom = hom_flags(R.track, grid.extent, 4.0 * h / t_window, cfg.diagnostics.fit_window_frac);
    R.ut_decay = decay_rate_fit(R.get("sup_ut"));
    R.ut_decay_beyond = decay_rate_fit(R.get("sup_ut_beyond"));
    if (do_fw_fit)
        R.firewall_fit = firewall_exponential_fit(
            R.get("firewall0_supshell"),
            {"", R.track.times, R.track.r_esc_outer}, cfg.diagnostics.firewall_fit_c1,
            cfg.diagnostics.firewall_fit_c2, rc.firewall);

    // Monitors with pinned thresholds.
    auto add_monitor = [&](const std::string& name, double value, double threshold) {
        R.monitors.push_back({name, value, threshold, value <= threshold});
    };
    add_monitor("max_principle_excess", R.max_principle_worst, 1e-8);
    if (fw0 && panel_series) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < fw0->num_probes(); ++k)
            worst = std::max(worst, max_decay_residual(
                                        R.get("firewall0_probe" + std::to_string(k)),
                                        R.get("pollution_probe" + std::to_string(k)),
                                        rc.firewall.nu_f0, rc.firewall.k_f0));
        add_monitor("firewall0_decay_residual", worst, 1e-6 * (1.0 + rc.firewall.k_f0));
    }
    if (fw0) add_monitor("firewall0_coercivity_excess", coerc_worst, 1e-8 * (1.0 + coerc_scale));
    {
        double fw_min = std::numeric_limits<double>::infinity();
        double fw_scale = 0.0;
        double decay_worst = -std::numeric_limits<double>::infinity();
        double ef_worst = -std::numeric_limits<double>::infinity();
        for (double c : trav_cs) {
            const auto& fwt = R.get(series_key_c("firewall_trav", c));
            fw_min = std::min(fw_min, series_min(fwt));
            for (double v : fwt.values) fw_scale = std::max(fw_scale, std::abs(v));
            decay_worst = std::max(
                decay_worst, max_decay_residual(fwt, R.get(series_key_c("pollution_trav", c)),
                                                rc.firewall.nu_f, rc.firewall.k_f0));
            // energy decrease up to firewall: dE/dt + D/2 - K_EF F <= 0.
            const auto& e = R.get(series_key_c("energy_trav", c));
            const auto& d = R.get(series_key_c("dissipation_trav", c));
            for (std::size_t i = 1; i + 1 < e.size(); ++i) {
                const double dts = e.times[i + 1] - e.times[i - 1];
                const double de = (e.values[i + 1] - e.values[i - 1]) / dts;
                ef_worst = std::max(de + 0.5 * d.values[i] - rc.firewall.k_ef * fwt.values[i],
                                    ef_worst);
            }
        }
        add_monitor("firewall_trav_negativity", -fw_min, 1e-8 * (1.0 + fw_scale));
        add_monitor("firewall_trav_decay_residual", decay_worst,
                    1e-6 * (1.0 + rc.firewall.k_f0));
        add_monitor("energy_decrease_residual", ef_worst,
                    1e-4 * (1.0 + rc.firewall.k_ef) * (1.0 + fw_scale));
    }
    add_monitor("supersolution_residual", R.supersolution_worst, 1e-10);
    {
        // Homogeneous annulus beyond the escape set.
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < R.track.times.size(); ++i)
            worst = std::max(worst, R.track.r_esc_outer[i] - R.track.r_hom[i]);
        add_monitor("escape_within_hom_radius", worst, 1e-12);
    }
    if (R.report.verdict == Verdict::NoInvasion) {
        // Relaxation leaves the tail dissipation integrable: the quarter
        // integrals of D_c over the tail window must shrink.
        const auto quarters =
            tail_quarter_integrals(R.get(series_key_c("dissipation_ball", R.c_ref)));
        double worst = -std::numeric_limits<double>::infinity();
        double scale = 0.0;
        for (std::size_t i = 1; i < quarters.size(); ++i) {
            worst = std::max(worst, quarters[i] - quarters[i - 1]);
            scale = std::max(scale, quarters[i - 1]);
        }
        add_monitor("dissipation_tail_shrinks", worst, 1e-10 * (1.0 + scale));
    }
    if (fw0 && fw0->num_probes() >= 2)
        add_monitor("firewall0_edge_tail", edge_tail_worst, 1e-10 * (1.0 + edge_tail_scale));
    if (R.sandwich_initial_ok) {
        add_monitor("sandwich_excess", R.sandwich_worst,
                    1e-7 * (1.0 + R.sandwich_params.q_max));
        add_monitor("subsolution_residual", R.subsolution_worst,
                    20.0 * h * h * (1.0 + rc.qbar.q0));
    }
    return R;
}

nlohmann::json result_to_json(const PipelineResult& R) {
    nlohmann::json j;
    j["config"] = config_to_json(R.config);
    ConstantsReport rep{R.constants};
    j["constants"] = rep.to_json();
    nlohmann::json verdict;
    verdict["verdict"] = to_string(R.report.verdict);
    verdict["c_inv"] = R.report.c_inv.c_inv;
    verdict["c_inv_ci"] = {R.report.c_inv.ci_lo, R.report.c_inv.ci_hi};
    verdict["c_inv_degenerate"] = R.report.c_inv.degenerate;
    verdict["e_asympt_status"] = to_string(R.report.e_asympt.status);
    verdict["e_asympt_value"] = R.report.e_asympt.value;
    verdict["e_asympt_oscillation"] = R.report.e_asympt.oscillation;
    verdict["e_asympt_slope"] = R.report.e_asympt.slope;
    verdict["ut_tail"] = R.report.ut_tail;
    verdict["speed_zero_tol"] = R.report.speed_zero_tol;
    verdict["accept_tol"] = R.report.accept_tol;
    verdict["ut_tol"] = R.report.ut_tol;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : R.report.checks)
        checks.push_back(
            {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
    verdict["checks"] = checks;
    j["verdict"] = verdict;
    j["hom"] = {{"h_hom", R.hom.h_hom},
                {"h_noinv", R.hom.h_noinv},
                {"hom_slope", R.hom.hom_slope},
                {"resc_over_t_tail", R.hom.resc_over_t_tail}};
    nlohmann::json monitors = nlohmann::json::array();
    for (const auto& mo : R.monitors)
        monitors.push_back({{"name", mo.name},
                            {"value", mo.value},
                            {"threshold", mo.threshold},
                            {"pass", mo.pass}});
    j["monitors"] = monitors;
    // Observed spread between the standing-frame localized energy and the
    // almost-standing frame, reported without a pass/fail gate.
    {
        const FunctionalSeries* base = nullptr;
        const FunctionalSeries* other = nullptr;
        for (const auto& [name, series] : R.series) {
            if (name == "energy_trav_c0") base = &series;
            else if (name.rfind("energy_trav_c", 0) == 0) other = &series;
        }
        if (base && other && base->size() == other->size()) {
            double spread = 0.0;
            for (std::size_t i = 0; i < base->size(); ++i)
                spread = std::max(spread, std::abs(base->values[i] - other->values[i]));
            j["energy_trav_spread_vs_standing"] = spread;
        }
    }
    j["ut_decay_rate"] = R.ut_decay.rate;
    j["ut_decay_rate_beyond_cref"] = R.ut_decay_beyond.rate;
    j["c_ref"] = R.c_ref;
    if (R.firewall_fit) {
        j["firewall_fit"] = {{"rate", R.firewall_fit->rate},
                             {"predicted_rate", R.firewall_fit->predicted_rate},
                             {"prefactor", R.firewall_fit->prefactor},
                             {"identically_zero", R.firewall_fit->identically_zero}};
    }
    j["sandwich"] = {{"initial_ok", R.sandwich_initial_ok},
                     {"worst_excess", R.sandwich_worst},
                     {"r_esc_init", R.sandwich_params.r_esc_init},
                     {"c", R.sandwich_params.c}};
    j["d_esc_calibrated"] = {{"value", R.d_esc_calibrated},
                             {"constrained", R.d_esc_constrained},
                             {"note", "calibrated from the scenario corpus, not derived"}};
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : R.snapshots) snaps.push_back(s.time);
    j["snapshot_times"] = snaps;
    return j;
}

namespace {

// Per-probe decay-inequality table: lhs = dF0/dt, rhs = -nu F0 + K * pollution.
void write_firewall_monitor_csv(const PipelineResult& R, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "time,probe,lhs,rhs,residual\n";
    const double nu = R.constants.firewall.nu_f0;
    const double k = R.constants.firewall.k_f0;
    for (int probe = 0;; ++probe) {
        const auto it = R.series.find("firewall0_probe" + std::to_string(probe));
        if (it == R.series.end()) break;
        const auto& fw = it->second;
        const auto& poll = R.series.at("pollution_probe" + std::to_string(probe));
        for (std::size_t i = 1; i + 1 < fw.size(); ++i) {
            const double lhs =
                (fw.values[i + 1] - fw.values[i - 1]) / (fw.times[i + 1] - fw.times[i - 1]);
            const double rhs = -nu * fw.values[i] + k * poll.values[i];
            out << format_double(fw.times[i]) << "," << probe << "," << format_double(lhs)
                << "," << format_double(rhs) << "," << format_double(lhs - rhs) << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace

void write_artifacts(const PipelineResult& R, const std::string& outdir) {
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (!ec && R.config.output.write_series) fs::create_directories(outdir + "/series", ec);
    if (ec) throw IoError("cannot create output directory: " + outdir);
    if (R.config.output.write_snapshots) {
        fs::create_directories(outdir + "/snapshots", ec);
        if (ec) throw IoError("cannot create snapshot directory");
    }
    {
        std::ofstream out(outdir + "/run.json");
        if (!out) throw IoError("cannot write run.json");
        out << result_to_json(R).dump(2) << "\n";
        if (!out) throw IoError("write failed for run.json");
    }
    if (R.config.output.write_series) {
        for (const auto& [name, series] : R.series) {
            FunctionalSeries named = series;
            named.name = name;
            write_series_csv(outdir + "/series/" + name + ".csv", named);
        }
        write_firewall_monitor_csv(R, outdir + "/series/firewall0_monitor.csv");
    }
    if (R.config.output.write_snapshots) {
        int idx = 0;
        for (const auto& snap : R.snapshots) {
            std::ostringstream name;
            name << outdir << "/snapshots/snap_" << std::setfill('0') << std::setw(6) << idx++
                 << ".csv";
            std::ofstream out(name.str());
            if (!out) throw IoError("cannot write " + name.str());
            write_snapshot_csv(out, snap);
        }
    }
}

}  // namespace gradflow
