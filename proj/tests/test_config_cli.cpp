#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gradflow/pipeline.hpp"

using namespace gradflow;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(
name = "sample"
seed = 7

[potential]
kind = "tilted_bistable"
a = 0.1
m_guess = [-1.0]

[grid]
mode = "radial"
dim = 2
extent = 16.0
resolution = 64

[solver]
scheme = "rk4"
t_end = 2.0

[initial_condition]
kind = "plateau_bump"
amplitude = [2.0]
radius = 2.0
width = 1.2

[diagnostics]
c_list = [0.0, 0.25]

[output]
directory = "out"
write_snapshots = false
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing fills every section") {
    const RunConfig cfg = parse_config_text(kSample, "sample");
    CHECK(cfg.name == "sample");
    CHECK(cfg.seed == 7);
    CHECK(cfg.potential.kind == "tilted_bistable");
    CHECK(cfg.potential.params.at("a") == 0.1);
    CHECK(cfg.potential.m_guess == Vec{-1.0});
    CHECK(cfg.grid.mode == GridMode::Radial);
    CHECK(cfg.grid.resolution == 64);
    CHECK(cfg.solver.dt > 0.0);  // auto-filled at the CFL bound
    CHECK(cfg.solver.dt <= cfl_limit(cfg.make_grid()));
    CHECK(cfg.solver.snapshot_stride > 0);
    CHECK(cfg.diagnostics.series_stride > 0);
    CHECK_FALSE(cfg.output.write_snapshots);
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(parse_config_text("[potential]\nkind = \"unobtainium\"\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[grid]\nbogus_key = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[grid]\nresolution = 4\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[solver]\nscheme = \"leapfrog\"\n", "x"), ConfigError);

    // CFL violations name the bound.
    const std::string bad = std::string(kSample) + "\n[solver]\ndt = 0.5\n";
    try {
        parse_config_text(bad, "x");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("CFL") != std::string::npos);
        CHECK(msg.find("0.9*h^2") != std::string::npos);
    }
}

TEST_CASE("presets load, finalize and round-trip through TOML") {
    for (const auto& name : preset_names()) {
        const RunConfig cfg = preset(name);
        CHECK(cfg.solver.dt > 0.0);
        const RunConfig echo = parse_config_text(config_to_toml(cfg), cfg.name);
        CHECK(echo.potential.kind == cfg.potential.kind);
        CHECK(echo.grid.resolution == cfg.grid.resolution);
        CHECK(echo.solver.dt == cfg.solver.dt);
        CHECK(echo.solver.t_end == cfg.solver.t_end);
        CHECK(echo.diagnostics.c_list == cfg.diagnostics.c_list);
    }
    CHECK_THROWS_AS(preset("does-not-exist"), ConfigError);
    CHECK(is_preset("quadratic-gaussian"));
}

TEST_CASE("pipeline artifacts are byte-reproducible") {
    RunConfig cfg = parse_config_text(kSample, "sample");
    const fs::path base = fs::temp_directory_path() / "gradflow_repro";
    fs::remove_all(base);

    for (int round = 0; round < 2; ++round) {
        const PipelineResult result = run_pipeline(cfg);
        write_artifacts(result, (base / ("run" + std::to_string(round))).string());
    }
    const std::string a = slurp(base / "run0" / "run.json");
    const std::string b = slurp(base / "run1" / "run.json");
    REQUIRE(!a.empty());
    CHECK(a == b);
    for (const auto& entry : fs::directory_iterator(base / "run0" / "series")) {
        const auto name = entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(base / "run1" / "series" / name));
    }
    fs::remove_all(base);
}

TEST_CASE("run.json echoes the resolved config and constants table") {
    RunConfig cfg = parse_config_text(kSample, "sample");
    const PipelineResult result = run_pipeline(cfg);
    const auto j = result_to_json(result);
    CHECK(j["config"]["solver"]["dt"].get<double>() == cfg.solver.dt);
    CHECK(j["config"]["diagnostics"]["series_stride"].get<int>() ==
          cfg.diagnostics.series_stride);
    CHECK(j["constants"].contains("kappa0"));
    CHECK(j["constants"].contains("c_noesc_att"));
    CHECK(j["verdict"].contains("checks"));

    const ConstantsReport rep = compute_constants(cfg);
    const std::string table = rep.to_table();
    for (const char* key : {"lambda_min", "d_esc", "w_en", "k_f0", "c_noesc"})
        CHECK(table.find(key) != std::string::npos);
}

TEST_CASE("file initial conditions round-trip through snapshot CSV") {
    RunConfig cfg = parse_config_text(kSample, "sample");
    cfg.solver.t_end = 0.5;
    cfg.finalize();
    const PipelineResult result = run_pipeline(cfg);

    const fs::path dir = fs::temp_directory_path() / "gradflow_ic";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "state.csv");
        write_snapshot_csv(out, result.snapshots.back());
    }
    RunConfig resume = cfg;
    resume.initial_condition.kind = "file";
    resume.initial_condition.path = (dir / "state.csv").string();
    resume.finalize();
    auto p = std::make_shared<PotentialSpec>(
        make_potential(resume.potential.kind, resume.potential.params));
    const MinimumPoint m = find_minimum(*p, resume.potential.m_guess);
    const FieldState loaded = build_initial_state(resume, *p, m);
    const FieldState& expect = result.snapshots.back();
    REQUIRE(loaded.values.size() == expect.values.size());
    for (std::size_t i = 0; i < loaded.values.size(); ++i)
        CHECK(loaded.values[i] == doctest::Approx(expect.values[i]).epsilon(1e-12));
    fs::remove_all(dir);
}

TEST_CASE("every pipeline monitor passes on the sample run") {
    RunConfig cfg = parse_config_text(kSample, "sample");
    const PipelineResult result = run_pipeline(cfg);
    for (const auto& mo : result.monitors) {
        CHECK_MESSAGE(mo.pass, mo.name, " value=", mo.value, " threshold=", mo.threshold);
    }
    CHECK(result.sandwich_initial_ok);
}

TEST_CASE("cartesian pipeline runs end to end") {
    RunConfig cfg;
    cfg.name = "cart";
    cfg.potential.kind = "quadratic";
    cfg.potential.m_guess = {0.0};
    cfg.grid = {GridMode::Cartesian, 2, 6.0, 48};
    cfg.solver.t_end = 2.0;
    cfg.initial_condition.kind = "gaussian_bump";
    cfg.initial_condition.amplitude = {1.0};
    cfg.initial_condition.sigma = 1.0;
    cfg.diagnostics.trav_c_auto = false;  // weighted frames stay standing here
    cfg.output.write_snapshots = false;
    cfg.finalize();
    const PipelineResult r = run_pipeline(cfg);
    CHECK(r.max_principle_worst <= 1e-8);
    for (const auto& mo : r.monitors)
        CHECK_MESSAGE(mo.pass, mo.name, " value=", mo.value, " threshold=", mo.threshold);
    // The bump relaxes toward the minimum from the very first step.
    const auto& e = r.get("energy_plain");
    CHECK(e.values.front() > e.values.back());
    CHECK(e.values.back() < 0.1);
}

TEST_CASE("load_config resolves both presets and file paths") {
    const RunConfig direct = preset("quadratic-gaussian");
    const RunConfig via_name = load_config("quadratic-gaussian");
    CHECK(via_name.solver.dt == direct.solver.dt);

    const fs::path file = fs::temp_directory_path() / "gradflow_cfg.toml";
    {
        std::ofstream out(file);
        out << config_to_toml(direct);
    }
    const RunConfig via_file = load_config(file.string());
    CHECK(via_file.potential.kind == direct.potential.kind);
    CHECK(via_file.grid.resolution == direct.grid.resolution);
    CHECK(via_file.solver.dt == direct.solver.dt);
    fs::remove(file);

    CHECK_THROWS_AS(load_config("/definitely/not/here.toml"), IoError);
}
