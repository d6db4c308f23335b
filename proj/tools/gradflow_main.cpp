#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gradflow/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gradflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitIo = 4;

std::string resolve_outdir(const std::string& cli_dir, const std::string& config_dir,
                           const std::string& run_name) {
    std::string base = config_dir;
    if (const char* env = std::getenv("GRADFLOW_OUTDIR")) base = env;
    if (!cli_dir.empty()) base = cli_dir;
    return base + "/" + run_name;
}

int run_one(const std::string& target, const std::string& cli_dir) {
    try {
        const RunConfig cfg = load_config(target);
        const std::string outdir = resolve_outdir(cli_dir, cfg.output.directory, cfg.name);
        std::cerr << "[" << cfg.name << "] simulating to t = " << cfg.solver.t_end << " ...\n";
        const PipelineResult result = run_pipeline(cfg, &std::cerr);
        write_artifacts(result, outdir);
        std::cout << cfg.name << ": verdict " << to_string(result.report.verdict)
                  << "  c_inv = " << format_double(result.report.c_inv.c_inv)
                  << "  E_asympt = " << to_string(result.report.e_asympt.status) << " ("
                  << format_double(result.report.e_asympt.value) << ")"
                  << "  artifacts: " << outdir << "\n";
        for (const auto& mo : result.monitors)
            if (!mo.pass)
                std::cerr << "  monitor FAIL " << mo.name << ": " << mo.value << " > "
                          << mo.threshold << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BlowupError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitBlowup;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int constants_cmd(const std::string& target) {
    try {
        const RunConfig cfg = load_config(target);
        const ConstantsReport rep = compute_constants(cfg, &std::cerr);
        std::cout << rep.to_table() << "\n" << rep.to_json().dump(2) << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int batch_cmd(const std::string& dir, const std::string& cli_dir) {
    std::vector<std::string> configs;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".toml") configs.push_back(entry.path().string());
    } catch (const std::exception& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "no .toml configs in " << dir << "\n";
        return kExitConfig;
    }
    int worst = kExitOk;
    for (const auto& path : configs) worst = std::max(worst, run_one(path, cli_dir));
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and diagnostics for parabolic gradient systems "
                 "u_t = -grad V(u) + Lap u"};
    app.require_subcommand(1);

    std::string target, outdir;
    auto* run = app.add_subcommand("run", "simulate a config file or preset and write artifacts");
    run->add_option("config", target, "config path or preset name")->required();
    run->add_option("--output", outdir, "output directory (overrides config and GRADFLOW_OUTDIR)");

    std::string ctarget;
    auto* constants =
        app.add_subcommand("constants", "print the derived constants without simulating");
    constants->add_option("config", ctarget, "config path or preset name")->required();

    std::string bdir, boutdir;
    auto* batch = app.add_subcommand("batch", "run every .toml config in a directory");
    batch->add_option("dir", bdir, "directory of config files")->required();
    batch->add_option("--output", boutdir, "output directory base");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return run_one(target, outdir);
    if (constants->parsed()) return constants_cmd(ctarget);
    if (batch->parsed()) return batch_cmd(bdir, boutdir);
    return kExitConfig;
}
