#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "landau/commands.hpp"

namespace {

int load_config(const std::string& path, landau::RunConfig& out) {
    auto parsed = landau::parse_config_file(path);
    if (!parsed.ok) {
        for (const auto& err : parsed.errors) std::cerr << "config error: " << err << std::endl;
        return landau::kExitConfigError;
    }
    out = parsed.config;
    return landau::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic Landau equation simulator and estimate verifier"};
    app.require_subcommand(1);

    std::string config_path, suite = "all", dir_a, dir_b;
    std::vector<std::string> snapshots;

    auto* run = app.add_subcommand("run", "run a simulation");
    run->add_option("config", config_path, "config file")->required();

    auto* diagnose = app.add_subcommand("diagnose", "recompute diagnostics for snapshots");
    diagnose->add_option("config", config_path, "config file")->required();
    diagnose->add_option("snapshots", snapshots, "snapshot files")->required()->expected(-1);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("config", config_path, "config file")->required();
    verify->add_option("--suite", suite, "kernel|solver|estimates|all");

    auto* compare = app.add_subcommand("compare", "contraction comparison of two runs");
    compare->add_option("dirA", dir_a, "first run directory")->required();
    compare->add_option("dirB", dir_b, "second run directory")->required();
    compare->add_option("config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    landau::RunConfig config;
    if (int rc = load_config(config_path, config); rc != landau::kExitOk) return rc;

    try {
        if (run->parsed()) return landau::cmd_run(config);
        if (diagnose->parsed()) return landau::cmd_diagnose(config, snapshots);
        if (verify->parsed()) return landau::cmd_verify(config, suite);
        if (compare->parsed()) return landau::cmd_compare(dir_a, dir_b, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        std::string what = e.what();
        if (what.find("instability") != std::string::npos) return landau::kExitInstability;
        return landau::kExitCheckFailed;
    }
    return landau::kExitOk;
}
