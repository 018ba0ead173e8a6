#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pumpsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pumpsim: wastewater pump-station simulator and fault diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_path = "timeseries.csv";
    std::optional<std::uint64_t> seed;
    bool noiseless = false;

    auto* sim = app.add_subcommand("simulate", "run a scenario and write timeseries.csv");
    sim->add_option("--config", config_path, "scenario config file")->required();
    sim->add_option("--out", out_path, "output CSV path");
    sim->add_option("--seed", seed, "override the config seed");
    sim->add_flag("--noiseless", noiseless, "disable all sensor noise");

    std::string ts_path, method = "both", out_dir = ".";
    int pump_id = 1;
    auto* diag = app.add_subcommand("diagnose", "classify operating cycles of a timeseries");
    diag->add_option("--in", ts_path, "timeseries.csv to analyze")->required();
    diag->add_option("--method", method, "ftest|tangent|both");
    diag->add_option("--out", out_dir, "output directory");
    diag->add_option("--pump", pump_id, "pump to analyze (1-based)");

    std::string ref_path, sim_path, val_out = "validation.csv";
    auto* val = app.add_subcommand("validate", "compare a simulated run against a reference");
    val->add_option("reference", ref_path, "reference timeseries CSV")->required();
    val->add_option("simulated", sim_path, "simulated timeseries CSV")->required();
    val->add_option("--out", val_out, "output CSV path");

    std::string gen_cfg, gen_out = "inflow.csv";
    std::optional<std::uint64_t> gen_seed;
    auto* gen = app.add_subcommand("gen-inflow", "emit the inflow series of a scenario config");
    gen->add_option("--config", gen_cfg, "scenario config file")->required();
    gen->add_option("--out", gen_out, "output CSV path");
    gen->add_option("--seed", gen_seed, "override the config seed");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return pumpsim::cmd_simulate(config_path, out_path, {seed, noiseless});
    if (diag->parsed()) {
        pumpsim::DiagnosisConfig cfg;
        cfg.pump_id = pump_id;
        return pumpsim::cmd_diagnose(ts_path, method, out_dir, cfg);
    }
    if (val->parsed()) return pumpsim::cmd_validate(ref_path, sim_path, val_out);
    if (gen->parsed()) return pumpsim::cmd_gen_inflow(gen_cfg, gen_out, gen_seed);
    return 1;
}
