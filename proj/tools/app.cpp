#include "app.hpp"

#include "commands.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace fit2::cli
{

namespace
{

void print_outputs(std::ostream& out, const RunManifest& m)
{
    for (const auto& f : m.outputs)
        out << "wrote " << f.role << ": " << f.path << " (sha256 " << f.sha256.substr(0, 16) << ")\n";
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Interval type-2 fuzzy ELM classifier, type reducers and wall-following mission simulator",
                 tool_name};
    app.set_version_flag("--version", std::string(tool_name) + " " + tool_version);
    app.set_config("--config", "", "TOML/INI file with per-subcommand sections; command-line flags win");
    app.require_subcommand(1);

    GenDataOptions gen;
    std::string direction = to_string(gen.spec.direction);
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a labelled synthetic sonar dataset");
    gen_cmd->configurable();
    gen_cmd->add_option("--out,-o", gen.out, "Dataset CSV path")->capture_default_str();
    gen_cmd->add_option("--wall", gen.spec.wall, "Wall samples")->capture_default_str();
    gen_cmd->add_option("--corner", gen.spec.corner, "Corner samples")->capture_default_str();
    gen_cmd->add_option("--sigma", gen.spec.sigma, "Sonar noise standard deviation (m)")->capture_default_str();
    gen_cmd->add_option("--seed", gen.spec.seed, "Run seed")->capture_default_str();
    gen_cmd->add_option("--direction", direction, "Circuit direction")
        ->check(CLI::IsMember({"clockwise", "anticlockwise"}))
        ->capture_default_str();

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "Cross-validate a trainer and fit a final model");
    train_cmd->configurable();
    train_cmd->add_option("--data,-d", tr.dataset, "Dataset CSV")->required();
    train_cmd->add_option("--trainer,-t", tr.trainer, "Trainer")
        ->check(CLI::IsMember({"fit2felm", "it2felm-km", "t1felm", "elm"}))
        ->capture_default_str();
    train_cmd->add_option("--rules,-M", tr.rules, "Fuzzy rules (ELM: hidden width is rules x inputs)")
        ->capture_default_str();
    train_cmd->add_option("--seed", tr.seed, "Run seed")->capture_default_str();
    train_cmd->add_option("--folds,-k", tr.folds, "Cross-validation folds (>= 2)")->capture_default_str();
    train_cmd->add_option("--ridge", tr.ridge, "Ridge penalty; 0 gives the minimum-norm solution")
        ->capture_default_str();
    train_cmd->add_option("--refine-passes", tr.refine_passes, "Switch-indicator refinement solves")
        ->capture_default_str();
    train_cmd->add_flag("--bias", tr.bias, "Add a constant term to each consequent");
    train_cmd->add_option("--model-out", tr.model_out, "Model JSON path")->capture_default_str();
    train_cmd->add_option("--report-out", tr.report_out, "Evaluation report JSON path")->capture_default_str();

    ReduceBenchOptions rb;
    auto* bench_cmd = app.add_subcommand("reduce-bench", "Time SC, KM and Wu-Mendel reducers and check agreement");
    bench_cmd->configurable();
    bench_cmd->add_option("--sizes,-M", rb.sizes, "Rule counts")->capture_default_str();
    bench_cmd->add_option("--instances,-n", rb.instances, "Random instances per rule count")->capture_default_str();
    bench_cmd->add_option("--seed", rb.seed, "Run seed")->capture_default_str();
    bench_cmd->add_option("--out,-o", rb.out, "Benchmark JSON path")->capture_default_str();

    SimulateOptions sim;
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a wall-following mission with a trained classifier");
    sim_cmd->configurable();
    sim_cmd->add_option("--model,-m", sim.model, "Model JSON")->required();
    sim_cmd->add_option("--mission", sim.mission_config, "Mission config JSON (defaults when omitted)");
    auto* seed_opt = sim_cmd->add_option("--seed", sim_seed, "Overrides the mission config seed");
    sim_cmd->add_option("--log-out", sim.log_out, "Mission log CSV path")->capture_default_str();
    sim_cmd->add_option("--summary-out", sim.summary_out, "Summary JSON path")->capture_default_str();

    std::string manifest;
    std::string out_dir;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest and compare digests");
    replay_cmd->add_option("manifest", manifest, "Manifest JSON")->required();
    replay_cmd->add_option("--out-dir", out_dir, "Write outputs here instead of the recorded paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*gen_cmd) {
            gen.spec.direction = direction_from_string(direction);
            print_outputs(out, cmd_gen_data(gen));
        } else if (*train_cmd) {
            const auto m = cmd_train(tr);
            print_outputs(out, m);
        } else if (*bench_cmd) {
            int code = exit_ok;
            print_outputs(out, cmd_reduce_bench(rb, code));
            if (code != exit_ok)
                err << "reduce-bench: SC and KM disagree beyond 1e-9\n";
            return code;
        } else if (*sim_cmd) {
            if (seed_opt->count() > 0)
                sim.seed = sim_seed;
            print_outputs(out, cmd_simulate(sim));
        } else if (*replay_cmd) {
            return cmd_replay(manifest, out_dir, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_ok;
}

} // namespace fit2::cli
