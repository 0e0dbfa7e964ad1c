#pragma once

#include "manifest.hpp"

#include "fit2/simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fit2::cli
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_validation = 1,
    exit_runtime = 2,
    exit_assertion = 3
};

struct GenDataOptions
{
    std::string out = "dataset.csv";
    DatasetSpec spec;
};

struct TrainOptions
{
    std::string dataset;
    std::string trainer = "fit2felm";
    std::size_t rules = 6;
    std::uint64_t seed = 1;
    std::size_t folds = 5;
    double ridge = 0.0;
    int refine_passes = TrainConfig{}.refine_passes;
    bool bias = false;
    std::string model_out = "model.json";
    std::string report_out = "report.json";
};

struct ReduceBenchOptions
{
    std::vector<std::size_t> sizes{2, 4, 6, 8, 12};
    std::size_t instances = 100000;
    std::uint64_t seed = 1;
    std::string out = "bench.json";
};

struct SimulateOptions
{
    std::string model;
    // Empty means the built-in default mission.
    std::string mission_config;
    // Resolved mission config; when set it takes the place of the file.
    nlohmann::json mission_inline;
    std::optional<std::uint64_t> seed;
    std::string log_out = "mission.csv";
    std::string summary_out = "summary.json";
};

nlohmann::json to_json(const GenDataOptions& o);
nlohmann::json to_json(const TrainOptions& o);
nlohmann::json to_json(const ReduceBenchOptions& o);
nlohmann::json to_json(const SimulateOptions& o);
GenDataOptions gen_data_options_from_json(const nlohmann::json& j);
TrainOptions train_options_from_json(const nlohmann::json& j);
ReduceBenchOptions reduce_bench_options_from_json(const nlohmann::json& j);
SimulateOptions simulate_options_from_json(const nlohmann::json& j);

/// Each command writes its artifacts plus a sidecar manifest next to the
/// first artifact, and returns the manifest it wrote.
RunManifest cmd_gen_data(const GenDataOptions& o);
RunManifest cmd_train(const TrainOptions& o);
/// Exit code is exit_assertion when SC and KM disagree on any instance.
RunManifest cmd_reduce_bench(const ReduceBenchOptions& o, int& exit_code);
RunManifest cmd_simulate(const SimulateOptions& o);

/// Re-runs the command recorded in a manifest. With a non-empty `out_dir`
/// outputs are redirected there under their original file names. Returns
/// exit_assertion when a reproducible output's digest differs.
int cmd_replay(const std::filesystem::path& manifest, const std::string& out_dir, std::ostream& log);

/// Per-reducer timing summary used by reduce-bench.
struct ReducerTiming
{
    std::size_t rules = 0;
    double sc_median_ns = 0.0;
    double km_median_ns = 0.0;
    double wm_median_ns = 0.0;
    std::size_t violations = 0;
    double max_abs_diff = 0.0;
};

ReducerTiming bench_reducers(std::size_t rules, std::size_t instances, std::uint64_t seed);

} // namespace fit2::cli
