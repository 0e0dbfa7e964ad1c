#include "commands.hpp"

#include "fit2/io.hpp"
#include "fit2/mission.hpp"
#include "fit2/type_reduction.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

namespace fit2::cli
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out)
        throw Error("write failed: '" + path.string() + "'");
}

json read_json(const fs::path& path, const std::string& what)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + what + " '" + path.string() + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ValidationError(what + " '" + path.string() + "': " + e.what());
    }
}

// Artifacts name their manifest by file name so that moving a run directory
// keeps the reference intact.
std::string manifest_name(const fs::path& primary)
{
    return manifest_path_for(primary).filename().string();
}

json confusion_to_json(const ConfusionMatrix& c)
{
    return {{"wall", {{"wall", c.counts[0][0]}, {"corner", c.counts[0][1]}}},
            {"corner", {{"wall", c.counts[1][0]}, {"corner", c.counts[1][1]}}}};
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1)
        return *mid;
    const double hi = *mid;
    return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

} // namespace

// Options <-> JSON, used for manifests and replay.

json to_json(const GenDataOptions& o)
{
    const auto& s = o.spec;
    return {{"out", o.out},
            {"wall", s.wall},
            {"corner", s.corner},
            {"sigma", s.sigma},
            {"seed", s.seed},
            {"direction", to_string(s.direction)},
            {"offset_min", s.offset_min},
            {"offset_max", s.offset_max},
            {"heading_jitter", s.heading_jitter},
            {"turn_fraction", s.turn_fraction},
            {"max_draws", s.max_draws}};
}

GenDataOptions gen_data_options_from_json(const json& j)
{
    GenDataOptions o;
    auto& s = o.spec;
    o.out = get_or(j, "out", o.out);
    s.wall = get_or(j, "wall", s.wall);
    s.corner = get_or(j, "corner", s.corner);
    s.sigma = get_or(j, "sigma", s.sigma);
    s.seed = get_or(j, "seed", s.seed);
    s.direction = direction_from_string(get_or<std::string>(j, "direction", to_string(s.direction)));
    s.offset_min = get_or(j, "offset_min", s.offset_min);
    s.offset_max = get_or(j, "offset_max", s.offset_max);
    s.heading_jitter = get_or(j, "heading_jitter", s.heading_jitter);
    s.turn_fraction = get_or(j, "turn_fraction", s.turn_fraction);
    s.max_draws = get_or(j, "max_draws", s.max_draws);
    return o;
}

json to_json(const TrainOptions& o)
{
    return {{"dataset", o.dataset},     {"trainer", o.trainer},
            {"rules", o.rules},         {"seed", o.seed},
            {"folds", o.folds},         {"ridge", o.ridge},
            {"refine_passes", o.refine_passes}, {"bias", o.bias},
            {"model_out", o.model_out}, {"report_out", o.report_out}};
}

TrainOptions train_options_from_json(const json& j)
{
    TrainOptions o;
    o.dataset = get_or(j, "dataset", o.dataset);
    o.trainer = get_or(j, "trainer", o.trainer);
    o.rules = get_or(j, "rules", o.rules);
    o.seed = get_or(j, "seed", o.seed);
    o.folds = get_or(j, "folds", o.folds);
    o.ridge = get_or(j, "ridge", o.ridge);
    o.refine_passes = get_or(j, "refine_passes", o.refine_passes);
    o.bias = get_or(j, "bias", o.bias);
    o.model_out = get_or(j, "model_out", o.model_out);
    o.report_out = get_or(j, "report_out", o.report_out);
    return o;
}

json to_json(const ReduceBenchOptions& o)
{
    return {{"sizes", o.sizes}, {"instances", o.instances}, {"seed", o.seed}, {"out", o.out}};
}

ReduceBenchOptions reduce_bench_options_from_json(const json& j)
{
    ReduceBenchOptions o;
    o.sizes = get_or(j, "sizes", o.sizes);
    o.instances = get_or(j, "instances", o.instances);
    o.seed = get_or(j, "seed", o.seed);
    o.out = get_or(j, "out", o.out);
    return o;
}

json to_json(const SimulateOptions& o)
{
    json j = {{"model", o.model},
              {"mission_config", o.mission_config},
              {"log_out", o.log_out},
              {"summary_out", o.summary_out}};
    if (o.seed)
        j["seed"] = *o.seed;
    if (!o.mission_inline.is_null())
        j["mission"] = o.mission_inline;
    return j;
}

SimulateOptions simulate_options_from_json(const json& j)
{
    SimulateOptions o;
    o.model = get_or(j, "model", o.model);
    o.mission_config = get_or(j, "mission_config", o.mission_config);
    o.log_out = get_or(j, "log_out", o.log_out);
    o.summary_out = get_or(j, "summary_out", o.summary_out);
    if (j.contains("seed"))
        o.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mission"))
        o.mission_inline = j.at("mission");
    return o;
}

// Commands.

RunManifest cmd_gen_data(const GenDataOptions& o)
{
    const auto t0 = Clock::now();
    const TankGeometry tank;
    const SonarConfig sonar;
    const auto generated = generate_dataset(tank, sonar, o.spec);
    const double gen_s = seconds_since(t0);
    write_dataset_csv(fs::path(o.out), generated.data);

    RunManifest m;
    m.command = "gen-data";
    m.config = to_json(o);
    m.seed = o.spec.seed;
    m.outputs.push_back(digest("dataset", o.out));
    m.timings = {{"generate", gen_s}, {"total", seconds_since(t0)}};
    write_manifest(manifest_path_for(o.out), m);
    return m;
}

RunManifest cmd_train(const TrainOptions& o)
{
    if (o.folds < 2)
        throw ValidationError("train: --folds must be at least 2");
    const Trainer trainer = trainer_from_string(o.trainer);
    TrainConfig cfg;
    cfg.rules = o.rules;
    cfg.seed = o.seed;
    cfg.ridge = o.ridge;
    cfg.refine_passes = o.refine_passes;
    cfg.bias = o.bias;
    cfg.validate();

    const auto t0 = Clock::now();
    const Dataset data = read_dataset_csv(fs::path(o.dataset));
    if (o.folds > data.samples())
        throw ValidationError("train: more folds than samples");

    const EvalReport report = cross_validate(data, cfg, trainer, o.folds);
    const double cv_s = seconds_since(t0);
    const auto t1 = Clock::now();
    const TrainResult final_fit = train(trainer, data, cfg);
    const double fit_s = seconds_since(t1);
    const ConfusionMatrix final_cm = confusion_matrix(predict_rows(final_fit.model, data.X), data.T);

    json model = model_to_json(final_fit.model);
    model["manifest"] = manifest_name(o.model_out);
    write_json(o.model_out, model);

    json folds = json::array();
    for (const auto& f : report.folds)
        folds.push_back({{"train_accuracy", f.train_accuracy},
                         {"test_accuracy", f.test_accuracy},
                         {"train_seconds", f.train_seconds},
                         {"train_confusion", confusion_to_json(f.train_confusion)},
                         {"test_confusion", confusion_to_json(f.test_confusion)}});
    const json out = {{"format", "fit2felm-eval-report"},
                      {"version", "1.0"},
                      {"manifest", manifest_name(o.model_out)},
                      {"trainer", report.trainer},
                      {"rules", o.rules},
                      {"seed", o.seed},
                      {"samples", data.samples()},
                      {"folds", folds},
                      {"mean_train_accuracy", report.mean_train_accuracy},
                      {"mean_test_accuracy", report.mean_test_accuracy},
                      {"std_test_accuracy", report.std_test_accuracy},
                      {"mean_train_seconds", report.mean_train_seconds},
                      {"test_confusion", confusion_to_json(report.test_confusion)},
                      {"final_model",
                       {{"train_accuracy", final_cm.accuracy()},
                        {"train_seconds", final_fit.train_seconds},
                        {"passes", final_fit.passes},
                        {"rolled_back", final_fit.rolled_back},
                        {"train_residual", final_fit.train_residual},
                        {"warnings", final_fit.warnings}}}};
    write_json(o.report_out, out);

    RunManifest m;
    m.command = "train";
    m.config = to_json(o);
    m.seed = o.seed;
    m.inputs.push_back(digest("dataset", o.dataset));
    m.outputs.push_back(digest("model", o.model_out));
    m.outputs.push_back(digest("report", o.report_out, false));
    m.timings = {{"cross_validation", cv_s}, {"final_fit", fit_s}, {"total", seconds_since(t0)}};
    write_manifest(manifest_path_for(o.model_out), m);
    return m;
}

ReducerTiming bench_reducers(std::size_t rules, std::size_t instances, std::uint64_t seed)
{
    if (rules == 0)
        throw ValidationError("reduce-bench: rule counts must be positive");
    if (instances == 0)
        throw ValidationError("reduce-bench: instance count must be positive");

    Rng rng(seed, "reduce-bench-" + std::to_string(rules));
    std::vector<FiringInterval<double>> f(instances * rules);
    std::vector<double> w(instances * rules);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        // Strictly positive lower firings keep the Wu-Mendel bounds defined.
        f[i] = {std::max(std::min(a, b), 1e-6), std::max(a, b)};
        if (f[i].upper < f[i].lower)
            f[i].upper = f[i].lower;
        w[i] = rng.uniform(-1.0, 1.0);
    }
    auto fs_of = [&](std::size_t k) { return std::span<const FiringInterval<double>>(f.data() + k * rules, rules); };
    auto ws_of = [&](std::size_t k) { return std::span<const double>(w.data() + k * rules, rules); };

    // Calls are timed in batches and divided out, since a single call sits
    // near the clock resolution.
    constexpr std::size_t batch = 64;
    std::vector<double> sc_ns, km_ns, wm_ns;
    std::vector<double> sc_y(2 * instances), km_y(2 * instances);
    TypeReducedSet scratch;
    volatile double sink = 0.0;
    for (std::size_t start = 0; start < instances; start += batch) {
        const std::size_t end = std::min(start + batch, instances);
        const double n = static_cast<double>(end - start);

        auto t = Clock::now();
        for (std::size_t k = start; k < end; ++k) {
            sc_reduce_into<double>(fs_of(k), ws_of(k), scratch);
            sc_y[2 * k] = scratch.y_l;
            sc_y[2 * k + 1] = scratch.y_r;
        }
        sc_ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t).count() / n);

        t = Clock::now();
        for (std::size_t k = start; k < end; ++k) {
            km_reduce_into<double>(fs_of(k), ws_of(k), scratch);
            km_y[2 * k] = scratch.y_l;
            km_y[2 * k + 1] = scratch.y_r;
        }
        km_ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t).count() / n);

        t = Clock::now();
        for (std::size_t k = start; k < end; ++k)
            sink = sink + wm_bounds<double>(fs_of(k), ws_of(k)).output();
        wm_ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t).count() / n);
    }

    ReducerTiming r;
    r.rules = rules;
    r.sc_median_ns = median(sc_ns);
    r.km_median_ns = median(km_ns);
    r.wm_median_ns = median(wm_ns);
    for (std::size_t k = 0; k < instances; ++k) {
        const double d = std::max(std::abs(sc_y[2 * k] - km_y[2 * k]), std::abs(sc_y[2 * k + 1] - km_y[2 * k + 1]));
        r.max_abs_diff = std::max(r.max_abs_diff, d);
        if (!(d <= 1e-9))
            ++r.violations;
    }
    return r;
}

RunManifest cmd_reduce_bench(const ReduceBenchOptions& o, int& exit_code)
{
    if (o.sizes.empty())
        throw ValidationError("reduce-bench: need at least one rule count");
    const auto t0 = Clock::now();
    json rows = json::array();
    std::size_t violations = 0;
    for (std::size_t m : o.sizes) {
        const auto r = bench_reducers(m, o.instances, o.seed);
        violations += r.violations;
        json row = {{"rules", m},
                    {"instances", o.instances},
                    {"median_ns", {{"sc", r.sc_median_ns}, {"km", r.km_median_ns}, {"wm", r.wm_median_ns}}},
                    {"agreement_violations", r.violations},
                    {"max_abs_diff", r.max_abs_diff}};
        if (m >= 6)
            row["sc_not_slower_than_km"] = r.sc_median_ns <= r.km_median_ns;
        rows.push_back(row);
    }
    write_json(o.out, {{"format", "fit2felm-reduce-bench"},
                       {"version", "1.0"},
                       {"manifest", manifest_name(o.out)},
                       {"seed", o.seed},
                       {"tolerance", 1e-9},
                       {"agreement_violations", violations},
                       {"results", rows}});
    exit_code = violations == 0 ? exit_ok : exit_assertion;

    RunManifest m;
    m.command = "reduce-bench";
    m.config = to_json(o);
    m.seed = o.seed;
    m.outputs.push_back(digest("benchmark", o.out, false));
    m.timings = {{"total", seconds_since(t0)}};
    write_manifest(manifest_path_for(o.out), m);
    return m;
}

RunManifest cmd_simulate(const SimulateOptions& o)
{
    if (o.model.empty())
        throw ValidationError("simulate: --model is required");
    const auto t0 = Clock::now();
    const Classifier model = load_model(fs::path(o.model));
    MissionConfig cfg;
    if (!o.mission_inline.is_null())
        cfg = mission_config_from_json(o.mission_inline);
    else if (!o.mission_config.empty())
        cfg = mission_config_from_json(read_json(o.mission_config, "mission config"));
    if (o.seed)
        cfg.seed = *o.seed;
    cfg.validate();
    if (input_count(model) != cfg.sonar.beam_angles.size())
        throw ValidationError("simulate: model expects " + std::to_string(input_count(model)) +
                              " inputs but the sonar has " + std::to_string(cfg.sonar.beam_angles.size()) + " beams");

    const MissionLog log = run_mission(cfg, model);
    const double run_s = seconds_since(t0);
    {
        std::ofstream out(o.log_out);
        if (!out)
            throw Error("cannot open '" + o.log_out + "' for writing");
        write_mission_csv(out, log.records);
        if (!out)
            throw Error("write failed: '" + o.log_out + "'");
    }
    json summary = mission_summary_to_json(log.summary);
    summary["manifest"] = manifest_name(o.log_out);
    summary["seed"] = cfg.seed;
    summary["circuits_target"] = cfg.circuits;
    summary["depth_setpoints"] = cfg.depth_setpoints;
    write_json(o.summary_out, summary);

    // The manifest carries the resolved mission so a replay needs no config file.
    SimulateOptions resolved = o;
    resolved.seed = cfg.seed;
    resolved.mission_inline = mission_config_to_json(cfg);

    RunManifest m;
    m.command = "simulate";
    m.config = to_json(resolved);
    m.seed = cfg.seed;
    m.inputs.push_back(digest("model", o.model));
    if (o.mission_inline.is_null() && !o.mission_config.empty())
        m.inputs.push_back(digest("mission_config", o.mission_config));
    m.outputs.push_back(digest("mission_log", o.log_out));
    m.outputs.push_back(digest("summary", o.summary_out));
    m.timings = {{"mission", run_s}, {"total", seconds_since(t0)}};
    write_manifest(manifest_path_for(o.log_out), m);
    return m;
}

int cmd_replay(const fs::path& manifest_path, const std::string& out_dir, std::ostream& log)
{
    const RunManifest recorded = read_manifest(manifest_path);
    auto redirect = [&](const std::string& p) {
        return out_dir.empty() ? p : (fs::path(out_dir) / fs::path(p).filename()).string();
    };
    if (!out_dir.empty())
        fs::create_directories(out_dir);

    RunManifest fresh;
    int code = exit_ok;
    if (recorded.command == "gen-data") {
        auto o = gen_data_options_from_json(recorded.config);
        o.out = redirect(o.out);
        fresh = cmd_gen_data(o);
    } else if (recorded.command == "train") {
        auto o = train_options_from_json(recorded.config);
        o.model_out = redirect(o.model_out);
        o.report_out = redirect(o.report_out);
        fresh = cmd_train(o);
    } else if (recorded.command == "reduce-bench") {
        auto o = reduce_bench_options_from_json(recorded.config);
        o.out = redirect(o.out);
        fresh = cmd_reduce_bench(o, code);
    } else if (recorded.command == "simulate") {
        auto o = simulate_options_from_json(recorded.config);
        o.log_out = redirect(o.log_out);
        o.summary_out = redirect(o.summary_out);
        fresh = cmd_simulate(o);
    } else {
        throw ValidationError("replay: unknown command '" + recorded.command + "' in manifest");
    }

    for (const auto& in : recorded.inputs) {
        const std::string now = sha256_file(in.path);
        if (now != in.sha256)
            log << "input changed since the recorded run: " << in.path << '\n';
    }
    bool identical = true;
    for (std::size_t i = 0; i < recorded.outputs.size() && i < fresh.outputs.size(); ++i) {
        const auto& a = recorded.outputs[i];
        const auto& b = fresh.outputs[i];
        if (!a.reproducible)
            continue;
        const bool same = a.sha256 == b.sha256;
        log << (same ? "identical " : "DIFFERENT ") << a.role << ": " << b.path << '\n';
        identical = identical && same;
    }
    if (!identical)
        return exit_assertion;
    return code;
}

} // namespace fit2::cli
