// Command-line front end: validate models, run fault simulations, fit
// lifetime distributions, condition on failure modes, probe component
// sensitivity, benchmark scaled models, and cross-check against the exact
// chain solution.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relsim/benchgen.hpp"
#include "relsim/executor.hpp"
#include "relsim/inference.hpp"
#include "relsim/model_io.hpp"
#include "relsim/oracle.hpp"
#include "relsim/presim.hpp"
#include "relsim/printer.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Default master seed (decimal 59813); all randomized commands are pure
// functions of (model files, flags, seed).
constexpr std::uint64_t kDefaultSeed = 59813;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCondition = 2;
constexpr int kExitIo = 3;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string mode_name(const std::optional<relsim::FailureMode>& mode) {
    return mode ? relsim::to_string(*mode) : "survived";
}

ordered_json summary_to_json(const relsim::LifetimeSummary& s) {
    ordered_json j;
    j["n"] = s.n;
    j["n_failed"] = s.n_failed;
    j["mean_ttf_h"] = s.mean_ttf_h;
    j["std_error_h"] = s.std_error_h;
    ordered_json q;
    for (const auto& [p, v] : s.quantiles_h) {
        char key[32];
        std::snprintf(key, sizeof(key), "%g", p);
        q[key] = v;
    }
    j["quantiles_h"] = q;
    ordered_json m;
    for (const auto& [mode, frac] : s.mode_split) m[relsim::to_string(mode)] = frac;
    j["mode_split"] = m;
    j["survived_fraction"] = s.survived_fraction;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_histogram_csv(const fs::path& path, const relsim::Histogram& h) {
    std::string text = "bin_left_h,bin_right_h,mass\n";
    for (std::size_t i = 0; i < h.mass.size(); ++i)
        text += format_double(h.edges[i]) + "," + format_double(h.edges[i + 1]) + "," +
                format_double(h.mass[i]) + "\n";
    write_text(path, text);
}

struct ModelOptions {
    std::string model_dir;
    std::string faults_file;
};

struct RunOptions {
    std::uint64_t seed = kDefaultSeed;
    std::size_t n = 10000;
    double horizon = 0.0;  // 0 = none
    unsigned workers = 0;  // 0 = hardware concurrency
    std::string out;
    std::string format = "json";

    std::optional<double> horizon_opt() const {
        return horizon > 0.0 ? std::optional<double>(horizon) : std::nullopt;
    }
    unsigned effective_workers() const {
        if (workers > 0) return workers;
        unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }
};

struct LoadedSetup {
    relsim::LoadedModel model;
    std::unique_ptr<relsim::CompiledSystem> system;
    relsim::FaultTable table;
};

// Loads, validates, compiles and resolves the fault table; throws with a
// printed diagnostic on any failure.
LoadedSetup load_setup(const ModelOptions& opts, bool need_faults = true) {
    LoadedSetup setup;
    setup.model = relsim::load_model_directory(opts.model_dir);
    auto report = setup.model.validate();
    if (!report.empty()) {
        for (const auto& d : report) std::cerr << relsim::format_diagnostic(d) << "\n";
        throw relsim::ModelError("model validation failed with " +
                                 std::to_string(report.size()) + " diagnostic(s)");
    }
    if (!setup.model.composite)
        throw relsim::ModelError("no composite found in '" + opts.model_dir + "'");
    setup.system = std::make_unique<relsim::CompiledSystem>(*setup.model.composite,
                                                            setup.model.library);
    if (need_faults) {
        if (opts.faults_file.empty())
            throw relsim::ModelError("this command needs --faults FILE");
        auto unit = relsim::load_source_unit(opts.faults_file);
        setup.table =
            relsim::parse_fault_table(unit, *setup.model.composite, setup.model.library);
    }
    return setup;
}

std::string outcomes_to_csv(const std::vector<relsim::SimOutcome>& outcomes) {
    std::string text = "replica,failure_time_h,failure_mode\n";
    for (const auto& o : outcomes)
        text += std::to_string(o.replica) + "," + format_double(o.failure_time_h) + "," +
                mode_name(o.failure_mode) + "\n";
    return text;
}

std::string outcomes_to_jsonl(const std::vector<relsim::SimOutcome>& outcomes) {
    std::string text;
    for (const auto& o : outcomes) {
        ordered_json j;
        j["replica"] = o.replica;
        j["failure_time_h"] = o.failure_time_h;
        j["failure_mode"] = mode_name(o.failure_mode);
        text += j.dump();
        text += "\n";
    }
    return text;
}

int cmd_validate(const ModelOptions& opts) {
    try {
        auto model = relsim::load_model_directory(opts.model_dir);
        auto report = model.validate();
        if (!model.composite) {
            std::cerr << "no composite found in '" << opts.model_dir << "'\n";
            return kExitValidation;
        }
        if (!report.empty()) {
            for (const auto& d : report) std::cerr << relsim::format_diagnostic(d) << "\n";
            return kExitValidation;
        }
        // Compilation re-checks chart-level rules behind the report.
        relsim::CompiledSystem system(*model.composite, model.library);
        if (!opts.faults_file.empty()) {
            auto unit = relsim::load_source_unit(opts.faults_file);
            relsim::parse_fault_table(unit, *model.composite, model.library);
        }
        std::cout << "ok: " << model.files.size() << " file(s), composite '"
                  << model.composite->name << "' with " << model.composite->instances.size()
                  << " instance(s)\n";
        return kExitOk;
    } catch (const relsim::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const relsim::ModelError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_simulate(const ModelOptions& mopts, const RunOptions& ropts,
                 const std::string& trace_path) {
    auto setup = load_setup(mopts);
    auto outcomes = relsim::run_batch(*setup.system, setup.table, ropts.seed, ropts.n,
                                      ropts.horizon_opt(), ropts.effective_workers());
    if (!ropts.out.empty()) {
        write_text(ropts.out, ropts.format == "csv" ? outcomes_to_csv(outcomes)
                                                    : outcomes_to_jsonl(outcomes));
    }
    if (!trace_path.empty()) {
        // Re-run replica 0 through the tracing path.
        auto series = relsim::generate_fault_series(setup.table, ropts.seed, 0);
        relsim::SystemState state = setup.system->initial_state();
        std::string text;
        std::uint64_t cycle = 0;
        for (const auto& fault : series) {
            if (ropts.horizon_opt() && fault.time_h > *ropts.horizon_opt()) break;
            const auto& row = setup.table.rows[fault.row];
            auto result = setup.system->execute_cycle(
                state, {relsim::EventInstance{row.system_port, row.event, {}}});
            for (const auto& t : result.fired_transitions)
                text += relsim::trace_json_line(cycle, t) + "\n";
            ++cycle;
            if (setup.system->absorbing_failure(state)) break;
        }
        write_text(trace_path, text);
    }
    auto summary = summarize_lifetime(outcomes);
    ordered_json j = summary_to_json(summary);
    j["seed"] = ropts.seed;
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_fit(const ModelOptions& mopts, const RunOptions& ropts, std::size_t steps, double lr) {
    auto setup = load_setup(mopts);
    auto outcomes = relsim::run_batch(*setup.system, setup.table, ropts.seed, ropts.n,
                                      ropts.horizon_opt(), ropts.effective_workers());
    std::vector<double> times;
    times.reserve(outcomes.size());
    for (const auto& o : outcomes)
        if (!o.survived()) times.push_back(o.failure_time_h);
    relsim::FitOptions options;
    options.n_steps = steps;
    options.learning_rate = lr;
    options.seed = ropts.seed;
    auto fit = relsim::fit_weibull(times, options);

    ordered_json j;
    j["scale_h"] = fit.scale_h;
    j["shape"] = fit.shape;
    j["n_samples"] = times.size();
    j["n_steps"] = fit.n_steps;
    j["learning_rate"] = fit.learning_rate;
    j["seed"] = fit.seed;
    j["final_objective"] = fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back();
    j["ks_distance"] = fit.ks_distance;
    std::cout << j.dump(2) << "\n";
    if (!ropts.out.empty()) {
        write_text(ropts.out, j.dump(2) + "\n");
        std::string trace = "step,objective\n";
        for (std::size_t i = 0; i < fit.objective_trace.size(); ++i)
            trace += std::to_string(i) + "," + format_double(fit.objective_trace[i]) + "\n";
        fs::path trace_path = fs::path(ropts.out).concat(".elbo.csv");
        write_text(trace_path, trace);
    }
    return kExitOk;
}

int cmd_conditional(const ModelOptions& mopts, const RunOptions& ropts,
                    relsim::FailureMode mode, std::size_t bins) {
    auto setup = load_setup(mopts);
    try {
        auto set = relsim::conditional_lifetime(*setup.system, setup.table, ropts.seed, mode,
                                                ropts.n, ropts.horizon_opt(),
                                                ropts.effective_workers());
        auto summary = relsim::summarize_weighted(set);
        ordered_json j;
        j["condition"] = set.condition;
        j["effective_sample_size"] = set.effective_sample_size();
        j["mean_ttf_h"] = set.weighted_mean();
        j["std_error_h"] = set.weighted_std_error();
        j["summary"] = summary_to_json(summary);
        j["seed"] = ropts.seed;
        std::cout << j.dump(2) << "\n";
        if (!ropts.out.empty()) {
            write_text(ropts.out, j.dump(2) + "\n");
            relsim::HistogramSpec spec;
            spec.bin_count = bins;
            write_histogram_csv(fs::path(ropts.out).concat(".hist.csv"),
                                relsim::make_histogram(set, spec));
        }
        return kExitOk;
    } catch (const relsim::ConditionNeverObserved& e) {
        std::cerr << e.what() << "\n";
        return kExitCondition;
    }
}

int cmd_sensitivity(const ModelOptions& mopts, const RunOptions& ropts,
                    const std::string& target, double horizon) {
    auto setup = load_setup(mopts);
    try {
        auto result = relsim::sensitivity(*setup.system, setup.table, ropts.seed, target,
                                          horizon, ropts.n, ropts.effective_workers());
        ordered_json j;
        j["condition"] = result.condition;
        j["effective_sample_size"] = result.effective_sample_size;
        j["unconditioned"] = summary_to_json(result.unconditioned);
        j["conditioned"] = summary_to_json(result.conditioned);
        j["mttf_delta_h"] = result.mttf_delta_h;
        j["seed"] = ropts.seed;
        std::cout << j.dump(2) << "\n";
        if (!ropts.out.empty()) write_text(ropts.out, j.dump(2) + "\n");
        return kExitOk;
    } catch (const relsim::ConditionNeverObserved& e) {
        std::cerr << e.what() << "\n";
        return kExitCondition;
    }
}

int cmd_oracle(const ModelOptions& mopts, const RunOptions& ropts, std::size_t sim_n) {
    auto setup = load_setup(mopts);
    auto model = relsim::build_ctmc(*setup.system, setup.table);
    auto solution = relsim::solve_ctmc(model);
    ordered_json j;
    j["states"] = model.size();
    j["mttf_h"] = solution.mttf_h;
    ordered_json probs, cond;
    for (const auto& [mode, p] : solution.absorb_probability) probs[relsim::to_string(mode)] = p;
    for (const auto& [mode, t] : solution.conditional_mttf_h) cond[relsim::to_string(mode)] = t;
    j["absorb_probability"] = probs;
    j["conditional_mttf_h"] = cond;
    j["max_residual"] = solution.max_residual;
    if (sim_n > 0) {
        auto outcomes = relsim::run_batch(*setup.system, setup.table, ropts.seed, sim_n,
                                          std::nullopt, ropts.effective_workers());
        auto summary = relsim::summarize_lifetime(outcomes);
        ordered_json sim;
        sim["n"] = sim_n;
        sim["mean_ttf_h"] = summary.mean_ttf_h;
        sim["std_error_h"] = summary.std_error_h;
        sim["mttf_z_score"] = summary.std_error_h > 0.0
                                  ? (summary.mean_ttf_h - solution.mttf_h) / summary.std_error_h
                                  : 0.0;
        ordered_json split;
        for (const auto& [mode, frac] : summary.mode_split) split[relsim::to_string(mode)] = frac;
        sim["mode_split"] = split;
        j["simulation"] = sim;
    }
    std::cout << j.dump(2) << "\n";
    if (!ropts.out.empty()) write_text(ropts.out, j.dump(2) + "\n");
    return kExitOk;
}

struct BenchRow {
    std::size_t n_uc, sensors, instances;
    double state_space;
    double ttf_s, cond_s;
};

int cmd_bench(const std::vector<std::string>& specs, const RunOptions& ropts,
              const std::string& keep_dir) {
    std::vector<BenchRow> rows;
    fs::path work = keep_dir.empty()
                        ? fs::temp_directory_path() / ("relsim_bench_" +
                                                       std::to_string(ropts.seed))
                        : fs::path(keep_dir);
    for (const auto& spec_text : specs) {
        auto sep = spec_text.find('x');
        if (sep == std::string::npos)
            throw std::invalid_argument("spec '" + spec_text + "' is not of the form NxK");
        relsim::BenchmarkSpec spec;
        spec.n_uc = std::stoul(spec_text.substr(0, sep));
        spec.sensors_per_uc = std::stoul(spec_text.substr(sep + 1));

        fs::path dir = work / ("bench_" + spec_text);
        auto generated = relsim::generate_benchmark(spec, dir);
        for (const auto& w : generated.warnings) std::cerr << "warning: " << w << "\n";

        auto model = relsim::load_model_directory(dir);
        auto report = model.validate();
        if (!report.empty())
            throw relsim::ModelError("generated model failed validation: " +
                                     relsim::format_diagnostic(report.front()));
        relsim::CompiledSystem system(*model.composite, model.library);
        auto unit = relsim::load_source_unit(dir / "bench.faults.csv");
        auto table = relsim::parse_fault_table(unit, *model.composite, model.library);

        auto median_of_5 = [&](auto&& fn) {
            std::vector<double> times;
            for (int i = 0; i < 5; ++i) {
                auto start = std::chrono::steady_clock::now();
                fn();
                auto stop = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(stop - start).count());
            }
            std::sort(times.begin(), times.end());
            return times[2];
        };
        BenchRow row;
        row.n_uc = spec.n_uc;
        row.sensors = spec.n_uc * spec.sensors_per_uc;
        row.instances = model.composite->instances.size();
        row.state_space = system.state_space_estimate();
        row.ttf_s = median_of_5([&] {
            auto outcomes = relsim::run_batch(system, table, ropts.seed, ropts.n, std::nullopt,
                                              ropts.effective_workers());
            (void)relsim::summarize_lifetime(outcomes);
        });
        row.cond_s = median_of_5([&] {
            auto set = relsim::conditional_lifetime(system, table, ropts.seed,
                                                    relsim::FailureMode::self_steering,
                                                    ropts.n, std::nullopt,
                                                    ropts.effective_workers());
            (void)relsim::summarize_weighted(set);
        });
        rows.push_back(row);
    }
    std::string csv =
        "n_uc,n_sensors,n_instances,state_space_estimate,ttf_median_s,conditional_median_s\n";
    std::printf("%6s %9s %11s %12s %14s %14s\n", "n_uc", "sensors", "instances", "states",
                "ttf_median_s", "cond_median_s");
    for (const auto& r : rows) {
        char states[32];
        std::snprintf(states, sizeof(states), "%.3e", r.state_space);
        std::printf("%6zu %9zu %11zu %12s %14.1f %14.1f\n", r.n_uc, r.sensors, r.instances,
                    states, r.ttf_s, r.cond_s);
        csv += std::to_string(r.n_uc) + "," + std::to_string(r.sensors) + "," +
               std::to_string(r.instances) + "," + states + "," + format_double(r.ttf_s) +
               "," + format_double(r.cond_s) + "\n";
    }
    if (!ropts.out.empty()) write_text(ropts.out, csv);
    if (keep_dir.empty()) fs::remove_all(work);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deductive reliability analysis of composed statechart models"};
    app.require_subcommand(1);

    ModelOptions mopts;
    RunOptions ropts;

    auto add_model_flags = [&](CLI::App* cmd, bool faults) {
        cmd->add_option("--model", mopts.model_dir, "model directory")->required();
        if (faults) cmd->add_option("--faults", mopts.faults_file, "fault table (.faults.csv)");
    };
    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--seed", ropts.seed, "master seed (default 59813)");
        cmd->add_option("--n", ropts.n, "replica count")->check(CLI::PositiveNumber);
        cmd->add_option("--horizon", ropts.horizon, "mission horizon in hours (0 = none)");
        cmd->add_option("--workers", ropts.workers, "worker threads (0 = auto)");
        cmd->add_option("--out", ropts.out, "output file path");
        cmd->add_option("--format", ropts.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* validate = app.add_subcommand("validate", "parse and validate a model directory");
    add_model_flags(validate, true);

    auto* simulate = app.add_subcommand("simulate", "run a batch of fault simulations");
    add_model_flags(simulate, true);
    add_run_flags(simulate);
    std::string trace_path;
    simulate->add_option("--trace", trace_path, "JSON-lines transition trace of replica 0");

    auto* fit = app.add_subcommand("fit", "fit a Weibull lifetime to simulated failures");
    add_model_flags(fit, true);
    add_run_flags(fit);
    std::size_t steps = 10000;
    double lr = 0.05;
    fit->add_option("--steps", steps, "optimizer steps")->check(CLI::PositiveNumber);
    fit->add_option("--lr", lr, "learning rate")->check(CLI::PositiveNumber);

    auto* conditional =
        app.add_subcommand("conditional", "posterior lifetime given a failure mode");
    add_model_flags(conditional, true);
    add_run_flags(conditional);
    std::string mode_text = "ss";
    std::size_t bins = 50;
    conditional->add_option("--mode", mode_text, "failure mode (ss | loa)")
        ->check(CLI::IsMember({"ss", "loa"}));
    conditional->add_option("--bins", bins, "histogram bin count")->check(CLI::PositiveNumber);

    auto* sens = app.add_subcommand("sensitivity",
                                    "lifetime shift when a component fails in the mission window");
    add_model_flags(sens, true);
    add_run_flags(sens);
    std::string target;
    sens->add_option("--target", target, "instance to condition on")->required();

    auto* bench = app.add_subcommand("bench", "timing table over generated benchmark models");
    std::vector<std::string> spec_texts{"2x3", "2x6", "4x6", "4x12"};
    std::string keep_dir;
    bench->add_option("--specs", spec_texts, "benchmark specs, e.g. 2x3 4x12")->delimiter(',');
    bench->add_option("--keep-models", keep_dir, "write generated models here and keep them");
    add_run_flags(bench);

    auto* oracle = app.add_subcommand("oracle", "exact chain solution (all-exponential models)");
    add_model_flags(oracle, true);
    add_run_flags(oracle);
    std::size_t oracle_sim_n = 0;
    oracle->add_option("--sim-n", oracle_sim_n, "also simulate and report z-scores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;  // usage errors land in class 1
    }

    try {
        if (validate->parsed()) return cmd_validate(mopts);
        if (simulate->parsed()) return cmd_simulate(mopts, ropts, trace_path);
        if (fit->parsed()) return cmd_fit(mopts, ropts, steps, lr);
        if (conditional->parsed()) {
            auto mode = relsim::failure_mode_from_string(mode_text);
            return cmd_conditional(mopts, ropts, *mode, bins);
        }
        if (sens->parsed()) return cmd_sensitivity(mopts, ropts, target, ropts.horizon);
        if (bench->parsed()) return cmd_bench(spec_texts, ropts, keep_dir);
        if (oracle->parsed()) return cmd_oracle(mopts, ropts, oracle_sim_n);
    } catch (const relsim::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const relsim::ModelError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const relsim::SimulationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
