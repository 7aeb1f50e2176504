#include "tipping/cli/commands.hpp"

#include "tipping/cli/pipeline.hpp"
#include "tipping/crisis/critical_point.hpp"
#include "tipping/crisis/lifetimes.hpp"
#include "tipping/hyperopt/bayes_opt.hpp"
#include "tipping/hyperopt/search_space.hpp"
#include "tipping/util/format.hpp"
#include "tipping/util/parallel.hpp"
#include "tipping/util/random.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace tipping {

#ifndef TIPPING_VERSION
#define TIPPING_VERSION "0.0.0"
#endif
const char* const tool_version = TIPPING_VERSION;

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return exit_config;
        case ErrorKind::data: return exit_data;
        case ErrorKind::ensemble_unhealthy: return exit_unhealthy;
        case ErrorKind::all_censored: return exit_censored;
        case ErrorKind::numerical:
        case ErrorKind::io: return exit_failure;
    }
    return exit_failure;
}

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Records what a command read and wrote; written last as manifest.json.
class Manifest {
public:
    Manifest(std::string command, const ExperimentConfig& config, fs::path out)
        : command_(std::move(command)), config_(config), out_(std::move(out)) {
        for (const auto& p : config.includes) input(p);
    }

    void input(const fs::path& path) { inputs_.push_back({{"path", path.string()}, {"fnv1a", hex64(fnv1a(slurp(path)))}}); }
    void output(const std::string& name) { outputs_.push_back(name); }
    json& seeds() { return seeds_; }
    void note(const std::string& text) { notes_.push_back(text); }

    void write() const {
        json m;
        m["tool"] = "tipping-scout";
        m["version"] = tool_version;
        m["command"] = command_;
        m["config"] = config_.echo;
        m["config_file"] = {{"path", config_.source.string()}, {"fnv1a", hex64(fnv1a(slurp(config_.source)))}};
        m["inputs"] = inputs_;
        json outs = json::array();
        for (const auto& name : outputs_) outs.push_back({{"file", name}, {"fnv1a", hex64(fnv1a(slurp(out_ / name)))}});
        m["outputs"] = outs;
        m["seeds"] = seeds_.is_null() ? json::object() : seeds_;
        m["notes"] = notes_;
        write_text(out_ / "manifest.json", dump(m));
    }

private:
    std::string command_;
    const ExperimentConfig& config_;
    fs::path out_;
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
    json seeds_;
    std::vector<std::string> notes_;
};

void record_inputs(Manifest& manifest, const Workspace& ws) {
    for (const auto& p : ws.inputs) manifest.input(p);
}

json region_json(const EscapeRegion& r) {
    json j;
    j["lower"] = std::vector<double>(r.lower.data(), r.lower.data() + r.lower.size());
    j["upper"] = std::vector<double>(r.upper.data(), r.upper.data() + r.upper.size());
    j["grace"] = r.grace;
    if (r.floor) j["floor"] = {{"coord", r.floor->coord}, {"threshold", r.floor->threshold}};
    return j;
}

EnsembleSpec ensemble_spec(const ExperimentConfig& config, const HyperParams& hyper, std::size_t threads) {
    EnsembleSpec spec;
    spec.hyper = hyper;
    spec.members = config.ensemble.members;
    spec.seed = config.ensemble.seed;
    spec.seeds = config.ensemble.seeds;
    spec.threads = threads;
    return spec;
}

// Runs the optimizer and writes trace.csv and best_hyper.json into `out`.
HyperParams tune(const ExperimentConfig& config, const Workspace& ws, const fs::path& out, std::size_t threads,
                 Manifest& manifest) {
    const SearchSpace space = SearchSpace::reservoir_default();
    const ValidationSet validation = validation_set(config, ws);
    OptimizerOptions options = config.tune.optimizer;
    options.width = threads;
    std::vector<TraceEntry> resume;
    if (config.tune.resume) {
        resume = read_trace_csv(space, *config.tune.resume);
        manifest.input(*config.tune.resume);
    }
    const ObjectiveFn objective = [&](const Eigen::VectorXd& point, std::uint64_t seed) {
        return evaluate(to_hyper(point, config.hyper), ws.corpus, validation, config.tune.objective, seed, 1).total;
    };
    OptimizationResult result;
    try {
        result = optimize(space, objective, options, resume);
    } catch (const OptimizationFailed& e) {
        write_trace_csv(space, e.trace(), out / "trace.csv");
        manifest.output("trace.csv");
        throw;
    }
    write_trace_csv(space, result.trace, out / "trace.csv");
    manifest.output("trace.csv");
    const HyperParams best = to_hyper(result.best, config.hyper);
    json fragment = hyper_to_json(best);
    fragment["loss"] = result.best_loss;
    write_text(out / "best_hyper.json", dump(fragment));
    manifest.output("best_hyper.json");
    manifest.seeds()["tune_seed"] = options.seed;
    for (std::size_t i = 0; i < config.tune.objective.seeds; ++i) manifest.seeds()["tune_reservoir_seed_streams"].push_back(i);
    return best;
}

HyperParams resolve_hyper(const ExperimentConfig& config, const Workspace& ws, const fs::path& out,
                          std::size_t threads, Manifest& manifest) {
    if (!config.tune_hyper) return config.hyper;
    manifest.note("hyperparameters tuned in this run; see best_hyper.json");
    return tune(config, ws, out, threads, manifest);
}

void write_lifetime_csv(const LifetimeSamples& samples, const fs::path& path) {
    std::string text = "member,ic,lifetime,censored\n";
    for (const auto& r : samples.records)
        text += std::to_string(r.member) + "," + std::to_string(r.ic) + "," + format_double(r.lifetime) + "," +
                (r.censored ? "1" : "0") + "\n";
    write_text(path, text);
}

json lifetime_json(const LifetimeSamples& samples) {
    json j;
    j["runs"] = samples.records.size();
    j["uncensored"] = samples.lifetimes.size();
    j["censored"] = samples.censored;
    j["horizon"] = samples.horizon;
    if (samples.lifetimes.size() >= 10) {
        const ExponentialFit fit = fit_exponential(samples);
        j["tau"] = fit.tau;
        j["shift"] = fit.shift;
        j["ci95"] = {fit.ci_low, fit.ci_high};
        const auto table = survival_table(samples);
        try {
            j["log_survival_r2"] = log_survival_r2(table, fit.shift);
        } catch (const Error&) {
        }
    }
    return j;
}

}  // namespace

fs::path output_directory(const Invocation& inv, const ExperimentConfig& config) {
    if (inv.out) return *inv.out;
    if (const char* env = std::getenv("TIPPING_SCOUT_OUT"); env && *env) return env;
    if (config.output) return *config.output;
    return fs::path(inv.command);
}

int cmd_simulate(const ExperimentConfig& config, const fs::path& out, std::size_t) {
    const auto system = make_system(config.system);
    if (!system) throw config_error("simulate: needs a built-in system (ikeda or foodchain)");
    if (config.simulate.params.empty()) throw config_error("config: 'simulate.params' is empty");
    Manifest manifest("simulate", config, out);
    const Eigen::VectorXd x0 = initial_state(config.system, *system);
    for (double p : config.simulate.params) {
        const TimeSeries series = system->simulate(p, x0, config.simulate.samples, config.simulate.burn_in);
        const std::string name = "series_" + format_double(p) + ".csv";
        write_csv(series, out / name, system->coord_names());
        manifest.output(name);
    }
    manifest.write();
    return exit_ok;
}

int cmd_train(const ExperimentConfig& config, const fs::path& out, std::size_t threads) {
    Manifest manifest("train", config, out);
    const Workspace ws = prepare(config);
    record_inputs(manifest, ws);
    const HyperParams hyper = resolve_hyper(config, ws, out, threads, manifest);
    const EnsembleSpec spec = ensemble_spec(config, hyper, threads);
    Reservoir reservoir = Reservoir::build(hyper, ws.corpus.dim(), spec.member_seed(0));
    const TrainingReport report = reservoir.train(ws.corpus);
    reservoir.save(out / "model.bin");
    manifest.output("model.bin");

    json r;
    r["sessions"] = json::array();
    for (std::size_t i = 0; i < ws.corpus.sessions.size(); ++i)
        r["sessions"].push_back({{"param", ws.corpus.sessions[i].param},
                                 {"one_step_rmse", report.session_rmse[i]},
                                 {"samples", ws.corpus.sessions[i].series.length()}});
    r["regression_rows"] = report.samples;
    r["seed"] = spec.member_seed(0);
    r["spectral_radius"] = reservoir.spectral_radius();
    r["hyper"] = hyper_to_json(hyper)["hyper"];
    r["warnings"] = json::array();
    if (ws.corpus.sessions.size() == 1) {
        const std::string w = "single-parameter corpus: no parameter generalization expected";
        r["warnings"].push_back(w);
        std::cerr << "warning: " << w << "\n";
    }
    write_text(out / "train_report.json", dump(r));
    manifest.output("train_report.json");
    manifest.seeds()["reservoir_seed"] = spec.member_seed(0);
    manifest.write();
    return exit_ok;
}

int cmd_crisis(const ExperimentConfig& config, const fs::path& out, std::size_t threads) {
    Manifest manifest("crisis", config, out);
    const Workspace ws = prepare(config);
    record_inputs(manifest, ws);
    const HyperParams hyper = resolve_hyper(config, ws, out, threads, manifest);
    const EnsembleSpec spec = ensemble_spec(config, hyper, threads);
    const WarmupPool pool(ws.reference_series(), config.warmup);
    const CrisisEstimate est = estimate_critical_point(spec, ws.corpus, pool, ws.region, config.crisis);

    std::string csv = "member,seed,b_star\n";
    for (const auto& m : est.per_member)
        csv += std::to_string(m.member) + "," + std::to_string(m.seed) + "," + format_double(m.b_star) + "\n";
    write_text(out / "crisis_members.csv", csv);
    manifest.output("crisis_members.csv");

    json s;
    s["mean"] = est.mean;
    s["std"] = est.std;
    s["sem"] = est.sem;
    s["n"] = est.n;
    s["members"] = spec.members;
    std::size_t low = 0, high = 0;
    for (const auto& m : est.per_member) {
        low += m.flag == BisectionFlag::saturated_low;
        high += m.flag == BisectionFlag::saturated_high;
    }
    s["saturated_low"] = low;
    s["saturated_high"] = high;
    s["excluded"] = json::array();
    for (const auto& m : est.excluded) s["excluded"].push_back({{"member", m.member}, {"seed", m.seed}});
    s["flags"] = json::array();
    if (est.n == 1) s["flags"].push_back("single member");
    s["bisection"] = {{"b_lo", config.crisis.b_lo},
                      {"b_hi", config.crisis.b_hi},
                      {"resolution", config.crisis.resolution},
                      {"t_max", config.crisis.t_max},
                      {"votes", config.crisis.votes}};
    s["region"] = region_json(ws.region);
    s["hyper"] = hyper_to_json(hyper)["hyper"];
    write_text(out / "crisis_summary.json", dump(s));
    manifest.output("crisis_summary.json");

    manifest.seeds()["ensemble_seed"] = config.ensemble.seed;
    for (std::size_t m = 0; m < spec.members; ++m) manifest.seeds()["member_seeds"].push_back(spec.member_seed(m));
    manifest.write();
    return exit_ok;
}

int cmd_lifetimes(const ExperimentConfig& config, const fs::path& out, std::size_t threads) {
    const LifetimesConfig& lc = config.lifetimes;
    if (!lc.b && !lc.offset) throw config_error("config: 'lifetimes.b' or 'lifetimes.offset' is required");
    Manifest manifest("lifetimes", config, out);
    const Workspace ws = prepare(config);
    record_inputs(manifest, ws);
    const HyperParams hyper = resolve_hyper(config, ws, out, threads, manifest);
    const EnsembleSpec spec = ensemble_spec(config, hyper, threads);
    const WarmupPool pool(ws.reference_series(), config.warmup);
    LifetimeOptions options{lc.b.value_or(0.0), lc.n_ics, lc.t_max, {}};
    json s;
    if (lc.offset) {
        const CrisisEstimate est = estimate_critical_point(spec, ws.corpus, pool, ws.region, config.crisis);
        options.member_b.assign(spec.members, std::numeric_limits<double>::quiet_NaN());
        for (const auto& m : est.per_member) options.member_b[m.member] = m.b_star + *lc.offset;
        s["offset"] = *lc.offset;
        s["critical_mean"] = est.mean;
        s["member_b"] = json::array();
        for (double b : options.member_b) s["member_b"].push_back(std::isnan(b) ? json(nullptr) : json(b));
    } else {
        s["b"] = *lc.b;
    }
    const LifetimeSamples samples = lifetime_distribution(spec, ws.corpus, pool, ws.region, options);

    write_lifetime_csv(samples, out / "lifetimes.csv");
    manifest.output("lifetimes.csv");
    std::string table = "t,survival,alive\n";
    if (!samples.lifetimes.empty())
        for (const auto& row : survival_table(samples, lc.bins))
            table += format_double(row.t) + "," + format_double(row.survival) + "," + std::to_string(row.alive) + "\n";
    write_text(out / "survival.csv", table);
    manifest.output("survival.csv");

    s["predicted"] = lifetime_json(samples);
    if (lc.oracle_ics > 0) {
        if (!ws.system) throw config_error("config: 'lifetimes.oracle_ics' needs a built-in system");
        Rng rng(lc.oracle_seed);
        const auto ics = sample_initial_conditions(ws.reference_series(), lc.oracle_ics, lc.oracle_noise, rng);
        double oracle_b = lc.b.value_or(0.0);
        if (lc.oracle_b) {
            oracle_b = *lc.oracle_b;
        } else if (lc.offset) {
            const BisectionResult critical = oracle_critical_point(*ws.system, ics, ws.region, config.crisis);
            s["oracle_critical"] = critical.estimate;
            oracle_b = critical.estimate + *lc.offset;
        }
        const LifetimeSamples truth = oracle_lifetimes(*ws.system, oracle_b, ics, ws.region, lc.t_max, threads);
        write_lifetime_csv(truth, out / "oracle_lifetimes.csv");
        manifest.output("oracle_lifetimes.csv");
        s["oracle_b"] = oracle_b;
        s["oracle"] = lifetime_json(truth);
        if (s["predicted"].contains("tau") && s["oracle"].contains("tau"))
            s["tau_ratio"] = s["predicted"]["tau"].get<double>() / s["oracle"]["tau"].get<double>();
        manifest.seeds()["oracle_seed"] = lc.oracle_seed;
    }
    if (samples.lifetimes.size() < 10 && !samples.lifetimes.empty())
        s["note"] = "fewer than 10 uncensored lifetimes: tau not fitted";
    s["region"] = region_json(ws.region);
    s["hyper"] = hyper_to_json(hyper)["hyper"];
    write_text(out / "lifetimes_summary.json", dump(s));
    manifest.output("lifetimes_summary.json");
    manifest.seeds()["ensemble_seed"] = config.ensemble.seed;
    for (std::size_t m = 0; m < spec.members; ++m) manifest.seeds()["member_seeds"].push_back(spec.member_seed(m));
    manifest.write();

    if (samples.lifetimes.empty())
        throw Error(ErrorKind::all_censored, "lifetimes: all " + std::to_string(samples.censored) +
                                                 " runs survived the horizon; tau not fitted");
    return exit_ok;
}

int cmd_tune(const ExperimentConfig& config, const fs::path& out, std::size_t threads) {
    Manifest manifest("tune", config, out);
    const Workspace ws = prepare(config);
    record_inputs(manifest, ws);
    tune(config, ws, out, threads, manifest);
    manifest.write();
    return exit_ok;
}

int run(const Invocation& inv) {
    try {
        const ExperimentConfig config = load_config(inv.config);
        const fs::path out = output_directory(inv, config);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec || !fs::is_directory(out)) throw Error(ErrorKind::io, "cannot create output directory '" + out.string() + "'");
        const std::size_t threads = inv.threads ? *inv.threads : config.threads ? *config.threads : default_width();
        if (threads < 1) throw config_error("--threads must be positive");
        if (inv.command == "simulate") return cmd_simulate(config, out, threads);
        if (inv.command == "train") return cmd_train(config, out, threads);
        if (inv.command == "crisis") return cmd_crisis(config, out, threads);
        if (inv.command == "lifetimes") return cmd_lifetimes(config, out, threads);
        if (inv.command == "tune") return cmd_tune(config, out, threads);
        throw config_error("unknown command '" + inv.command + "'");
    } catch (const Error& e) {
        std::cerr << "tipping-scout: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "tipping-scout: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace tipping
