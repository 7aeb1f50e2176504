#include "tipping/cli/config.hpp"
#include "tipping/cli/pipeline.hpp"
#include "tipping/crisis/classify.hpp"
#include "tipping/crisis/critical_point.hpp"
#include "tipping/crisis/lifetimes.hpp"
#include "tipping/dynsys/food_chain.hpp"
#include "tipping/dynsys/integrate.hpp"
#include "tipping/hyperopt/bayes_opt.hpp"
#include "tipping/hyperopt/objective.hpp"
#include "tipping/hyperopt/search_space.hpp"
#include "tipping/reservoir/reservoir.hpp"
#include "tipping/util/random.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>

using namespace tipping;

namespace {

constexpr double ikeda_critical = 1.0027;
constexpr double food_chain_critical = 0.99976;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

// Lazily computed state shared by the criteria; each experiment runs at most once.
class Bench {
public:
    Bench(const std::filesystem::path& configs, std::size_t threads)
        : ikeda_cfg_(load_config(configs / "ikeda.json")),
          food_cfg_(load_config(configs / "foodchain.json")),
          threads_(threads) {}

    const ExperimentConfig& config(bool ikeda) const { return ikeda ? ikeda_cfg_ : food_cfg_; }

    const Workspace& workspace(bool ikeda) {
        auto& slot = ikeda ? ikeda_ws_ : food_ws_;
        if (!slot) slot.emplace(prepare(config(ikeda)));
        return *slot;
    }

    EnsembleSpec ensemble(bool ikeda) const {
        const ExperimentConfig& c = config(ikeda);
        EnsembleSpec spec;
        spec.hyper = c.hyper;
        spec.members = c.ensemble.members;
        spec.seed = c.ensemble.seed;
        spec.seeds = c.ensemble.seeds;
        spec.threads = threads_;
        return spec;
    }

    const CrisisEstimate& crisis(bool ikeda) {
        auto& slot = ikeda ? ikeda_crisis_ : food_crisis_;
        if (!slot) {
            const Workspace& ws = workspace(ikeda);
            const WarmupPool pool(ws.reference_series(), config(ikeda).warmup);
            slot.emplace(estimate_critical_point(ensemble(ikeda), ws.corpus, pool, ws.region, config(ikeda).crisis));
        }
        return *slot;
    }

    // Long-horizon bisection on the true system, starting on the reference attractor.
    double oracle(bool ikeda) {
        auto& slot = ikeda ? ikeda_oracle_ : food_oracle_;
        if (!slot) {
            const Workspace& ws = workspace(ikeda);
            Rng rng(11);
            const auto ics = sample_initial_conditions(ws.reference_series(), 3, 0.0, rng);
            CrisisOptions o;
            if (ikeda) {
                o.b_lo = 0.99, o.b_hi = 1.02, o.resolution = 1e-5, o.t_max = 1e6;
            } else {
                o.b_lo = 0.995, o.b_hi = 1.005, o.resolution = 1e-6, o.t_max = 1e5;
            }
            slot = oracle_critical_point(*ws.system, ics, ws.region, o).estimate;
        }
        return *slot;
    }

    const ValidationSet& validation(bool ikeda) {
        auto& slot = ikeda ? ikeda_val_ : food_val_;
        if (!slot) slot.emplace(validation_set(config(ikeda), workspace(ikeda)));
        return *slot;
    }

    Reservoir member(bool ikeda, std::size_t m) {
        const EnsembleSpec spec = ensemble(ikeda);
        Reservoir r = Reservoir::build(spec.hyper, workspace(ikeda).corpus.dim(), spec.member_seed(m));
        r.train(workspace(ikeda).corpus);
        return r;
    }

    // Pooled lifetimes with every member placed `offset` past its own predicted critical point.
    LifetimeSamples relative_lifetimes(bool ikeda, std::size_t members, std::size_t n_ics, double offset) {
        const CrisisEstimate& est = crisis(ikeda);
        EnsembleSpec spec = ensemble(ikeda);
        spec.members = members;
        LifetimeOptions options{0.0, n_ics, config(ikeda).lifetimes.t_max, {}};
        options.member_b.assign(members, std::numeric_limits<double>::quiet_NaN());
        for (const auto& m : est.per_member)
            if (m.member < members) options.member_b[m.member] = m.b_star + offset;
        const Workspace& ws = workspace(ikeda);
        const WarmupPool pool(ws.reference_series(), config(ikeda).warmup);
        return lifetime_distribution(spec, ws.corpus, pool, ws.region, options);
    }

    std::size_t threads() const { return threads_; }

private:
    ExperimentConfig ikeda_cfg_;
    ExperimentConfig food_cfg_;
    std::size_t threads_;
    std::optional<Workspace> ikeda_ws_, food_ws_;
    std::optional<CrisisEstimate> ikeda_crisis_, food_crisis_;
    std::optional<double> ikeda_oracle_, food_oracle_;
    std::optional<ValidationSet> ikeda_val_, food_val_;
};

Verdict oracle_calibration(Bench& bench) {
    const double mu = bench.oracle(true);
    const double k = bench.oracle(false);
    const bool pass = std::abs(mu - ikeda_critical) <= 1e-3 && std::abs(k - food_chain_critical) <= 5e-4;
    return {pass, fmt("ikeda mu_c=%.5f (target 1.0027 +- 1e-3), food chain K_c=%.6f (target 0.99976 +- 5e-4)", mu, k)};
}

Verdict ikeda_prediction(Bench& bench) {
    const CrisisEstimate& e = bench.crisis(true);
    const bool pass = e.mean >= 0.99 && e.mean <= 1.01 && e.std <= 0.02;
    return {pass, fmt("mean=%.4f std=%.4f over %.0f members (%.0f excluded)", e.mean, e.std,
                      static_cast<double>(e.n), static_cast<double>(e.excluded.size()))};
}

Verdict food_chain_prediction(Bench& bench) {
    const CrisisEstimate& e = bench.crisis(false);
    const bool pass = std::abs(e.mean - food_chain_critical) <= 2e-3;
    return {pass, fmt("mean=%.5f std=%.5f over %.0f members (target 0.99976 +- 2e-3)", e.mean, e.std,
                      static_cast<double>(e.n))};
}

Verdict food_chain_lifetimes(Bench& bench) {
    const LifetimeSamples predicted = bench.relative_lifetimes(false, 20, 100, 2e-4);
    const Workspace& ws = bench.workspace(false);
    Rng rng(bench.config(false).lifetimes.oracle_seed);
    const auto ics = sample_initial_conditions(ws.reference_series(), 400, 0.01, rng);
    const double k = bench.oracle(false) + 2e-4;
    const LifetimeSamples truth =
        oracle_lifetimes(*ws.system, k, ics, ws.region, bench.config(false).lifetimes.t_max, bench.threads());
    if (predicted.lifetimes.size() < 10 || truth.lifetimes.size() < 10)
        return {false, fmt("too few uncensored lifetimes (predicted %.0f, oracle %.0f)",
                           static_cast<double>(predicted.lifetimes.size()), static_cast<double>(truth.lifetimes.size()))};
    const double tp = fit_exponential(predicted).tau;
    const double to = fit_exponential(truth).tau;
    const double ratio = tp / to;
    return {ratio >= 0.8 && ratio <= 1.25,
            fmt("predicted tau=%.1f (%.0f censored), oracle tau=%.1f at K=%.6f", tp,
                static_cast<double>(predicted.censored), to, k) +
                fmt(", ratio=%.3f", ratio)};
}

Verdict ikeda_exponential_law(Bench& bench) {
    const LifetimeSamples s = bench.relative_lifetimes(true, 20, 100, 0.02);
    if (s.lifetimes.size() < 10) return {false, "too few uncensored lifetimes"};
    const ExponentialFit fit = fit_exponential(s);
    const double r2 = log_survival_r2(survival_table(s, 50), fit.shift);
    return {r2 > 0.9, fmt("R^2=%.4f, tau=%.1f from %.0f lifetimes (%.0f censored)", r2, fit.tau,
                          static_cast<double>(s.lifetimes.size()), static_cast<double>(s.censored))};
}

// Fraction of 20 warmups per training value whose forecast stays under NRMSE 0.3 for 3 Lyapunov times.
// Training values without measurable chaos have no Lyapunov time and are reported as skipped.
Verdict short_term_skill(Bench& bench) {
    std::ostringstream detail;
    bool pass = true;
    std::size_t evaluated = 0;
    for (const bool ikeda : {true, false}) {
        const Reservoir r = bench.member(ikeda, 0);
        const ValidationSet& val = bench.validation(ikeda);
        const TrueSystem& system = *bench.workspace(ikeda).system;
        const std::size_t warmup = bench.config(ikeda).warmup;
        detail << (ikeda ? "ikeda" : " food chain");
        for (const auto& v : val.series) {
            const double lambda = system.lyapunov(v.truth.param, v.truth.sample(0), 100000);
            if (lambda < 1e-3) {
                detail << fmt(" b=%.2f:skipped (lambda=%.1e)", v.truth.param, lambda);
                continue;
            }
            const std::size_t horizon = lyapunov_horizon(3.0, lambda, v.truth.dt);
            const std::size_t room = v.truth.length() - warmup - horizon;
            const Eigen::VectorXd variance = v.truth.column_std().array().square();
            std::size_t good = 0;
            for (std::size_t k = 0; k < 20; ++k) {
                const std::size_t offset = room * k / 20;
                const Prediction p = r.predict(v.truth.slice(offset, warmup), v.truth.param, horizon);
                const TimeSeries target = v.truth.slice(offset + warmup, horizon);
                if (!p.diverged && p.series.length() == horizon && normalized_rmse(p.series, target, variance) < 0.3)
                    ++good;
            }
            ++evaluated;
            pass = pass && good >= 16;
            detail << fmt(" b=%.2f:%.0f/20", v.truth.param, static_cast<double>(good));
        }
        detail << ";";
    }
    return {pass && evaluated > 0, detail.str()};
}

Verdict climate_fidelity(Bench& bench) {
    std::ostringstream detail;
    bool pass = true;
    for (const bool ikeda : {true, false}) {
        const ValidationSet& val = bench.validation(ikeda);
        const std::size_t warmup = bench.config(ikeda).warmup;
        const Workspace& ws = bench.workspace(ikeda);
        std::size_t inside = 0;
        for (std::size_t m = 0; m < 5; ++m) {
            const Reservoir r = bench.member(ikeda, m);
            for (std::size_t w = 0; w < 4; ++w) {
                const auto& v = val.series[(4 * m + w) % val.series.size()];
                const std::size_t offset = (v.truth.length() - warmup) * w / 4;
                const TimeSeries seg = v.truth.slice(offset, warmup);
                const double t_max = 1e5 * v.truth.dt;
                inside += !classify_free_run(r, seg, v.truth.param, ws.region, t_max).collapsed();
            }
        }
        const double frac = static_cast<double>(inside) / 20.0;
        pass = pass && frac >= 0.9;
        detail << (ikeda ? "ikeda " : " food chain ") << fmt("%.2f;", frac);
    }
    return {pass, detail.str() + " fraction of 20 member x warmup runs inside the box for 1e5 steps"};
}

Verdict property_suites(Bench& bench) {
    std::ostringstream detail;
    bool pass = true;
    auto note = [&](const std::string& name, bool ok, const std::string& value) {
        pass = pass && ok;
        detail << " " << name << (ok ? " ok" : " FAILED") << " (" << value << ");";
    };

    {
        Rng rng(3);
        Eigen::MatrixXd states(40, 400), w(2, 40);
        for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = rng.uniform(-1, 1);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-1, 1);
        const Eigen::MatrixXd y = w * states;
        const double err = (ridge_readout(states * states.transpose(), y * states.transpose(), 0.0) - w).cwiseAbs().maxCoeff();
        note("ridge recovery", err < 1e-8, fmt("max error %.2e", err));
    }
    for (const bool ikeda : {true, false}) {
        const HyperParams& h = bench.config(ikeda).hyper;
        const Reservoir r = Reservoir::build(h, ikeda ? 2 : 3, 5);
        const double rel = std::abs(r.spectral_radius() - h.spectral_radius) / h.spectral_radius;
        note(ikeda ? "spectral radius ikeda" : "spectral radius food chain", rel < 1e-6, fmt("relative error %.2e", rel));
    }
    {
        const FoodChainParams p{};
        const auto rhs = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return food_chain_rhs(Eigen::Vector3d(x), p);
        };
        const Eigen::VectorXd x0 = Eigen::Vector3d(0.5, 0.3, 0.8);
        const double t = 2.0;
        const auto end = [&](double dt) {
            const auto n = static_cast<std::size_t>(std::llround(t / dt));
            const TimeSeries s = integrate(rhs, x0, dt, n, n);
            return Eigen::VectorXd(s.sample(s.length() - 1));
        };
        const Eigen::VectorXd ref = end(0.2 / 256);
        const double e1 = (end(0.2) - ref).norm(), e2 = (end(0.1) - ref).norm();
        const double order = std::log2(e1 / e2);
        note("rk4 order", order >= 3.7 && order <= 4.1, fmt("%.3f", order));
    }
    for (const bool ikeda : {true, false}) {
        const Workspace& ws = bench.workspace(ikeda);
        const Reservoir base = Reservoir::build(bench.config(ikeda).hyper, ws.corpus.dim(), 9);
        const TimeSeries drive = ws.corpus.sessions.front().series.slice(0, 2000);
        Reservoir a = base, b = base;
        a.set_readout(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ws.corpus.dim()), static_cast<Eigen::Index>(base.size())),
                      Normalizer::fit({&drive}));
        b.set_readout(a.w_out().value(), a.normalizer());
        Rng rng(4);
        Eigen::VectorXd start(static_cast<Eigen::Index>(base.size()));
        for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = rng.uniform(-1, 1);
        start.normalize();
        a.reset();
        b.set_state(start);
        const Eigen::MatrixXd ra = a.drive(drive, drive.param), rb = b.drive(drive, drive.param);
        const double early = (ra.col(9) - rb.col(9)).norm();
        const double gap = (ra.col(ra.cols() - 1) - rb.col(rb.cols() - 1)).norm();
        note(ikeda ? "echo state ikeda" : "echo state food chain", gap < 1e-6 && early > 0.0,
             fmt("gap %.2e after 10 steps, %.2e after 2000", early, gap));
    }
    {
        const Workspace& ws = bench.workspace(true);
        EnsembleSpec spec = bench.ensemble(true);
        spec.members = 3;
        spec.hyper.n_nodes = 150;
        CrisisOptions o = bench.config(true).crisis;
        o.t_max = 2000;
        const WarmupPool pool(ws.reference_series(), bench.config(true).warmup);
        spec.threads = 1;
        const CrisisEstimate a = estimate_critical_point(spec, ws.corpus, pool, ws.region, o);
        const CrisisEstimate b = estimate_critical_point(spec, ws.corpus, pool, ws.region, o);
        spec.threads = 3;
        const CrisisEstimate c = estimate_critical_point(spec, ws.corpus, pool, ws.region, o);
        bool same = a.per_member.size() == b.per_member.size() && a.per_member.size() == c.per_member.size();
        for (std::size_t i = 0; same && i < a.per_member.size(); ++i)
            same = a.per_member[i].b_star == b.per_member[i].b_star && a.per_member[i].b_star == c.per_member[i].b_star;
        const Reservoir r1 = bench.member(true, 0), r2 = bench.member(true, 0);
        same = same && r1.serialize() == r2.serialize();
        note("determinism", same, "reruns and widths 1, 3");
    }
    {
        const SearchSpace space = SearchSpace::reservoir_default();
        const auto objective = [](const Eigen::VectorXd& x, std::uint64_t) { return (x.array() - x.mean()).square().sum(); };
        OptimizerOptions o;
        o.budget = 20;
        o.candidates = 256;
        const OptimizationResult res = optimize(space, objective, o);
        double best = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (const auto& e : res.trace) {
            const double next = e.failed() ? best : std::min(best, e.loss);
            monotone = monotone && next <= best;
            best = next;
        }
        monotone = monotone && best == res.best_loss;
        note("trace monotone", monotone, fmt("best %.3g after %.0f evaluations", best, static_cast<double>(res.trace.size())));
    }
    {
        const ExperimentConfig& c = bench.config(true);
        ObjectiveSpec spec = c.tune.objective;
        spec.climate_steps = 10000;
        const ValidationSet& val = bench.validation(true);
        HyperParams untuned = c.hyper;
        untuned.spectral_radius = 2.0;
        const Workspace& ws = bench.workspace(true);
        const double tuned = evaluate(c.hyper, ws.corpus, val, spec, 21, bench.threads()).total;
        const double plain = evaluate(untuned, ws.corpus, val, spec, 21, bench.threads()).total;
        note("tuned beats rho=2", tuned < plain, fmt("%.3f vs %.3f", tuned, plain));
    }
    return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string configs;
    std::size_t threads = 1;
    std::vector<int> only;
    app.add_option("--configs", configs, "directory holding ikeda.json and foodchain.json")->required();
    app.add_option("--threads", threads)->check(CLI::PositiveNumber);
    app.add_option("--only", only, "criteria to run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Verdict(Bench&)>>> criteria = {
        {"oracle crisis calibration", oracle_calibration},
        {"ikeda critical point, 100 members", ikeda_prediction},
        {"food chain critical point, 50 members", food_chain_prediction},
        {"food chain lifetimes at K*_c + 2e-4", food_chain_lifetimes},
        {"ikeda exponential lifetimes at mu*_c + 0.02", ikeda_exponential_law},
        {"short-term skill", short_term_skill},
        {"climate fidelity", climate_fidelity},
        {"property suites", property_suites},
    };
    const std::set<int> selected(only.begin(), only.end());
    Bench bench(configs, threads);
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second(bench);
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s [%.0fs] %s\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                    v.detail.c_str());
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
