#include "tipping/cli/pipeline.hpp"

#include "tipping/util/error.hpp"
#include "tipping/util/format.hpp"

#include <algorithm>

namespace tipping {

std::unique_ptr<TrueSystem> make_system(const SystemConfig& config) {
    if (config.id == "ikeda") return std::make_unique<IkedaSystem>(config.ikeda);
    if (config.id == "foodchain")
        return std::make_unique<FoodChainSystem>(config.food_chain, config.step, config.stride, config.extinction);
    if (config.id == "external-csv") return nullptr;
    throw config_error("config: unknown system id '" + config.id + "'");
}

Eigen::VectorXd initial_state(const SystemConfig& config, const TrueSystem& system) {
    if (!config.initial) return system.default_initial();
    if (config.initial->size() != system.dim())
        throw config_error("config: 'system.initial' needs " + std::to_string(system.dim()) + " entries");
    return Eigen::Map<const Eigen::VectorXd>(config.initial->data(), static_cast<Eigen::Index>(config.initial->size()));
}

std::vector<std::string> Workspace::coord_names() const {
    if (system) return system->coord_names();
    return {};
}

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::size_t session_length(const TrainingConfig& t) { return t.washout + t.samples + 1; }

}  // namespace

Workspace prepare(const ExperimentConfig& config) {
    Workspace ws;
    ws.system = make_system(config.system);
    ws.corpus.washout = config.training.washout;
    const std::size_t length = session_length(config.training);

    if (ws.system) {
        if (config.training.params.empty()) throw config_error("config: 'training.params' is empty");
        const Eigen::VectorXd x0 = initial_state(config.system, *ws.system);
        for (double p : config.training.params)
            ws.corpus.sessions.push_back({p, ws.system->simulate(p, x0, length, config.training.burn_in)});
    } else {
        for (const auto& file : config.system.files) {
            TimeSeries s = read_csv(file.path);
            s.param = file.param;
            ws.inputs.push_back(file.path);
            if (s.length() < length)
                throw data_error(file.path.string() + ": " + std::to_string(s.length()) + " rows, training needs " +
                                 std::to_string(length));
            ws.corpus.sessions.push_back({file.param, s.slice(0, length)});
            ws.external.push_back(std::move(s));
        }
    }
    for (const auto& s : ws.corpus.sessions)
        if (s.series.dim() != ws.corpus.sessions.front().series.dim())
            throw data_error("training sessions disagree in dimension");
    ws.corpus.validate();

    ws.reference = ws.corpus.sessions.size() - 1;
    if (config.region.reference_param) {
        bool found = false;
        for (std::size_t i = 0; i < ws.corpus.sessions.size(); ++i)
            if (ws.corpus.sessions[i].param == *config.region.reference_param) {
                ws.reference = i;
                found = true;
            }
        if (!found) throw config_error("config: 'region.reference_param' is not a training value");
    }

    const TimeSeries& ref = ws.reference_series();
    if (config.region.lower) {
        ws.region.lower = to_vector(*config.region.lower);
        ws.region.upper = to_vector(*config.region.upper);
        ws.region.grace = config.region.grace;
        if (static_cast<std::size_t>(ws.region.lower.size()) != ref.dim())
            throw config_error("config: region bounds do not match the data dimension");
        if (ws.system) ws.region.floor = ws.system->floor();
    } else if (ws.system) {
        ws.region = region_for(*ws.system, ref, config.region.inflate, config.region.grace);
    } else {
        ws.region = EscapeRegion::around(ref, config.region.inflate, config.region.grace);
    }
    if (config.region.floor) ws.region.floor = config.region.floor;
    ws.region.validate();
    return ws;
}

ValidationSet validation_set(const ExperimentConfig& config, const Workspace& ws) {
    const ObjectiveSpec& spec = config.tune.objective;
    ValidationSet out;
    out.region = ws.region;
    const std::size_t n = ws.corpus.sessions.size();
    if (config.tune.lyapunov && config.tune.lyapunov->size() != n)
        throw config_error("config: 'tune.lyapunov' needs one exponent per training value");
    if (!ws.system && !config.tune.lyapunov) throw config_error("config: external-csv tuning needs 'tune.lyapunov'");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& session = ws.corpus.sessions[i];
        ValidationSeries v;
        if (ws.system) {
            const Eigen::VectorXd start = session.series.sample(session.series.length() - 1);
            v.lyapunov = config.tune.lyapunov ? (*config.tune.lyapunov)[i]
                                              : ws.system->lyapunov(session.param, start, config.tune.lyapunov_steps);
            if (!(v.lyapunov > 0.0))
                throw data_error("validation: estimated Lyapunov exponent at " + format_double(session.param) + " is " +
                                 format_double(v.lyapunov) + "; set 'tune.lyapunov' to fix the forecast horizons");
            const std::size_t horizon = lyapunov_horizon(spec.horizon_lyapunov, v.lyapunov, session.series.dt);
            const std::size_t need = spec.warmup + std::max(spec.climate_steps, horizon) + 1;
            v.truth = ws.system->simulate(session.param, start, need, 1);
        } else {
            const TimeSeries& full = ws.external[i];
            const std::size_t used = session.series.length();
            if (full.length() <= used + spec.warmup)
                throw data_error(config.system.files[i].path.string() + ": no held-out rows left for validation");
            v.truth = full.slice(used, full.length() - used);
            v.lyapunov = (*config.tune.lyapunov)[i];
        }
        out.series.push_back(std::move(v));
    }
    return out;
}

}  // namespace tipping
