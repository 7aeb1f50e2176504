#include "tipping/cli/config.hpp"

#include "tipping/util/error.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tipping {

namespace {

using nlohmann::json;

// Reads keys from one JSON object; finish() rejects whatever was not read.
class Object {
public:
    Object(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw config_error("config: " + where_ + " must be an object");
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (const json* v = find(key)) out = convert<T>(*v, path(key));
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        if (const json* v = find(key)) out = convert<T>(*v, path(key));
    }

    Object child(const std::string& key) {
        static const json empty = json::object();
        const json* v = find(key);
        return {v ? *v : empty, path(key)};
    }

    [[nodiscard]] std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw config_error("config: unknown key '" + path(it.key()) + "'");
    }

    template <class T>
    static T convert(const json& v, const std::string& where) {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw config_error("");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) throw config_error("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw config_error("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw config_error("");
            }
            return v.get<T>();
        } catch (const std::exception&) {
            throw config_error("config: '" + where + "' has the wrong type");
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

template <class T>
std::vector<T> list(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error("config: '" + where + "' must be an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Object::convert<T>(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

template <class T>
void get_list(Object& o, const std::string& key, std::vector<T>& out) {
    if (const json* v = o.find(key)) out = list<T>(*v, o.path(key));
}

template <class T>
void get_list(Object& o, const std::string& key, std::optional<std::vector<T>>& out) {
    if (const json* v = o.find(key)) out = list<T>(*v, o.path(key));
}

std::string read_file(const std::filesystem::path& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot read " + what + " '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("config: " + source + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void read_hyper_fields(Object& o, HyperParams& h) {
    o.get("n_nodes", h.n_nodes);
    o.get("avg_degree", h.avg_degree);
    o.get("spectral_radius", h.spectral_radius);
    o.get("sigma_in", h.sigma_in);
    o.get("k_b", h.k_b);
    o.get("b0", h.b0);
    o.get("alpha", h.alpha);
    if (o.has("beta") && o.has("log_beta")) throw config_error("config: give either '" + o.path("beta") + "' or 'log_beta'");
    o.get("beta", h.beta);
    if (const json* v = o.find("log_beta")) h.beta = std::pow(10.0, Object::convert<double>(*v, o.path("log_beta")));
}

void read_hyper(const json& node, const std::filesystem::path& base, ExperimentConfig& cfg, int depth = 0) {
    if (node.is_string()) {
        if (node.get<std::string>() != "tune" || depth > 0)
            throw config_error("config: 'hyper' must be an object or the string \"tune\"");
        cfg.tune_hyper = true;
        return;
    }
    Object o(node, "hyper");
    if (const json* inc = o.find("include")) {
        if (depth > 0) throw config_error("config: hyperparameter fragments cannot include other fragments");
        const auto path = resolve(base, Object::convert<std::string>(*inc, "hyper.include"));
        const json fragment = parse_json(read_file(path, "hyperparameter fragment"), path.string());
        Object f(fragment, "");
        const json* inner = f.find("hyper");
        if (!inner) throw config_error("config: fragment '" + path.string() + "' lacks a 'hyper' object");
        double loss = 0.0;
        f.get("loss", loss);
        f.finish();
        read_hyper(*inner, base, cfg, depth + 1);
        cfg.includes.push_back(path);
    }
    read_hyper_fields(o, cfg.hyper);
    o.finish();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source) {
    ExperimentConfig cfg;
    cfg.source = source;
    cfg.echo = parse_json(text, source.string());
    const std::filesystem::path base = source.has_parent_path() ? source.parent_path() : std::filesystem::path(".");
    Object root(cfg.echo, "");

    {
        Object s = root.child("system");
        s.get("id", cfg.system.id);
        if (cfg.system.id != "ikeda" && cfg.system.id != "foodchain" && cfg.system.id != "external-csv")
            throw config_error("config: unknown system id '" + cfg.system.id + "'");
        Object p = s.child("params");
        if (cfg.system.id == "ikeda") {
            p.get("gamma", cfg.system.ikeda.gamma);
            p.get("kappa", cfg.system.ikeda.kappa);
            p.get("eta", cfg.system.ikeda.eta);
        } else if (cfg.system.id == "foodchain") {
            auto& f = cfg.system.food_chain;
            p.get("x_c", f.x_c);
            p.get("y_c", f.y_c);
            p.get("x_p", f.x_p);
            p.get("y_p", f.y_p);
            p.get("R0", f.R0);
            p.get("C0", f.C0);
            p.get("step", cfg.system.step);
            p.get("stride", cfg.system.stride);
            p.get("extinction", cfg.system.extinction);
        }
        p.finish();
        get_list(s, "initial", cfg.system.initial);
        if (const json* files = s.find("files")) {
            if (!files->is_array()) throw config_error("config: 'system.files' must be an array");
            for (std::size_t i = 0; i < files->size(); ++i) {
                Object f((*files)[i], "system.files[" + std::to_string(i) + "]");
                ExternalSeries e;
                std::string path;
                if (!f.has("param") || !f.has("path")) throw config_error("config: " + f.path("") + " needs 'param' and 'path'");
                f.get("param", e.param);
                f.get("path", path);
                e.path = resolve(base, path);
                f.finish();
                cfg.system.files.push_back(e);
            }
        }
        s.finish();
        if (cfg.system.id == "external-csv" && cfg.system.files.empty())
            throw config_error("config: external-csv needs 'system.files'");
        if (cfg.system.id != "external-csv" && !cfg.system.files.empty())
            throw config_error("config: 'system.files' is only valid for external-csv");
    }
    {
        Object r = root.child("region");
        r.get("inflate", cfg.region.inflate);
        r.get("grace", cfg.region.grace);
        get_list(r, "lower", cfg.region.lower);
        get_list(r, "upper", cfg.region.upper);
        r.get("reference_param", cfg.region.reference_param);
        if (r.has("floor")) {
            Object f = r.child("floor");
            Floor floor;
            f.get("coord", floor.coord);
            f.get("threshold", floor.threshold);
            f.finish();
            cfg.region.floor = floor;
        }
        r.finish();
        if (cfg.region.lower.has_value() != cfg.region.upper.has_value())
            throw config_error("config: 'region.lower' and 'region.upper' go together");
    }
    {
        Object s = root.child("simulate");
        get_list(s, "params", cfg.simulate.params);
        s.get("samples", cfg.simulate.samples);
        s.get("burn_in", cfg.simulate.burn_in);
        s.finish();
    }
    {
        Object t = root.child("training");
        get_list(t, "params", cfg.training.params);
        t.get("samples", cfg.training.samples);
        t.get("washout", cfg.training.washout);
        t.get("burn_in", cfg.training.burn_in);
        t.finish();
    }
    if (const json* h = root.find("hyper")) read_hyper(*h, base, cfg);
    {
        Object e = root.child("ensemble");
        e.get("members", cfg.ensemble.members);
        e.get("seed", cfg.ensemble.seed);
        get_list(e, "seeds", cfg.ensemble.seeds);
        e.finish();
    }
    {
        Object c = root.child("crisis");
        c.get("b_lo", cfg.crisis.b_lo);
        c.get("b_hi", cfg.crisis.b_hi);
        c.get("resolution", cfg.crisis.resolution);
        c.get("t_max", cfg.crisis.t_max);
        c.get("votes", cfg.crisis.votes);
        c.get("max_excluded", cfg.crisis.max_excluded);
        c.finish();
    }
    {
        Object l = root.child("lifetimes");
        l.get("b", cfg.lifetimes.b);
        l.get("offset", cfg.lifetimes.offset);
        l.get("oracle_b", cfg.lifetimes.oracle_b);
        if (cfg.lifetimes.b && cfg.lifetimes.offset)
            throw config_error("config: give either 'lifetimes.b' or 'lifetimes.offset'");
        l.get("n_ics", cfg.lifetimes.n_ics);
        l.get("t_max", cfg.lifetimes.t_max);
        l.get("bins", cfg.lifetimes.bins);
        l.get("oracle_ics", cfg.lifetimes.oracle_ics);
        l.get("oracle_noise", cfg.lifetimes.oracle_noise);
        l.get("oracle_seed", cfg.lifetimes.oracle_seed);
        l.finish();
    }
    {
        Object t = root.child("tune");
        auto& o = cfg.tune.optimizer;
        t.get("budget", o.budget);
        t.get("initial", o.initial);
        t.get("candidates", o.candidates);
        t.get("refine_starts", o.refine_starts);
        t.get("seed", o.seed);
        auto& s = cfg.tune.objective;
        t.get("w_short", s.w_short);
        t.get("w_climate", s.w_climate);
        t.get("horizon_lyapunov", s.horizon_lyapunov);
        t.get("segments", s.segments);
        t.get("climate_steps", s.climate_steps);
        t.get("escape_penalty", s.escape_penalty);
        t.get("seeds", s.seeds);
        get_list(t, "lyapunov", cfg.tune.lyapunov);
        t.get("lyapunov_steps", cfg.tune.lyapunov_steps);
        std::optional<std::string> resume;
        t.get("resume", resume);
        if (resume) cfg.tune.resume = resolve(base, *resume);
        t.finish();
    }
    root.get("warmup", cfg.warmup);
    root.get("threads", cfg.threads);
    std::optional<std::string> output;
    root.get("output", output);
    if (output) cfg.output = resolve(base, *output);
    root.finish();

    cfg.tune.objective.warmup = cfg.warmup;
    cfg.hyper.validate();
    cfg.crisis.validate();
    cfg.tune.optimizer.validate();
    cfg.tune.objective.validate();
    if (cfg.warmup < 1) throw config_error("config: 'warmup' must be positive");
    if (cfg.threads && *cfg.threads < 1) throw config_error("config: 'threads' must be positive");
    if (cfg.ensemble.members < 1) throw config_error("config: 'ensemble.members' must be positive");
    if (!cfg.ensemble.seeds.empty() && cfg.ensemble.seeds.size() != cfg.ensemble.members)
        throw config_error("config: 'ensemble.seeds' must list one seed per member");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path, "config file"), path);
}

nlohmann::json hyper_to_json(const HyperParams& hyper) {
    nlohmann::json h;
    h["n_nodes"] = hyper.n_nodes;
    h["avg_degree"] = hyper.avg_degree;
    h["spectral_radius"] = hyper.spectral_radius;
    h["sigma_in"] = hyper.sigma_in;
    h["k_b"] = hyper.k_b;
    h["b0"] = hyper.b0;
    h["alpha"] = hyper.alpha;
    h["beta"] = hyper.beta;
    return nlohmann::json{{"hyper", h}};
}

}  // namespace tipping
