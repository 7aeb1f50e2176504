#include "tipping/hyperopt/bayes_opt.hpp"

#include "tipping/dynsys/time_series.hpp"
#include "tipping/hyperopt/gaussian_process.hpp"
#include "tipping/util/format.hpp"
#include "tipping/util/parallel.hpp"
#include "tipping/util/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tipping {

void OptimizerOptions::validate() const {
    if (budget < 10) throw config_error("optimizer: budget must be at least 10");
    if (initial < 1 || initial > budget) throw config_error("optimizer: initial design must be in [1, budget]");
    if (candidates < 1) throw config_error("optimizer: need at least one acquisition candidate");
}

namespace {

std::vector<Eigen::VectorXd> latin_hypercube(std::size_t m, std::size_t d, Rng& rng) {
    std::vector<Eigen::VectorXd> points(m, Eigen::VectorXd(static_cast<Eigen::Index>(d)));
    std::vector<std::size_t> perm(m);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        for (std::size_t i = 0; i < m; ++i)
            points[i][static_cast<Eigen::Index>(j)] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(m);
    }
    return points;
}

double safe_evaluate(const ObjectiveFn& objective, const Eigen::VectorXd& point, std::uint64_t seed) {
    try {
        const double v = objective(point, seed);
        return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Compresses large losses (escape penalties) so they do not dominate the fit.
double surrogate_target(double loss) { return std::copysign(std::log1p(std::abs(loss)), loss); }

void check_resume(const TraceEntry& entry, const Eigen::VectorXd& point, std::size_t iter) {
    if (entry.iter != iter || entry.point.size() != point.size() ||
        (entry.point - point).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + point.cwiseAbs().maxCoeff()))
        throw config_error("optimizer: resumed trace does not match this seed at iteration " + std::to_string(iter));
}

Eigen::VectorXd propose(const SearchSpace& space, const std::vector<TraceEntry>& trace, const OptimizerOptions& options,
                        std::size_t iter) {
    const auto d = static_cast<Eigen::Index>(space.size());
    Rng rng(mix_seed(options.seed, 1000 + iter));
    auto random_unit = [&] {
        Eigen::VectorXd u(d);
        for (Eigen::Index j = 0; j < d; ++j) u[j] = rng.uniform();
        return u;
    };

    std::vector<Eigen::VectorXd> x;
    std::vector<double> y;
    for (const auto& e : trace) {
        if (e.failed()) continue;
        x.push_back(space.to_unit(e.point));
        y.push_back(surrogate_target(e.loss));
    }
    if (x.empty()) return space.from_unit(random_unit());

    GaussianProcess gp;
    gp.fit(x, y);
    const double best = *std::min_element(y.begin(), y.end());
    auto acquisition = [&](const Eigen::VectorXd& u) {
        const auto post = gp.predict(u);
        return expected_improvement(post.mean, std::sqrt(post.variance), best);
    };

    std::vector<std::pair<double, Eigen::VectorXd>> scored;
    scored.reserve(options.candidates);
    for (std::size_t c = 0; c < options.candidates; ++c) {
        Eigen::VectorXd u = random_unit();
        const double a = acquisition(u);
        scored.emplace_back(a, std::move(u));
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    // Local polish of the best candidates by shrinking random perturbations.
    const std::size_t starts = std::min(options.refine_starts, scored.size());
    std::pair<double, Eigen::VectorXd> chosen = scored.front();
    for (std::size_t s = 0; s < starts; ++s) {
        auto current = scored[s];
        double radius = 0.05;
        for (int it = 0; it < 30; ++it) {
            Eigen::VectorXd trial = current.second;
            for (Eigen::Index j = 0; j < d; ++j) trial[j] = std::clamp(trial[j] + radius * rng.uniform(-1.0, 1.0), 0.0, 1.0);
            const double a = acquisition(trial);
            if (a > current.first) {
                current = {a, trial};
            } else {
                radius *= 0.85;
            }
        }
        if (current.first > chosen.first) chosen = current;
    }
    return space.from_unit(chosen.second);
}

}  // namespace

OptimizationResult optimize(const SearchSpace& space, const ObjectiveFn& objective, const OptimizerOptions& options,
                            const std::vector<TraceEntry>& resume) {
    space.validate();
    options.validate();
    OptimizationResult result;
    auto& trace = result.trace;

    Rng design_rng(mix_seed(options.seed, 0));
    const auto design = latin_hypercube(options.initial, space.size(), design_rng);
    trace.resize(options.initial);
    for (std::size_t i = 0; i < options.initial; ++i) {
        trace[i].iter = i;
        trace[i].point = space.from_unit(design[i]);
        trace[i].seed = options.seed;
        if (i < resume.size()) {
            check_resume(resume[i], trace[i].point, i);
            trace[i].loss = resume[i].loss;
        }
    }
    const std::size_t fresh_from = std::min(resume.size(), options.initial);
    parallel_for(options.initial - fresh_from, options.width, [&](std::size_t k) {
        auto& e = trace[fresh_from + k];
        e.loss = safe_evaluate(objective, e.point, e.seed);
    });

    for (std::size_t iter = options.initial; iter < options.budget; ++iter) {
        TraceEntry e;
        e.iter = iter;
        e.point = propose(space, trace, options, iter);
        e.seed = options.seed;
        if (iter < resume.size()) {
            check_resume(resume[iter], e.point, iter);
            e.loss = resume[iter].loss;
        } else {
            e.loss = safe_evaluate(objective, e.point, e.seed);
        }
        trace.push_back(std::move(e));
    }

    for (const auto& e : trace) {
        if (!e.failed() && e.loss < result.best_loss) {
            result.best_loss = e.loss;
            result.best = e.point;
        }
    }
    if (result.best.size() == 0) throw OptimizationFailed("optimizer: every evaluation failed", trace);
    return result;
}

void write_trace_csv(const SearchSpace& space, const std::vector<TraceEntry>& trace, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    os << "iter,loss";
    for (const auto& d : space.dims) os << ',' << d.name;
    os << ",seed\n";
    for (const auto& e : trace) {
        os << e.iter << ',' << (e.failed() ? std::string("nan") : format_double(e.loss));
        for (Eigen::Index j = 0; j < e.point.size(); ++j) os << ',' << format_double(e.point[j]);
        os << ',' << e.seed << '\n';
    }
    if (!os) throw Error(ErrorKind::io, "write failed: " + path.string());
}

std::vector<TraceEntry> read_trace_csv(const SearchSpace& space, const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open trace " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line)) throw data_error(path.string() + ": empty trace");
    std::vector<TraceEntry> trace;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != space.size() + 3) throw data_error(where + ": wrong field count");
        TraceEntry e;
        try {
            e.iter = std::stoul(fields[0]);
            e.loss = fields[1] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(fields[1]);
            e.point.resize(static_cast<Eigen::Index>(space.size()));
            for (std::size_t j = 0; j < space.size(); ++j) e.point[static_cast<Eigen::Index>(j)] = std::stod(fields[j + 2]);
            e.seed = std::stoull(fields.back());
        } catch (const std::exception&) {
            throw data_error(where + ": cannot parse trace row");
        }
        trace.push_back(std::move(e));
    }
    return trace;
}

}  // namespace tipping
