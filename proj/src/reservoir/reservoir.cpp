#include "tipping/reservoir/reservoir.hpp"

#include "tipping/util/error.hpp"
#include "tipping/util/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace tipping {

Normalizer Normalizer::identity(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
}

Normalizer Normalizer::fit(const std::vector<const TimeSeries*>& series) {
    if (series.empty()) throw data_error("Normalizer::fit: no data");
    const auto d = static_cast<Eigen::Index>(series.front()->dim());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    double count = 0.0;
    for (const auto* s : series) {
        sum += s->states.colwise().sum().transpose();
        count += static_cast<double>(s->length());
    }
    const Eigen::VectorXd mean = sum / count;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(d);
    for (const auto* s : series) sq += (s->states.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
    Eigen::VectorXd scale = (sq / count).cwiseSqrt();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(scale[j] > 0.0)) scale[j] = 1.0;
    }
    return {mean, scale};
}

void TrainingCorpus::validate() const {
    if (sessions.empty()) throw data_error("training corpus: need at least one session");
    const auto& first = sessions.front().series;
    for (const auto& s : sessions) {
        s.series.validate();
        if (s.series.dim() != first.dim()) throw data_error("training corpus: sessions differ in dimension");
        if (std::abs(s.series.dt - first.dt) > 1e-12 * first.dt)
            throw data_error("training corpus: sessions differ in sampling interval");
        if (s.series.length() <= washout + 1)
            throw data_error("training corpus: session at param " + std::to_string(s.param) +
                             " is not longer than washout + 1");
    }
}

double spectral_radius(const SparseMatrix& a) {
    if (a.nonZeros() == 0) return 0.0;
    const Eigen::MatrixXd dense(a);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw numerical_error("spectral_radius: eigenvalue iteration failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Reservoir Reservoir::build(const HyperParams& hyper, std::size_t dim, std::uint64_t seed) {
    hyper.validate();
    if (dim < 1) throw config_error("Reservoir::build: input dimension must be positive");
    const auto n = static_cast<Eigen::Index>(hyper.n_nodes);
    const double p = hyper.avg_degree / static_cast<double>(hyper.n_nodes);

    SparseMatrix adjacency(n, n);
    double radius = 0.0;
    for (std::uint64_t attempt = 0; attempt < 64 && !(radius > 1e-12); ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        std::vector<Eigen::Triplet<double>> entries;
        entries.reserve(static_cast<std::size_t>(static_cast<double>(n) * hyper.avg_degree * 1.2) + 16);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (rng.uniform() < p) {
                    double w = 0.0;
                    while (w == 0.0) w = rng.uniform(-1.0, 1.0);
                    entries.emplace_back(i, j, w);
                }
            }
        }
        adjacency.setFromTriplets(entries.begin(), entries.end());
        radius = tipping::spectral_radius(adjacency);
    }
    if (!(radius > 1e-12)) throw numerical_error("Reservoir::build: could not sample an adjacency matrix with nonzero spectral radius");
    adjacency *= hyper.spectral_radius / radius;

    Rng rng(mix_seed(seed, 1u << 20));
    Eigen::MatrixXd w_in(n, static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < w_in.cols(); ++j) w_in(i, j) = rng.uniform(-hyper.sigma_in, hyper.sigma_in);
    Eigen::VectorXd w_b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double w = 0.0;
        while (w == 0.0) w = rng.uniform(-1.0, 1.0);
        w_b[i] = w;
    }
    return Reservoir(hyper, std::move(adjacency), std::move(w_in), std::move(w_b), seed);
}

Reservoir::Reservoir(const HyperParams& hyper, SparseMatrix adjacency, Eigen::MatrixXd w_in, Eigen::VectorXd w_b,
                     std::uint64_t seed)
    : hyper_(hyper),
      seed_(seed),
      adjacency_(std::move(adjacency)),
      w_in_(std::move(w_in)),
      w_b_(std::move(w_b)),
      normalizer_(Normalizer::identity(static_cast<std::size_t>(w_in_.cols()))) {
    const auto n = w_in_.rows();
    if (n < 1 || w_in_.cols() < 1) throw config_error("Reservoir: empty input matrix");
    if (adjacency_.rows() != n || adjacency_.cols() != n || w_b_.size() != n)
        throw config_error("Reservoir: matrix dimensions disagree");
    hyper_.n_nodes = static_cast<std::size_t>(n);
    r_ = Eigen::VectorXd::Zero(n);
    scratch_ = Eigen::VectorXd::Zero(n);
}

void Reservoir::set_state(const Eigen::VectorXd& r) {
    if (r.size() != r_.size()) throw config_error("Reservoir::set_state: wrong size");
    r_ = r;
}

void Reservoir::set_readout(Eigen::MatrixXd w_out, Normalizer normalizer) {
    if (w_out.rows() != w_in_.cols() || w_out.cols() != w_in_.rows())
        throw config_error("Reservoir::set_readout: W_out must be D x n");
    if (normalizer.mean.size() != w_in_.cols() || normalizer.scale.size() != w_in_.cols())
        throw config_error("Reservoir::set_readout: normalizer has wrong dimension");
    w_out_ = std::move(w_out);
    normalizer_ = std::move(normalizer);
}

void Reservoir::advance(Eigen::VectorXd& r, Eigen::VectorXd& scratch, const Eigen::Ref<const Eigen::VectorXd>& u,
                        double b) const {
    scratch.noalias() = adjacency_ * r;
    scratch.noalias() += w_in_ * u;
    scratch += (hyper_.k_b * (b + hyper_.b0)) * w_b_;
    if (hyper_.alpha == 1.0) {
        r = scratch.array().tanh();
    } else {
        r = (1.0 - hyper_.alpha) * r.array() + hyper_.alpha * scratch.array().tanh();
    }
}

const Eigen::VectorXd& Reservoir::step(const Eigen::Ref<const Eigen::VectorXd>& u, double b) {
    if (static_cast<std::size_t>(u.size()) != dim()) throw config_error("Reservoir::step: input has wrong dimension");
    advance(r_, scratch_, u, b);
    if (!r_.allFinite()) throw numerical_error("Reservoir::step: non-finite reservoir state");
    return r_;
}

Eigen::MatrixXd Reservoir::drive(const TimeSeries& series, double b) {
    if (series.dim() != dim()) throw data_error("Reservoir::drive: series dimension does not match reservoir input");
    Eigen::MatrixXd states(r_.size(), static_cast<Eigen::Index>(series.length()));
    for (std::size_t t = 0; t < series.length(); ++t) {
        const Eigen::VectorXd u = normalizer_.apply(series.states.row(static_cast<Eigen::Index>(t)).transpose());
        states.col(static_cast<Eigen::Index>(t)) = step(u, b);
    }
    return states;
}

Eigen::MatrixXd ridge_readout(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double beta) {
    const auto n = gram.rows();
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += beta;
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    bool singular = llt.info() != Eigen::Success;
    if (!singular && beta == 0.0) {
        const Eigen::VectorXd pivots = Eigen::MatrixXd(llt.matrixL()).diagonal().cwiseAbs2();
        singular = pivots.minCoeff() <= 1e-13 * pivots.maxCoeff() * static_cast<double>(n);
    }
    if (singular) {
        if (beta == 0.0) throw numerical_error("ridge readout: normal matrix is singular; regularization required");
        throw numerical_error("ridge readout: Cholesky factorization failed");
    }
    return llt.solve(cross.transpose()).transpose();
}

TrainingReport Reservoir::train(const TrainingCorpus& corpus) {
    corpus.validate();
    if (corpus.dim() != dim()) throw data_error("Reservoir::train: corpus dimension does not match reservoir input");

    std::vector<const TimeSeries*> all;
    for (const auto& s : corpus.sessions) all.push_back(&s.series);
    normalizer_ = Normalizer::fit(all);

    const auto n = r_.size();
    const auto d = static_cast<Eigen::Index>(dim());
    constexpr Eigen::Index chunk = 1024;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, n);
    std::vector<Eigen::MatrixXd> session_gram;
    std::vector<Eigen::MatrixXd> session_cross;
    std::vector<double> session_target_sq;
    std::vector<std::size_t> session_rows;

    Eigen::MatrixXd block(n, chunk);
    Eigen::MatrixXd targets(d, chunk);
    TrainingReport report;
    for (const auto& session : corpus.sessions) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, n);
        double target_sq = 0.0;
        Eigen::Index filled = 0;
        auto flush = [&] {
            if (filled == 0) return;
            g.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(filled));
            c.noalias() += targets.leftCols(filled) * block.leftCols(filled).transpose();
            filled = 0;
        };
        reset();
        const auto& series = session.series;
        const std::size_t length = series.length();
        for (std::size_t t = 0; t + 1 < length; ++t) {
            const Eigen::VectorXd u = normalizer_.apply(series.states.row(static_cast<Eigen::Index>(t)).transpose());
            step(u, session.param);
            if (t < corpus.washout) continue;
            const Eigen::VectorXd y =
                normalizer_.apply(series.states.row(static_cast<Eigen::Index>(t + 1)).transpose());
            block.col(filled) = r_;
            targets.col(filled) = y;
            target_sq += y.squaredNorm();
            if (++filled == chunk) flush();
        }
        flush();
        g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
        gram += g;
        cross += c;
        session_gram.push_back(std::move(g));
        session_cross.push_back(std::move(c));
        session_target_sq.push_back(target_sq);
        session_rows.push_back(length - 1 - corpus.washout);
        report.samples += session_rows.back();
    }
    reset();

    Eigen::MatrixXd w_out = ridge_readout(gram, cross, hyper_.beta);
    for (std::size_t s = 0; s < session_gram.size(); ++s) {
        // sum ||W r - y||^2 = tr(W G W^T) - 2 tr(W C^T) + sum ||y||^2
        const double fit = (w_out * session_gram[s] * w_out.transpose()).trace() -
                           2.0 * (w_out.cwiseProduct(session_cross[s])).sum() + session_target_sq[s];
        const double mse = std::max(fit, 0.0) / (static_cast<double>(session_rows[s]) * static_cast<double>(d));
        report.session_rmse.push_back(std::sqrt(mse));
    }
    w_out_ = std::move(w_out);
    return report;
}

void Reservoir::synchronize(const TimeSeries& warmup, double b, Eigen::VectorXd& r, Eigen::VectorXd& scratch) const {
    if (warmup.dim() != dim()) throw data_error("Reservoir::predict: warmup dimension does not match reservoir input");
    if (warmup.length() < 1) throw data_error("Reservoir::predict: warmup must contain at least one sample");
    r.setZero();
    for (std::size_t t = 0; t < warmup.length(); ++t) {
        const Eigen::VectorXd u = normalizer_.apply(warmup.states.row(static_cast<Eigen::Index>(t)).transpose());
        advance(r, scratch, u, b);
    }
}

FreeRunResult Reservoir::free_run(const TimeSeries& warmup, double b, std::size_t steps,
                                  const std::function<bool(const Eigen::VectorXd&)>& visit) const {
    if (!w_out_) throw config_error("Reservoir::predict: reservoir is not trained");
    FreeRunResult result;
    if (steps == 0) return result;
    Eigen::VectorXd r(r_.size());
    Eigen::VectorXd scratch(r_.size());
    synchronize(warmup, b, r, scratch);
    Eigen::VectorXd v = *w_out_ * r;
    Eigen::VectorXd physical(v.size());
    for (std::size_t k = 0; k < steps; ++k) {
        if (!v.allFinite()) {
            result.diverged = true;
            return result;
        }
        physical = normalizer_.invert(v);
        ++result.steps;
        if (!visit(physical)) return result;
        if (k + 1 == steps) break;
        advance(r, scratch, v, b);
        v.noalias() = *w_out_ * r;
    }
    return result;
}

Prediction Reservoir::predict(const TimeSeries& warmup, double b, std::size_t steps) const {
    Prediction out;
    out.series.dt = warmup.dt;
    out.series.param = b;
    out.series.states.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(dim()));
    Eigen::Index row = 0;
    const FreeRunResult run = free_run(warmup, b, steps, [&](const Eigen::VectorXd& x) {
        out.series.states.row(row++) = x.transpose();
        return true;
    });
    out.diverged = run.diverged;
    if (run.steps < steps) out.series.states.conservativeResize(static_cast<Eigen::Index>(run.steps), Eigen::NoChange);
    return out;
}

double Reservoir::spectral_radius() const { return tipping::spectral_radius(adjacency_); }

}  // namespace tipping
