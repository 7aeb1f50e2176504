#pragma once

#include "tipping/dynsys/time_series.hpp"
#include "tipping/reservoir/hyper_params.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tipping {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Per-coordinate affine map to zero mean and unit variance.
struct Normalizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Normalizer identity(std::size_t dim);
    /// Statistics pooled over all samples of all series.
    static Normalizer fit(const std::vector<const TimeSeries*>& series);

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return (x - mean).cwiseQuotient(scale);
    }
    [[nodiscard]] Eigen::VectorXd invert(const Eigen::Ref<const Eigen::VectorXd>& v) const {
        return v.cwiseProduct(scale) + mean;
    }
};

/// One training run: a series recorded at bifurcation-parameter value `param`.
struct TrainingSession {
    double param = 0.0;
    TimeSeries series;
};

struct TrainingCorpus {
    std::vector<TrainingSession> sessions;
    std::size_t washout = 1000;

    /// Requires at least one session, a shared dimension and dt, and every
    /// session longer than washout + 1.
    void validate() const;
    [[nodiscard]] std::size_t dim() const { return sessions.empty() ? 0 : sessions.front().series.dim(); }
};

struct TrainingReport {
    std::vector<double> session_rmse;  ///< one-step RMSE per session, normalized units
    std::size_t samples = 0;           ///< regression rows used
};

struct Prediction {
    TimeSeries series;
    bool diverged = false;  ///< output went non-finite; series holds the finite prefix
};

/// Result of an unrecorded closed-loop run.
struct FreeRunResult {
    std::size_t steps = 0;
    bool diverged = false;
};

/// Parameter-aware echo-state network.
///
/// Update: r <- (1 - alpha) r + alpha tanh(A r + W_in u + k_b W_b (b + b0)),
/// readout v = W_out r. Inputs and outputs of drive/predict are in physical
/// units; step() works in the normalized coordinates the readout is trained in.
class Reservoir {
public:
    /// Random construction: A is Erdos-Renyi with edge probability
    /// avg_degree / n_nodes and U[-1, 1] weights rescaled to the target
    /// spectral radius; W_in ~ U[-sigma_in, sigma_in]; W_b ~ U[-1, 1] \ {0}.
    static Reservoir build(const HyperParams& hyper, std::size_t dim, std::uint64_t seed);

    /// Takes the matrices as given (no rescaling).
    Reservoir(const HyperParams& hyper, SparseMatrix adjacency, Eigen::MatrixXd w_in, Eigen::VectorXd w_b,
              std::uint64_t seed = 0);

    [[nodiscard]] const HyperParams& hyper() const { return hyper_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(w_in_.cols()); }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(w_in_.rows()); }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const SparseMatrix& adjacency() const { return adjacency_; }
    [[nodiscard]] const Eigen::MatrixXd& w_in() const { return w_in_; }
    [[nodiscard]] const Eigen::VectorXd& w_b() const { return w_b_; }
    [[nodiscard]] const std::optional<Eigen::MatrixXd>& w_out() const { return w_out_; }
    [[nodiscard]] const Normalizer& normalizer() const { return normalizer_; }
    [[nodiscard]] bool trained() const { return w_out_.has_value(); }

    [[nodiscard]] const Eigen::VectorXd& state() const { return r_; }
    void set_state(const Eigen::VectorXd& r);
    void reset() { r_.setZero(); }

    void set_readout(Eigen::MatrixXd w_out, Normalizer normalizer);

    /// One update with input u given in normalized coordinates.
    const Eigen::VectorXd& step(const Eigen::Ref<const Eigen::VectorXd>& u, double b);

    /// Feeds every sample of `series` (physical units) starting from the
    /// current state; column t is the state after ingesting sample t.
    Eigen::MatrixXd drive(const TimeSeries& series, double b);

    /// Fits the input normalizer and the ridge readout on all post-washout
    /// one-step-ahead pairs. Each session is driven from r = 0 with its own
    /// parameter value on the parameter channel.
    TrainingReport train(const TrainingCorpus& corpus);

    /// Synchronizes on `warmup` from r = 0 at parameter b, then feeds outputs
    /// back as inputs for `steps` samples. The member state is not touched.
    [[nodiscard]] Prediction predict(const TimeSeries& warmup, double b, std::size_t steps) const;

    /// Closed-loop run that hands each predicted sample (physical units) to
    /// `visit` without recording it; stops early when visit returns false.
    FreeRunResult free_run(const TimeSeries& warmup, double b, std::size_t steps,
                           const std::function<bool(const Eigen::VectorXd&)>& visit) const;

    /// Largest eigenvalue modulus of the adjacency matrix.
    [[nodiscard]] double spectral_radius() const;

    void save(const std::filesystem::path& path) const;
    [[nodiscard]] std::string serialize() const;
    static Reservoir load(const std::filesystem::path& path);
    static Reservoir deserialize(const std::string& bytes);

private:
    void advance(Eigen::VectorXd& r, Eigen::VectorXd& scratch, const Eigen::Ref<const Eigen::VectorXd>& u,
                 double b) const;
    void synchronize(const TimeSeries& warmup, double b, Eigen::VectorXd& r, Eigen::VectorXd& scratch) const;

    HyperParams hyper_;
    std::uint64_t seed_ = 0;
    SparseMatrix adjacency_;
    Eigen::MatrixXd w_in_;
    Eigen::VectorXd w_b_;
    std::optional<Eigen::MatrixXd> w_out_;
    Normalizer normalizer_;
    Eigen::VectorXd r_;
    Eigen::VectorXd scratch_;
};

/// Largest eigenvalue modulus of a sparse matrix (dense eigenvalue solve).
double spectral_radius(const SparseMatrix& a);

/// Ridge readout W = Y R^T (R R^T + beta I)^{-1} from accumulated Gram
/// matrices: gram = R R^T (n x n), cross = Y R^T (D x n). Throws a
/// numerical error when beta = 0 and the Gram matrix is singular.
Eigen::MatrixXd ridge_readout(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& cross, double beta);

}  // namespace tipping
