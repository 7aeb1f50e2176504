#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace tipping {

/// Samples stored one per row so each state vector is contiguous.
using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniformly sampled multivariate trajectory recorded at one bifurcation-parameter value.
struct TimeSeries {
    double dt = 1.0;
    double param = 0.0;
    StateMatrix states;

    [[nodiscard]] std::size_t length() const { return static_cast<std::size_t>(states.rows()); }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(states.cols()); }

    [[nodiscard]] Eigen::VectorXd sample(std::size_t k) const { return states.row(static_cast<Eigen::Index>(k)).transpose(); }

    /// Contiguous sub-series [begin, begin + count).
    [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t count) const;

    /// Throws a data error unless dt > 0, length >= 2 and every entry is finite.
    void validate() const;

    [[nodiscard]] Eigen::VectorXd column_min() const;
    [[nodiscard]] Eigen::VectorXd column_max() const;
    [[nodiscard]] Eigen::VectorXd column_mean() const;
    [[nodiscard]] Eigen::VectorXd column_std() const;
};

/// Writes `t,<names...>,param` with shortest round-trip decimals. Names
/// default to x1..xD.
void write_csv(const TimeSeries& series, const std::filesystem::path& path,
               const std::vector<std::string>& coord_names = {});

std::string to_csv(const TimeSeries& series, const std::vector<std::string>& coord_names = {});

/// Parses the format produced by write_csv. dt and param are recovered from the
/// t and param columns; malformed input raises a data error naming the file and line.
TimeSeries read_csv(const std::filesystem::path& path);

TimeSeries parse_csv(const std::string& text, const std::string& source_name);

}  // namespace tipping
