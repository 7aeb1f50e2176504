#include "tipping/dynsys/time_series.hpp"

#include "tipping/util/error.hpp"
#include "tipping/util/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace tipping {

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > length()) throw data_error("TimeSeries::slice: range exceeds series length");
    TimeSeries out;
    out.dt = dt;
    out.param = param;
    out.states = states.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
    return out;
}

void TimeSeries::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw data_error("time series: dt must be positive and finite");
    if (length() < 2) throw data_error("time series: need at least 2 samples");
    if (dim() < 1) throw data_error("time series: need at least one coordinate");
    if (!states.allFinite()) throw data_error("time series: non-finite state");
}

Eigen::VectorXd TimeSeries::column_min() const { return states.colwise().minCoeff().transpose(); }
Eigen::VectorXd TimeSeries::column_max() const { return states.colwise().maxCoeff().transpose(); }
Eigen::VectorXd TimeSeries::column_mean() const { return states.colwise().mean().transpose(); }

Eigen::VectorXd TimeSeries::column_std() const {
    const Eigen::RowVectorXd mean = states.colwise().mean();
    return ((states.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(length()))
        .sqrt()
        .transpose();
}

std::string to_csv(const TimeSeries& series, const std::vector<std::string>& coord_names) {
    if (!coord_names.empty() && coord_names.size() != series.dim())
        throw data_error("to_csv: coordinate name count does not match dimension");
    std::string out = "t";
    for (std::size_t j = 0; j < series.dim(); ++j) {
        out += ',';
        out += coord_names.empty() ? "x" + std::to_string(j + 1) : coord_names[j];
    }
    out += ",param\n";
    const std::string param = format_double(series.param);
    for (std::size_t k = 0; k < series.length(); ++k) {
        out += format_double(static_cast<double>(k) * series.dt);
        for (std::size_t j = 0; j < series.dim(); ++j) {
            out += ',';
            out += format_double(series.states(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
        }
        out += ',';
        out += param;
        out += '\n';
    }
    return out;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path,
               const std::vector<std::string>& coord_names) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    os << to_csv(series, coord_names);
    if (!os) throw Error(ErrorKind::io, "write failed: " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, const std::string& where) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw data_error(where + ": cannot parse number '" + std::string(field) + "'");
    return value;
}

}  // namespace

TimeSeries parse_csv(const std::string& text, const std::string& source_name) {
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw data_error(source_name + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    if (header.size() < 3 || header.front() != "t" || header.back() != "param")
        throw data_error(source_name + ":1: header must be t,<coordinates...>,param");
    const std::size_t dim = header.size() - 2;

    std::vector<double> values;
    std::vector<double> times;
    double param = 0.0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw data_error(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        times.push_back(parse_number(fields.front(), where));
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = parse_number(fields[j + 1], where);
            if (!std::isfinite(v)) throw data_error(where + ": non-finite value");
            values.push_back(v);
        }
        const double p = parse_number(fields.back(), where);
        if (times.size() == 1) {
            param = p;
        } else if (p != param) {
            throw data_error(where + ": param column must be constant within a file");
        }
    }
    if (times.size() < 2) throw data_error(source_name + ": need at least 2 samples");

    TimeSeries out;
    out.param = param;
    out.dt = times[1] - times[0];
    if (!(out.dt > 0.0)) throw data_error(source_name + ":3: time must increase");
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double expected = static_cast<double>(k) * out.dt + times[0];
        if (std::abs(times[k] - expected) > 1e-6 * std::max(1.0, std::abs(expected)))
            throw data_error(source_name + ":" + std::to_string(k + 2) + ": sampling interval is not constant");
    }
    out.states = Eigen::Map<const StateMatrix>(values.data(), static_cast<Eigen::Index>(times.size()),
                                               static_cast<Eigen::Index>(dim));
    return out;
}

TimeSeries read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_csv(buf.str(), path.string());
}

}  // namespace tipping
