#include "tipping/reservoir/reservoir.hpp"

#include "tipping/util/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

namespace tipping {

// Layout (little-endian):
//   "TIPRES01" | u64 version | u64 n | u64 D | u64 seed | 8 x f64 hyper
//   | u64 nnz | (n+1) x u64 row offsets | nnz x u64 columns | nnz x f64 values
//   | n*D x f64 W_in (row-major) | n x f64 W_b | D x f64 mean | D x f64 scale
//   | u64 has_readout | [D*n x f64 W_out (row-major)] | n x f64 state
static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'I', 'P', 'R', 'E', 'S', '0', '1'};
constexpr std::uint64_t kVersion = 1;

class Writer {
public:
    template <class T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const auto* p = reinterpret_cast<const char*>(&v);
        out_.append(p, sizeof(T));
    }
    void put_doubles(const double* p, std::size_t count) { out_.append(reinterpret_cast<const char*>(p), count * sizeof(double)); }
    void put_bytes(const char* p, std::size_t count) { out_.append(p, count); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : bytes_(bytes) {}

    template <class T>
    T get() {
        T v;
        std::memcpy(&v, need(sizeof(T)), sizeof(T));
        return v;
    }
    void get_doubles(double* p, std::size_t count) { std::memcpy(p, need(count * sizeof(double)), count * sizeof(double)); }
    const char* need(std::size_t count) {
        if (count > bytes_.size() - pos_) throw data_error("model file: truncated");
        const char* p = bytes_.data() + pos_;
        pos_ += count;
        return p;
    }
    [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

Eigen::MatrixXd get_row_major(Reader& in, Eigen::Index rows, Eigen::Index cols) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(rows, cols);
    in.get_doubles(m.data(), static_cast<std::size_t>(rows * cols));
    return m;
}

void put_row_major(Writer& out, const Eigen::MatrixXd& m) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    out.put_doubles(rm.data(), static_cast<std::size_t>(rm.size()));
}

}  // namespace

std::string Reservoir::serialize() const {
    Writer out;
    const auto n = static_cast<std::uint64_t>(size());
    const auto d = static_cast<std::uint64_t>(dim());
    out.put_bytes(kMagic, sizeof kMagic);
    out.put(kVersion);
    out.put(n);
    out.put(d);
    out.put(seed_);
    for (double v : {hyper_.avg_degree, hyper_.spectral_radius, hyper_.sigma_in, hyper_.k_b, hyper_.b0, hyper_.alpha,
                     hyper_.beta, 0.0})
        out.put(v);

    SparseMatrix a = adjacency_;
    a.makeCompressed();
    out.put(static_cast<std::uint64_t>(a.nonZeros()));
    for (Eigen::Index i = 0; i <= a.outerSize(); ++i) out.put(static_cast<std::uint64_t>(a.outerIndexPtr()[i]));
    for (Eigen::Index k = 0; k < a.nonZeros(); ++k) out.put(static_cast<std::uint64_t>(a.innerIndexPtr()[k]));
    out.put_doubles(a.valuePtr(), static_cast<std::size_t>(a.nonZeros()));

    put_row_major(out, w_in_);
    out.put_doubles(w_b_.data(), static_cast<std::size_t>(w_b_.size()));
    out.put_doubles(normalizer_.mean.data(), static_cast<std::size_t>(d));
    out.put_doubles(normalizer_.scale.data(), static_cast<std::size_t>(d));
    out.put(static_cast<std::uint64_t>(w_out_ ? 1 : 0));
    if (w_out_) put_row_major(out, *w_out_);
    out.put_doubles(r_.data(), static_cast<std::size_t>(r_.size()));
    return out.take();
}

Reservoir Reservoir::deserialize(const std::string& bytes) {
    Reader in(bytes);
    if (std::memcmp(in.need(sizeof kMagic), kMagic, sizeof kMagic) != 0) throw data_error("model file: bad magic");
    const auto version = in.get<std::uint64_t>();
    if (version != kVersion) throw data_error("model file: unsupported version " + std::to_string(version));
    const auto n = in.get<std::uint64_t>();
    const auto d = in.get<std::uint64_t>();
    const auto seed = in.get<std::uint64_t>();
    if (n == 0 || d == 0 || n > (1u << 24) || d > (1u << 16)) throw data_error("model file: implausible dimensions");

    HyperParams hyper;
    hyper.n_nodes = n;
    hyper.avg_degree = in.get<double>();
    hyper.spectral_radius = in.get<double>();
    hyper.sigma_in = in.get<double>();
    hyper.k_b = in.get<double>();
    hyper.b0 = in.get<double>();
    hyper.alpha = in.get<double>();
    hyper.beta = in.get<double>();
    (void)in.get<double>();

    const auto nnz = in.get<std::uint64_t>();
    if (nnz > n * n) throw data_error("model file: adjacency nonzero count exceeds n^2");
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(nnz);
    std::vector<std::uint64_t> offsets(n + 1);
    for (auto& o : offsets) o = in.get<std::uint64_t>();
    std::vector<std::uint64_t> columns(nnz);
    for (auto& c : columns) c = in.get<std::uint64_t>();
    std::vector<double> values(nnz);
    in.get_doubles(values.data(), nnz);
    if (offsets.front() != 0 || offsets.back() != nnz) throw data_error("model file: corrupt adjacency offsets");
    for (std::uint64_t i = 0; i < n; ++i) {
        if (offsets[i] > offsets[i + 1]) throw data_error("model file: corrupt adjacency offsets");
        for (std::uint64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            if (columns[k] >= n) throw data_error("model file: adjacency column out of range");
            entries.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(columns[k]), values[k]);
        }
    }
    const auto ni = static_cast<Eigen::Index>(n);
    const auto di = static_cast<Eigen::Index>(d);
    SparseMatrix adjacency(ni, ni);
    adjacency.setFromTriplets(entries.begin(), entries.end());
    adjacency.makeCompressed();

    Eigen::MatrixXd w_in = get_row_major(in, ni, di);
    Eigen::VectorXd w_b(ni);
    in.get_doubles(w_b.data(), n);
    Normalizer norm{Eigen::VectorXd(di), Eigen::VectorXd(di)};
    in.get_doubles(norm.mean.data(), d);
    in.get_doubles(norm.scale.data(), d);
    const auto has_readout = in.get<std::uint64_t>();
    if (has_readout > 1) throw data_error("model file: corrupt readout flag");
    std::optional<Eigen::MatrixXd> w_out;
    if (has_readout == 1) w_out = get_row_major(in, di, ni);
    Eigen::VectorXd state(ni);
    in.get_doubles(state.data(), n);
    if (!in.done()) throw data_error("model file: trailing bytes");

    Reservoir res(hyper, std::move(adjacency), std::move(w_in), std::move(w_b), seed);
    res.hyper_ = hyper;
    res.normalizer_ = std::move(norm);
    res.w_out_ = std::move(w_out);
    res.r_ = std::move(state);
    return res;
}

void Reservoir::save(const std::filesystem::path& path) const {
    const std::string bytes = serialize();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error(ErrorKind::io, "write failed: " + path.string());
}

Reservoir Reservoir::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return deserialize(buf.str());
}

}  // namespace tipping
