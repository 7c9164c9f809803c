#include "respira/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <stdexcept>

namespace respira {

namespace {

constexpr char kMagic[5] = {'R', 'S', 'P', 'M', '1'};
constexpr std::size_t kHeaderSize = 12;
constexpr std::size_t kEntrySize = 20;

[[noreturn]] void corrupt(const std::string& what) { throw std::runtime_error("corrupt model container: " + what); }

template <typename T>
void put_le(Bytes& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }
}

template <typename T>
T get_le(std::span<const std::uint8_t> b, std::size_t at) {
    if (at + sizeof(T) > b.size()) {
        corrupt("truncated");
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    }
    return static_cast<T>(v);
}

class Writer {
public:
    explicit Writer(ContainerKind kind) : kind_(kind) {}

    void doubles(std::uint32_t id, const std::vector<double>& values) {
        Bytes payload;
        payload.reserve(values.size() * 8);
        for (double v : values) {
            put_le(payload, std::bit_cast<std::uint64_t>(v));
        }
        raw(id, std::move(payload));
    }

    void raw(std::uint32_t id, Bytes payload) { sections_.emplace_back(id, std::move(payload)); }

    Bytes finish() const {
        Bytes out(kMagic, kMagic + 5);
        out.push_back(static_cast<std::uint8_t>(kind_));
        put_le<std::uint16_t>(out, kContainerVersion);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sections_.size()));
        std::uint64_t offset = kHeaderSize + kEntrySize * sections_.size();
        for (const auto& [id, payload] : sections_) {
            put_le<std::uint32_t>(out, id);
            put_le<std::uint64_t>(out, offset);
            put_le<std::uint64_t>(out, payload.size());
            offset += payload.size();
        }
        for (const auto& s : sections_) {
            out.insert(out.end(), s.second.begin(), s.second.end());
        }
        return out;
    }

private:
    ContainerKind kind_;
    std::vector<std::pair<std::uint32_t, Bytes>> sections_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, ContainerKind expected) : bytes_(bytes) {
        if (peek_container_kind(bytes) != expected) {
            corrupt("unexpected kind tag " + std::to_string(static_cast<int>(bytes[5])));
        }
        if (get_le<std::uint16_t>(bytes, 6) != kContainerVersion) {
            corrupt("unsupported version");
        }
        const auto count = get_le<std::uint32_t>(bytes, 8);
        if (kHeaderSize + static_cast<std::uint64_t>(count) * kEntrySize > bytes.size()) {
            corrupt("section table exceeds container");
        }
        for (std::uint32_t s = 0; s < count; ++s) {
            const std::size_t at = kHeaderSize + s * kEntrySize;
            const auto id = get_le<std::uint32_t>(bytes, at);
            const auto off = get_le<std::uint64_t>(bytes, at + 4);
            const auto len = get_le<std::uint64_t>(bytes, at + 12);
            if (off > bytes.size() || len > bytes.size() - off) {
                corrupt("section " + std::to_string(id) + " out of range");
            }
            sections_[id] = bytes.subspan(off, len);
        }
    }

    std::span<const std::uint8_t> raw(std::uint32_t id) const {
        auto it = sections_.find(id);
        if (it == sections_.end()) {
            corrupt("missing section " + std::to_string(id));
        }
        return it->second;
    }

    std::vector<double> doubles(std::uint32_t id, std::size_t expected_count = SIZE_MAX) const {
        const auto payload = raw(id);
        if (payload.size() % 8 != 0) {
            corrupt("section " + std::to_string(id) + " is not a whole number of f64 values");
        }
        std::vector<double> out(payload.size() / 8);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::bit_cast<double>(get_le<std::uint64_t>(payload, 8 * i));
        }
        if (expected_count != SIZE_MAX && out.size() != expected_count) {
            corrupt("section " + std::to_string(id) + " has " + std::to_string(out.size()) + " values, expected " +
                    std::to_string(expected_count));
        }
        return out;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::map<std::uint32_t, std::span<const std::uint8_t>> sections_;
};

std::size_t as_count(double v) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
        corrupt("invalid count field");
    }
    return static_cast<std::size_t>(v);
}

double seed_lo(std::uint64_t s) { return static_cast<double>(s & 0xFFFFFFFFu); }
double seed_hi(std::uint64_t s) { return static_cast<double>(s >> 32); }
std::uint64_t seed_from(double lo, double hi) {
    return (static_cast<std::uint64_t>(as_count(hi)) << 32) | static_cast<std::uint64_t>(as_count(lo));
}

void append_matrix(std::vector<double>& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out.push_back(m(i, j));
        }
    }
}

Matrix read_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) {
        corrupt("matrix payload size mismatch");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i * cols + j];
        }
    }
    return m;
}

constexpr std::size_t kNodeWidth = 9;

void write_trees(Writer& w, std::uint32_t counts_id, std::uint32_t nodes_id, const std::vector<DecisionTree>& trees) {
    std::vector<double> counts, nodes;
    for (const auto& t : trees) {
        counts.push_back(static_cast<double>(t.nodes.size()));
        for (const auto& n : t.nodes) {
            nodes.insert(nodes.end(), {static_cast<double>(n.feature), n.threshold, static_cast<double>(n.left),
                                       static_cast<double>(n.right), n.impurity, n.n_samples, n.weighted_n_samples,
                                       n.negative, n.positive});
        }
    }
    w.doubles(counts_id, counts);
    w.doubles(nodes_id, nodes);
}

std::vector<DecisionTree> read_trees(const Reader& r, std::uint32_t counts_id, std::uint32_t nodes_id,
                                     std::size_t n_trees, std::size_t n_features) {
    const auto counts = r.doubles(counts_id, n_trees);
    std::size_t total = 0;
    for (double c : counts) {
        total += as_count(c);
    }
    const auto nodes = r.doubles(nodes_id, total * kNodeWidth);
    std::vector<DecisionTree> trees(n_trees);
    std::size_t at = 0;
    for (std::size_t t = 0; t < n_trees; ++t) {
        const std::size_t count = as_count(counts[t]);
        if (count == 0) {
            corrupt("empty tree");
        }
        for (std::size_t k = 0; k < count; ++k, at += kNodeWidth) {
            TreeNode n;
            n.feature = static_cast<int>(nodes[at]);
            n.threshold = nodes[at + 1];
            n.left = static_cast<int>(nodes[at + 2]);
            n.right = static_cast<int>(nodes[at + 3]);
            n.impurity = nodes[at + 4];
            n.n_samples = nodes[at + 5];
            n.weighted_n_samples = nodes[at + 6];
            n.negative = nodes[at + 7];
            n.positive = nodes[at + 8];
            if (!n.is_leaf()) {
                const auto c = static_cast<int>(count);
                if (static_cast<std::size_t>(n.feature) >= n_features || n.left <= static_cast<int>(k) ||
                    n.right <= static_cast<int>(k) || n.left >= c || n.right >= c) {
                    corrupt("invalid tree node");
                }
            }
            trees[t].nodes.push_back(n);
        }
    }
    return trees;
}

} // namespace

ContainerKind peek_container_kind(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 5) != 0) {
        corrupt("bad magic");
    }
    const auto k = bytes[5];
    if (k < 1 || k > 7) {
        corrupt("unknown kind tag " + std::to_string(k));
    }
    return static_cast<ContainerKind>(k);
}

Bytes serialize_model(const TrainedModel& model) {
    const double nf = static_cast<double>(model.n_features);
    const double lo = seed_lo(model.seed), hi = seed_hi(model.seed);
    return std::visit(
        [&](const auto& m) -> Bytes {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SvmModel>) {
                Writer w(ContainerKind::Svm);
                const auto& p = m.params;
                w.doubles(1, {nf, lo, hi, static_cast<double>(p.kernel), p.C, p.gamma, static_cast<double>(p.degree),
                              p.tolerance, m.bias, static_cast<double>(m.dual_coef.size())});
                w.doubles(2, m.dual_coef);
                std::vector<double> sv;
                append_matrix(sv, m.support_vectors);
                w.doubles(3, sv);
                return w.finish();
            } else if constexpr (std::is_same_v<M, LogRegModel>) {
                Writer w(ContainerKind::LogReg);
                const auto& p = m.params;
                w.doubles(1, {nf, lo, hi, static_cast<double>(p.penalty), p.C, static_cast<double>(p.max_iterations),
                              p.decrease_tolerance, p.gradient_tolerance, m.bias});
                w.doubles(2, std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size()));
                return w.finish();
            } else if constexpr (std::is_same_v<M, ForestModel>) {
                Writer w(ContainerKind::RandomForest);
                const auto& p = m.params;
                w.doubles(1, {nf, lo, hi, static_cast<double>(p.n_estimators), static_cast<double>(p.min_samples_split),
                              static_cast<double>(p.max_depth), static_cast<double>(p.criterion),
                              static_cast<double>(m.trees.size())});
                write_trees(w, 2, 3, m.trees);
                return w.finish();
            } else {
                Writer w(ContainerKind::AdaBoost);
                const auto& p = m.params;
                w.doubles(1, {nf, lo, hi, static_cast<double>(p.n_estimators), p.learning_rate,
                              static_cast<double>(m.stumps.size())});
                w.doubles(2, m.alphas);
                w.doubles(3, m.errors);
                write_trees(w, 4, 5, m.stumps);
                return w.finish();
            }
        },
        model.model);
}

TrainedModel deserialize_model(std::span<const std::uint8_t> bytes) {
    const auto kind = peek_container_kind(bytes);
    TrainedModel t;
    switch (kind) {
    case ContainerKind::Svm: {
        Reader r(bytes, kind);
        const auto meta = r.doubles(1, 10);
        t.n_features = as_count(meta[0]);
        t.seed = seed_from(meta[1], meta[2]);
        SvmModel m;
        m.params.kernel = static_cast<SvmKernel>(as_count(meta[3]));
        m.params.C = meta[4];
        m.params.gamma = meta[5];
        m.params.degree = static_cast<int>(as_count(meta[6]));
        m.params.tolerance = meta[7];
        m.bias = meta[8];
        const std::size_t nsv = as_count(meta[9]);
        m.dual_coef = r.doubles(2, nsv);
        m.support_vectors = read_matrix(r.doubles(3), nsv, t.n_features);
        if (as_count(meta[3]) > 2) {
            corrupt("unknown kernel");
        }
        t.model = std::move(m);
        break;
    }
    case ContainerKind::LogReg: {
        Reader r(bytes, kind);
        const auto meta = r.doubles(1, 9);
        t.n_features = as_count(meta[0]);
        t.seed = seed_from(meta[1], meta[2]);
        LogRegModel m;
        m.params.penalty = as_count(meta[3]) == 0 ? Penalty::L1 : Penalty::L2;
        m.params.C = meta[4];
        m.params.max_iterations = static_cast<int>(as_count(meta[5]));
        m.params.decrease_tolerance = meta[6];
        m.params.gradient_tolerance = meta[7];
        m.bias = meta[8];
        const auto w = r.doubles(2, t.n_features);
        m.weights = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
        t.model = std::move(m);
        break;
    }
    case ContainerKind::RandomForest: {
        Reader r(bytes, kind);
        const auto meta = r.doubles(1, 8);
        t.n_features = as_count(meta[0]);
        t.seed = seed_from(meta[1], meta[2]);
        ForestModel m;
        m.params.n_estimators = static_cast<int>(as_count(meta[3]));
        m.params.min_samples_split = static_cast<int>(as_count(meta[4]));
        m.params.max_depth = static_cast<int>(as_count(meta[5]));
        m.params.criterion = as_count(meta[6]) == 0 ? SplitCriterion::Gini : SplitCriterion::Entropy;
        m.trees = read_trees(r, 2, 3, as_count(meta[7]), t.n_features);
        t.model = std::move(m);
        break;
    }
    case ContainerKind::AdaBoost: {
        Reader r(bytes, kind);
        const auto meta = r.doubles(1, 6);
        t.n_features = as_count(meta[0]);
        t.seed = seed_from(meta[1], meta[2]);
        AdaBoostModel m;
        m.params.n_estimators = static_cast<int>(as_count(meta[3]));
        m.params.learning_rate = meta[4];
        const std::size_t n = as_count(meta[5]);
        m.alphas = r.doubles(2, n);
        m.errors = r.doubles(3, n);
        m.stumps = read_trees(r, 4, 5, n, t.n_features);
        t.model = std::move(m);
        break;
    }
    default: corrupt("container does not hold a classifier");
    }
    return t;
}

std::size_t model_size(const TrainedModel& model) { return serialize_model(model).size(); }

Bytes serialize_standardizer(const Standardizer& s) {
    Writer w(ContainerKind::Standardizer);
    w.doubles(1, std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size()));
    w.doubles(2, std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size()));
    return w.finish();
}

Standardizer deserialize_standardizer(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, ContainerKind::Standardizer);
    const auto mean = r.doubles(1);
    const auto scale = r.doubles(2, mean.size());
    Standardizer s;
    s.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
    return s;
}

Bytes serialize_pca(const PcaModel& pca) {
    Writer w(ContainerKind::Pca);
    w.doubles(1, {static_cast<double>(pca.components.rows()), static_cast<double>(pca.components.cols()),
                  pca.target_variance});
    w.doubles(2, std::vector<double>(pca.mean.data(), pca.mean.data() + pca.mean.size()));
    std::vector<double> comps;
    append_matrix(comps, pca.components);
    w.doubles(3, comps);
    w.doubles(4, pca.explained_variance);
    w.doubles(5, pca.explained_variance_ratio);
    return w.finish();
}

PcaModel deserialize_pca(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, ContainerKind::Pca);
    const auto meta = r.doubles(1, 3);
    const std::size_t k = as_count(meta[0]), d = as_count(meta[1]);
    PcaModel p;
    p.target_variance = meta[2];
    const auto mean = r.doubles(2, d);
    p.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(d));
    p.components = read_matrix(r.doubles(3), k, d);
    p.explained_variance = r.doubles(4, k);
    p.explained_variance_ratio = r.doubles(5, k);
    return p;
}

std::vector<double> Pipeline::scores(const Matrix& raw) const {
    return predict_scores(classifier, pca.transform(standardizer.transform(raw)));
}

Bytes serialize_pipeline(const Pipeline& p) {
    Writer w(ContainerKind::Pipeline);
    w.raw(1, serialize_standardizer(p.standardizer));
    w.raw(2, serialize_pca(p.pca));
    w.raw(3, serialize_model(p.classifier));
    return w.finish();
}

Pipeline deserialize_pipeline(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, ContainerKind::Pipeline);
    Pipeline p;
    p.standardizer = deserialize_standardizer(r.raw(1));
    p.pca = deserialize_pca(r.raw(2));
    p.classifier = deserialize_model(r.raw(3));
    return p;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Bytes read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace respira
