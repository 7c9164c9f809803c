#include "respira/deep_embeddings.hpp"

#include "respira/csv.hpp"
#include "respira/random.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace respira {

namespace {

std::size_t window_samples(const EmbeddingConfig& c) {
    return static_cast<std::size_t>(std::llround(c.window_seconds * c.sample_rate));
}

std::size_t hop_samples(const EmbeddingConfig& c) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.hop_seconds * c.sample_rate)));
}

} // namespace

std::size_t embedding_window_count(std::size_t n_samples, const EmbeddingConfig& config) {
    const std::size_t w = window_samples(config);
    if (n_samples <= w) {
        return 1;
    }
    return 1 + (n_samples - w) / hop_samples(config);
}

std::vector<MelSpectrogram> embedding_mel_windows(const AudioClip& clip, const EmbeddingConfig& config) {
    validate_clip(clip);
    if (clip.sample_rate != config.sample_rate) {
        throw std::invalid_argument("embedding path expects audio at " + std::to_string(config.sample_rate) + " Hz");
    }
    const std::size_t w = window_samples(config);
    const std::size_t hop = hop_samples(config);
    const std::size_t count = embedding_window_count(clip.samples.size(), config);
    const MelFilterbank bank(config.n_mels, config.fft_size, config.sample_rate, 0.0, config.sample_rate / 2.0);

    std::vector<MelSpectrogram> windows;
    windows.reserve(count);
    AudioClip window;
    window.sample_rate = clip.sample_rate;
    for (std::size_t i = 0; i < count; ++i) {
        window.samples.assign(w, 0.0);
        const std::size_t offset = i * hop;
        const std::size_t available = std::min(w, clip.samples.size() - offset);
        std::copy_n(clip.samples.begin() + static_cast<std::ptrdiff_t>(offset), available, window.samples.begin());
        const auto frames = frame_signal(window, config.frame_length, config.hop_length, true);
        windows.push_back(mel_spectrogram(stft(frames, config.fft_size), bank));
    }
    return windows;
}

EmbeddingMatrix embed_windows(const AudioClip& clip, const EmbeddingRunner& runner, const EmbeddingConfig& config,
                              std::string sample_id) {
    const auto windows = embedding_mel_windows(clip, config);
    EmbeddingMatrix m;
    m.sample_id = std::move(sample_id);
    m.window_seconds = config.window_seconds;
    m.hop_seconds = config.hop_seconds;
    m.rows = windows.size();
    m.values.reserve(m.rows * kEmbeddingWidth);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        std::vector<double> out;
        try {
            out = runner.run(windows[i]);
        } catch (const std::exception& e) {
            throw std::runtime_error("embedding runner failed on window " + std::to_string(i) + ": " + e.what());
        }
        if (out.size() != kEmbeddingWidth) {
            throw std::runtime_error("embedding runner returned " + std::to_string(out.size()) +
                                     " values on window " + std::to_string(i) + ", expected 512");
        }
        m.values.insert(m.values.end(), out.begin(), out.end());
    }
    return m;
}

AggregatedEmbedding aggregate_embeddings(const EmbeddingMatrix& matrix) {
    if (matrix.rows == 0 || matrix.values.size() != matrix.rows * kEmbeddingWidth) {
        throw std::invalid_argument("aggregate_embeddings: empty or malformed matrix");
    }
    AggregatedEmbedding agg;
    agg.values.assign(kAggregatedEmbeddingWidth, 0.0);
    const double n = static_cast<double>(matrix.rows);
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        auto row = matrix.row(r);
        for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
            agg.values[d] += row[d];
        }
    }
    for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
        agg.values[d] /= n;
    }
    for (std::size_t r = 0; r < matrix.rows; ++r) {
        auto row = matrix.row(r);
        for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
            const double dev = row[d] - agg.values[d];
            agg.values[kEmbeddingWidth + d] += dev * dev;
        }
    }
    for (std::size_t d = 0; d < kEmbeddingWidth; ++d) {
        agg.values[kEmbeddingWidth + d] = std::sqrt(agg.values[kEmbeddingWidth + d] / n);
    }
    return agg;
}

// --- sidecars -------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "L3EMB1\n";

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string stem_of(const std::filesystem::path& path) {
    std::string name = path.filename().string();
    for (std::string_view ext : {std::string_view(kSidecarCsvExtension), std::string_view(kSidecarExtension)}) {
        if (ends_with(name, ext)) {
            return name.substr(0, name.size() - ext.size());
        }
    }
    return path.stem().string();
}

void check_finite(const std::vector<double>& values, const std::filesystem::path& path) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("non-finite value in embedding sidecar: " + path.string());
        }
    }
}

EmbeddingMatrix load_csv_sidecar(const std::filesystem::path& path) {
    EmbeddingMatrix m;
    m.sample_id = stem_of(path);
    for (const auto& row : csv::read_file(path.string())) {
        if (row.size() != kEmbeddingWidth) {
            throw std::runtime_error("wrong row width (" + std::to_string(row.size()) + ", expected 512) in " +
                                     path.string());
        }
        for (const auto& field : row) {
            double v = 0.0;
            const char* begin = field.data();
            const char* end = begin + field.size();
            while (begin < end && *begin == ' ') {
                ++begin;
            }
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc{} || ptr != end) {
                throw std::runtime_error("unparseable value '" + field + "' in " + path.string());
            }
            m.values.push_back(v);
        }
        ++m.rows;
    }
    if (m.rows == 0) {
        throw std::runtime_error("embedding sidecar has no rows: " + path.string());
    }
    check_finite(m.values, path);
    return m;
}

} // namespace

EmbeddingMatrix load_precomputed(const std::filesystem::path& path) {
    if (ends_with(path.filename().string(), kSidecarCsvExtension)) {
        return load_csv_sidecar(path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open embedding sidecar: " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.compare(0, kMagic.size(), kMagic) != 0) {
        throw std::runtime_error("bad magic in embedding sidecar: " + path.string());
    }
    std::size_t pos = kMagic.size();
    std::string header;
    for (;;) {
        const std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos) {
            throw std::runtime_error("truncated sidecar header: " + path.string());
        }
        std::string line = bytes.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.front() == '#') {
            continue;
        }
        header = std::move(line);
        break;
    }
    std::size_t rows = 0, cols = 0;
    std::string dtype;
    {
        std::istringstream hs(header);
        std::string token;
        while (hs >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("malformed sidecar header '" + header + "': " + path.string());
            }
            const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
            if (key == "rows") {
                rows = std::stoul(value);
            } else if (key == "cols") {
                cols = std::stoul(value);
            } else if (key == "dtype") {
                dtype = value;
            }
        }
    }
    if (dtype != "f32le") {
        throw std::runtime_error("unsupported sidecar dtype '" + dtype + "': " + path.string());
    }
    if (cols != kEmbeddingWidth) {
        throw std::runtime_error("wrong row width (" + std::to_string(cols) + ", expected 512) in " + path.string());
    }
    if (rows == 0) {
        throw std::runtime_error("embedding sidecar has no rows: " + path.string());
    }
    const std::size_t expected = rows * cols * 4;
    if (bytes.size() - pos != expected) {
        throw std::runtime_error("sidecar payload size mismatch (" + std::to_string(bytes.size() - pos) +
                                 " bytes, expected " + std::to_string(expected) + "): " + path.string());
    }
    EmbeddingMatrix m;
    m.sample_id = stem_of(path);
    m.rows = rows;
    m.values.resize(rows * cols);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(p[4 * i]) | (static_cast<std::uint32_t>(p[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(p[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(p[4 * i + 3]) << 24);
        m.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    check_finite(m.values, path);
    return m;
}

void write_precomputed(const std::filesystem::path& path, const EmbeddingMatrix& matrix,
                       const std::vector<std::string>& comments) {
    if (matrix.rows == 0 || matrix.values.size() != matrix.rows * kEmbeddingWidth) {
        throw std::invalid_argument("write_precomputed: malformed matrix");
    }
    std::string out(kMagic);
    for (const auto& c : comments) {
        out += "# " + c + "\n";
    }
    out += "rows=" + std::to_string(matrix.rows) + " cols=512 dtype=f32le\n";
    for (double v : matrix.values) {
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 0; b < 4; ++b) {
            out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
        }
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write embedding sidecar: " + path.string());
    }
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::filesystem::path find_sidecar(const std::filesystem::path& dir, const std::string& sample_id) {
    for (const char* ext : {kSidecarExtension, kSidecarCsvExtension}) {
        auto p = dir / (sample_id + ext);
        if (std::filesystem::exists(p)) {
            return p;
        }
    }
    return {};
}

// --- stub runner ----------------------------------------------------------------------

StubRunner::StubRunner(std::uint64_t seed, std::size_t taps_per_output) : seed_(seed), taps_(taps_per_output) {
    if (taps_ == 0) {
        throw std::invalid_argument("StubRunner: taps_per_output must be positive");
    }
}

std::shared_ptr<const StubRunner::Projection> StubRunner::projection_for(std::size_t input_size) const {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(input_size);
    if (it != cache_.end()) {
        return it->second;
    }
    auto p = std::make_shared<Projection>();
    p->taps = std::min(taps_, input_size);
    p->index.resize(kEmbeddingWidth * p->taps);
    p->weight.resize(kEmbeddingWidth * p->taps);
    const double scale = 1.0 / std::sqrt(static_cast<double>(p->taps));
    for (std::size_t j = 0; j < kEmbeddingWidth; ++j) {
        Rng rng(derive_seed(seed_, "stub-projection", {input_size, j}));
        for (std::size_t t = 0; t < p->taps; ++t) {
            p->index[j * p->taps + t] = static_cast<std::uint32_t>(rng.index(input_size));
            p->weight[j * p->taps + t] = (rng.next() & 1u) ? scale : -scale;
        }
    }
    cache_.emplace(input_size, p);
    return p;
}

std::vector<double> StubRunner::project(std::span<const double> flat) const {
    if (flat.empty()) {
        throw std::invalid_argument("StubRunner: empty input window");
    }
    const auto p = projection_for(flat.size());
    std::vector<double> out(kEmbeddingWidth, 0.0);
    for (std::size_t j = 0; j < kEmbeddingWidth; ++j) {
        double acc = 0.0;
        for (std::size_t t = 0; t < p->taps; ++t) {
            acc += p->weight[j * p->taps + t] * flat[p->index[j * p->taps + t]];
        }
        out[j] = acc;
    }
    return out;
}

std::vector<double> StubRunner::run(const MelSpectrogram& window) const {
    const auto& flat = window.energies;
    double norm = 0.0;
    for (double v : flat) {
        norm += v * v;
    }
    norm = std::sqrt(norm);
    std::vector<double> normalised(flat.size(), 0.0);
    if (norm > 0.0) {
        for (std::size_t i = 0; i < flat.size(); ++i) {
            normalised[i] = flat[i] / norm;
        }
    }
    auto out = project(normalised);
    for (double& v : out) {
        v = std::max(0.0, v);
    }
    return out;
}

} // namespace respira
