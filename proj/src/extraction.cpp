#include "respira/extraction.hpp"

#include "respira/parallel.hpp"

#include <charconv>
#include <mutex>
#include <optional>
#include <stdexcept>

namespace respira {

RunnerSpec RunnerSpec::parse(std::string_view text) {
    RunnerSpec spec;
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
    if (kind == "stub") {
        spec.kind = Kind::Stub;
        if (!arg.empty()) {
            auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), spec.seed);
            if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
                throw std::invalid_argument("invalid stub runner seed '" + std::string(arg) + "'");
            }
        }
        return spec;
    }
    if (kind == "sidecar") {
        if (arg.empty()) {
            throw std::invalid_argument("sidecar runner needs a directory: sidecar:<dir>");
        }
        spec.kind = Kind::Sidecar;
        spec.sidecar_dir = std::string(arg);
        return spec;
    }
    throw std::invalid_argument("unknown runner '" + std::string(text) + "' (expected stub:<seed> or sidecar:<dir>)");
}

std::string RunnerSpec::to_string() const {
    return kind == Kind::Stub ? "stub:" + std::to_string(seed) : "sidecar:" + sidecar_dir.string();
}

AcousticFeatureVector extract_acoustic(const AudioClip& clip, double trim_top_db) {
    const AudioClip resampled = resample(clip, kAcousticSampleRate);
    const TrimResult trimmed = trim_silence(resampled, trim_top_db);
    return acoustic_feature_vector(trimmed.clip);
}

AggregatedEmbedding extract_embedding(const AudioClip& clip, const EmbeddingRunner& runner, double trim_top_db) {
    const EmbeddingConfig cfg;
    const AudioClip resampled = resample(clip, cfg.sample_rate);
    const TrimResult trimmed = trim_silence(resampled, trim_top_db);
    return aggregate_embeddings(embed_windows(trimmed.clip, runner, cfg));
}

ExtractionReport extract_features(const Manifest& manifest, const std::filesystem::path& out_dir,
                                  const ExtractionOptions& options) {
    FeatureStore store = FeatureStore::load(out_dir);
    std::unique_ptr<StubRunner> stub;
    if (options.embeddings && options.runner.kind == RunnerSpec::Kind::Stub) {
        stub = std::make_unique<StubRunner>(options.runner.seed);
    }

    const std::size_t n = manifest.records.size();
    std::vector<std::optional<std::vector<double>>> acoustic(n), embedding(n);
    std::vector<std::vector<ExtractionFailure>> failures(n);
    std::vector<char> reused(n, 0);

    parallel_for(n, options.jobs, [&](std::size_t i) {
        const auto& rec = manifest.records[i];
        const bool need_acoustic = options.acoustic && (options.force || !store.has_acoustic(rec.sample_id));
        const bool need_embedding = options.embeddings && (options.force || !store.has_embedding(rec.sample_id));
        if (!need_acoustic && !need_embedding) {
            reused[i] = 1;
            return;
        }
        std::optional<AudioClip> clip;
        auto load = [&]() -> const AudioClip& {
            if (!clip) {
                clip = load_wav(resolve_audio_path(manifest, rec));
            }
            return *clip;
        };
        if (need_acoustic) {
            try {
                acoustic[i] = extract_acoustic(load(), options.trim_top_db).values;
            } catch (const std::exception& e) {
                failures[i].push_back({rec.sample_id, "acoustic", e.what()});
            }
        }
        if (need_embedding) {
            try {
                if (options.runner.kind == RunnerSpec::Kind::Sidecar) {
                    const auto path = find_sidecar(options.runner.sidecar_dir, rec.sample_id);
                    if (path.empty()) {
                        throw std::runtime_error("no sidecar for sample in " + options.runner.sidecar_dir.string());
                    }
                    embedding[i] = aggregate_embeddings(load_precomputed(path)).values;
                } else {
                    embedding[i] = extract_embedding(load(), *stub, options.trim_top_db).values;
                }
            } catch (const std::exception& e) {
                failures[i].push_back({rec.sample_id, "embedding", e.what()});
            }
        }
    });

    ExtractionReport report;
    bool acoustic_changed = false, embedding_changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = manifest.records[i].sample_id;
        if (acoustic[i]) {
            store.set_acoustic(id, std::move(*acoustic[i]));
            ++report.acoustic_computed;
            acoustic_changed = true;
        }
        if (embedding[i]) {
            store.set_embedding(id, std::move(*embedding[i]));
            ++report.embeddings_computed;
            embedding_changed = true;
        }
        report.reused += static_cast<std::size_t>(reused[i]);
        report.failures.insert(report.failures.end(), failures[i].begin(), failures[i].end());
    }
    if (acoustic_changed) {
        store.save_acoustic(out_dir, manifest);
    }
    if (embedding_changed) {
        store.save_embeddings(out_dir, manifest);
    }
    return report;
}

} // namespace respira
