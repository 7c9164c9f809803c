#include "respira/deep_embeddings.hpp"
#include "respira/extraction.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace respira;
using respira::test::sine;
using respira::test::TempDir;

namespace {

EmbeddingMatrix random_matrix(std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    EmbeddingMatrix m;
    m.sample_id = "x";
    m.rows = rows;
    m.values.resize(rows * kEmbeddingWidth);
    for (auto& v : m.values) {
        v = static_cast<float>(rng.normal());
    }
    return m;
}

class CountingRunner final : public EmbeddingRunner {
public:
    std::vector<double> run(const MelSpectrogram& w) const override {
        std::vector<double> out(kEmbeddingWidth, 0.0);
        out[0] = static_cast<double>(w.n_frames);
        out[1] = static_cast<double>(w.n_mels);
        out[2] = w.energies.empty() ? 0.0 : w.energies[0];
        return out;
    }
};

} // namespace

TEST(Embeddings, WindowCountFormula) {
    // one window up to a second, then one more per 0.1 s hop that fits
    EXPECT_EQ(embedding_window_count(1), 1u);
    EXPECT_EQ(embedding_window_count(48000), 1u);
    EXPECT_EQ(embedding_window_count(48000 + 4799), 1u);
    EXPECT_EQ(embedding_window_count(48000 + 4800), 2u);
    EXPECT_EQ(embedding_window_count(96000), 11u);
    EXPECT_EQ(embedding_window_count(144000), 21u);
}

TEST(Embeddings, WindowsAreOrderedAndShaped) {
    const auto clip = sine(500.0, 48000, 2.0);
    const auto wins = embedding_mel_windows(clip);
    ASSERT_EQ(wins.size(), 11u);
    for (const auto& w : wins) {
        EXPECT_EQ(w.n_mels, 256u);
        EXPECT_EQ(w.n_frames, wins[0].n_frames);
    }
    const auto m = embed_windows(clip, CountingRunner{}, {}, "tone");
    EXPECT_EQ(m.rows, 11u);
    EXPECT_EQ(m.sample_id, "tone");
    EXPECT_EQ(m.row(3)[1], 256.0);
}

TEST(Embeddings, RejectsWrongSampleRate) {
    EXPECT_THROW(embed_windows(sine(500.0, 22050, 1.0), CountingRunner{}), std::invalid_argument);
}

TEST(Embeddings, AggregateIsMeanThenPopulationStd) {
    EmbeddingMatrix m;
    m.rows = 3;
    m.values.assign(3 * kEmbeddingWidth, 0.0);
    for (std::size_t r = 0; r < 3; ++r) {
        m.values[r * kEmbeddingWidth + 0] = static_cast<double>(r + 1); // 1 2 3
        m.values[r * kEmbeddingWidth + 511] = 7.0;
    }
    const auto a = aggregate_embeddings(m);
    ASSERT_EQ(a.values.size(), 1024u);
    EXPECT_DOUBLE_EQ(a.values[0], 2.0);
    EXPECT_NEAR(a.values[512], std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_DOUBLE_EQ(a.values[511], 7.0);
    EXPECT_DOUBLE_EQ(a.values[1023], 0.0);
    EXPECT_THROW(aggregate_embeddings(EmbeddingMatrix{}), std::invalid_argument);
}

TEST(Embeddings, StubRunnerIsDeterministicAndNonNegative) {
    const auto clip = sine(700.0, 48000, 1.3);
    StubRunner a(5), b(5), c(6);
    const auto ma = embed_windows(clip, a);
    const auto mb = embed_windows(clip, b);
    const auto mc = embed_windows(clip, c);
    EXPECT_EQ(ma.values, mb.values);
    EXPECT_NE(ma.values, mc.values);
    for (double v : ma.values) {
        ASSERT_GE(v, 0.0);
    }
}

TEST(Embeddings, StubProjectionIsLinear) {
    StubRunner r(1, 16);
    std::vector<double> x(100), y(100), s(100);
    Rng rng(8);
    for (std::size_t i = 0; i < 100; ++i) {
        x[i] = rng.normal();
        y[i] = rng.normal();
        s[i] = 2.0 * x[i] - y[i];
    }
    const auto px = r.project(x), py = r.project(y), ps = r.project(s);
    for (std::size_t j = 0; j < kEmbeddingWidth; ++j) {
        EXPECT_NEAR(ps[j], 2.0 * px[j] - py[j], 1e-12);
    }
}

TEST(Sidecar, BinaryRoundTripWithComments) {
    TempDir dir("l3");
    const auto m = random_matrix(4, 1);
    write_precomputed(dir / "abc.l3emb", m, {"model=l3 audio", "content=env"});
    const auto back = load_precomputed(dir / "abc.l3emb");
    EXPECT_EQ(back.sample_id, "abc");
    EXPECT_EQ(back.rows, 4u);
    EXPECT_EQ(back.values, m.values);
    std::ifstream in(dir / "abc.l3emb", std::ios::binary);
    std::string magic, comment;
    std::getline(in, magic);
    std::getline(in, comment);
    EXPECT_EQ(magic, "L3EMB1");
    EXPECT_EQ(comment, "# model=l3 audio");
    EXPECT_EQ(std::filesystem::file_size(dir / "abc.l3emb"),
              std::string("L3EMB1\n# model=l3 audio\n# content=env\nrows=4 cols=512 dtype=f32le\n").size() +
                  4u * 512u * 4u);
}

TEST(Sidecar, CsvFlavour) {
    TempDir dir("l3csv");
    {
        std::ofstream out(dir / "s1.l3emb.csv");
        for (int r = 0; r < 2; ++r) {
            for (int j = 0; j < 512; ++j) {
                out << (j ? "," : "") << (r * 1000 + j) * 0.5;
            }
            out << "\n";
        }
    }
    const auto m = load_precomputed(dir / "s1.l3emb.csv");
    EXPECT_EQ(m.sample_id, "s1");
    EXPECT_EQ(m.rows, 2u);
    EXPECT_DOUBLE_EQ(m.row(1)[3], 501.5);
    EXPECT_EQ(find_sidecar(dir.path(), "s1"), dir / "s1.l3emb.csv");
    EXPECT_TRUE(find_sidecar(dir.path(), "s2").empty());
}

TEST(Sidecar, MalformedFilesAreRejected) {
    TempDir dir("l3bad");
    std::ofstream(dir / "magic.l3emb") << "L3EMB2\nrows=1 cols=512 dtype=f32le\n";
    EXPECT_THROW(load_precomputed(dir / "magic.l3emb"), std::runtime_error);
    std::ofstream(dir / "cols.l3emb") << "L3EMB1\nrows=1 cols=128 dtype=f32le\n" << std::string(512, '\0');
    EXPECT_THROW(load_precomputed(dir / "cols.l3emb"), std::runtime_error);
    std::ofstream(dir / "short.l3emb") << "L3EMB1\nrows=2 cols=512 dtype=f32le\n" << std::string(2048, '\0');
    EXPECT_THROW(load_precomputed(dir / "short.l3emb"), std::runtime_error);
    std::ofstream(dir / "dtype.l3emb") << "L3EMB1\nrows=1 cols=512 dtype=f64le\n" << std::string(4096, '\0');
    EXPECT_THROW(load_precomputed(dir / "dtype.l3emb"), std::runtime_error);
    std::ofstream(dir / "w.l3emb.csv") << "1,2,3\n";
    EXPECT_THROW(load_precomputed(dir / "w.l3emb.csv"), std::runtime_error);
    EXPECT_THROW(load_precomputed(dir / "none.l3emb"), std::runtime_error);
}

TEST(Sidecar, RunnerSpecParsing) {
    EXPECT_EQ(RunnerSpec::parse("stub:42").seed, 42u);
    EXPECT_EQ(RunnerSpec::parse("stub").kind, RunnerSpec::Kind::Stub);
    const auto s = RunnerSpec::parse("sidecar:/tmp/x");
    EXPECT_EQ(s.kind, RunnerSpec::Kind::Sidecar);
    EXPECT_EQ(s.sidecar_dir, "/tmp/x");
    EXPECT_EQ(s.to_string(), "sidecar:/tmp/x");
    EXPECT_THROW(RunnerSpec::parse("vggish"), std::invalid_argument);
    EXPECT_THROW(RunnerSpec::parse("stub:abc"), std::invalid_argument);
    EXPECT_THROW(RunnerSpec::parse("sidecar:"), std::invalid_argument);
}

TEST(Extraction, EmbeddingPathDimensions) {
    const auto clip = sine(300.0, 44100, 1.2);
    const auto e = extract_embedding(clip, StubRunner(0));
    EXPECT_EQ(e.values.size(), 1024u);
    const auto a = extract_acoustic(clip);
    EXPECT_EQ(a.values.size(), 477u);
}
