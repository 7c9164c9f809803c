#include "respira/audio_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace respira {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
    if (format == kFormatFloat) {
        return static_cast<double>(std::bit_cast<float>(read_u32(p)));
    }
    switch (bits) {
    case 8:
        return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
        return static_cast<double>(static_cast<std::int16_t>(read_u16(p))) / 32768.0;
    case 24: {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) {
            v |= ~0xFFFFFF;
        }
        return static_cast<double>(v) / 8388608.0;
    }
    case 32:
        return static_cast<double>(static_cast<std::int32_t>(read_u32(p))) / 2147483648.0;
    default:
        throw std::runtime_error("unsupported PCM bit depth: " + std::to_string(bits));
    }
}

} // namespace

AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open audio file: " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("not a RIFF/WAVE file: " + path.string());
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (available < 16) {
                throw std::runtime_error("truncated fmt chunk: " + path.string());
            }
            format = read_u16(chunk + 8);
            channels = read_u16(chunk + 10);
            rate = read_u32(chunk + 12);
            bits = read_u16(chunk + 22);
            if (format == kFormatExtensible) {
                if (available < 26) {
                    throw std::runtime_error("truncated extensible fmt chunk: " + path.string());
                }
                format = read_u16(chunk + 8 + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = available;
        }
        pos = body + size + (size & 1u);
    }

    if (!have_fmt || data == nullptr) {
        throw std::runtime_error("missing fmt or data chunk: " + path.string());
    }
    const bool pcm_ok = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
    const bool float_ok = format == kFormatFloat && bits == 32;
    if (!pcm_ok && !float_ok) {
        throw std::runtime_error("unsupported WAV codec (format " + std::to_string(format) + ", " +
                                 std::to_string(bits) + " bits): " + path.string());
    }
    if (channels == 0 || rate == 0) {
        throw std::runtime_error("invalid WAV header: " + path.string());
    }

    const std::size_t sample_bytes = bits / 8;
    const std::size_t frame_bytes = sample_bytes * channels;
    const std::size_t n = data_size / frame_bytes;
    if (n == 0) {
        throw std::runtime_error("zero-length audio: " + path.string());
    }

    AudioClip clip;
    clip.sample_rate = static_cast<int>(rate);
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            acc += decode_sample(data + i * frame_bytes + c * sample_bytes, format, bits);
        }
        clip.samples[i] = acc / channels;
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, std::span<const std::vector<double>> channels,
               int sample_rate, WavEncoding encoding) {
    if (channels.empty() || sample_rate <= 0) {
        throw std::invalid_argument("write_wav: need at least one channel and a positive rate");
    }
    const std::size_t n = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != n) {
            throw std::invalid_argument("write_wav: channel lengths differ");
        }
    }
    std::uint16_t bits = 16;
    std::uint16_t format = kFormatPcm;
    switch (encoding) {
    case WavEncoding::Pcm8: bits = 8; break;
    case WavEncoding::Pcm16: bits = 16; break;
    case WavEncoding::Pcm24: bits = 24; break;
    case WavEncoding::Pcm32: bits = 32; break;
    case WavEncoding::Float32: bits = 32; format = kFormatFloat; break;
    }
    const auto n_channels = static_cast<std::uint16_t>(channels.size());
    const std::uint32_t block_align = n_channels * (bits / 8);
    const std::uint32_t data_size = static_cast<std::uint32_t>(n * block_align);

    std::string out;
    out.reserve(44 + data_size);
    out += "RIFF";
    put_u32(out, 36 + data_size);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, n_channels);
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * block_align);
    put_u16(out, static_cast<std::uint16_t>(block_align));
    put_u16(out, bits);
    out += "data";
    put_u32(out, data_size);

    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& ch : channels) {
            const double x = std::clamp(ch[i], -1.0, 1.0);
            switch (encoding) {
            case WavEncoding::Pcm8:
                out.push_back(static_cast<char>(static_cast<std::uint8_t>(
                    std::clamp(std::lround(x * 128.0 + 128.0), 0L, 255L))));
                break;
            case WavEncoding::Pcm16:
                put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(
                                 std::clamp(std::lround(x * 32768.0), -32768L, 32767L))));
                break;
            case WavEncoding::Pcm24: {
                const auto v = static_cast<std::int32_t>(std::clamp(std::lround(x * 8388608.0), -8388608L, 8388607L));
                const auto u = static_cast<std::uint32_t>(v);
                out.push_back(static_cast<char>(u & 0xFF));
                out.push_back(static_cast<char>((u >> 8) & 0xFF));
                out.push_back(static_cast<char>((u >> 16) & 0xFF));
                break;
            }
            case WavEncoding::Pcm32:
                put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(
                                 std::clamp(std::llround(x * 2147483648.0), -2147483648LL, 2147483647LL))));
                break;
            case WavEncoding::Float32:
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
                break;
            }
        }
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write audio file: " + path.string());
    }
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
    const std::vector<double>* ch = &clip.samples;
    write_wav(path, std::span<const std::vector<double>>(ch, 1), clip.sample_rate, encoding);
}

} // namespace respira
