#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "nsaf/signal_lab.hpp"

namespace nsaf {
namespace {

std::uint32_t le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

void put16(std::ostream& out, std::uint16_t v) {
    const std::array<char, 2> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b.data(), 2);
}

}  // namespace

SignalBuffer load_wav(const std::string& path) {
    using Code = WavError::Code;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError(Code::io, "load_wav: cannot open '" + path + "'");
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw WavError(Code::not_riff_wave, "load_wav: '" + path + "' is not a RIFF/WAVE file");

    bool have_fmt = false;
    unsigned sample_rate = 0;
    std::size_t pos = 12;
    while (true) {
        if (pos + 8 > bytes.size())
            throw WavError(Code::truncated, "load_wav: '" + path + "' ends before the data chunk");
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;

        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16 || body + 16 > bytes.size())
                throw WavError(Code::truncated, "load_wav: truncated fmt chunk");
            const std::uint16_t format = le16(bytes.data() + body);
            const std::uint16_t channels = le16(bytes.data() + body + 2);
            sample_rate = le32(bytes.data() + body + 4);
            const std::uint16_t bits = le16(bytes.data() + body + 14);
            if (format != 1)
                throw WavError(Code::unsupported_encoding,
                               "load_wav: format code " + std::to_string(format) + " is not PCM");
            if (channels != 1)
                throw WavError(Code::unsupported_channels,
                               "load_wav: " + std::to_string(channels) + " channels, expected mono");
            if (bits != 16)
                throw WavError(Code::unsupported_bit_depth,
                               "load_wav: " + std::to_string(bits) + "-bit samples, expected 16");
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) throw WavError(Code::not_riff_wave, "load_wav: data chunk before fmt chunk");
            if (size % 2 != 0 || body + size > bytes.size())
                throw WavError(Code::truncated, "load_wav: data chunk is truncated");
            SignalBuffer out;
            out.sample_rate = static_cast<double>(sample_rate);
            out.samples.resize(size / 2);
            for (std::size_t n = 0; n < out.samples.size(); ++n) {
                const auto raw = static_cast<std::int16_t>(le16(bytes.data() + body + 2 * n));
                out.samples[n] = static_cast<double>(raw) / 32768.0;
            }
            return out;
        }
        pos = body + size + (size & 1u);
    }
}

void save_wav(const std::string& path, const SignalBuffer& buffer, unsigned sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw WavError(WavError::Code::io, "save_wav: cannot open '" + path + "'");
    const auto data_bytes = static_cast<std::uint32_t>(2 * buffer.samples.size());
    out.write("RIFF", 4);
    put32(out, 36 + data_bytes);
    out.write("WAVEfmt ", 8);
    put32(out, 16);
    put16(out, 1);
    put16(out, 1);
    put32(out, sample_rate);
    put32(out, sample_rate * 2);
    put16(out, 2);
    put16(out, 16);
    out.write("data", 4);
    put32(out, data_bytes);
    for (double x : buffer.samples) {
        const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
        put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }
    if (!out) throw WavError(WavError::Code::io, "save_wav: write failed for '" + path + "'");
}

}  // namespace nsaf
