#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nsaf/signal_lab.hpp"

using namespace nsaf;

namespace {

double mean_square(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s / static_cast<double>(x.size());
}

double lag1(const std::vector<double>& x) {
    double r0 = 0.0;
    double r1 = 0.0;
    for (std::size_t n = 1; n < x.size(); ++n) {
        r0 += x[n] * x[n];
        r1 += x[n] * x[n - 1];
    }
    return r1 / r0;
}

std::vector<double> convolve(const EchoPath& w, const std::vector<double>& u) {
    std::vector<double> y(u.size(), 0.0);
    for (std::size_t n = 0; n < u.size(); ++n)
        for (std::size_t j = 0; j < w.size() && j <= n; ++j) y[n] += w[j] * u[n - j];
    return y;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / ("nsaf_sl_" + std::to_string(std::rand()))) {
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void le(std::string& s, std::uint32_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

// Hand-assembled RIFF/WAVE bytes.
std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
                      const std::vector<std::int16_t>& samples, std::uint32_t rate = 16000) {
    std::string s = "RIFF";
    le(s, 36 + 2 * static_cast<std::uint32_t>(samples.size()), 4);
    s += "WAVEfmt ";
    le(s, 16, 4);
    le(s, format, 2);
    le(s, channels, 2);
    le(s, rate, 4);
    le(s, rate * channels * bits / 8, 4);
    le(s, channels * bits / 8, 2);
    le(s, bits, 2);
    s += "data";
    le(s, 2 * static_cast<std::uint32_t>(samples.size()), 4);
    for (auto v : samples) le(s, static_cast<std::uint16_t>(v), 2);
    return s;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

WavError::Code wav_error_code(const std::string& path) {
    try {
        load_wav(path);
    } catch (const WavError& e) {
        return e.code();
    }
    FAIL("load_wav did not throw");
    return WavError::Code::io;
}

}  // namespace

TEST_CASE("AR(1) with pole 0 is white noise of the innovation variance") {
    const auto ar = gen_ar1(0.0, 1000, 2.5, RngSeed{4});
    const auto wn = gen_wgn(2.5, 1000, RngSeed{4});
    CHECK(ar.samples == wn.samples);
}

TEST_CASE("AR(1) pole 0.95 statistics") {
    const auto x = gen_ar1(0.95, 1000000, 1.0 - 0.95 * 0.95, RngSeed{8}).samples;
    const double rho = lag1(x);
    CHECK(rho >= 0.94);
    CHECK(rho <= 0.96);
    CHECK(mean_square(x) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("AR(1) stationary variance for several poles") {
    for (double pole : {-0.5, 0.3, 0.8}) {
        const auto x = gen_ar1(pole, 1000000, 0.7, RngSeed{21}).samples;
        CHECK(mean_square(x) == doctest::Approx(0.7 / (1.0 - pole * pole)).epsilon(0.03));
    }
}

TEST_CASE("AR(1) parameter checks") {
    CHECK_THROWS_AS(gen_ar1(1.0, 10, 1.0, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(gen_ar1(-1.2, 10, 1.0, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(gen_ar1(0.5, 10, 0.0, RngSeed{1}), std::invalid_argument);
    CHECK(gen_ar1(0.5, 0, 1.0, RngSeed{1}).samples.empty());
}

TEST_CASE("generators are pure functions of their seed") {
    CHECK(gen_ar1(0.9, 500, 1.0, RngSeed{77}).samples == gen_ar1(0.9, 500, 1.0, RngSeed{77}).samples);
    CHECK(gen_wgn(1.0, 500, RngSeed{77}).samples == gen_wgn(1.0, 500, RngSeed{77}).samples);
    CHECK(gen_wgn(1.0, 500, RngSeed{77}).samples != gen_wgn(1.0, 500, RngSeed{78}).samples);
    CHECK(make_echo_path(64, 0.1, RngSeed{3}).taps()[5] == make_echo_path(64, 0.1, RngSeed{3}).taps()[5]);
}

TEST_CASE("derived seeds separate streams") {
    const auto a = derive_seed(RngSeed{1}, 1);
    const auto b = derive_seed(RngSeed{1}, 2);
    const auto c = derive_seed(RngSeed{2}, 1);
    CHECK(a.value != b.value);
    CHECK(a.value != c.value);
    CHECK(derive_seed(RngSeed{1}, 1).value == a.value);
}

TEST_CASE("white Gaussian noise") {
    const auto zero = gen_wgn(0.0, 100, RngSeed{2}).samples;
    for (double v : zero) CHECK(v == 0.0);

    const auto x = gen_wgn(1.0, 1000000, RngSeed{5}).samples;
    const double var = mean_square(x);
    CHECK(var >= 0.99);
    CHECK(var <= 1.01);

    const auto one = gen_wgn(1.0, 200, RngSeed{6}).samples;
    const auto four = gen_wgn(4.0, 200, RngSeed{6}).samples;
    for (std::size_t n = 0; n < one.size(); ++n) CHECK(four[n] == 2.0 * one[n]);

    CHECK_THROWS_AS(gen_wgn(-1.0, 10, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("echo paths have unit energy and a decaying envelope") {
    const auto p1 = make_echo_path(1, 0.01, RngSeed{9});
    CHECK(std::abs(p1[0]) == doctest::Approx(1.0).epsilon(1e-15));

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = make_echo_path(512, 0.01, RngSeed{seed});
        CHECK(std::abs(p.energy() - 1.0) <= 1e-12);
        double first = 0.0;
        double last = 0.0;
        for (std::size_t j = 0; j < 128; ++j) {
            first += p[j] * p[j];
            last += p[511 - j] * p[511 - j];
        }
        CHECK(first > last);
    }
    CHECK_THROWS_AS(make_echo_path(0, 0.01, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(make_echo_path(8, 0.0, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("EchoPath validation and negation") {
    CHECK_THROWS_AS(EchoPath({}), std::invalid_argument);
    CHECK_THROWS_AS(EchoPath({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(EchoPath({1.0, NAN}), std::invalid_argument);
    const EchoPath p({1.0, -2.0});
    CHECK(p.energy() == 5.0);
    const auto n = p.negated();
    CHECK(n[0] == -1.0);
    CHECK(n[1] == 2.0);
}

TEST_CASE("noiseless system response is the exact convolution") {
    const auto path = make_echo_path(16, 0.1, RngSeed{2});
    const auto u = gen_wgn(1.0, 300, RngSeed{3});
    const auto out = system_response(path, u, kNoiseless, RngSeed{4});
    CHECK(out.noise_variance == 0.0);
    const auto clean = convolve(path, u.samples);
    for (std::size_t n = 0; n < clean.size(); ++n) CHECK(out.desired[n] == doctest::Approx(clean[n]).epsilon(1e-14));
}

TEST_CASE("impulse input reads out the path taps") {
    const EchoPath path({0.5, -0.25, 0.125, 1.0});
    SignalBuffer u{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {}};
    const auto noiseless = system_response(path, u, kNoiseless, RngSeed{1});
    for (std::size_t j = 0; j < 4; ++j) CHECK(noiseless.desired[j] == path[j]);
    for (std::size_t j = 4; j < 8; ++j) CHECK(noiseless.desired[j] == 0.0);

    const auto noisy = system_response(path, u, 20.0, RngSeed{1});
    const auto noise = gen_wgn(noisy.noise_variance, 8, RngSeed{1}).samples;
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(noisy.desired[j] == doctest::Approx(noiseless.desired[j] + noise[j]).epsilon(1e-14));
}

TEST_CASE("noise variance is calibrated to the requested SNR") {
    const auto path = make_echo_path(32, 0.05, RngSeed{7});
    for (double snr : {-5.0, 0.0, 20.0, 30.0, 60.0}) {
        const auto u = gen_ar1(0.9, 2000, 0.19, RngSeed{8});
        const auto out = system_response(path, u, snr, RngSeed{9});
        const double clean = mean_square(convolve(path, u.samples));
        CHECK(std::abs(10.0 * std::log10(clean / out.noise_variance) - snr) <= 1e-9);
    }
}

TEST_CASE("system_response error paths") {
    const EchoPath path({1.0});
    CHECK_THROWS_AS(system_response(path, SignalBuffer{}, 30.0, RngSeed{1}), std::invalid_argument);
    SignalBuffer zeros{std::vector<double>(10, 0.0), {}};
    CHECK_THROWS_AS(system_response(path, zeros, 30.0, RngSeed{1}), std::invalid_argument);
    CHECK_NOTHROW(system_response(path, zeros, kNoiseless, RngSeed{1}));
    SignalBuffer u{{1.0, 2.0, 3.0}, {}};
    CHECK_THROWS_AS(system_response(negate_path_at(path, 3), u, 30.0, RngSeed{1}), std::invalid_argument);
    CHECK_THROWS_AS(system_response(path, u, NAN, RngSeed{1}), std::invalid_argument);
}

TEST_CASE("path schedules") {
    const auto path = make_echo_path(8, 0.1, RngSeed{11});
    const auto u = gen_wgn(1.0, 100, RngSeed{12});

    const auto plain = system_response(path, u, 30.0, RngSeed{13});
    const auto unchanged = system_response(PathSchedule{path, std::nullopt}, u, 30.0, RngSeed{13});
    CHECK(plain.desired == unchanged.desired);

    const auto from_start = system_response(negate_path_at(path, 0), u, 30.0, RngSeed{13});
    const auto negated = system_response(path.negated(), u, 30.0, RngSeed{13});
    CHECK(from_start.desired == negated.desired);

    const auto sched = negate_path_at(path, 50);
    CHECK(sched.sign_at(49) == 1.0);
    CHECK(sched.sign_at(50) == -1.0);
    const auto half = system_response(sched, u, kNoiseless, RngSeed{13});
    const auto clean = convolve(path, u.samples);
    for (std::size_t n = 0; n < 100; ++n)
        CHECK(half.desired[n] == doctest::Approx(n < 50 ? clean[n] : -clean[n]).epsilon(1e-14));
}

TEST_CASE("signal buffer power and text export") {
    SignalBuffer b{{1.0, -3.0}, 8000.0};
    CHECK(b.power() == 5.0);
    CHECK(SignalBuffer{}.power() == 0.0);
    std::ostringstream out;
    write_samples(out, b.samples);
    CHECK(out.str() == "1\n-3\n");
}

TEST_CASE("WAV reading") {
    TempDir dir;
    SUBCASE("all-zero PCM") {
        write_file(dir.file("z.wav"), wav_bytes(1, 1, 16, std::vector<std::int16_t>(20, 0)));
        const auto b = load_wav(dir.file("z.wav"));
        CHECK(b.size() == 20);
        for (double v : b.samples) CHECK(v == 0.0);
        REQUIRE(b.sample_rate);
        CHECK(*b.sample_rate == 16000.0);
    }
    SUBCASE("full-scale negative sample maps to -1") {
        write_file(dir.file("m.wav"), wav_bytes(1, 1, 16, {-32768, 32767, 16384}));
        const auto b = load_wav(dir.file("m.wav"));
        CHECK(b.samples[0] == -1.0);
        CHECK(b.samples[1] == 32767.0 / 32768.0);
        CHECK(b.samples[2] == 0.5);
    }
    SUBCASE("round trip within one quantization step") {
        auto x = gen_wgn(0.05, 4000, RngSeed{31});
        save_wav(dir.file("r.wav"), x, 8000);
        const auto y = load_wav(dir.file("r.wav"));
        REQUIRE(y.size() == x.size());
        double worst = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n)
            if (std::abs(x.samples[n]) < 1.0) worst = std::max(worst, std::abs(x.samples[n] - y.samples[n]));
        CHECK(worst <= std::ldexp(1.0, -15));
        CHECK(*y.sample_rate == 8000.0);
    }
    SUBCASE("each failure class has its own code") {
        CHECK(wav_error_code(dir.file("missing.wav")) == WavError::Code::io);
        write_file(dir.file("a.wav"), "not a wave file at all");
        CHECK(wav_error_code(dir.file("a.wav")) == WavError::Code::not_riff_wave);
        write_file(dir.file("f.wav"), wav_bytes(3, 1, 16, {0, 0}));
        CHECK(wav_error_code(dir.file("f.wav")) == WavError::Code::unsupported_encoding);
        write_file(dir.file("s.wav"), wav_bytes(1, 2, 16, {0, 0}));
        CHECK(wav_error_code(dir.file("s.wav")) == WavError::Code::unsupported_channels);
        write_file(dir.file("b.wav"), wav_bytes(1, 1, 8, {0, 0}));
        CHECK(wav_error_code(dir.file("b.wav")) == WavError::Code::unsupported_bit_depth);
        auto bytes = wav_bytes(1, 1, 16, {1, 2, 3, 4});
        bytes.resize(bytes.size() - 3);
        write_file(dir.file("t.wav"), bytes);
        CHECK(wav_error_code(dir.file("t.wav")) == WavError::Code::truncated);
        write_file(dir.file("h.wav"), wav_bytes(1, 1, 16, {}).substr(0, 30));
        CHECK(wav_error_code(dir.file("h.wav")) == WavError::Code::truncated);
    }
    SUBCASE("unwritable destination") {
        CHECK_THROWS_AS(save_wav("/nonexistent/dir/x.wav", SignalBuffer{{0.0}, {}}), WavError);
    }
}
