#include "doctest.h"
#include "oracles.hpp"

#include "rble/dsp.hpp"
#include "rble/iq_file.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rble::dsp;

namespace {

ComplexWaveform tone(double f, double fs, std::size_t n, double amp = 1.0)
{
    ComplexWaveform w;
    w.sample_rate_hz = fs;
    for (std::size_t i = 0; i < n; ++i) {
        w.samples.push_back(std::polar(amp, kTwoPi * f * static_cast<double>(i) / fs));
    }
    return w;
}

RealWaveform real_tone(double f, double fs, std::size_t n)
{
    RealWaveform w;
    w.sample_rate_hz = fs;
    for (std::size_t i = 0; i < n; ++i) {
        w.samples.push_back(std::cos(kTwoPi * f * static_cast<double>(i) / fs));
    }
    return w;
}

double rms_db(std::span<const Complex> x)
{
    return 10.0 * std::log10(mean_power(x));
}

std::vector<Complex> slice(const std::vector<Complex>& v, std::size_t lo, std::size_t hi)
{
    return {v.begin() + static_cast<std::ptrdiff_t>(lo), v.begin() + static_cast<std::ptrdiff_t>(hi)};
}

}  // namespace

TEST_CASE("mix_complex by zero is the identity")
{
    const auto w = tone(300e3, 8e6, 256);
    const auto m = mix_complex(w, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(m.samples[i] == w.samples[i]);
    }
}

TEST_CASE("mix_complex moves DC to 1 MHz")
{
    ComplexWaveform dc;
    dc.sample_rate_hz = 8e6;
    dc.samples.assign(512, Complex{1.0, 0.0});
    const auto m = mix_complex(dc, 1e6);
    const auto X = oracle::dft(m.samples);
    const double bin = 8e6 / 512;
    CHECK(std::abs(oracle::bin_freq(oracle::argmax_bin(X), 512, 8e6) - 1e6) <= bin);
    CHECK(m.center_freq_hz == doctest::Approx(1e6));
}

TEST_CASE("mixing up then down restores the samples")
{
    const auto w = tone(-700e3, 8e6, 4000, 0.7);
    const auto back = mix_complex(mix_complex(w, 2.3e6), -2.3e6);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        worst = std::max(worst, std::abs(back.samples[i] - w.samples[i]));
    }
    CHECK(worst < 1e-9);
    CHECK(back.center_freq_hz == doctest::Approx(0.0));
}

TEST_CASE("mix_complex rejects frequencies beyond Nyquist")
{
    const auto w = tone(0.0, 8e6, 16);
    CHECK_THROWS_AS(mix_complex(w, 4e6), std::invalid_argument);
    CHECK_THROWS_AS(mix_complex(w, -5e6), std::invalid_argument);
}

TEST_CASE("mix_real_cosine at 0 Hz is the identity")
{
    const auto w = real_tone(3e6, 64e6, 300);
    for (PhaseMode mode : {PhaseMode::absolute_time, PhaseMode::continuous}) {
        const auto m = mix_real_cosine(w, 0.0, mode);
        CHECK(m.samples == w.samples);
    }
}

TEST_CASE("16 MHz tone times 8 MHz cosine has peaks at 24 and 8 MHz")
{
    const std::size_t n = 1024;
    const auto w = real_tone(16e6, 64e6, n);
    const auto m = mix_real_cosine(w, 8e6, PhaseMode::absolute_time, 16e6);
    std::vector<Complex> x(m.samples.begin(), m.samples.end());
    auto X = oracle::dft(x);
    X.resize(n / 2 + 1);
    const std::size_t first = oracle::argmax_bin(X);
    X[first] = 0.0;
    const std::size_t second = oracle::argmax_bin(X);
    const double bin = 64e6 / n;
    const double lo = std::min(first, second) * bin;
    const double hi = std::max(first, second) * bin;
    CHECK(std::abs(lo - 8e6) <= bin);
    CHECK(std::abs(hi - 24e6) <= bin);

    // Same answer from the STFT path.
    const auto s = stft_spectrogram(m, 1024, 512);
    const auto peaks = dominant_peaks(s, 2, 2e6);
    REQUIRE(peaks.size() == 2);
    CHECK(std::abs(std::min(peaks[0], peaks[1]) - 8e6) <= s.freq_axis_hz[1]);
    CHECK(std::abs(std::max(peaks[0], peaks[1]) - 24e6) <= s.freq_axis_hz[1]);
}

TEST_CASE("continuous-mode segments chain like a single mix")
{
    const auto w = real_tone(5e6, 64e6, 1000);
    const auto whole = mix_real_cosine(w, 7.3e6, PhaseMode::continuous);
    auto split = w.samples;
    CosinePhase phase;
    std::span<double> s(split);
    mix_real_cosine_segment(s.first(333), 64e6, 7.3e6, PhaseMode::continuous, phase);
    mix_real_cosine_segment(s.subspan(333), 64e6, 7.3e6, PhaseMode::continuous, phase);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        worst = std::max(worst, std::abs(split[i] - whole.samples[i]));
    }
    CHECK(worst < 1e-9);
    CHECK(phase.sample_offset == 1000);
}

TEST_CASE("mix_real_cosine rejects an aliasing sum product")
{
    const auto w = real_tone(16e6, 64e6, 64);
    CHECK_THROWS_AS(mix_real_cosine(w, 17e6, PhaseMode::continuous, 16e6), std::invalid_argument);
    CHECK_THROWS_AS(mix_real_cosine(w, -1.0, PhaseMode::continuous), std::invalid_argument);
}

TEST_CASE("Gaussian filter: unit sum, symmetric, -3 dB near half the symbol rate")
{
    const auto g = design_gaussian_filter(0.5, 8, 3);
    REQUIRE(g.taps.size() == 25);
    double sum = 0.0;
    for (double t : g.taps) {
        sum += t;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 0; k < g.taps.size(); ++k) {
        CHECK(std::abs(g.taps[k] - g.taps[g.taps.size() - 1 - k]) < 1e-12);
    }
    CHECK(g.group_delay_samples == 12);

    // Dense frequency response in units of the symbol rate (fs = 8).
    double f3 = -1.0;
    for (int i = 1; i <= 4000; ++i) {
        const double f = i * 1e-3;  // symbols^-1
        Complex h{};
        for (std::size_t k = 0; k < g.taps.size(); ++k) {
            h += g.taps[k] * std::polar(1.0, -kTwoPi * f / 8.0 * static_cast<double>(k));
        }
        if (20.0 * std::log10(std::abs(h)) < -3.0103) {
            f3 = f;
            break;
        }
    }
    CHECK(f3 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Gaussian filter rejects bad parameters")
{
    CHECK_THROWS(design_gaussian_filter(0.0, 8, 3));
    CHECK_THROWS(design_gaussian_filter(0.5, 1, 3));
    CHECK_THROWS(design_gaussian_filter(0.5, 8, 0));
}

TEST_CASE("fir_filter basics")
{
    const std::vector<double> x{1.0, -2.0, 3.5, 0.25, 7.0};
    SUBCASE("single tap is identity")
    {
        CHECK(fir_filter<double>(x, FirFilter({1.0}), true) == x);
        CHECK(fir_filter<double>(x, FirFilter({1.0}), false) == x);
    }
    SUBCASE("moving average passes DC")
    {
        const std::vector<double> ones(4, 1.0);
        const auto y = fir_filter<double>(ones, FirFilter({0.5, 0.5}), false);
        CHECK(y[1] == 1.0);
        CHECK(y[2] == 1.0);
        CHECK(y[3] == 1.0);
    }
    SUBCASE("impulse response is the taps")
    {
        const std::vector<double> taps{0.1, 0.2, 0.4, 0.2, 0.1};
        std::vector<double> impulse(8, 0.0);
        impulse[0] = 1.0;
        const auto y = fir_filter<double>(impulse, FirFilter(taps), false);
        for (std::size_t k = 0; k < taps.size(); ++k) {
            CHECK(y[k] == taps[k]);
        }
        // Delay compensation moves the centre tap onto the impulse.
        const auto yc = fir_filter<double>(impulse, FirFilter(taps), true);
        CHECK(yc[0] == 0.4);
    }
    SUBCASE("empty taps")
    {
        CHECK_THROWS_AS(fir_filter<double>(x, FirFilter{}, false), std::invalid_argument);
    }
}

TEST_CASE("lowpass designs have unit DC gain and odd length")
{
    const auto lp = design_lowpass(1.0 / 8.0, 129, 60.0);
    CHECK(lp.taps.size() == 129);
    CHECK(lp.dc_gain() == doctest::Approx(1.0).epsilon(1e-6));
    const auto& hb = decimation_stage_filter();
    CHECK(hb.taps.size() % 4 == 3);
    CHECK(hb.dc_gain() == doctest::Approx(1.0).epsilon(1e-6));
    for (int f : {2, 4, 8}) {
        CHECK(interpolation_filter(f).taps.size() % 2 == 1);
    }
}

TEST_CASE("lowpass filtering does not add power to an in-band signal")
{
    const auto lp = design_lowpass(1.0 / 8.0, 129, 60.0);
    ComplexWaveform dc;
    dc.sample_rate_hz = 8e6;
    dc.samples.assign(4000, Complex{0.8, -0.3});
    CHECK(mean_power(fir_filter(dc, lp, true).samples) <= mean_power(dc.samples) * (1.0 + 1e-6));

    // Away from DC a windowed-sinc design only holds its passband ripple,
    // which is bounded by the stopband attenuation.
    const double ripple = std::pow(10.0, -60.0 / 20.0);
    for (double f : {50e3, 200e3, 500e3, 700e3}) {
        const auto w = tone(f, 8e6, 4000);
        const auto y = fir_filter(w, lp, true);
        CHECK(mean_power(y.samples) <= mean_power(w.samples) * (1.0 + ripple) * (1.0 + ripple));
    }
}

TEST_CASE("interpolate keeps a 1 MHz tone at 1 MHz")
{
    const auto w = tone(1e6, 8e6, 256);
    const auto up = interpolate(w, 8);
    CHECK(up.size() == 8 * w.size());
    CHECK(up.sample_rate_hz == 64e6);
    const auto X = oracle::dft(up.samples);
    const double bin = 64e6 / static_cast<double>(up.size());
    CHECK(std::abs(oracle::bin_freq(oracle::argmax_bin(X), up.size(), 64e6) - 1e6) <= bin);

    // Passband amplitude away from the filter transients.
    const std::size_t edge = 400;
    const double gain = rms_db(slice(up.samples, edge, up.size() - edge)) - rms_db(w.samples);
    CHECK(std::abs(gain) < 0.5);
}

TEST_CASE("interpolate rejects unsupported factors")
{
    const auto w = tone(0.0, 8e6, 64);
    CHECK_THROWS_AS(interpolate(w, 3), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(w, 16), std::invalid_argument);
    CHECK_THROWS_AS(interpolation_filter(5), std::invalid_argument);
}

TEST_CASE("decimate_cascade: rate, passband, stopband")
{
    const std::size_t n = 8192;
    const auto pass = decimate_cascade(tone(500e3, 64e6, n));
    CHECK(pass.sample_rate_hz == 8e6);
    CHECK(pass.size() == n / 8);
    const std::size_t edge = 64;
    CHECK(std::abs(rms_db(slice(pass.samples, edge, pass.size() - edge))) < 0.5);

    const auto stop = decimate_cascade(tone(20e6, 64e6, n));
    CHECK(rms_db(slice(stop.samples, edge, stop.size() - edge)) < -60.0);

    CHECK_THROWS_AS(decimate_cascade(tone(0.0, 64e6, 100)), std::invalid_argument);
}

TEST_CASE("decimate_cascade(interpolate(w, 8)) reproduces a band-limited signal")
{
    // Sum of tones inside 40% of the original Nyquist.
    ComplexWaveform w;
    w.sample_rate_hz = 8e6;
    const std::size_t n = 2048;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / 8e6;
        w.samples.push_back(0.6 * std::polar(1.0, kTwoPi * 1.3e6 * t) + 0.3 * std::polar(1.0, -kTwoPi * 0.4e6 * t + 1.0) +
                            0.2 * std::polar(1.0, kTwoPi * 0.05e6 * t));
    }
    const auto back = decimate_cascade(interpolate(w, 8));
    REQUIRE(back.size() == w.size());
    const std::size_t edge = 64;
    double err = 0.0;
    double sig = 0.0;
    for (std::size_t i = edge; i < n - edge; ++i) {
        err += std::norm(back.samples[i] - w.samples[i]);
        sig += std::norm(w.samples[i]);
    }
    CHECK(10.0 * std::log10(err / sig) < -50.0);
}

TEST_CASE("digital up/down conversion round trip")
{
    const auto w = tone(300e3, 8e6, 1024, 0.5);
    const auto if_wave = digital_upconvert(w, 16e6);
    CHECK(if_wave.sample_rate_hz == 64e6);
    CHECK(if_wave.size() == 8 * w.size());
    const auto s = stft_spectrogram(if_wave, 2048, 1024);
    CHECK(std::abs(dominant_frequency(s) - 16.3e6) <= s.freq_axis_hz[1]);
    const auto back = digital_downconvert(if_wave, 16e6);
    REQUIRE(back.size() == w.size());
    // The real part keeps half the amplitude of the positive image.
    const std::size_t edge = 64;
    const double gain = rms_db(slice(back.samples, edge, back.size() - edge)) - rms_db(w.samples);
    CHECK(gain == doctest::Approx(-6.0206).epsilon(0.02));
}

TEST_CASE("stft frame count and axes")
{
    const auto w = real_tone(16e6, 64e6, 10000);
    const auto s = stft_spectrogram(w, 1024, 256);
    CHECK(s.num_frames() == (10000 - 1024) / 256 + 1);
    CHECK(s.time_axis_s.size() == s.num_frames());
    CHECK(s.freq_axis_hz.size() == 513);
    CHECK(s.freq_axis_hz.front() == 0.0);
    CHECK(s.freq_axis_hz.back() == doctest::Approx(32e6));
    CHECK(std::is_sorted(s.freq_axis_hz.begin(), s.freq_axis_hz.end()));

    const auto c = stft_spectrogram(tone(1e6, 8e6, 4096), 512, 512);
    CHECK(c.freq_axis_hz.size() == 512);
    CHECK(c.freq_axis_hz.front() == doctest::Approx(-4e6));
    CHECK(c.freq_axis_hz.back() < 4e6);
    CHECK(std::is_sorted(c.freq_axis_hz.begin(), c.freq_axis_hz.end()));
}

TEST_CASE("stft of a tone peaks in every frame at the tone bin")
{
    const auto w = real_tone(16e6, 64e6, 16384);
    const auto s = stft_spectrogram(w, 4096, 1024);
    const double bin = s.freq_axis_hz[1];
    for (const auto& frame : s.magnitudes_db) {
        const auto k = static_cast<std::size_t>(std::max_element(frame.begin(), frame.end()) - frame.begin());
        CHECK(std::abs(s.freq_axis_hz[k] - 16e6) <= bin / 2);
    }
    CHECK(dominant_frequency(s) == doctest::Approx(16e6));
}

TEST_CASE("stft argmax is within a bin for off-grid tones")
{
    for (double f : {-3.1e6, -250e3, 10e3, 777e3, 2.9e6}) {
        const auto s = stft_spectrogram(tone(f, 8e6, 8192), 1024, 512);
        CHECK(std::abs(dominant_frequency(s) - f) <= s.freq_axis_hz[1] - s.freq_axis_hz[0]);
    }
}

TEST_CASE("stft of silence sits on the floor")
{
    RealWaveform z;
    z.sample_rate_hz = 64e6;
    z.samples.assign(4096, 0.0);
    const auto s = stft_spectrogram(z, 1024, 512);
    for (const auto& frame : s.magnitudes_db) {
        for (double v : frame) {
            CHECK(v == kSpectrogramFloorDb);
        }
    }
}

TEST_CASE("stft argument checks")
{
    const auto w = real_tone(1e6, 64e6, 1000);
    CHECK_THROWS_AS(stft_spectrogram(w, 1000, 100), std::invalid_argument);
    CHECK_THROWS_AS(stft_spectrogram(w, 512, 0), std::invalid_argument);
    CHECK_THROWS_AS(stft_spectrogram(w, 512, 513), std::invalid_argument);
    CHECK_THROWS_AS(stft_spectrogram(w, 2048, 512), std::invalid_argument);
}

TEST_CASE("iq file round trip with sidecar")
{
    const auto dir = std::filesystem::temp_directory_path() / "rble_test_iq";
    std::filesystem::create_directories(dir);
    const auto path = dir / "tone.iq";
    auto w = tone(123e3, 8e6, 100, 0.75);
    w.center_freq_hz = 2402e6;
    write_iq_file(path, w);
    CHECK(std::filesystem::file_size(path) == 100 * 2 * sizeof(float));

    const auto meta = read_iq_metadata(path);
    CHECK(meta.sample_rate_hz == 8e6);
    CHECK(meta.center_freq_hz == 2402e6);
    CHECK(meta.num_samples == 100);
    CHECK_FALSE(meta.real);

    std::ifstream sc(sidecar_path(path));
    std::stringstream text;
    text << sc.rdbuf();
    CHECK(text.str().find("sample_rate_hz:") != std::string::npos);
    CHECK(text.str().find("num_samples:100") != std::string::npos);

    const auto back = read_iq_file(path);
    REQUIRE(back.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(std::abs(back.samples[i] - w.samples[i]) < 1e-6);
    }

    // First sample, I then Q, as little-endian float32.
    std::ifstream raw(path, std::ios::binary);
    unsigned char b[4];
    raw.read(reinterpret_cast<char*>(b), 4);
    const std::uint32_t u = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    CHECK(std::bit_cast<float>(u) == 0.75f);

    CHECK_THROWS(read_iq_file(dir / "missing.iq"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectrogram csv layout")
{
    const auto dir = std::filesystem::temp_directory_path() / "rble_test_spec";
    std::filesystem::create_directories(dir);
    const auto s = stft_spectrogram(real_tone(8e6, 64e6, 4096), 256, 256);
    const auto path = dir / "s.csv";
    write_spectrogram_csv(path, s);
    std::ifstream is(path);
    std::string line;
    std::size_t rows = 0;
    std::getline(is, line);
    CHECK(std::count(line.begin(), line.end(), ',') == static_cast<long>(s.freq_axis_hz.size()));
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == static_cast<long>(s.freq_axis_hz.size()));
        ++rows;
    }
    CHECK(rows == s.num_frames());
    std::filesystem::remove_all(dir);
}
