#include "rble/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

namespace rble::dsp {

namespace {

// Planning is not thread-safe in FFTW; execution on a private buffer is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

class ForwardFft {
public:
    explicit ForwardFft(std::size_t n)
        : n_(n), buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!buf_) {
            throw std::bad_alloc();
        }
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~ForwardFft()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    ForwardFft(const ForwardFft&) = delete;
    ForwardFft& operator=(const ForwardFft&) = delete;

    Complex* data() { return reinterpret_cast<Complex*>(buf_.get()); }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex, FftwFree> buf_;
    fftw_plan plan_ = nullptr;
};

std::vector<double> hann(std::size_t n)
{
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    }
    return w;
}

double to_db(double magnitude)
{
    if (!(magnitude > 0.0)) {
        return kSpectrogramFloorDb;
    }
    return std::max(kSpectrogramFloorDb, 20.0 * std::log10(magnitude));
}

void check_args(std::size_t length, std::size_t fft_size, std::size_t hop, double fs)
{
    if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
        throw std::invalid_argument("stft_spectrogram: fft_size must be a power of two");
    }
    if (hop == 0 || hop > fft_size) {
        throw std::invalid_argument("stft_spectrogram: hop must be in (0, fft_size]");
    }
    if (length < fft_size) {
        throw std::invalid_argument("stft_spectrogram: waveform shorter than fft_size");
    }
    if (!(fs > 0.0)) {
        throw std::invalid_argument("stft_spectrogram: sample rate must be positive");
    }
}

template <typename T>
Spectrogram run_stft(std::span<const T> x, double fs, std::size_t fft_size, std::size_t hop, bool real_input)
{
    check_args(x.size(), fft_size, hop, fs);
    const auto window = hann(fft_size);
    const double norm = std::accumulate(window.begin(), window.end(), 0.0);
    const std::size_t frames = (x.size() - fft_size) / hop + 1;
    const std::size_t bins = real_input ? fft_size / 2 + 1 : fft_size;

    Spectrogram s;
    s.fft_size = fft_size;
    s.hop = hop;
    s.freq_axis_hz.resize(bins);
    const double df = fs / static_cast<double>(fft_size);
    const auto half = static_cast<std::ptrdiff_t>(fft_size / 2);
    for (std::size_t b = 0; b < bins; ++b) {
        const auto k = real_input ? static_cast<std::ptrdiff_t>(b) : static_cast<std::ptrdiff_t>(b) - half;
        s.freq_axis_hz[b] = static_cast<double>(k) * df;
    }

    ForwardFft fft(fft_size);
    s.magnitudes_db.reserve(frames);
    s.time_axis_s.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * hop;
        Complex* buf = fft.data();
        for (std::size_t k = 0; k < fft_size; ++k) {
            buf[k] = Complex(x[start + k]) * window[k];
        }
        fft.execute();
        std::vector<double> row(bins);
        for (std::size_t b = 0; b < bins; ++b) {
            // Complex output is fft-shifted so bin 0 is -fs/2.
            const std::size_t src = real_input ? b : (b + fft_size / 2) % fft_size;
            row[b] = to_db(std::abs(buf[src]) / norm);
        }
        s.magnitudes_db.push_back(std::move(row));
        s.time_axis_s.push_back((static_cast<double>(start) + static_cast<double>(fft_size) / 2.0) / fs);
    }
    return s;
}

std::vector<double> average_power(const Spectrogram& s)
{
    if (s.magnitudes_db.empty()) {
        throw std::invalid_argument("spectrogram has no frames");
    }
    std::vector<double> avg(s.freq_axis_hz.size(), 0.0);
    for (const auto& row : s.magnitudes_db) {
        for (std::size_t b = 0; b < row.size(); ++b) {
            avg[b] += std::pow(10.0, row[b] / 10.0);
        }
    }
    for (double& p : avg) {
        p /= static_cast<double>(s.magnitudes_db.size());
    }
    return avg;
}

}  // namespace

Spectrogram stft_spectrogram(const RealWaveform& w, std::size_t fft_size, std::size_t hop, Window)
{
    return run_stft<double>(w.samples, w.sample_rate_hz, fft_size, hop, true);
}

Spectrogram stft_spectrogram(const ComplexWaveform& w, std::size_t fft_size, std::size_t hop, Window)
{
    return run_stft<Complex>(w.samples, w.sample_rate_hz, fft_size, hop, false);
}

double dominant_frequency(const Spectrogram& s)
{
    const auto avg = average_power(s);
    const auto it = std::max_element(avg.begin(), avg.end());
    return s.freq_axis_hz[static_cast<std::size_t>(it - avg.begin())];
}

std::vector<double> dominant_peaks(const Spectrogram& s, std::size_t count, double min_separation_hz)
{
    const auto avg = average_power(s);
    std::vector<std::size_t> maxima;
    for (std::size_t b = 0; b < avg.size(); ++b) {
        const bool left_ok = b == 0 || avg[b] >= avg[b - 1];
        const bool right_ok = b + 1 == avg.size() || avg[b] > avg[b + 1];
        if (left_ok && right_ok) {
            maxima.push_back(b);
        }
    }
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return avg[a] > avg[b]; });

    std::vector<double> peaks;
    for (std::size_t b : maxima) {
        if (peaks.size() == count) {
            break;
        }
        const double f = s.freq_axis_hz[b];
        const bool isolated = std::all_of(peaks.begin(), peaks.end(),
                                          [&](double p) { return std::abs(p - f) >= min_separation_hz; });
        if (isolated) {
            peaks.push_back(f);
        }
    }
    return peaks;
}

double band_power(const Spectrogram& s, double lo_hz, double hi_hz)
{
    const auto avg = average_power(s);
    double total = 0.0;
    for (std::size_t b = 0; b < avg.size(); ++b) {
        if (s.freq_axis_hz[b] >= lo_hz && s.freq_axis_hz[b] <= hi_hz) {
            total += avg[b];
        }
    }
    return total;
}

}  // namespace rble::dsp
