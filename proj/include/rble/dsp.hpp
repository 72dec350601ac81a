#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// Sample-level signal processing: waveform containers, mixers, FIR filtering,
// Gaussian pulse shaping, integer-ratio rate conversion and STFT spectrograms.
namespace rble::dsp {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Complex baseband samples. center_freq_hz annotates the frequency offset that
// has been applied to the content (mix_complex adds to it).
struct ComplexWaveform {
    std::vector<Complex> samples;
    double sample_rate_hz = 0.0;
    double center_freq_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

// Real-valued IF passband samples.
struct RealWaveform {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
};

ComplexWaveform to_complex(const RealWaveform& w);
RealWaveform real_part(const ComplexWaveform& w);

struct FirFilter {
    std::vector<double> taps;
    std::size_t group_delay_samples = 0;

    FirFilter() = default;
    // Linear-phase filter; group delay is (len - 1) / 2.
    explicit FirFilter(std::vector<double> coefficients);

    double dc_gain() const;
};

enum class PhaseMode {
    absolute_time,  // t = n / fs counted from the start of the waveform
    continuous,     // running phase accumulator, chains across segments
};

// Carries the mixer position between segment-wise calls.
struct CosinePhase {
    double phase_rad = 0.0;
    std::size_t sample_offset = 0;
};

ComplexWaveform mix_complex(const ComplexWaveform& w, double f_hz);

// Multiplies by cos(2 pi f t). band_edge_hz is the highest frequency present in
// the input; the sum product must stay below Nyquist.
RealWaveform mix_real_cosine(const RealWaveform& w, double f_hz, PhaseMode mode,
                             double band_edge_hz = 0.0);

// Segment-wise form. Advances `phase` by the segment length.
void mix_real_cosine_segment(std::span<double> segment, double sample_rate_hz, double f_hz,
                             PhaseMode mode, CosinePhase& phase);

FirFilter design_gaussian_filter(double bt, int sps, int span_symbols);

// Kaiser-windowed sinc lowpass. Frequencies are in cycles/sample; taps is
// forced odd.
FirFilter design_lowpass(double cutoff, std::size_t num_taps, double stopband_db);
std::size_t kaiser_length(double transition_width, double stopband_db);
double kaiser_beta(double stopband_db);

// Halfband lowpass (cutoff fs/4). num_taps must be 4k + 3.
FirFilter design_halfband(std::size_t num_taps, double stopband_db);

// Same-length linear convolution with zero history. With compensate_delay the
// output is advanced by the group delay so it lines up with the input.
template <typename T>
std::vector<T> fir_filter(std::span<const T> x, const FirFilter& f, bool compensate_delay)
{
    if (f.taps.empty()) {
        throw std::invalid_argument("fir_filter: empty tap vector");
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(f.taps.size());
    const std::ptrdiff_t shift =
        compensate_delay ? static_cast<std::ptrdiff_t>(f.group_delay_samples) : 0;
    std::vector<T> y(x.size(), T{});
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t centre = i + shift;
        const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, centre - (n - 1));
        const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(m - 1, centre);
        T acc{};
        for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
            acc += f.taps[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(centre - k)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

ComplexWaveform fir_filter(const ComplexWaveform& w, const FirFilter& f, bool compensate_delay);
RealWaveform fir_filter(const RealWaveform& w, const FirFilter& f, bool compensate_delay);

// Zero-stuffing interpolator followed by an anti-image lowpass at the input
// Nyquist frequency. factor must be 2, 4 or 8.
ComplexWaveform interpolate(const ComplexWaveform& w, int factor);
const FirFilter& interpolation_filter(int factor);

// Three halfband-lowpass + keep-every-2nd stages (rate / 8).
inline constexpr int kDecimationStages = 3;
const FirFilter& decimation_stage_filter();
ComplexWaveform decimate_cascade(const ComplexWaveform& w);
RealWaveform decimate_cascade(const RealWaveform& w);

// Baseband -> real IF: interpolate by `factor`, mix up to if_hz, keep the real
// part.
RealWaveform digital_upconvert(const ComplexWaveform& baseband, double if_hz, int factor = 8);

// Real IF -> baseband: mix down from if_hz, then decimate_cascade.
ComplexWaveform digital_downconvert(const RealWaveform& if_wave, double if_hz);

struct Spectrogram {
    std::vector<std::vector<double>> magnitudes_db;  // [frame][bin]
    std::vector<double> freq_axis_hz;
    std::vector<double> time_axis_s;
    std::size_t fft_size = 0;
    std::size_t hop = 0;

    std::size_t num_frames() const { return magnitudes_db.size(); }
};

inline constexpr double kSpectrogramFloorDb = -120.0;

enum class Window { hann };

// Real input yields fft_size/2 + 1 bins over [0, fs/2]; complex input yields
// fft_size bins over [-fs/2, fs/2). Magnitudes are normalised so a unit
// amplitude complex tone on a bin reads 0 dB.
Spectrogram stft_spectrogram(const RealWaveform& w, std::size_t fft_size, std::size_t hop,
                             Window window = Window::hann);
Spectrogram stft_spectrogram(const ComplexWaveform& w, std::size_t fft_size, std::size_t hop,
                             Window window = Window::hann);

// Frequency of the bin holding the largest magnitude of the frame-averaged
// (power) spectrum.
double dominant_frequency(const Spectrogram& s);

// Largest local maxima of the frame-averaged power spectrum, strongest first.
// Peaks closer than min_separation_hz to a stronger one are dropped.
std::vector<double> dominant_peaks(const Spectrogram& s, std::size_t count, double min_separation_hz);

// Power (linear) of the frame-averaged spectrum summed over [lo_hz, hi_hz].
double band_power(const Spectrogram& s, double lo_hz, double hi_hz);

double mean_power(std::span<const Complex> x);
double mean_power(std::span<const double> x);

}  // namespace rble::dsp
