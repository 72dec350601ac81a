#include "rble/dsp.hpp"

#include <string>

namespace rble::dsp {

namespace {

constexpr double kResamplerStopbandDb = 70.0;

template <typename Wave>
void require_valid(const Wave& w, const char* what)
{
    if (!(w.sample_rate_hz > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": sample rate must be positive");
    }
}

FirFilter make_interpolation_filter(int factor)
{
    // Passband to half the input Nyquist, stopband from 1.5x; images of a
    // signal band-limited to 50% of the old Nyquist land in the stopband.
    const double nyquist = 0.5 / factor;
    const double transition = nyquist;
    return design_lowpass(nyquist, kaiser_length(transition, kResamplerStopbandDb), kResamplerStopbandDb);
}

FirFilter make_decimation_stage()
{
    // Flat to 0.1875 fs, stopband from 0.3125 fs. Anything in a stage's
    // transition band folds into the following stage's stopband, so only the
    // last stage's transition band can alias into the output.
    std::size_t n = kaiser_length(0.125, kResamplerStopbandDb);
    while (n % 4 != 3) {
        n += 2;
    }
    return design_halfband(n, kResamplerStopbandDb);
}

template <typename T>
std::vector<T> halve(std::span<const T> x, const FirFilter& f)
{
    const auto filtered = fir_filter(x, f, true);
    std::vector<T> out;
    out.reserve((filtered.size() + 1) / 2);
    for (std::size_t i = 0; i < filtered.size(); i += 2) {
        out.push_back(filtered[i]);
    }
    return out;
}

template <typename T>
std::vector<T> run_cascade(std::span<const T> x)
{
    const FirFilter& f = decimation_stage_filter();
    if (x.size() < 8 * f.taps.size()) {
        throw std::invalid_argument("decimate_cascade: input of " + std::to_string(x.size()) +
                                    " samples is shorter than 8 x stage filter length");
    }
    std::vector<T> y(x.begin(), x.end());
    for (int stage = 0; stage < kDecimationStages; ++stage) {
        y = halve<T>(y, f);
    }
    return y;
}

}  // namespace

ComplexWaveform fir_filter(const ComplexWaveform& w, const FirFilter& f, bool compensate_delay)
{
    ComplexWaveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.center_freq_hz = w.center_freq_hz;
    out.samples = fir_filter<Complex>(w.samples, f, compensate_delay);
    return out;
}

RealWaveform fir_filter(const RealWaveform& w, const FirFilter& f, bool compensate_delay)
{
    RealWaveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples = fir_filter<double>(w.samples, f, compensate_delay);
    return out;
}

const FirFilter& interpolation_filter(int factor)
{
    static const FirFilter x2 = make_interpolation_filter(2);
    static const FirFilter x4 = make_interpolation_filter(4);
    static const FirFilter x8 = make_interpolation_filter(8);
    switch (factor) {
    case 2:
        return x2;
    case 4:
        return x4;
    case 8:
        return x8;
    default:
        throw std::invalid_argument("interpolate: unsupported factor " + std::to_string(factor) +
                                    " (expected 2, 4 or 8)");
    }
}

ComplexWaveform interpolate(const ComplexWaveform& w, int factor)
{
    require_valid(w, "interpolate");
    const FirFilter& f = interpolation_filter(factor);
    const auto up = static_cast<std::size_t>(factor);

    std::vector<Complex> stuffed(w.size() * up, Complex{});
    for (std::size_t n = 0; n < w.size(); ++n) {
        // Gain of `factor` restores the amplitude lost to the inserted zeros.
        stuffed[n * up] = w.samples[n] * static_cast<double>(factor);
    }
    ComplexWaveform out;
    out.sample_rate_hz = w.sample_rate_hz * factor;
    out.center_freq_hz = w.center_freq_hz;
    out.samples = fir_filter<Complex>(stuffed, f, true);
    return out;
}

const FirFilter& decimation_stage_filter()
{
    static const FirFilter f = make_decimation_stage();
    return f;
}

ComplexWaveform decimate_cascade(const ComplexWaveform& w)
{
    require_valid(w, "decimate_cascade");
    ComplexWaveform out;
    out.samples = run_cascade<Complex>(w.samples);
    out.sample_rate_hz = w.sample_rate_hz / (1 << kDecimationStages);
    out.center_freq_hz = w.center_freq_hz;
    return out;
}

RealWaveform decimate_cascade(const RealWaveform& w)
{
    require_valid(w, "decimate_cascade");
    RealWaveform out;
    out.samples = run_cascade<double>(w.samples);
    out.sample_rate_hz = w.sample_rate_hz / (1 << kDecimationStages);
    return out;
}

RealWaveform digital_upconvert(const ComplexWaveform& baseband, double if_hz, int factor)
{
    return real_part(mix_complex(interpolate(baseband, factor), if_hz));
}

ComplexWaveform digital_downconvert(const RealWaveform& if_wave, double if_hz)
{
    return decimate_cascade(mix_complex(to_complex(if_wave), -if_hz));
}

}  // namespace rble::dsp
