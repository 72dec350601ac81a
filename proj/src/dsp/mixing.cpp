#include "rble/dsp.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace rble::dsp {

ComplexWaveform to_complex(const RealWaveform& w)
{
    ComplexWaveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.reserve(w.size());
    for (double s : w.samples) {
        out.samples.emplace_back(s, 0.0);
    }
    return out;
}

RealWaveform real_part(const ComplexWaveform& w)
{
    RealWaveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.reserve(w.size());
    for (const Complex& s : w.samples) {
        out.samples.push_back(s.real());
    }
    return out;
}

ComplexWaveform mix_complex(const ComplexWaveform& w, double f_hz)
{
    if (!(w.sample_rate_hz > 0.0)) {
        throw std::invalid_argument("mix_complex: sample rate must be positive");
    }
    if (!(std::abs(f_hz) < w.sample_rate_hz / 2.0)) {
        throw std::invalid_argument("mix_complex: |f| = " + std::to_string(f_hz) +
                                    " Hz is outside the Nyquist range");
    }
    ComplexWaveform out = w;
    out.center_freq_hz += f_hz;
    if (f_hz == 0.0) {
        return out;
    }
    const double step = kTwoPi * f_hz / w.sample_rate_hz;
    for (std::size_t n = 0; n < out.samples.size(); ++n) {
        // Evaluate the angle from n directly; accumulating would drift.
        const double phi = std::remainder(step * static_cast<double>(n), kTwoPi);
        out.samples[n] *= Complex(std::cos(phi), std::sin(phi));
    }
    return out;
}

void mix_real_cosine_segment(std::span<double> segment, double sample_rate_hz, double f_hz,
                             PhaseMode mode, CosinePhase& phase)
{
    const double step = kTwoPi * f_hz / sample_rate_hz;
    switch (mode) {
    case PhaseMode::absolute_time:
        for (std::size_t i = 0; i < segment.size(); ++i) {
            const double n = static_cast<double>(phase.sample_offset + i);
            segment[i] *= std::cos(std::remainder(step * n, kTwoPi));
        }
        phase.phase_rad =
            std::remainder(step * static_cast<double>(phase.sample_offset + segment.size()), kTwoPi);
        break;
    case PhaseMode::continuous:
        for (double& s : segment) {
            s *= std::cos(phase.phase_rad);
            phase.phase_rad = std::remainder(phase.phase_rad + step, kTwoPi);
        }
        break;
    }
    phase.sample_offset += segment.size();
}

RealWaveform mix_real_cosine(const RealWaveform& w, double f_hz, PhaseMode mode, double band_edge_hz)
{
    if (!(w.sample_rate_hz > 0.0)) {
        throw std::invalid_argument("mix_real_cosine: sample rate must be positive");
    }
    if (f_hz < 0.0) {
        throw std::invalid_argument("mix_real_cosine: shift frequency must be non-negative");
    }
    if (f_hz > 0.0 && !(f_hz + band_edge_hz < w.sample_rate_hz / 2.0)) {
        throw std::invalid_argument("mix_real_cosine: sum product at " +
                                    std::to_string(f_hz + band_edge_hz) + " Hz aliases");
    }
    RealWaveform out = w;
    CosinePhase phase;
    mix_real_cosine_segment(out.samples, out.sample_rate_hz, f_hz, mode, phase);
    return out;
}

double mean_power(std::span<const Complex> x)
{
    if (x.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const Complex& s : x) {
        acc += std::norm(s);
    }
    return acc / static_cast<double>(x.size());
}

double mean_power(std::span<const double> x)
{
    if (x.empty()) {
        return 0.0;
    }
    return std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / static_cast<double>(x.size());
}

}  // namespace rble::dsp
