#include "rble/backscatter_tag.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace rble::tag {

namespace {

constexpr double kChannelWidthHz = 2e6;
constexpr double kShiftToleranceHz = 1.0;

double tone_offset(TonePolarity polarity, double deviation_hz)
{
    return polarity == TonePolarity::all_ones_on_air ? deviation_hz : -deviation_hz;
}

}  // namespace

TagConfig make_tag_config(Bits tag_bits, ble::ChannelIndex exciting, ble::ChannelIndex target,
                          double deviation_hz, TonePolarity polarity, dsp::PhaseMode phase_mode)
{
    const double spacing = ble::channel_center_freq(target) - ble::channel_center_freq(exciting);
    const double tone = tone_offset(polarity, deviation_hz);
    TagConfig cfg;
    cfg.tag_bits = std::move(tag_bits);
    cfg.target_channel = target;
    cfg.shift0_hz = spacing - deviation_hz - tone;
    cfg.shift1_hz = spacing + deviation_hz - tone;
    cfg.header_shift_hz = spacing;
    cfg.phase_mode = phase_mode;
    return cfg;
}

std::vector<std::string> geometry_issues(const TagConfig& cfg, ble::ChannelIndex exciting, double deviation_hz,
                                         TonePolarity polarity)
{
    std::vector<std::string> issues;
    const double spacing = ble::channel_center_freq(cfg.target_channel) - ble::channel_center_freq(exciting);
    const double expected0 = spacing - deviation_hz - tone_offset(polarity, deviation_hz);
    if (std::abs(cfg.shift0_hz - expected0) > kShiftToleranceHz) {
        issues.push_back("shift0 does not land the tone on the target channel's symbol-0 frequency");
    }
    if (std::abs(std::abs(cfg.shift1_hz - cfg.shift0_hz) - 2.0 * deviation_hz) > kShiftToleranceHz) {
        issues.push_back("|shift1 - shift0| differs from twice the deviation");
    }
    if (!(std::min(cfg.shift0_hz, cfg.shift1_hz) > kChannelWidthHz)) {
        issues.push_back("shift not wider than a 2 MHz channel; the mirror copy can overlap the target");
    }
    return issues;
}

dsp::RealWaveform tag_modulate(const dsp::RealWaveform& if_wave, const TagConfig& cfg, const SymbolTiming& timing)
{
    const std::size_t sps = timing.samples_per_symbol;
    const std::size_t symbols = timing.header_symbols + cfg.tag_bits.size();
    if (sps == 0 || if_wave.size() != symbols * sps) {
        throw std::invalid_argument("tag_modulate: waveform of " + std::to_string(if_wave.size()) +
                                    " samples does not cover " + std::to_string(symbols) + " symbols of " +
                                    std::to_string(sps) + " samples");
    }
    if (!(if_wave.sample_rate_hz > 0.0)) {
        throw std::invalid_argument("tag_modulate: sample rate must be positive");
    }
    const double highest = std::max({cfg.shift0_hz, cfg.shift1_hz, cfg.header_shift_hz});
    const double lowest = std::min({cfg.shift0_hz, cfg.shift1_hz, cfg.header_shift_hz});
    if (lowest < 0.0) {
        throw std::invalid_argument("tag_modulate: shift frequencies must be non-negative");
    }
    if (highest > 0.0 && !(highest + timing.band_edge_hz < if_wave.sample_rate_hz / 2.0)) {
        throw std::invalid_argument("tag_modulate: sum product aliases above Nyquist");
    }

    dsp::RealWaveform out = if_wave;
    std::span<double> samples(out.samples);
    dsp::CosinePhase phase;
    const std::size_t header_len = timing.header_symbols * sps;
    dsp::mix_real_cosine_segment(samples.first(header_len), out.sample_rate_hz, cfg.header_shift_hz,
                                 cfg.phase_mode, phase);
    for (std::size_t k = 0; k < cfg.tag_bits.size(); ++k) {
        const double f = cfg.tag_bits[k] ? cfg.shift1_hz : cfg.shift0_hz;
        dsp::mix_real_cosine_segment(samples.subspan(header_len + k * sps, sps), out.sample_rate_hz, f,
                                     cfg.phase_mode, phase);
    }
    return out;
}

}  // namespace rble::tag
