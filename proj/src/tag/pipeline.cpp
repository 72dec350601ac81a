#include "rble/backscatter_tag.hpp"

namespace rble::tag {

namespace {

// Half of a 2 MHz BLE channel above the carrier.
constexpr double kChannelHalfWidthHz = 1e6;

}  // namespace

EndToEndResult end_to_end(const Bits& tag_bits, const EndToEndKnobs& knobs, EndToEndTrace* trace)
{
    if (tag_bits.empty()) {
        throw std::invalid_argument("end_to_end: no tag bits");
    }
    if (knobs.awgn && knobs.awgn->insertion == channel::Insertion::baseband_complex) {
        throw std::invalid_argument("end_to_end: noise is inserted at IF (if_real or none)");
    }
    const ble::PhyConfig& phy = knobs.phy;

    ExcitationSpec spec;
    spec.exciting_channel = knobs.exciting_channel;
    spec.tone_polarity = knobs.tone_polarity;
    spec.payload_len_bits = tag_bits.size();
    const dsp::ComplexWaveform exciting = build_exciting_waveform(spec, phy, knobs.lfsr);

    const double exciting_if = ble::rf_to_if(ble::channel_center_freq(knobs.exciting_channel));
    const double target_if = ble::rf_to_if(ble::channel_center_freq(knobs.target_channel));
    const dsp::RealWaveform if_wave = dsp::digital_upconvert(exciting, exciting_if, knobs.interpolation);

    TagConfig cfg = make_tag_config(tag_bits, knobs.exciting_channel, knobs.target_channel, phy.deviation_hz,
                                    knobs.tone_polarity, knobs.phase_mode);
    cfg.shift0_hz = knobs.shift0_hz.value_or(cfg.shift0_hz);
    cfg.shift1_hz = knobs.shift1_hz.value_or(cfg.shift1_hz);
    cfg.header_shift_hz = knobs.header_shift_hz.value_or(cfg.header_shift_hz);

    SymbolTiming timing;
    timing.samples_per_symbol = static_cast<std::size_t>(phy.sps * knobs.interpolation);
    timing.band_edge_hz = exciting_if + kChannelHalfWidthHz;
    const dsp::RealWaveform reflected = tag_modulate(if_wave, cfg, timing);

    const dsp::RealWaveform noisy = knobs.awgn ? channel::add_awgn(reflected, *knobs.awgn) : reflected;
    const dsp::ComplexWaveform baseband = dsp::digital_downconvert(noisy, target_if);

    if (trace) {
        trace->exciting_baseband = exciting;
        trace->exciting_if = if_wave;
        trace->reflected_if = reflected;
        trace->received_if = noisy;
        trace->received_baseband = baseband;
        trace->tag = cfg;
    }

    ble::ReceiverConfig rx;
    rx.sync = knobs.sync;
    rx.num_bits = ble::kHeaderBits + tag_bits.size();
    const ble::Reception reception = ble::receive(baseband, phy, rx);
    if (trace) {
        trace->sync_start_sample = reception.start_sample;
        trace->sync_metric = reception.sync_metric;
    }

    EndToEndResult r;
    r.sent_bits = tag_bits;
    r.received_bits.assign(reception.bits.begin() + static_cast<std::ptrdiff_t>(ble::kHeaderBits),
                           reception.bits.end());
    r.sent_payload = ble::whiten(r.sent_bits, knobs.target_channel, knobs.lfsr);
    r.decoded_payload = ble::whiten(r.received_bits, knobs.target_channel, knobs.lfsr);
    r.bit_errors = ble::bit_errors(r.sent_payload, r.decoded_payload);
    r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(tag_bits.size());
    return r;
}

}  // namespace rble::tag
