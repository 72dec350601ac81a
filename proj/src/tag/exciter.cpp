#include "rble/backscatter_tag.hpp"

namespace rble::tag {

Bits reverse_whiten_payload(const ExcitationSpec& spec, ble::LfsrKind kind)
{
    const std::uint8_t level = spec.tone_polarity == TonePolarity::all_ones_on_air ? 1 : 0;
    const Bits constant(spec.payload_len_bits, level);
    return ble::whiten(constant, spec.exciting_channel, kind);
}

dsp::ComplexWaveform build_exciting_waveform(const ExcitationSpec& spec, const ble::PhyConfig& phy,
                                             ble::LfsrKind kind)
{
    const Bits payload = reverse_whiten_payload(spec, kind);
    const ble::BlePacket packet =
        ble::assemble_packet(payload, spec.access_address, ble::Whitening{spec.exciting_channel, kind});
    return ble::modulate(packet, phy);
}

}  // namespace rble::tag
