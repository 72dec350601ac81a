#pragma once

#include "rble/ble_phy.hpp"
#include "rble/channel.hpp"
#include "rble/dsp.hpp"

#include <optional>
#include <string>
#include <vector>

// The backscatter tag: a reverse-whitened single-tone exciting packet and the
// per-bit cosine frequency shift that turns it into a packet on another
// channel.
namespace rble::tag {

using ble::Bits;

enum class TonePolarity { all_zeros_on_air, all_ones_on_air };

struct ExcitationSpec {
    ble::ChannelIndex exciting_channel{ble::kAdvertisingChannel37};
    TonePolarity tone_polarity = TonePolarity::all_zeros_on_air;
    std::size_t payload_len_bits = 200;
    std::uint32_t access_address = ble::kAdvertisingAccessAddress;
};

// Payload p with whiten(p, exciting_channel) equal to the constant on-air
// tone bits, i.e. the keystream itself (or its complement).
Bits reverse_whiten_payload(const ExcitationSpec& spec, ble::LfsrKind kind);

// Baseband packet whose payload is a single tone at -deviation (all zeros) or
// +deviation (all ones).
dsp::ComplexWaveform build_exciting_waveform(const ExcitationSpec& spec, const ble::PhyConfig& phy,
                                             ble::LfsrKind kind);

struct TagConfig {
    Bits tag_bits;
    ble::ChannelIndex target_channel{3};
    double shift0_hz = 8.0e6;
    double shift1_hz = 8.5e6;
    double header_shift_hz = 8.0e6;
    dsp::PhaseMode phase_mode = dsp::PhaseMode::continuous;
};

// Shifts that move the exciting tone onto the target channel's symbol 0 / 1
// frequencies; the header moves by the channel spacing.
TagConfig make_tag_config(Bits tag_bits, ble::ChannelIndex exciting, ble::ChannelIndex target,
                          double deviation_hz, TonePolarity polarity = TonePolarity::all_zeros_on_air,
                          dsp::PhaseMode phase_mode = dsp::PhaseMode::continuous);

// Human-readable violations of the shift geometry (symbol spacing of twice
// the deviation, shifts wider than a 2 MHz channel). Empty when consistent.
std::vector<std::string> geometry_issues(const TagConfig& cfg, ble::ChannelIndex exciting, double deviation_hz,
                                         TonePolarity polarity = TonePolarity::all_zeros_on_air);

struct SymbolTiming {
    std::size_t samples_per_symbol = 64;
    std::size_t header_symbols = ble::kHeaderBits;
    // Highest frequency present in the IF input.
    double band_edge_hz = 0.0;
};

// Header samples are multiplied by cos at header_shift_hz, payload symbol k by
// cos at shift1_hz or shift0_hz depending on tag_bits[k].
dsp::RealWaveform tag_modulate(const dsp::RealWaveform& if_wave, const TagConfig& cfg, const SymbolTiming& timing);

struct EndToEndKnobs {
    ble::PhyConfig phy;
    ble::LfsrKind lfsr = ble::LfsrKind::ble_spec_7bit;
    dsp::PhaseMode phase_mode = dsp::PhaseMode::continuous;
    std::optional<channel::AwgnConfig> awgn;  // must use if_real insertion
    ble::SyncMode sync = ble::SyncMode::genie;
    ble::ChannelIndex exciting_channel{ble::kAdvertisingChannel37};
    ble::ChannelIndex target_channel{3};
    TonePolarity tone_polarity = TonePolarity::all_zeros_on_air;
    std::optional<double> shift0_hz;
    std::optional<double> shift1_hz;
    std::optional<double> header_shift_hz;
    int interpolation = 8;
};

// Intermediate waveforms, filled when requested.
struct EndToEndTrace {
    dsp::ComplexWaveform exciting_baseband;
    dsp::RealWaveform exciting_if;
    dsp::RealWaveform reflected_if;
    dsp::RealWaveform received_if;
    dsp::ComplexWaveform received_baseband;
    TagConfig tag;
    std::size_t sync_start_sample = 0;
    double sync_metric = 0.0;
};

struct EndToEndResult {
    Bits sent_bits;        // tag bits as placed on air
    Bits received_bits;    // demodulated on-air payload
    Bits sent_payload;     // sent_bits dewhitened with the target keystream
    Bits decoded_payload;  // received_bits dewhitened with the target keystream
    std::size_t bit_errors = 0;
    double ber = 0.0;
};

// exciting packet -> DUC -> tag -> optional AWGN -> DDC from the target IF
// -> receiver -> dewhitening. ble::SyncError propagates.
EndToEndResult end_to_end(const Bits& tag_bits, const EndToEndKnobs& knobs, EndToEndTrace* trace = nullptr);

}  // namespace rble::tag
