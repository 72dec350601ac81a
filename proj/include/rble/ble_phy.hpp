#pragma once

#include "rble/dsp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

// BLE LE1M physical layer: channel plan, data whitening, packet layout,
// GFSK / 2-FSK modulation and a noncoherent discriminator receiver.
namespace rble::ble {

using Bits = std::vector<std::uint8_t>;

inline constexpr int kNumChannels = 40;

class ChannelIndex {
public:
    explicit ChannelIndex(int index);
    int value() const { return index_; }
    friend bool operator==(ChannelIndex, ChannelIndex) = default;

private:
    int index_;
};

inline constexpr int kAdvertisingChannel37 = 37;

// Center frequency per the BLE channel plan: data channels 0-10 at
// 2404-2424 MHz, 11-36 at 2428-2478 MHz, advertising 37/38/39 at
// 2402/2426/2480 MHz.
double channel_center_freq(ChannelIndex c);

// Desk-scale stand-in for the 2.4 GHz band: IF = RF - 2386 MHz, so
// 2402 MHz -> 16 MHz, 2410 MHz -> 24 MHz, 2394 MHz -> 8 MHz.
inline constexpr double kIfOffsetHz = 2386e6;
inline constexpr double kIfSampleRateHz = 64e6;
inline double rf_to_if(double rf_hz) { return rf_hz - kIfOffsetHz; }
inline double if_to_rf(double if_hz) { return if_hz + kIfOffsetHz; }

enum class LfsrKind {
    ble_spec_7bit,  // x^7 + x^4 + 1, seeded 1 | channel (MSB first)
    paper_9bit,     // x^9 + x^5 + 1, seeded with the channel index
};

// Galois-style whitening register. Position 0 receives the output bit, tap
// positions are XORed with it on each shift; output is the top position.
class WhiteningLfsr {
public:
    WhiteningLfsr(ChannelIndex channel, LfsrKind kind);

    std::uint8_t next();
    std::uint32_t state() const { return state_; }
    int degree() const { return degree_; }
    std::size_t period() const { return (std::size_t{1} << degree_) - 1; }

    static int degree_of(LfsrKind kind);

private:
    std::uint32_t state_ = 0;
    std::uint32_t tap_mask_ = 0;
    int degree_ = 0;
};

Bits keystream(ChannelIndex channel, LfsrKind kind, std::size_t n);

// XOR with the channel keystream. Applying it twice restores the input.
Bits whiten(std::span<const std::uint8_t> bits, ChannelIndex channel, LfsrKind kind = LfsrKind::ble_spec_7bit);

struct Whitening {
    ChannelIndex channel;
    LfsrKind kind = LfsrKind::ble_spec_7bit;
};

inline constexpr std::size_t kPreambleBits = 8;
inline constexpr std::size_t kAccessAddressBits = 32;
inline constexpr std::size_t kHeaderBits = kPreambleBits + kAccessAddressBits;
inline constexpr std::size_t kMaxPayloadBits = 2080;
inline constexpr std::uint32_t kAdvertisingAccessAddress = 0x8E89BED6;

// Preamble + access address + payload. Fields are sent LSB first; `payload`
// holds the on-air (already whitened) bits.
struct BlePacket {
    std::uint8_t preamble = 0xAA;
    std::uint32_t access_address = kAdvertisingAccessAddress;
    Bits payload;

    Bits header_bits() const;
    Bits bits() const;
    std::size_t size_bits() const { return kHeaderBits + payload.size(); }
};

// 0xAA or 0x55, whichever makes the last preamble bit differ from the first
// access-address bit.
std::uint8_t preamble_for(std::uint32_t access_address);

BlePacket assemble_packet(std::span<const std::uint8_t> payload,
                          std::uint32_t access_address = kAdvertisingAccessAddress,
                          std::optional<Whitening> whitening = std::nullopt);

enum class Modulation { gfsk, fsk2 };

struct PhyConfig {
    Modulation mode = Modulation::gfsk;
    int sps = 8;
    double deviation_hz = 250e3;
    double symbol_rate_hz = 1e6;
    double bt = 0.5;
    int gaussian_span_symbols = 3;

    double modulation_index() const { return 2.0 * deviation_hz / symbol_rate_hz; }
    double sample_rate_hz() const { return symbol_rate_hz * sps; }
    void validate() const;
};

// Continuous-phase FM of an on-air bit sequence; sps samples per bit, |s| = 1.
dsp::ComplexWaveform modulate_bits(std::span<const std::uint8_t> air_bits, const PhyConfig& cfg);
dsp::ComplexWaveform modulate(const BlePacket& p, const PhyConfig& cfg);

enum class SyncMode { genie, correlate };

class SyncError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReceiverConfig {
    SyncMode sync = SyncMode::genie;
    std::uint32_t access_address = kAdvertisingAccessAddress;
    // Bits to slice, including the 40 header bits; 0 means as many as fit.
    std::size_t num_bits = 0;
    // Minimum normalised header correlation accepted by correlate sync.
    double sync_threshold = 0.5;
    // Fraction of each symbol period, centred, averaged into the decision.
    // 1.0 is a full-symbol integrate-and-dump; 0.5 skips the bit edges.
    double decision_window = 1.0;
};

struct Reception {
    Bits bits;
    std::size_t start_sample = 0;
    double sync_metric = 1.0;
};

// 129-tap windowed-sinc lowpass with 1 MHz cutoff at the PHY sample rate.
dsp::FirFilter receiver_channel_filter(const PhyConfig& cfg);

// arg(s[n] conj(s[n-1])) * fs / 2pi; element 0 repeats element 1.
std::vector<double> instantaneous_frequency(const dsp::ComplexWaveform& w);

Reception receive(const dsp::ComplexWaveform& w, const PhyConfig& cfg, const ReceiverConfig& rx);
Bits demodulate(const dsp::ComplexWaveform& w, const PhyConfig& cfg, SyncMode sync, std::size_t num_bits = 0);

std::size_t bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);
double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received);

}  // namespace rble::ble
