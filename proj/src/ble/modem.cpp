#include "rble/ble_phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rble::ble {

namespace {

constexpr std::size_t kChannelFilterTaps = 129;
constexpr double kChannelFilterCutoffHz = 1e6;
constexpr double kChannelFilterStopbandDb = 60.0;

}  // namespace

void PhyConfig::validate() const
{
    if (sps < 2) {
        throw std::invalid_argument("PhyConfig: sps must be >= 2");
    }
    if (!(deviation_hz > 0.0)) {
        throw std::invalid_argument("PhyConfig: deviation must be positive");
    }
    if (!(symbol_rate_hz > 0.0)) {
        throw std::invalid_argument("PhyConfig: symbol rate must be positive");
    }
    if (mode == Modulation::gfsk && (!(bt > 0.0) || gaussian_span_symbols < 1)) {
        throw std::invalid_argument("PhyConfig: gfsk needs bt > 0 and a filter span >= 1");
    }
    if (!(deviation_hz < sample_rate_hz() / 2.0)) {
        throw std::invalid_argument("PhyConfig: deviation exceeds Nyquist");
    }
}

dsp::ComplexWaveform modulate_bits(std::span<const std::uint8_t> air_bits, const PhyConfig& cfg)
{
    cfg.validate();
    if (air_bits.empty()) {
        throw std::invalid_argument("modulate: no bits");
    }
    const auto sps = static_cast<std::size_t>(cfg.sps);
    const std::size_t n = air_bits.size() * sps;

    // NRZ frequency pulse train in units of the peak deviation.
    std::vector<double> pulse;
    if (cfg.mode == Modulation::gfsk) {
        const dsp::FirFilter g = dsp::design_gaussian_filter(cfg.bt, cfg.sps, cfg.gaussian_span_symbols);
        // Hold the first and last symbol across the filter edges so the packet
        // boundaries are not pulled towards zero frequency.
        const std::size_t pad = g.group_delay_samples;
        std::vector<double> nrz;
        nrz.reserve(n + 2 * pad);
        const double first = air_bits.front() ? 1.0 : -1.0;
        const double last = air_bits.back() ? 1.0 : -1.0;
        nrz.insert(nrz.end(), pad, first);
        for (std::uint8_t b : air_bits) {
            nrz.insert(nrz.end(), sps, b ? 1.0 : -1.0);
        }
        nrz.insert(nrz.end(), pad, last);
        const auto shaped = dsp::fir_filter<double>(nrz, g, true);
        pulse.assign(shaped.begin() + static_cast<std::ptrdiff_t>(pad),
                     shaped.begin() + static_cast<std::ptrdiff_t>(pad + n));
    } else {
        pulse.reserve(n);
        for (std::uint8_t b : air_bits) {
            pulse.insert(pulse.end(), sps, b ? 1.0 : -1.0);
        }
    }

    dsp::ComplexWaveform w;
    w.sample_rate_hz = cfg.sample_rate_hz();
    w.samples.resize(n);
    const double k = dsp::kTwoPi * cfg.deviation_hz / w.sample_rate_hz;
    double phase = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Sample i already carries its own frequency step, so the
        // discriminator reads pulse[i] exactly.
        phase = std::remainder(phase + k * pulse[i], dsp::kTwoPi);
        w.samples[i] = std::polar(1.0, phase);
    }
    return w;
}

dsp::ComplexWaveform modulate(const BlePacket& p, const PhyConfig& cfg)
{
    if (p.payload.size() > kMaxPayloadBits) {
        throw std::invalid_argument("modulate: payload exceeds 2080 bits");
    }
    return modulate_bits(p.bits(), cfg);
}

dsp::FirFilter receiver_channel_filter(const PhyConfig& cfg)
{
    const double cutoff = kChannelFilterCutoffHz / cfg.sample_rate_hz();
    if (cutoff >= 0.5) {
        // The whole sampled band already fits in the channel.
        return dsp::FirFilter({1.0});
    }
    return dsp::design_lowpass(cutoff, kChannelFilterTaps, kChannelFilterStopbandDb);
}

std::vector<double> instantaneous_frequency(const dsp::ComplexWaveform& w)
{
    std::vector<double> f(w.size(), 0.0);
    const double scale = w.sample_rate_hz / dsp::kTwoPi;
    for (std::size_t n = 1; n < w.size(); ++n) {
        f[n] = std::arg(w.samples[n] * std::conj(w.samples[n - 1])) * scale;
    }
    if (f.size() > 1) {
        f[0] = f[1];
    }
    return f;
}

namespace {

struct SyncResult {
    std::size_t offset = 0;
    double metric = 0.0;
};

// Normalised cross-correlation magnitude against the modulated header.
SyncResult correlate_header(std::span<const dsp::Complex> r, std::span<const dsp::Complex> tmpl)
{
    const std::size_t len = tmpl.size();
    if (r.size() < len) {
        throw SyncError("correlate sync: waveform shorter than the packet header");
    }
    const double tmpl_energy = dsp::mean_power(tmpl) * static_cast<double>(len);
    double window_energy = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        window_energy += std::norm(r[k]);
    }
    SyncResult best;
    for (std::size_t o = 0; o + len <= r.size(); ++o) {
        if (o > 0) {
            window_energy += std::norm(r[o + len - 1]) - std::norm(r[o - 1]);
        }
        dsp::Complex acc{};
        for (std::size_t k = 0; k < len; ++k) {
            acc += r[o + k] * std::conj(tmpl[k]);
        }
        const double denom = std::sqrt(std::max(window_energy, 0.0) * tmpl_energy);
        const double metric = denom > 0.0 ? std::abs(acc) / denom : 0.0;
        if (metric > best.metric) {
            best = {o, metric};
        }
    }
    return best;
}

}  // namespace

Reception receive(const dsp::ComplexWaveform& w, const PhyConfig& cfg, const ReceiverConfig& rx)
{
    cfg.validate();
    const auto sps = static_cast<std::size_t>(cfg.sps);
    if (w.size() < sps) {
        throw std::invalid_argument("demodulate: waveform shorter than one symbol");
    }
    const dsp::FirFilter chan = receiver_channel_filter(cfg);
    const dsp::ComplexWaveform filtered = dsp::fir_filter(w, chan, true);

    Reception out;
    if (rx.sync == SyncMode::correlate) {
        BlePacket header;
        header.access_address = rx.access_address;
        header.preamble = preamble_for(rx.access_address);
        const auto tmpl = dsp::fir_filter(modulate_bits(header.header_bits(), cfg), chan, true);
        const SyncResult s = correlate_header(filtered.samples, tmpl.samples);
        if (s.metric < rx.sync_threshold) {
            throw SyncError("correlate sync: peak " + std::to_string(s.metric) + " below threshold " +
                            std::to_string(rx.sync_threshold));
        }
        out.start_sample = s.offset;
        out.sync_metric = s.metric;
    }

    const std::size_t available = (w.size() - out.start_sample) / sps;
    const std::size_t nbits = rx.num_bits == 0 ? available : rx.num_bits;
    if (nbits > available) {
        throw std::invalid_argument("demodulate: waveform holds " + std::to_string(available) +
                                    " symbols, " + std::to_string(nbits) + " requested");
    }

    const std::vector<double> freq = instantaneous_frequency(filtered);
    if (!(rx.decision_window > 0.0 && rx.decision_window <= 1.0)) {
        throw std::invalid_argument("demodulate: decision window must be in (0, 1]");
    }
    const auto excl = static_cast<std::size_t>(std::lround(static_cast<double>(sps) * (1.0 - rx.decision_window) / 2.0));
    const std::size_t lo = std::min(excl, (sps - 1) / 2);
    const std::size_t hi = sps - lo;
    out.bits.resize(nbits);
    for (std::size_t k = 0; k < nbits; ++k) {
        const std::size_t base = out.start_sample + k * sps;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            acc += freq[base + i];
        }
        out.bits[k] = acc > 0.0 ? 1 : 0;
    }
    return out;
}

Bits demodulate(const dsp::ComplexWaveform& w, const PhyConfig& cfg, SyncMode sync, std::size_t num_bits)
{
    ReceiverConfig rx;
    rx.sync = sync;
    rx.num_bits = num_bits;
    return receive(w, cfg, rx).bits;
}

std::size_t bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received)
{
    if (sent.size() != received.size()) {
        throw std::invalid_argument("ber: length mismatch (" + std::to_string(sent.size()) + " vs " +
                                    std::to_string(received.size()) + ")");
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
        errors += ((sent[i] ^ received[i]) & 1U) ? 1 : 0;
    }
    return errors;
}

double ber(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> received)
{
    const std::size_t errors = bit_errors(sent, received);
    if (sent.empty()) {
        throw std::invalid_argument("ber: empty bit vectors");
    }
    return static_cast<double>(errors) / static_cast<double>(sent.size());
}

}  // namespace rble::ble
