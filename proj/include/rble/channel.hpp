#pragma once

#include "rble/dsp.hpp"

#include <cstdint>

// AWGN impairment with Eb/No bookkeeping.
namespace rble::channel {

enum class Insertion { none, baseband_complex, if_real };

// SNR (dB) over the full sampled bandwidth: Eb/No - 10 log10(sps).
double ebno_to_snr(double ebno_db, int sps);

struct AwgnConfig {
    double ebno_db = 20.0;
    // Samples per symbol at the point of insertion (64 at IF, 8 at baseband
    // with the default rates).
    int sps = 8;
    Insertion insertion = Insertion::baseband_complex;
    std::uint64_t seed = 0;

    double snr_db() const { return ebno_to_snr(ebno_db, sps); }
};

std::uint64_t splitmix64(std::uint64_t x);

// Mixes a base seed with per-trial coordinates into an independent stream key.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Counter-based standard normal generator: draw i depends only on (key, i).
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t key) : key_(key) {}

    double next();
    double uniform();  // (0, 1]

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Noise power = measured signal power / 10^(snr/10). Complex noise splits the
// power equally over I and Q.
dsp::ComplexWaveform add_awgn(const dsp::ComplexWaveform& w, const AwgnConfig& cfg);
dsp::RealWaveform add_awgn(const dsp::RealWaveform& w, const AwgnConfig& cfg);

}  // namespace rble::channel
