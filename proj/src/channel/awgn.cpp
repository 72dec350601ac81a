#include "rble/channel.hpp"

#include <cmath>

namespace rble::channel {

double ebno_to_snr(double ebno_db, int sps)
{
    if (sps < 1) {
        throw std::invalid_argument("ebno_to_snr: sps must be >= 1");
    }
    return ebno_db - 10.0 * std::log10(static_cast<double>(sps));
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b)
{
    return base ^ splitmix64(splitmix64(a) ^ (b * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

double GaussianSource::uniform()
{
    const std::uint64_t h = splitmix64(key_ ^ splitmix64(counter_++));
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianSource::next()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller.
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = dsp::kTwoPi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

namespace {

double noise_power(double signal_power, double snr_db)
{
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

}  // namespace

dsp::ComplexWaveform add_awgn(const dsp::ComplexWaveform& w, const AwgnConfig& cfg)
{
    if (cfg.insertion == Insertion::none) {
        return w;
    }
    if (cfg.insertion != Insertion::baseband_complex) {
        throw std::invalid_argument("add_awgn: complex waveform needs baseband_complex insertion");
    }
    const double sigma = std::sqrt(noise_power(dsp::mean_power(w.samples), cfg.snr_db()) / 2.0);
    GaussianSource g(cfg.seed);
    dsp::ComplexWaveform out = w;
    for (auto& s : out.samples) {
        const double i = g.next();
        const double q = g.next();
        s += dsp::Complex(sigma * i, sigma * q);
    }
    return out;
}

dsp::RealWaveform add_awgn(const dsp::RealWaveform& w, const AwgnConfig& cfg)
{
    if (cfg.insertion == Insertion::none) {
        return w;
    }
    if (cfg.insertion != Insertion::if_real) {
        throw std::invalid_argument("add_awgn: real waveform needs if_real insertion");
    }
    const double sigma = std::sqrt(noise_power(dsp::mean_power(w.samples), cfg.snr_db()));
    GaussianSource g(cfg.seed);
    dsp::RealWaveform out = w;
    for (double& s : out.samples) {
        s += sigma * g.next();
    }
    return out;
}

}  // namespace rble::channel
