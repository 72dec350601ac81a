#include "rble/dsp.hpp"

#include <cmath>
#include <numeric>

namespace rble::dsp {

FirFilter::FirFilter(std::vector<double> coefficients)
    : taps(std::move(coefficients)),
      group_delay_samples(taps.empty() ? 0 : (taps.size() - 1) / 2)
{
}

double FirFilter::dc_gain() const
{
    return std::accumulate(taps.begin(), taps.end(), 0.0);
}

FirFilter design_gaussian_filter(double bt, int sps, int span_symbols)
{
    if (!(bt > 0.0) || sps < 2 || span_symbols < 1) {
        throw std::invalid_argument("design_gaussian_filter: need bt > 0, sps >= 2, span >= 1");
    }
    // Standard deviation of the Gaussian impulse response in symbol periods;
    // puts the -3 dB point of the frequency response at bt * symbol rate.
    const double sigma = std::sqrt(std::log(2.0)) / (kTwoPi * bt);
    const int len = span_symbols * sps + 1;
    const double mid = static_cast<double>(len - 1) / 2.0;

    std::vector<double> taps(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k) {
        const double t = (static_cast<double>(k) - mid) / static_cast<double>(sps);
        taps[static_cast<std::size_t>(k)] = std::exp(-t * t / (2.0 * sigma * sigma));
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) {
        t /= sum;
    }
    // Exact symmetry regardless of rounding in the exponent.
    for (std::size_t k = 0; k < taps.size() / 2; ++k) {
        taps[taps.size() - 1 - k] = taps[k];
    }
    return FirFilter(std::move(taps));
}

double kaiser_beta(double stopband_db)
{
    if (stopband_db > 50.0) {
        return 0.1102 * (stopband_db - 8.7);
    }
    if (stopband_db >= 21.0) {
        return 0.5842 * std::pow(stopband_db - 21.0, 0.4) + 0.07886 * (stopband_db - 21.0);
    }
    return 0.0;
}

std::size_t kaiser_length(double transition_width, double stopband_db)
{
    if (!(transition_width > 0.0 && transition_width < 0.5)) {
        throw std::invalid_argument("kaiser_length: transition width must be in (0, 0.5)");
    }
    auto n = static_cast<std::size_t>(std::ceil((stopband_db - 7.95) / (14.36 * transition_width))) + 1;
    return n | 1U;
}

namespace {

std::vector<double> kaiser_window(std::size_t n, double beta)
{
    std::vector<double> w(n, 1.0);
    if (n == 1) {
        return w;
    }
    const double denom = std::cyl_bessel_i(0.0, beta);
    const double half = static_cast<double>(n - 1) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = (static_cast<double>(k) - half) / half;
        w[k] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    }
    return w;
}

double sinc(double x)
{
    if (x == 0.0) {
        return 1.0;
    }
    return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

FirFilter design_lowpass(double cutoff, std::size_t num_taps, double stopband_db)
{
    if (!(cutoff > 0.0 && cutoff < 0.5)) {
        throw std::invalid_argument("design_lowpass: cutoff must be in (0, 0.5) cycles/sample");
    }
    if (num_taps == 0) {
        throw std::invalid_argument("design_lowpass: need at least one tap");
    }
    num_taps |= 1U;
    const auto window = kaiser_window(num_taps, kaiser_beta(stopband_db));
    const double mid = static_cast<double>(num_taps - 1) / 2.0;
    std::vector<double> taps(num_taps);
    for (std::size_t k = 0; k < num_taps; ++k) {
        const double n = static_cast<double>(k) - mid;
        taps[k] = 2.0 * cutoff * sinc(2.0 * cutoff * n) * window[k];
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& t : taps) {
        t /= sum;
    }
    return FirFilter(std::move(taps));
}

FirFilter design_halfband(std::size_t num_taps, double stopband_db)
{
    if (num_taps % 4 != 3) {
        throw std::invalid_argument("design_halfband: tap count must be 4k + 3");
    }
    FirFilter f = design_lowpass(0.25, num_taps, stopband_db);
    const std::size_t mid = f.group_delay_samples;
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        const std::size_t offset = k > mid ? k - mid : mid - k;
        if (offset != 0 && offset % 2 == 0) {
            f.taps[k] = 0.0;
        }
    }
    return f;
}

}  // namespace rble::dsp
