#pragma once

// Reference implementations kept deliberately naive and independent of the
// library code under test.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

// Bit-array whitening register: positions 0..N-1, output from the top
// position, fed back into position 0 and XORed into the tap position.
template <int N>
std::vector<std::uint8_t> lfsr_bits(const std::array<std::uint8_t, N>& seed, int tap, std::size_t n)
{
    std::array<std::uint8_t, N> r = seed;
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t o = r[N - 1];
        out.push_back(o);
        for (int p = N - 1; p > 0; --p) {
            r[p] = r[p - 1];
        }
        r[0] = o;
        r[tap] ^= o;
    }
    return out;
}

inline std::vector<std::uint8_t> ble7(int channel, std::size_t n)
{
    std::array<std::uint8_t, 7> seed{};
    seed[0] = 1;
    for (int p = 1; p < 7; ++p) {
        seed[p] = (channel >> (6 - p)) & 1;
    }
    return lfsr_bits<7>(seed, 4, n);
}

inline std::vector<std::uint8_t> paper9(int channel, std::size_t n)
{
    const int s = channel == 0 ? 1 : channel;
    std::array<std::uint8_t, 9> seed{};
    for (int p = 0; p < 9; ++p) {
        seed[p] = (s >> p) & 1;
    }
    return lfsr_bits<9>(seed, 5, n);
}

// The byte-register formulation used by common SDR BLE decoders.
inline std::vector<std::uint8_t> ble7_bytewise(int channel, std::size_t n)
{
    unsigned lfsr = static_cast<unsigned>(channel) | 0x40U;
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned o = lfsr & 1U;
        out.push_back(static_cast<std::uint8_t>(o));
        if (o) {
            lfsr ^= 0x88U;
        }
        lfsr >>= 1;
    }
    return out;
}

// O(N^2) DFT; bin k is k * fs / N.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x)
{
    const std::size_t n = x.size();
    std::vector<std::complex<double>> X(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{};
        for (std::size_t t = 0; t < n; ++t) {
            const double a = -2.0 * M_PI * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(a), std::sin(a));
        }
        X[k] = acc;
    }
    return X;
}

inline std::size_t argmax_bin(const std::vector<std::complex<double>>& X)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < X.size(); ++k) {
        if (std::abs(X[k]) > std::abs(X[best])) {
            best = k;
        }
    }
    return best;
}

// Signed frequency of a DFT bin.
inline double bin_freq(std::size_t k, std::size_t n, double fs)
{
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    return k > n / 2 ? f - fs : f;
}

}  // namespace oracle
