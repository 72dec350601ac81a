#include "rble/harness.hpp"

#include <string>

namespace rble::harness {

Bits gen_tag_data(DataKind kind, std::size_t len, std::uint64_t seed)
{
    if (len == 0) {
        throw std::invalid_argument("gen_tag_data: length must be >= 1");
    }
    channel::GaussianSource rng(channel::splitmix64(seed));
    auto coin = [&rng] { return static_cast<std::uint8_t>(rng.uniform() < 0.5 ? 0 : 1); };

    Bits bits(len, 0);
    switch (kind) {
    case DataKind::all0:
        break;
    case DataKind::all1:
        std::fill(bits.begin(), bits.end(), 1);
        break;
    case DataKind::random:
        for (auto& b : bits) {
            b = coin();
        }
        break;
    case DataKind::pairs:
        if (len % 2 != 0) {
            throw std::invalid_argument("gen_tag_data: (00|11)* data needs an even length, got " +
                                        std::to_string(len));
        }
        for (std::size_t i = 0; i < len; i += 2) {
            bits[i] = bits[i + 1] = coin();
        }
        break;
    }
    return bits;
}

}  // namespace rble::harness
