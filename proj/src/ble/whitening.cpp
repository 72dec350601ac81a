#include "rble/ble_phy.hpp"

#include <string>

namespace rble::ble {

ChannelIndex::ChannelIndex(int index)
    : index_(index)
{
    if (index < 0 || index >= kNumChannels) {
        throw std::invalid_argument("channel index " + std::to_string(index) + " outside 0..39");
    }
}

double channel_center_freq(ChannelIndex c)
{
    const int i = c.value();
    switch (i) {
    case 37:
        return 2402e6;
    case 38:
        return 2426e6;
    case 39:
        return 2480e6;
    default:
        break;
    }
    if (i <= 10) {
        return 2404e6 + 2e6 * i;
    }
    return 2428e6 + 2e6 * (i - 11);
}

int WhiteningLfsr::degree_of(LfsrKind kind)
{
    return kind == LfsrKind::ble_spec_7bit ? 7 : 9;
}

WhiteningLfsr::WhiteningLfsr(ChannelIndex channel, LfsrKind kind)
    : degree_(degree_of(kind))
{
    const auto ch = static_cast<std::uint32_t>(channel.value());
    switch (kind) {
    case LfsrKind::ble_spec_7bit:
        // Position 0 = 1, positions 1..6 = channel bits 5..0.
        state_ = 1U;
        for (int b = 0; b < 6; ++b) {
            if ((ch >> (5 - b)) & 1U) {
                state_ |= 1U << (b + 1);
            }
        }
        tap_mask_ = 1U << 4;
        break;
    case LfsrKind::paper_9bit:
        state_ = ch == 0 ? 1U : ch;
        tap_mask_ = 1U << 5;
        break;
    }
}

std::uint8_t WhiteningLfsr::next()
{
    const std::uint32_t out = (state_ >> (degree_ - 1)) & 1U;
    const std::uint32_t mask = (1U << degree_) - 1U;
    state_ = ((state_ << 1) & mask) | out;
    if (out) {
        state_ ^= tap_mask_;
    }
    return static_cast<std::uint8_t>(out);
}

Bits keystream(ChannelIndex channel, LfsrKind kind, std::size_t n)
{
    WhiteningLfsr lfsr(channel, kind);
    Bits ks(n);
    for (auto& b : ks) {
        b = lfsr.next();
    }
    return ks;
}

Bits whiten(std::span<const std::uint8_t> bits, ChannelIndex channel, LfsrKind kind)
{
    WhiteningLfsr lfsr(channel, kind);
    Bits out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((bits[i] & 1U) ^ lfsr.next());
    }
    return out;
}

}  // namespace rble::ble
