#include "rble/ble_phy.hpp"

#include <string>

namespace rble::ble {

namespace {

void append_lsb_first(Bits& out, std::uint32_t value, std::size_t nbits)
{
    for (std::size_t i = 0; i < nbits; ++i) {
        out.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
    }
}

}  // namespace

std::uint8_t preamble_for(std::uint32_t access_address)
{
    // 0xAA sent LSB first ends in 1, 0x55 ends in 0.
    return (access_address & 1U) ? 0x55 : 0xAA;
}

Bits BlePacket::header_bits() const
{
    Bits out;
    out.reserve(kHeaderBits);
    append_lsb_first(out, preamble, kPreambleBits);
    append_lsb_first(out, access_address, kAccessAddressBits);
    return out;
}

Bits BlePacket::bits() const
{
    Bits out = header_bits();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

BlePacket assemble_packet(std::span<const std::uint8_t> payload, std::uint32_t access_address,
                          std::optional<Whitening> whitening)
{
    if (payload.size() > kMaxPayloadBits) {
        throw std::invalid_argument("payload of " + std::to_string(payload.size()) +
                                    " bits exceeds the 2080-bit limit");
    }
    BlePacket p;
    p.access_address = access_address;
    p.preamble = preamble_for(access_address);
    if (whitening) {
        p.payload = whiten(payload, whitening->channel, whitening->kind);
    } else {
        p.payload.reserve(payload.size());
        for (std::uint8_t b : payload) {
            p.payload.push_back(static_cast<std::uint8_t>(b & 1U));
        }
    }
    return p;
}

}  // namespace rble::ble
