#pragma once

// Bit-granular views over byte buffers. Packets are F-bit payloads stored in
// ceil(F/8) bytes; subpacket boundaries are generally not byte-aligned, so
// slicing, writing back, and XOR all work at bit precision. Bit 0 of a buffer
// is the most significant bit of byte 0 (prefix order: "the first alpha*F
// bits" of a packet is a plain bit prefix).

#include <cstddef>
#include <string>

#include "d2d/common.hpp"

namespace d2d {

inline std::size_t bytes_for_bits(i64 bits) {
    return static_cast<std::size_t>((bits + 7) / 8);
}

inline bool get_bit(const Bytes& buf, i64 bit) {
    return (buf[static_cast<std::size_t>(bit >> 3)] >> (7 - (bit & 7))) & 1u;
}

inline void set_bit(Bytes& buf, i64 bit, bool value) {
    u8 mask = static_cast<u8>(1u << (7 - (bit & 7)));
    auto& byte = buf[static_cast<std::size_t>(bit >> 3)];
    if (value)
        byte |= mask;
    else
        byte &= static_cast<u8>(~mask);
}

// Copies `len` bits starting at `src_bit` into a fresh zero-padded buffer.
inline Bytes slice_bits(const Bytes& src, i64 src_bit, i64 len) {
    Bytes out(bytes_for_bits(len), 0);
    if ((src_bit & 7) == 0) {  // byte-aligned fast path
        std::size_t first = static_cast<std::size_t>(src_bit >> 3);
        std::size_t whole = static_cast<std::size_t>(len >> 3);
        for (std::size_t i = 0; i < whole; ++i) out[i] = src[first + i];
        for (i64 b = whole * 8; b < len; ++b) set_bit(out, b, get_bit(src, src_bit + b));
    } else {
        for (i64 b = 0; b < len; ++b) set_bit(out, b, get_bit(src, src_bit + b));
    }
    return out;
}

// Writes the first `len` bits of `piece` into `dst` starting at `dst_bit`.
inline void write_bits(Bytes& dst, i64 dst_bit, const Bytes& piece, i64 len) {
    for (i64 b = 0; b < len; ++b) set_bit(dst, dst_bit + b, get_bit(piece, b));
}

// a ^= b, with b zero-extended to a's length.
inline void xor_into(Bytes& a, const Bytes& b) {
    std::size_t k = b.size() < a.size() ? b.size() : a.size();
    for (std::size_t i = 0; i < k; ++i) a[i] ^= b[i];
}

// Clears any padding bits beyond `bits` so buffers compare byte-exactly.
inline void mask_tail(Bytes& buf, i64 bits) {
    i64 total = static_cast<i64>(buf.size()) * 8;
    for (i64 b = bits; b < total; ++b) set_bit(buf, b, false);
}

inline std::string to_hex(const Bytes& buf) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(buf.size() * 2);
    for (u8 byte : buf) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xF]);
    }
    return out;
}

inline Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw ConfigError("hex string with odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ConfigError("invalid hex digit");
    };
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<u8>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

}  // namespace d2d
