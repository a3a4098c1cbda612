#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace caf {

// A K-bit word labeling one modulation symbol. Bit index s is 1-based;
// bit 1 is the least significant bit of `value`.
struct BitLabel {
    std::uint32_t value = 0;
    int width = 0;

    BitLabel() = default;
    BitLabel(std::uint32_t v, int k) : value(v), width(k) {
        if (k < 1 || k > 16) throw std::invalid_argument("BitLabel: width out of range");
        if (v >> k) throw std::invalid_argument("BitLabel: value does not fit in width");
    }

    int bit(int s) const {
        if (s < 1 || s > width) throw std::out_of_range("BitLabel: bit index");
        return static_cast<int>((value >> (s - 1)) & 1u);
    }

    bool operator==(const BitLabel&) const = default;

    std::string to_string() const {
        std::string out(width, '0');
        // most significant bit printed first
        for (int s = 1; s <= width; ++s)
            out[width - s] = bit(s) ? '1' : '0';
        return out;
    }
};

inline BitLabel xor_labels(const BitLabel& a, const BitLabel& b) {
    if (a.width != b.width) throw std::invalid_argument("xor_labels: width mismatch");
    return BitLabel(a.value ^ b.value, a.width);
}

}  // namespace caf
