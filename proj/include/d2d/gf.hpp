#pragma once

#include <vector>

#include "d2d/common.hpp"

namespace d2d {

using FieldElem = u32;

// GF(2^q) arithmetic via exp/log tables built from a primitive polynomial.
// Supported widths are q = 8 and q = 16, which cover every code length the
// schemes instantiate (symbol counts never exceed 2^16).
class GaloisField {
public:
    explicit GaloisField(int q);

    int q() const { return q_; }
    u32 size() const { return size_; }          // 2^q
    u32 order() const { return size_ - 1; }     // multiplicative order

    FieldElem add(FieldElem a, FieldElem b) const { return a ^ b; }

    FieldElem mul(FieldElem a, FieldElem b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    FieldElem inv(FieldElem a) const;
    FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }
    FieldElem pow(FieldElem a, u64 e) const;

    void check_element(FieldElem a) const;

    // Shared instances; tables are built once on first use.
    static const GaloisField& gf8();
    static const GaloisField& gf16();
    static const GaloisField& for_width(int q);

    // Smallest supported width whose field holds `count` distinct symbols.
    static int width_for_symbols(i64 count);

private:
    int q_;
    u32 size_;
    u32 poly_;
    std::vector<FieldElem> exp_;  // 2 * order entries so mul needs no modulo
    std::vector<u32> log_;
};

}  // namespace d2d
