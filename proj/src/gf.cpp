#include "d2d/gf.hpp"

#include <string>

namespace d2d {

namespace {

u32 poly_for_width(int q) {
    // Primitive polynomials: x^8+x^4+x^3+x^2+1 and x^16+x^12+x^3+x+1.
    switch (q) {
        case 8: return 0x11D;
        case 16: return 0x1100B;
        default: throw InvalidParams("unsupported field width q=" + std::to_string(q));
    }
}

}  // namespace

GaloisField::GaloisField(int q)
    : q_(q), size_(1u << q), poly_(poly_for_width(q)), exp_(2 * (size_ - 1)), log_(size_, 0) {
    // Walk the powers of x; a primitive polynomial visits every nonzero
    // element exactly once before cycling back to 1.
    u32 x = 1;
    for (u32 i = 0; i < order(); ++i) {
        if (x == 0 || x >= size_ || (i > 0 && x == 1)) {
            throw InvalidParams("reduction polynomial is not primitive for q=" +
                                std::to_string(q));
        }
        if (i > 0 && log_[x] != 0) {
            throw InvalidParams("generator cycle repeated an element for q=" +
                                std::to_string(q));
        }
        exp_[i] = x;
        exp_[i + order()] = x;
        log_[x] = i;
        x <<= 1;
        if (x & size_) x ^= poly_;
    }
    if (x != 1) {
        throw InvalidParams("generator cycle does not close after 2^q-1 steps for q=" +
                            std::to_string(q));
    }
}

FieldElem GaloisField::inv(FieldElem a) const {
    if (a == 0) throw InvalidParams("inverse of zero field element");
    return exp_[order() - log_[a]];
}

FieldElem GaloisField::pow(FieldElem a, u64 e) const {
    if (a == 0) return e == 0 ? 1 : 0;
    u64 le = (static_cast<u64>(log_[a]) * (e % order())) % order();
    return exp_[le];
}

void GaloisField::check_element(FieldElem a) const {
    if (a >= size_) {
        throw FieldOverflow("value " + std::to_string(a) + " exceeds GF(2^" +
                            std::to_string(q_) + ")");
    }
}

const GaloisField& GaloisField::gf8() {
    static const GaloisField f(8);
    return f;
}

const GaloisField& GaloisField::gf16() {
    static const GaloisField f(16);
    return f;
}

const GaloisField& GaloisField::for_width(int q) {
    switch (q) {
        case 8: return gf8();
        case 16: return gf16();
        default: throw InvalidParams("unsupported field width q=" + std::to_string(q));
    }
}

int GaloisField::width_for_symbols(i64 count) {
    if (count <= 0) throw InvalidParams("symbol count must be positive");
    if (count <= 256) return 8;
    if (count <= 65536) return 16;
    throw FieldOverflow("symbol count " + std::to_string(count) +
                        " exceeds the largest supported field");
}

}  // namespace d2d
