#pragma once

// Exact rational arithmetic on 64-bit numerator/denominator with 128-bit
// intermediates. Every cache-size and rate identity in the simulator is
// checked with these, never with floating point. Overflow past 64 bits after
// reduction throws (the parameter grids in use stay far below that).

#include <compare>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <string>

#include "d2d/common.hpp"

namespace d2d {

class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(i64 value) : num_(value), den_(1) {}  // NOLINT: implicit by design
    Rational(int value) : num_(value), den_(1) {}  // NOLINT
    Rational(i64 num, i64 den) { assign(num, den); }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    // Largest integer <= value / smallest integer >= value.
    i64 floor() const {
        i64 q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }
    i64 ceil() const {
        i64 q = num_ / den_;
        if (num_ % den_ != 0 && num_ > 0) ++q;
        return q;
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "p" for integers, "p/q" otherwise — the format accepted back by parse().
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "p", "p/q", and plain decimals like "0.4" (parsed exactly, so
    // 0.4 becomes 2/5 rather than the nearest double).
    static Rational parse(const std::string& text) {
        std::size_t slash = text.find('/');
        std::size_t dot = text.find('.');
        std::size_t parsed = 0;
        try {
            if (slash != std::string::npos) {
                i64 p = std::stoll(text.substr(0, slash));
                i64 q = std::stoll(text.substr(slash + 1), &parsed);
                if (slash + 1 + parsed != text.size()) throw std::invalid_argument(text);
                return Rational(p, q);
            }
            if (dot != std::string::npos) {
                i64 whole = dot == 0 ? 0 : std::stoll(text.substr(0, dot));
                std::string frac = text.substr(dot + 1);
                if (frac.empty() || frac.size() > 17 ||
                    frac.find_first_not_of("0123456789") != std::string::npos) {
                    throw std::invalid_argument(text);
                }
                i64 den = 1;
                for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
                i64 num = std::stoll(frac);
                bool neg = !text.empty() && text[0] == '-';
                Rational mag = Rational(whole < 0 ? -whole : whole) + Rational(num, den);
                return neg ? -mag : mag;
            }
            i64 v = std::stoll(text, &parsed);
            if (parsed != text.size()) throw std::invalid_argument(text);
            return Rational(v);
        } catch (const std::logic_error&) {
            throw ConfigError("cannot parse rational from '" + text + "'");
        }
    }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw ConfigError("rational division by zero");
        return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        // Denominators are positive, so cross-multiplication preserves order.
        i128 lhs = i128(a.num_) * b.den_;
        i128 rhs = i128(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  private:
    void assign(i64 num, i64 den) {
        if (den == 0) throw ConfigError("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        i64 g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        num_ = num;
        den_ = den;
    }

    static i128 abs128(i128 v) { return v < 0 ? -v : v; }

    static i128 gcd128(i128 a, i128 b) {
        a = abs128(a);
        b = abs128(b);
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rational from_i128(i128 num, i128 den) {
        if (den == 0) throw ConfigError("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        i128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        constexpr i128 lo = i128(INT64_MIN), hi = i128(INT64_MAX);
        if (num < lo || num > hi || den > hi)
            throw std::overflow_error("rational overflow past 64 bits");
        Rational r;
        r.num_ = static_cast<i64>(num);
        r.den_ = static_cast<i64>(den);
        return r;
    }

    i64 num_;
    i64 den_;  // always > 0, gcd(|num_|, den_) == 1
};

}  // namespace d2d
