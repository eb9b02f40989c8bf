#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "perciso/error.hpp"

namespace perciso {

/// Non-negative-denominator fraction kept in lowest terms.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Fraction() = default;
    constexpr Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) throw ArgumentError("fraction with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    [[nodiscard]] std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend bool operator==(const Fraction& a, const Fraction& b) { return a.num == b.num && a.den == b.den; }

    friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
        const __int128 lhs = static_cast<__int128>(a.num) * b.den;
        const __int128 rhs = static_cast<__int128>(b.num) * a.den;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend Fraction operator*(const Fraction& a, std::int64_t k) { return {a.num * k, a.den}; }

    friend std::ostream& operator<<(std::ostream& os, const Fraction& f) { return os << f.str(); }
};

}  // namespace perciso
