#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace degprop {

namespace detail {

using int128 = __int128;
using uint128 = unsigned __int128;

inline uint128 abs128(int128 v) { return v < 0 ? -static_cast<uint128>(v) : static_cast<uint128>(v); }

inline uint128 gcd128(uint128 a, uint128 b) {
    while (b != 0) {
        uint128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace detail

/// Exact rational number on 64-bit components. Denominator is always
/// positive and gcd(|num|, den) == 1. All intermediates widen to 128 bits,
/// so any pair of in-range operands compares exactly; arithmetic throws
/// std::overflow_error if a reduced result no longer fits 64 bits.
class Ratio {
  public:
    constexpr Ratio() = default;

    Ratio(std::int64_t numerator, std::int64_t denominator = 1) {
        if (denominator == 0) throw std::domain_error("Ratio: zero denominator");
        detail::int128 n = numerator;
        detail::int128 d = denominator;
        if (d < 0) {
            n = -n;
            d = -d;
        }
        assign_reduced(n, d);
    }

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    friend Ratio operator+(const Ratio& a, const Ratio& b) {
        detail::int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        return from_wide(n, i128(a.den_) * b.den_);
    }
    friend Ratio operator-(const Ratio& a, const Ratio& b) {
        detail::int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
        return from_wide(n, i128(a.den_) * b.den_);
    }
    friend Ratio operator*(const Ratio& a, const Ratio& b) {
        return from_wide(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Ratio operator/(const Ratio& a, const Ratio& b) {
        if (b.num_ == 0) throw std::domain_error("Ratio: division by zero");
        detail::int128 n = i128(a.num_) * b.den_;
        detail::int128 d = i128(a.den_) * b.num_;
        if (d < 0) {
            n = -n;
            d = -d;
        }
        return from_wide(n, d);
    }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) {
        detail::int128 lhs = i128(a.num_) * b.den_;
        detail::int128 rhs = i128(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    Ratio abs() const { return num_ < 0 ? Ratio(-num_, den_) : *this; }

    std::int64_t floor_int() const {
        if (num_ >= 0) return num_ / den_;
        return -((-num_ + den_ - 1) / den_);
    }
    std::int64_t ceil_int() const {
        if (num_ >= 0) return (num_ + den_ - 1) / den_;
        return -((-num_) / den_);
    }

    /// Nearest integer, exact halves rounded away from zero.
    std::int64_t round_half_away() const {
        if (num_ >= 0) return static_cast<std::int64_t>((i128(2) * num_ + den_) / (i128(2) * den_));
        return -static_cast<std::int64_t>((i128(2) * -num_ + den_) / (i128(2) * den_));
    }

    /// round_half_away(10 * value); one-decimal fixed-point rendering support.
    std::int64_t tenths_half_away() const {
        if (num_ >= 0) return static_cast<std::int64_t>((i128(20) * num_ + den_) / (i128(2) * den_));
        return -static_cast<std::int64_t>((i128(20) * -num_ + den_) / (i128(2) * den_));
    }

    /// Decimal rendering, at most `frac_digits` fractional digits, rounded
    /// half away from zero, trailing zeros trimmed. Deterministic.
    std::string decimal_string(int frac_digits = 4) const {
        if (den_ == 1) return std::to_string(num_);
        detail::int128 pow = 1;
        for (int i = 0; i < frac_digits; ++i) pow *= 10;
        bool neg = num_ < 0;
        detail::uint128 n = detail::abs128(num_);
        detail::uint128 scaled = (detail::uint128(2) * n * detail::uint128(pow) + detail::uint128(den_)) /
                                 (detail::uint128(2) * detail::uint128(den_));
        detail::uint128 ip = scaled / detail::uint128(pow);
        detail::uint128 fp = scaled % detail::uint128(pow);
        std::string frac;
        for (int i = 0; i < frac_digits; ++i) {
            frac.insert(frac.begin(), static_cast<char>('0' + static_cast<int>(fp % 10)));
            fp /= 10;
        }
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        std::string out = neg ? "-" : "";
        out += u128_string(ip);
        if (!frac.empty()) {
            out += '.';
            out += frac;
        }
        return out;
    }

    /// "n/d", or plain "n" for integers.
    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

  private:
    static detail::int128 i128(std::int64_t v) { return v; }

    static std::string u128_string(detail::uint128 v) {
        if (v == 0) return "0";
        std::string s;
        while (v != 0) {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
            v /= 10;
        }
        return s;
    }

    static Ratio from_wide(detail::int128 n, detail::int128 d) {
        Ratio r;
        r.assign_reduced(n, d);
        return r;
    }

    void assign_reduced(detail::int128 n, detail::int128 d) {
        if (n == 0) {
            num_ = 0;
            den_ = 1;
            return;
        }
        detail::uint128 g = detail::gcd128(detail::abs128(n), detail::abs128(d));
        detail::uint128 un = detail::abs128(n) / g;
        detail::uint128 ud = detail::abs128(d) / g;
        constexpr detail::uint128 limit = static_cast<detail::uint128>(INT64_MAX);
        if (un > limit || ud > limit) throw std::overflow_error("Ratio: value exceeds 64-bit range");
        num_ = (n < 0) ? -static_cast<std::int64_t>(un) : static_cast<std::int64_t>(un);
        den_ = static_cast<std::int64_t>(ud);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// ceil(dividend / divisor) for a positive integer dividend and positive
/// rational divisor, computed exactly. When the division is exact the
/// result is the exact quotient (no leftover "part").
inline std::int64_t ceil_div(std::int64_t dividend, const Ratio& divisor) {
    if (dividend < 0 || divisor.numerator() <= 0)
        throw std::domain_error("ceil_div: requires dividend >= 0 and divisor > 0");
    detail::int128 n = detail::int128(dividend) * divisor.denominator();
    detail::int128 d = divisor.numerator();
    return static_cast<std::int64_t>((n + d - 1) / d);
}

}  // namespace degprop
