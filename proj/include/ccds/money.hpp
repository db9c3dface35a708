#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ccds {

/// Amount of money in integer minor units (cents) of a single run currency.
///
/// All settlement arithmetic is done on this type so that netting, conservation
/// and equivalence checks hold exactly. Conversion from floating point happens
/// only through `Money::from_major`, which rounds half away from zero.
class Money {
public:
    constexpr Money() = default;

    static constexpr Money from_minor(std::int64_t minor) { return Money(minor); }

    static Money from_major(double major) {
        const double scaled = major * 100.0;
        if (!std::isfinite(scaled) || std::fabs(scaled) > 9.0e18) {
            throw std::out_of_range("money amount out of range: " + std::to_string(major));
        }
        return Money(std::llround(scaled));
    }

    constexpr std::int64_t minor() const { return minor_; }
    constexpr double major() const { return static_cast<double>(minor_) / 100.0; }

    constexpr bool is_zero() const { return minor_ == 0; }
    constexpr bool is_positive() const { return minor_ > 0; }
    constexpr bool is_negative() const { return minor_ < 0; }

    constexpr Money operator-() const { return Money(-minor_); }
    constexpr Money& operator+=(Money o) {
        minor_ += o.minor_;
        return *this;
    }
    constexpr Money& operator-=(Money o) {
        minor_ -= o.minor_;
        return *this;
    }
    friend constexpr Money operator+(Money a, Money b) { return Money(a.minor_ + b.minor_); }
    friend constexpr Money operator-(Money a, Money b) { return Money(a.minor_ - b.minor_); }

    /// Scales by a fraction and rounds to the nearest minor unit.
    Money scaled(double factor) const { return from_minor_rounded(static_cast<double>(minor_) * factor); }

    friend constexpr auto operator<=>(Money, Money) = default;
    friend constexpr bool operator==(Money, Money) = default;

private:
    constexpr explicit Money(std::int64_t minor) : minor_(minor) {}

    static Money from_minor_rounded(double minor) {
        if (!std::isfinite(minor) || std::fabs(minor) > 9.0e18) {
            throw std::out_of_range("money amount out of range");
        }
        return Money(std::llround(minor));
    }

    std::int64_t minor_ = 0;
};

inline constexpr Money zero_money{};

constexpr Money positive_part(Money m) { return m.is_positive() ? m : Money{}; }
constexpr Money abs(Money m) { return m.is_negative() ? -m : m; }
constexpr Money min(Money a, Money b) { return a < b ? a : b; }
constexpr Money max(Money a, Money b) { return a < b ? b : a; }

/// Prints minor units, e.g. `-1250c`.
inline std::ostream& operator<<(std::ostream& out, Money m) { return out << m.minor() << 'c'; }

}  // namespace ccds
