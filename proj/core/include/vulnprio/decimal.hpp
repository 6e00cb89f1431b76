#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vulnprio {

/// Fixed-point decimal with nine fractional digits.
///
/// Threat scores are products of one-decimal CVSS values, integer counts,
/// small integer multipliers and environmental weights with at most four
/// decimal places, so every value the engine produces is representable
/// exactly. Arithmetic that would lose digits or overflow throws instead of
/// rounding.
class Decimal {
public:
    static constexpr int kScale = 9;
    static constexpr std::int64_t kUnit = 1'000'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_units(std::int64_t units) { return Decimal(units); }
    static Decimal from_integer(std::int64_t value);
    static Decimal from_tenths(std::int64_t tenths);

    /// Parses plain decimal notation ("8.1", "-2", "0.0015"). No exponents,
    /// no leading '+', at most kScale fractional digits.
    static std::optional<Decimal> parse(std::string_view text);

    /// Converts a double that is within 1e-9 of a value with at most
    /// `max_places` fractional digits; nullopt otherwise.
    static std::optional<Decimal> from_double(double value, int max_places);

    constexpr std::int64_t units() const { return units_; }
    double to_double() const { return static_cast<double>(units_) / kUnit; }

    /// Number of significant fractional digits (0 for integers).
    int fractional_digits() const;

    /// Shortest exact rendering with at least one fractional digit:
    /// 102.3 -> "102.3", 10 -> "10.0", 2.25 -> "2.25".
    std::string to_string() const;

    friend Decimal operator+(Decimal a, Decimal b);
    friend Decimal operator-(Decimal a, Decimal b);
    friend Decimal operator*(Decimal a, std::int64_t k);
    friend Decimal operator*(std::int64_t k, Decimal a) { return a * k; }
    /// Exact product; throws std::domain_error when digits beyond kScale
    /// would be dropped.
    friend Decimal operator*(Decimal a, Decimal b);

    friend constexpr auto operator<=>(Decimal, Decimal) = default;
    friend constexpr bool operator==(Decimal, Decimal) = default;

private:
    explicit constexpr Decimal(std::int64_t units) : units_(units) {}

    std::int64_t units_ = 0;
};

}  // namespace vulnprio
