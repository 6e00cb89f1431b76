#include "vulnprio/decimal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vulnprio {
namespace {

std::int64_t checked(__int128 value) {
    if (value > std::numeric_limits<std::int64_t>::max() ||
        value < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("decimal overflow");
    }
    return static_cast<std::int64_t>(value);
}

}  // namespace

Decimal Decimal::from_integer(std::int64_t value) {
    return Decimal(checked(static_cast<__int128>(value) * kUnit));
}

Decimal Decimal::from_tenths(std::int64_t tenths) {
    return Decimal(checked(static_cast<__int128>(tenths) * (kUnit / 10)));
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    if (text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty()) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    if (frac.size() > static_cast<std::size_t>(kScale)) return std::nullopt;

    __int128 units = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') return std::nullopt;
        units = units * 10 + (c - '0');
        if (units > std::numeric_limits<std::int64_t>::max()) return std::nullopt;
    }
    units *= kUnit;
    __int128 scale = kUnit;
    for (char c : frac) {
        if (c < '0' || c > '9') return std::nullopt;
        scale /= 10;
        units += (c - '0') * scale;
    }
    if (negative) units = -units;
    if (units > std::numeric_limits<std::int64_t>::max() ||
        units < std::numeric_limits<std::int64_t>::min()) {
        return std::nullopt;
    }
    return Decimal(static_cast<std::int64_t>(units));
}

std::optional<Decimal> Decimal::from_double(double value, int max_places) {
    if (!std::isfinite(value) || max_places < 0 || max_places > kScale) return std::nullopt;
    const double scale = std::pow(10.0, max_places);
    const double scaled = std::round(value * scale);
    if (std::fabs(value * scale - scaled) > 1e-9 * scale) return std::nullopt;
    if (std::fabs(scaled) > 9.0e15) return std::nullopt;
    std::int64_t step = 1;
    for (int i = max_places; i < kScale; ++i) step *= 10;
    return Decimal(checked(static_cast<__int128>(static_cast<std::int64_t>(scaled)) * step));
}

int Decimal::fractional_digits() const {
    std::int64_t frac = units_ % kUnit;
    if (frac == 0) return 0;
    int digits = kScale;
    while (frac % 10 == 0) {
        frac /= 10;
        --digits;
    }
    return digits;
}

std::string Decimal::to_string() const {
    const bool negative = units_ < 0;
    const unsigned __int128 magnitude =
        negative ? static_cast<unsigned __int128>(-static_cast<__int128>(units_))
                 : static_cast<unsigned __int128>(units_);
    const auto whole = static_cast<std::uint64_t>(magnitude / kUnit);
    auto frac = static_cast<std::uint64_t>(magnitude % kUnit);

    std::string digits(kScale, '0');
    for (int i = kScale - 1; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + frac % 10);
        frac /= 10;
    }
    std::size_t keep = digits.find_last_not_of('0');
    keep = keep == std::string::npos ? 1 : keep + 1;

    std::string out = negative ? "-" : "";
    out += std::to_string(whole);
    out += '.';
    out += digits.substr(0, keep);
    return out;
}

Decimal operator+(Decimal a, Decimal b) {
    return Decimal(checked(static_cast<__int128>(a.units_) + b.units_));
}

Decimal operator-(Decimal a, Decimal b) {
    return Decimal(checked(static_cast<__int128>(a.units_) - b.units_));
}

Decimal operator*(Decimal a, std::int64_t k) {
    return Decimal(checked(static_cast<__int128>(a.units_) * k));
}

Decimal operator*(Decimal a, Decimal b) {
    const __int128 raw = static_cast<__int128>(a.units_) * b.units_;
    if (raw % Decimal::kUnit != 0) {
        throw std::domain_error("decimal product " + a.to_string() + " * " + b.to_string() +
                                " exceeds " + std::to_string(Decimal::kScale) + " fractional digits");
    }
    return Decimal(checked(raw / Decimal::kUnit));
}

}  // namespace vulnprio
