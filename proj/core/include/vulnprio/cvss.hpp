#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vulnprio/decimal.hpp"

namespace vulnprio::cvss {

enum class AttackVector : std::uint8_t { Network, Adjacent, Local, Physical };
enum class AttackComplexity : std::uint8_t { Low, High };
enum class PrivilegesRequired : std::uint8_t { None, Low, High };
enum class UserInteraction : std::uint8_t { None, Required };
enum class Scope : std::uint8_t { Unchanged, Changed };
/// Shared value set of the Confidentiality, Integrity and Availability metrics.
enum class ImpactLevel : std::uint8_t { None, Low, High };

enum class Severity : std::uint8_t { None, Low, Medium, High, Critical };

/// The eight CVSS v3.1 base metrics.
struct CvssVector {
    AttackVector attack_vector = AttackVector::Network;
    AttackComplexity attack_complexity = AttackComplexity::Low;
    PrivilegesRequired privileges_required = PrivilegesRequired::None;
    UserInteraction user_interaction = UserInteraction::None;
    Scope scope = Scope::Unchanged;
    ImpactLevel confidentiality = ImpactLevel::None;
    ImpactLevel integrity = ImpactLevel::None;
    ImpactLevel availability = ImpactLevel::None;

    friend auto operator<=>(const CvssVector&, const CvssVector&) = default;
};

class CvssError : public std::runtime_error {
public:
    enum class Kind { MalformedVector, UnknownMetricValue, DuplicateMetric, MissingMetric, DomainError };

    CvssError(Kind kind, std::string token, const std::string& message)
        : std::runtime_error(message), kind_(kind), token_(std::move(token)) {}

    Kind kind() const { return kind_; }
    /// The offending token, metric key, or number.
    const std::string& token() const { return token_; }

private:
    Kind kind_;
    std::string token_;
};

/// A CVSS score with exactly one decimal place, stored in tenths (0..100).
class Score {
public:
    constexpr Score() = default;

    /// Throws CvssError(DomainError) outside 0..100.
    static Score from_tenths(int tenths);
    /// Accepts "8.1", "10", "10.0". Throws CvssError(DomainError) on anything
    /// else, including a second decimal digit.
    static Score parse(std::string_view text);

    constexpr int tenths() const { return tenths_; }
    double value() const { return tenths_ / 10.0; }
    Decimal to_decimal() const { return Decimal::from_tenths(tenths_); }
    /// One-decimal rendering, e.g. "8.1", "10.0".
    std::string to_string() const;

    friend constexpr auto operator<=>(Score, Score) = default;

private:
    explicit constexpr Score(int tenths) : tenths_(tenths) {}
    int tenths_ = 0;
};

struct BaseScore {
    Score value;
    Severity severity = Severity::None;

    friend bool operator==(const BaseScore&, const BaseScore&) = default;
};

/// Accepts "CVSS:3.1/AV:N/AC:L/..." with the prefix optional and metrics in any
/// order. Temporal and environmental metrics are rejected.
CvssVector parse_vector(std::string_view text);

/// Always carries the "CVSS:3.1/" prefix and the canonical AV..A order.
std::string to_string(const CvssVector& vector);

/// Smallest one-decimal value >= x, computed at 1e-5 integer precision.
/// Throws CvssError(DomainError) when x is outside [0, 10].
Score round_up(double x);

BaseScore base_score(const CvssVector& vector);

/// 0 -> None, 0.1-3.9 Low, 4.0-6.9 Medium, 7.0-8.9 High, 9.0-10.0 Critical.
Severity severity_of(Score score);
/// Throws CvssError(DomainError) for values outside [0, 10] or not on a
/// one-decimal grid.
Severity severity_of(double value);

std::string_view to_string(Severity severity);

/// Every one of the 2,592 base vectors, in lexicographic enum order.
std::vector<CvssVector> all_vectors();

}  // namespace vulnprio::cvss
