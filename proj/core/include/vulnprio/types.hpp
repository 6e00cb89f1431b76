#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vulnprio {

/// "CVE-YYYY-NNNN" with four or more sequence digits.
class CveId {
public:
    static std::optional<CveId> parse(std::string_view text);

    const std::string& str() const { return value_; }

    friend auto operator<=>(const CveId&, const CveId&) = default;
    friend bool operator==(const CveId&, const CveId&) = default;

private:
    explicit CveId(std::string value) : value_(std::move(value)) {}
    std::string value_;
};

/// Attacker utility: 0 not useful, 1 enables chaining, 2 actions on objectives.
enum class Utility : std::uint8_t { NotUseful = 0, Chaining = 1, Objective = 2 };
/// Exploitable without any exploit code (default credentials and the like).
enum class Opportune : std::uint8_t { No = 0, Yes = 1 };

enum class Labeler : std::uint8_t { SME, Model };

enum class Exposure : std::uint8_t { Public, Private };
enum class Criticality : std::uint8_t { Low, Medium, High };

enum class ReferenceSource : std::uint8_t { ExploitDB, Metasploit, GitHub, Other };

std::optional<Utility> utility_from_int(std::int64_t value);
std::optional<Opportune> opportune_from_int(std::int64_t value);
constexpr int to_int(Utility u) { return static_cast<int>(u); }
constexpr int to_int(Opportune o) { return static_cast<int>(o); }

std::string_view to_string(Labeler labeler);
std::string_view to_string(Exposure exposure);
std::string_view to_string(Criticality criticality);
std::string_view to_string(ReferenceSource source);

/// Case-insensitive on input.
std::optional<Labeler> parse_labeler(std::string_view text);
std::optional<Exposure> parse_exposure(std::string_view text);
std::optional<Criticality> parse_criticality(std::string_view text);
std::optional<ReferenceSource> parse_source(std::string_view text);

}  // namespace vulnprio
