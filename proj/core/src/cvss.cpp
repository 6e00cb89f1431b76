#include "vulnprio/cvss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace vulnprio::cvss {
namespace {

constexpr std::string_view kPrefix = "CVSS:3.1/";

// Base metric keys in canonical order.
constexpr std::array<std::string_view, 8> kKeys = {"AV", "AC", "PR", "UI", "S", "C", "I", "A"};

[[noreturn]] void fail(CvssError::Kind kind, std::string token, const std::string& what) {
    throw CvssError(kind, token, what + ": '" + token + "'");
}

std::optional<std::size_t> key_slot(std::string_view key) {
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (kKeys[i] == key) return i;
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view value, const std::array<std::pair<char, Enum>, N>& table) {
    if (value.size() != 1) return std::nullopt;
    for (const auto& [letter, e] : table) {
        if (letter == value[0]) return e;
    }
    return std::nullopt;
}

constexpr std::array<std::pair<char, AttackVector>, 4> kAv = {{
    {'N', AttackVector::Network}, {'A', AttackVector::Adjacent},
    {'L', AttackVector::Local}, {'P', AttackVector::Physical}}};
constexpr std::array<std::pair<char, AttackComplexity>, 2> kAc = {{
    {'L', AttackComplexity::Low}, {'H', AttackComplexity::High}}};
constexpr std::array<std::pair<char, PrivilegesRequired>, 3> kPr = {{
    {'N', PrivilegesRequired::None}, {'L', PrivilegesRequired::Low}, {'H', PrivilegesRequired::High}}};
constexpr std::array<std::pair<char, UserInteraction>, 2> kUi = {{
    {'N', UserInteraction::None}, {'R', UserInteraction::Required}}};
constexpr std::array<std::pair<char, Scope>, 2> kS = {{
    {'U', Scope::Unchanged}, {'C', Scope::Changed}}};
constexpr std::array<std::pair<char, ImpactLevel>, 3> kCia = {{
    {'N', ImpactLevel::None}, {'L', ImpactLevel::Low}, {'H', ImpactLevel::High}}};

template <typename Enum, std::size_t N>
char letter_of(Enum e, const std::array<std::pair<char, Enum>, N>& table) {
    for (const auto& [letter, value] : table) {
        if (value == e) return letter;
    }
    return '?';
}

double weight(AttackVector v) {
    switch (v) {
        case AttackVector::Network: return 0.85;
        case AttackVector::Adjacent: return 0.62;
        case AttackVector::Local: return 0.55;
        case AttackVector::Physical: return 0.2;
    }
    return 0.0;
}

double weight(AttackComplexity v) { return v == AttackComplexity::Low ? 0.77 : 0.44; }

double weight(PrivilegesRequired v, Scope scope) {
    switch (v) {
        case PrivilegesRequired::None: return 0.85;
        case PrivilegesRequired::Low: return scope == Scope::Changed ? 0.68 : 0.62;
        case PrivilegesRequired::High: return scope == Scope::Changed ? 0.50 : 0.27;
    }
    return 0.0;
}

double weight(UserInteraction v) { return v == UserInteraction::None ? 0.85 : 0.62; }

double weight(ImpactLevel v) {
    switch (v) {
        case ImpactLevel::High: return 0.56;
        case ImpactLevel::Low: return 0.22;
        case ImpactLevel::None: return 0.0;
    }
    return 0.0;
}

}  // namespace

Score Score::from_tenths(int tenths) {
    if (tenths < 0 || tenths > 100) {
        fail(CvssError::Kind::DomainError, std::to_string(tenths / 10.0), "score outside [0.0, 10.0]");
    }
    return Score(tenths);
}

Score Score::parse(std::string_view text) {
    auto value = Decimal::parse(text);
    if (!value || value->fractional_digits() > 1) {
        fail(CvssError::Kind::DomainError, std::string(text), "not a one-decimal score");
    }
    const std::int64_t tenths = value->units() / (Decimal::kUnit / 10);
    if (tenths < 0 || tenths > 100) {
        fail(CvssError::Kind::DomainError, std::string(text), "score outside [0.0, 10.0]");
    }
    return Score(static_cast<int>(tenths));
}

std::string Score::to_string() const {
    return std::to_string(tenths_ / 10) + "." + std::to_string(tenths_ % 10);
}

CvssVector parse_vector(std::string_view text) {
    std::string_view body = text;
    if (body.starts_with(kPrefix)) {
        body.remove_prefix(kPrefix.size());
    } else if (body.starts_with("CVSS:")) {
        fail(CvssError::Kind::MalformedVector, std::string(body.substr(0, body.find('/'))),
             "unsupported CVSS version");
    }
    if (body.empty()) fail(CvssError::Kind::MissingMetric, "AV", "missing base metric");

    CvssVector vector;
    std::array<bool, kKeys.size()> seen{};
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t slash = std::min(body.find('/', pos), body.size());
        const std::string_view token = body.substr(pos, slash - pos);
        pos = slash + 1;

        const std::size_t colon = token.find(':');
        if (token.empty() || colon == std::string_view::npos || colon == 0 ||
            token.find(':', colon + 1) != std::string_view::npos) {
            fail(CvssError::Kind::MalformedVector, std::string(token), "malformed metric token");
        }
        const std::string_view key = token.substr(0, colon);
        const std::string_view value = token.substr(colon + 1);
        const auto slot = key_slot(key);
        if (!slot) {
            fail(CvssError::Kind::MalformedVector, std::string(token), "not a CVSS v3.1 base metric");
        }
        if (seen[*slot]) fail(CvssError::Kind::DuplicateMetric, std::string(key), "duplicate metric");
        seen[*slot] = true;

        auto bad_value = [&] {
            fail(CvssError::Kind::UnknownMetricValue, std::string(token), "unknown metric value");
        };
        switch (*slot) {
            case 0: if (auto v = lookup(value, kAv)) vector.attack_vector = *v; else bad_value(); break;
            case 1: if (auto v = lookup(value, kAc)) vector.attack_complexity = *v; else bad_value(); break;
            case 2: if (auto v = lookup(value, kPr)) vector.privileges_required = *v; else bad_value(); break;
            case 3: if (auto v = lookup(value, kUi)) vector.user_interaction = *v; else bad_value(); break;
            case 4: if (auto v = lookup(value, kS)) vector.scope = *v; else bad_value(); break;
            case 5: if (auto v = lookup(value, kCia)) vector.confidentiality = *v; else bad_value(); break;
            case 6: if (auto v = lookup(value, kCia)) vector.integrity = *v; else bad_value(); break;
            case 7: if (auto v = lookup(value, kCia)) vector.availability = *v; else bad_value(); break;
        }
        if (slash == body.size()) break;
    }
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (!seen[i]) fail(CvssError::Kind::MissingMetric, std::string(kKeys[i]), "missing base metric");
    }
    return vector;
}

std::string to_string(const CvssVector& v) {
    std::string out(kPrefix);
    auto append = [&out](std::string_view key, char letter) {
        out += key;
        out += ':';
        out += letter;
        out += '/';
    };
    append("AV", letter_of(v.attack_vector, kAv));
    append("AC", letter_of(v.attack_complexity, kAc));
    append("PR", letter_of(v.privileges_required, kPr));
    append("UI", letter_of(v.user_interaction, kUi));
    append("S", letter_of(v.scope, kS));
    append("C", letter_of(v.confidentiality, kCia));
    append("I", letter_of(v.integrity, kCia));
    append("A", letter_of(v.availability, kCia));
    out.pop_back();
    return out;
}

Score round_up(double x) {
    if (!(x >= 0.0 && x <= 10.0)) {
        fail(CvssError::Kind::DomainError, std::to_string(x), "round_up input outside [0, 10]");
    }
    const auto scaled = static_cast<std::int64_t>(std::llround(x * 100000.0));
    if (scaled % 10000 == 0) return Score::from_tenths(static_cast<int>(scaled / 10000));
    return Score::from_tenths(static_cast<int>(scaled / 10000 + 1));
}

BaseScore base_score(const CvssVector& v) {
    const double iss = 1.0 - (1.0 - weight(v.confidentiality)) * (1.0 - weight(v.integrity)) *
                                 (1.0 - weight(v.availability));
    const bool changed = v.scope == Scope::Changed;
    const double impact = changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15)
                                  : 6.42 * iss;
    const double exploitability = 8.22 * weight(v.attack_vector) * weight(v.attack_complexity) *
                                  weight(v.privileges_required, v.scope) *
                                  weight(v.user_interaction);

    Score score;
    if (impact > 0.0) {
        const double raw = changed ? 1.08 * (impact + exploitability) : impact + exploitability;
        score = round_up(std::min(raw, 10.0));
    }
    return BaseScore{score, severity_of(score)};
}

Severity severity_of(Score score) {
    const int t = score.tenths();
    if (t == 0) return Severity::None;
    if (t < 40) return Severity::Low;
    if (t < 70) return Severity::Medium;
    if (t < 90) return Severity::High;
    return Severity::Critical;
}

Severity severity_of(double value) {
    const double scaled = value * 10.0;
    const double nearest = std::round(scaled);
    if (!(value >= 0.0 && value <= 10.0) || std::fabs(scaled - nearest) > 1e-9) {
        fail(CvssError::Kind::DomainError, std::to_string(value), "not a one-decimal score in [0, 10]");
    }
    return severity_of(Score::from_tenths(static_cast<int>(nearest)));
}

std::string_view to_string(Severity severity) {
    switch (severity) {
        case Severity::None: return "None";
        case Severity::Low: return "Low";
        case Severity::Medium: return "Medium";
        case Severity::High: return "High";
        case Severity::Critical: return "Critical";
    }
    return "None";
}

std::vector<CvssVector> all_vectors() {
    std::vector<CvssVector> out;
    out.reserve(2592);
    for (auto av : {AttackVector::Network, AttackVector::Adjacent, AttackVector::Local, AttackVector::Physical})
    for (auto ac : {AttackComplexity::Low, AttackComplexity::High})
    for (auto pr : {PrivilegesRequired::None, PrivilegesRequired::Low, PrivilegesRequired::High})
    for (auto ui : {UserInteraction::None, UserInteraction::Required})
    for (auto s : {Scope::Unchanged, Scope::Changed})
    for (auto c : {ImpactLevel::None, ImpactLevel::Low, ImpactLevel::High})
    for (auto i : {ImpactLevel::None, ImpactLevel::Low, ImpactLevel::High})
    for (auto a : {ImpactLevel::None, ImpactLevel::Low, ImpactLevel::High})
        out.push_back(CvssVector{av, ac, pr, ui, s, c, i, a});
    return out;
}

}  // namespace vulnprio::cvss
