#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vulnprio/cvss.hpp"
#include "vulnprio/decimal.hpp"
#include "vulnprio/feed.hpp"
#include "vulnprio/wx.hpp"

namespace vulnprio::scoring {

class ScoringError : public std::runtime_error {
public:
    enum class Kind { MissingCvss, MissingLabels, InvalidConfig };

    ScoringError(Kind kind, const std::string& message, std::vector<CveId> missing_cvss = {},
                 std::vector<CveId> missing_labels = {})
        : std::runtime_error(message),
          kind_(kind),
          missing_cvss_(std::move(missing_cvss)),
          missing_labels_(std::move(missing_labels)) {}

    Kind kind() const { return kind_; }
    const std::vector<CveId>& missing_cvss() const { return missing_cvss_; }
    const std::vector<CveId>& missing_labels() const { return missing_labels_; }

private:
    Kind kind_;
    std::vector<CveId> missing_cvss_;
    std::vector<CveId> missing_labels_;
};

struct TriageLabels {
    Utility utility = Utility::NotUseful;
    Opportune opportune = Opportune::No;
    Labeler source = Labeler::SME;

    friend bool operator==(const TriageLabels&, const TriageLabels&) = default;
};

/// Exposure and criticality weights. Every weight must be positive with at
/// most four decimal places so threat scores stay exact.
struct EnvWeights {
    Decimal exposure_public = *Decimal::parse("1.5");
    Decimal exposure_private = *Decimal::parse("1.0");
    Decimal criticality_low = *Decimal::parse("1.0");
    Decimal criticality_medium = *Decimal::parse("1.2");
    Decimal criticality_high = *Decimal::parse("1.5");

    /// Throws ScoringError(InvalidConfig).
    void validate() const;
    Decimal exposure(Exposure e) const { return e == Exposure::Public ? exposure_public : exposure_private; }
    Decimal criticality(Criticality c) const;
};

struct EnvironmentalFactors {
    Decimal exposure_weight = Decimal::from_integer(1);
    Decimal criticality_weight = Decimal::from_integer(1);
    Decimal product = Decimal::from_integer(1);

    friend bool operator==(const EnvironmentalFactors&, const EnvironmentalFactors&) = default;
};

/// Missing context is neutral (both weights 1).
EnvironmentalFactors env_factor(const std::optional<feed::AssetContext>& context, const EnvWeights& weights);

constexpr int utility_multiplier(Utility u) { return to_int(u) + 1; }
constexpr int opportune_multiplier(Opportune o) { return to_int(o) + 1; }

/// (cvss + wx) * (utility + 1) * (opportune + 1) * env.product, exact.
Decimal threat_score(cvss::Score cvss, std::uint64_t wx, const TriageLabels& labels,
                     const EnvironmentalFactors& env);

enum class CvssOrigin { Vector, Published };

struct ScoredVulnerability {
    CveId cve;
    cvss::BaseScore cvss;
    CvssOrigin cvss_origin = CvssOrigin::Vector;
    wx::WxCount wx;
    TriageLabels labels;
    EnvironmentalFactors env;
    Decimal threat_score;
};

/// Supplies labels for CVEs without a usable stored label.
using LabelPredictor = std::function<std::optional<TriageLabels>(const feed::CveRecord&)>;

struct ScoringResult {
    std::vector<ScoredVulnerability> scored;
    std::vector<std::string> warnings;
};

/// One entry per record, input order preserved. A computed vector score
/// wins over a disagreeing published score (logged as a warning). When a
/// CVE has several asset contexts the largest environmental product is used.
ScoringResult score_portfolio(std::span<const feed::CveRecord> records, const wx::WxTable& wx,
                              const std::map<CveId, feed::LabeledExample>& labels,
                              std::span<const feed::AssetContext> contexts, const EnvWeights& weights,
                              const LabelPredictor& predictor = {});

}  // namespace vulnprio::scoring
