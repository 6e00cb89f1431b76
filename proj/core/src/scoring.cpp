#include "vulnprio/scoring.hpp"

namespace vulnprio::scoring {
namespace {

std::string join_ids(const std::vector<CveId>& ids) {
    std::string out;
    for (const CveId& id : ids) {
        if (!out.empty()) out += ", ";
        out += id.str();
    }
    return out;
}

void check_weight(const char* name, Decimal w) {
    if (w <= Decimal{}) {
        throw ScoringError(ScoringError::Kind::InvalidConfig,
                           std::string("environmental weight '") + name + "' must be positive, got " + w.to_string());
    }
    if (w.fractional_digits() > 4) {
        throw ScoringError(ScoringError::Kind::InvalidConfig,
                           std::string("environmental weight '") + name + "' has more than four decimal places");
    }
}

}  // namespace

void EnvWeights::validate() const {
    check_weight("exposure.public", exposure_public);
    check_weight("exposure.private", exposure_private);
    check_weight("criticality.low", criticality_low);
    check_weight("criticality.medium", criticality_medium);
    check_weight("criticality.high", criticality_high);
}

Decimal EnvWeights::criticality(Criticality c) const {
    switch (c) {
        case Criticality::Low: return criticality_low;
        case Criticality::Medium: return criticality_medium;
        case Criticality::High: return criticality_high;
    }
    return criticality_low;
}

EnvironmentalFactors env_factor(const std::optional<feed::AssetContext>& context, const EnvWeights& weights) {
    weights.validate();
    if (!context) return EnvironmentalFactors{};
    EnvironmentalFactors env;
    env.exposure_weight = weights.exposure(context->exposure);
    env.criticality_weight = weights.criticality(context->criticality);
    env.product = env.exposure_weight * env.criticality_weight;
    return env;
}

Decimal threat_score(cvss::Score cvss, std::uint64_t wx, const TriageLabels& labels,
                     const EnvironmentalFactors& env) {
    if (wx > static_cast<std::uint64_t>(INT64_MAX / Decimal::kUnit)) {
        throw std::overflow_error("WX count too large to score exactly");
    }
    const Decimal base = cvss.to_decimal() + Decimal::from_integer(static_cast<std::int64_t>(wx));
    return base * utility_multiplier(labels.utility) * opportune_multiplier(labels.opportune) * env.product;
}

ScoringResult score_portfolio(std::span<const feed::CveRecord> records, const wx::WxTable& wx,
                              const std::map<CveId, feed::LabeledExample>& labels,
                              std::span<const feed::AssetContext> contexts, const EnvWeights& weights,
                              const LabelPredictor& predictor) {
    weights.validate();

    std::map<CveId, EnvironmentalFactors> env_by_cve;
    for (const feed::AssetContext& ctx : contexts) {
        const EnvironmentalFactors env = env_factor(ctx, weights);
        auto [it, inserted] = env_by_cve.emplace(ctx.cve, env);
        if (!inserted && it->second.product < env.product) it->second = env;
    }

    ScoringResult result;
    result.scored.reserve(records.size());
    std::vector<CveId> missing_cvss;
    std::vector<CveId> missing_labels;

    for (const feed::CveRecord& record : records) {
        std::optional<cvss::BaseScore> base;
        CvssOrigin origin = CvssOrigin::Vector;
        if (record.vector) {
            base = cvss::base_score(*record.vector);
            if (record.published_score && *record.published_score != base->value) {
                result.warnings.push_back(record.id.str() + ": published score " + record.published_score->to_string() +
                                          " differs from vector score " + base->value.to_string() +
                                          "; using the vector score");
            }
        } else if (record.published_score) {
            base = cvss::BaseScore{*record.published_score, cvss::severity_of(*record.published_score)};
            origin = CvssOrigin::Published;
        } else {
            missing_cvss.push_back(record.id);
        }

        std::optional<TriageLabels> triage;
        if (auto it = labels.find(record.id); it != labels.end() && it->second.complete()) {
            triage = TriageLabels{*it->second.utility, *it->second.opportune, it->second.labeler};
        } else if (predictor) {
            triage = predictor(record);
            if (triage) triage->source = Labeler::Model;
        }
        if (!triage) missing_labels.push_back(record.id);

        if (!base || !triage) continue;

        ScoredVulnerability sv{record.id, *base, origin, wx.lookup(record.id), *triage, {}, {}};
        if (auto it = env_by_cve.find(record.id); it != env_by_cve.end()) sv.env = it->second;
        sv.threat_score = threat_score(sv.cvss.value, sv.wx.count, sv.labels, sv.env);
        result.scored.push_back(std::move(sv));
    }

    if (!missing_cvss.empty() || !missing_labels.empty()) {
        std::string message;
        if (!missing_cvss.empty()) message += "missing CVSS vector or score: " + join_ids(missing_cvss);
        if (!missing_labels.empty()) {
            if (!message.empty()) message += "; ";
            message += "missing utility/opportune labels: " + join_ids(missing_labels);
        }
        const auto kind = missing_cvss.empty() ? ScoringError::Kind::MissingLabels : ScoringError::Kind::MissingCvss;
        throw ScoringError(kind, message, std::move(missing_cvss), std::move(missing_labels));
    }
    return result;
}

}  // namespace vulnprio::scoring
