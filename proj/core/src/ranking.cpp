#include "vulnprio/ranking.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace vulnprio::ranking {
namespace {

std::string bound_label(Decimal d) {
    if (d.fractional_digits() == 0) return std::to_string(d.units() / Decimal::kUnit);
    return d.to_string();
}

}  // namespace

bool ranks_before(const scoring::ScoredVulnerability& a, const scoring::ScoredVulnerability& b) {
    if (a.threat_score != b.threat_score) return a.threat_score > b.threat_score;
    if (a.cvss.value != b.cvss.value) return a.cvss.value > b.cvss.value;
    return a.cve < b.cve;
}

bool cvss_ranks_before(const scoring::ScoredVulnerability& a, const scoring::ScoredVulnerability& b) {
    if (a.cvss.value != b.cvss.value) return a.cvss.value > b.cvss.value;
    return a.cve < b.cve;
}

RankedPortfolio rank(std::vector<scoring::ScoredVulnerability> scored) {
    std::stable_sort(scored.begin(), scored.end(), ranks_before);
    RankedPortfolio out;
    out.entries.reserve(scored.size());
    std::size_t position = 0;
    for (auto& sv : scored) out.entries.push_back(RankedEntry{++position, std::move(sv)});
    return out;
}

void TierBounds::validate() const {
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] <= Decimal{}) throw std::invalid_argument("tier thresholds must be positive");
        if (i > 0 && !(thresholds[i] < thresholds[i - 1])) {
            throw std::invalid_argument("tier thresholds must be strictly descending");
        }
    }
}

ComparisonReport compare(std::span<const scoring::ScoredVulnerability> scored, const TierBounds& tiers) {
    tiers.validate();
    ComparisonReport report;
    report.total = scored.size();

    for (const auto& sv : scored) {
        const int band = std::max(1, sv.cvss.value.tenths() / 10);
        ++report.cvss_bands[static_cast<std::size_t>(10 - band)];
        if (sv.cvss.value.tenths() >= 90) ++report.critical;
    }

    const auto& t = tiers.thresholds;
    for (std::size_t i = 0; i <= t.size(); ++i) {
        TierCount tier;
        if (i < t.size()) tier.lower = t[i];
        if (i > 0) tier.upper = t[i - 1];
        if (!tier.upper && tier.lower) {
            tier.label = ">=" + bound_label(*tier.lower);
        } else if (tier.upper && tier.lower) {
            tier.label = bound_label(*tier.lower) + "-" + bound_label(*tier.upper);
        } else if (tier.upper) {
            tier.label = "<" + bound_label(*tier.upper);
        } else {
            tier.label = "all";
        }
        report.threat_tiers.push_back(tier);
    }
    for (const auto& sv : scored) {
        for (auto& tier : report.threat_tiers) {
            if (!tier.lower || sv.threat_score >= *tier.lower) {
                ++tier.count;
                break;
            }
        }
    }

    std::vector<const scoring::ScoredVulnerability*> by_threat;
    by_threat.reserve(scored.size());
    for (const auto& sv : scored) by_threat.push_back(&sv);
    auto by_cvss = by_threat;
    std::stable_sort(by_threat.begin(), by_threat.end(), [](auto* a, auto* b) { return ranks_before(*a, *b); });
    std::stable_sort(by_cvss.begin(), by_cvss.end(), [](auto* a, auto* b) { return cvss_ranks_before(*a, *b); });

    for (std::size_t k : {std::size_t{10}, std::size_t{100}, std::size_t{1000}}) {
        if (k > scored.size()) break;
        std::set<CveId> top_threat;
        std::set<CveId> top_cvss;
        for (std::size_t i = 0; i < k; ++i) {
            top_threat.insert(by_threat[i]->cve);
            top_cvss.insert(by_cvss[i]->cve);
        }
        TopKOverlap overlap{k, 0, 0, 0.0};
        for (const CveId& id : top_threat) overlap.intersection += top_cvss.count(id);
        overlap.union_size = top_threat.size() + top_cvss.size() - overlap.intersection;
        overlap.jaccard = static_cast<double>(overlap.intersection) / static_cast<double>(overlap.union_size);
        report.overlaps.push_back(overlap);
    }

    std::map<CveId, std::size_t> cvss_position;
    for (std::size_t i = 0; i < by_cvss.size(); ++i) cvss_position.emplace(by_cvss[i]->cve, i + 1);
    report.placements.reserve(by_threat.size());
    for (std::size_t i = 0; i < by_threat.size(); ++i) {
        report.placements.push_back(Placement{by_threat[i]->cve, cvss_position.at(by_threat[i]->cve), i + 1});
    }
    return report;
}

}  // namespace vulnprio::ranking
