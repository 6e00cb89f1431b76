#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulnprio/decimal.hpp"
#include "vulnprio/scoring.hpp"

namespace vulnprio::ranking {

struct RankedEntry {
    std::size_t rank = 0;  // 1-based, dense
    scoring::ScoredVulnerability vuln;
};

struct RankedPortfolio {
    std::vector<RankedEntry> entries;
};

/// Threat score descending, then CVSS descending, then CVE id ascending.
bool ranks_before(const scoring::ScoredVulnerability& a, const scoring::ScoredVulnerability& b);

/// CVSS descending, then CVE id ascending: the ordering a CVSS-only queue uses.
bool cvss_ranks_before(const scoring::ScoredVulnerability& a, const scoring::ScoredVulnerability& b);

RankedPortfolio rank(std::vector<scoring::ScoredVulnerability> scored);

/// Threat-score tier lower bounds, strictly descending. The default
/// {64, 32, 16, 8} yields tiers >=64, 32-64, 16-32, 8-16 and <8.
struct TierBounds {
    std::vector<Decimal> thresholds = {Decimal::from_integer(64), Decimal::from_integer(32),
                                       Decimal::from_integer(16), Decimal::from_integer(8)};

    /// Throws std::invalid_argument unless strictly descending and positive.
    void validate() const;
};

struct TierCount {
    std::string label;
    std::optional<Decimal> lower;  // inclusive; none for the bottom tier
    std::optional<Decimal> upper;  // exclusive; none for the top tier
    std::size_t count = 0;
};

struct TopKOverlap {
    std::size_t k = 0;
    std::size_t intersection = 0;
    std::size_t union_size = 0;
    double jaccard = 0.0;
};

struct Placement {
    CveId cve;
    std::size_t cvss_rank = 0;
    std::size_t threat_rank = 0;
};

struct ComparisonReport {
    std::size_t total = 0;
    /// cvss_bands[i] counts band 10 - i. Band b covers [b, b+1); band 10 is
    /// exactly 10.0 and band 1 also absorbs scores below 1.0.
    std::array<std::size_t, 10> cvss_bands{};
    /// CVSS 9.0-10.0.
    std::size_t critical = 0;
    std::vector<TierCount> threat_tiers;
    std::vector<TopKOverlap> overlaps;
    /// In threat-rank order.
    std::vector<Placement> placements;
};

/// Top-k overlap is reported for k in {10, 100, 1000} that do not exceed N.
ComparisonReport compare(std::span<const scoring::ScoredVulnerability> scored, const TierBounds& tiers = {});

enum class ExportFormat { Text, Csv, JsonLines };

std::optional<ExportFormat> parse_format(std::string_view text);

/// CSV columns: rank, cve_id, threat_score, cvss, severity, wx, utility,
/// opportune, env_product, label_source. Throws std::ios_base::failure when
/// the stream goes bad.
void export_portfolio(const RankedPortfolio& portfolio, ExportFormat format, std::ostream& out);

/// Portfolio plus the side-by-side band summary.
void export_report(const RankedPortfolio& portfolio, const ComparisonReport& report, ExportFormat format,
                   std::ostream& out);

/// Unranked structured records, one per line, in input order.
void export_scored(std::span<const scoring::ScoredVulnerability> scored, std::ostream& out);

}  // namespace vulnprio::ranking
