#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "vulnprio/ranking.hpp"

namespace vulnprio::ranking {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string format(const char* fmt, auto... args) {
    char buf[512];
    const int n = std::snprintf(buf, sizeof buf, fmt, args...);
    return std::string(buf, n < 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(n), sizeof buf - 1));
}

std::string ratio4(double value) { return format("%.4f", value); }

ordered_json entry_json(const scoring::ScoredVulnerability& v, std::optional<std::size_t> rank) {
    ordered_json node;
    node["kind"] = "entry";
    if (rank) node["rank"] = *rank;
    node["cve"] = v.cve.str();
    node["threat_score"] = v.threat_score.to_string();
    node["cvss"] = v.cvss.value.to_string();
    node["severity"] = cvss::to_string(v.cvss.severity);
    node["cvss_origin"] = v.cvss_origin == scoring::CvssOrigin::Vector ? "vector" : "published";
    node["wx"] = v.wx.count;
    ordered_json per_source = ordered_json::object();
    for (const auto& [source, n] : v.wx.per_source) per_source[std::string(to_string(source))] = n;
    node["wx_per_source"] = per_source;
    node["utility"] = to_int(v.labels.utility);
    node["opportune"] = to_int(v.labels.opportune);
    node["label_source"] = to_string(v.labels.source);
    node["exposure_weight"] = v.env.exposure_weight.to_string();
    node["criticality_weight"] = v.env.criticality_weight.to_string();
    node["env_product"] = v.env.product.to_string();
    return node;
}

void write_csv(const RankedPortfolio& portfolio, std::ostream& out) {
    out << "rank,cve_id,threat_score,cvss,severity,wx,utility,opportune,env_product,label_source\n";
    for (const auto& e : portfolio.entries) {
        const auto& v = e.vuln;
        out << e.rank << ',' << v.cve.str() << ',' << v.threat_score.to_string() << ',' << v.cvss.value.to_string()
            << ',' << cvss::to_string(v.cvss.severity) << ',' << v.wx.count << ',' << to_int(v.labels.utility) << ','
            << to_int(v.labels.opportune) << ',' << v.env.product.to_string() << ',' << to_string(v.labels.source)
            << '\n';
    }
}

void write_table(const RankedPortfolio& portfolio, std::ostream& out) {
    out << format("%5s  %-18s %14s %5s  %-8s %6s %3s %3s %8s  %s\n", "RANK", "CVE", "THREAT", "CVSS", "SEVERITY",
                  "WX", "U", "O", "ENV", "SOURCE");
    for (const auto& e : portfolio.entries) {
        const auto& v = e.vuln;
        out << format("%5zu  %-18s %14s %5s  %-8s %6llu %3d %3d %8s  %s\n", e.rank, v.cve.str().c_str(),
                      v.threat_score.to_string().c_str(), v.cvss.value.to_string().c_str(),
                      std::string(cvss::to_string(v.cvss.severity)).c_str(),
                      static_cast<unsigned long long>(v.wx.count), to_int(v.labels.utility),
                      to_int(v.labels.opportune), v.env.product.to_string().c_str(),
                      std::string(to_string(v.labels.source)).c_str());
    }
}

void write_summary(const ComparisonReport& report, std::ostream& out) {
    out << "Prioritization by CVSS v3.1 vs threat score (" << report.total << " vulnerabilities)\n\n";
    out << format("%-24s    %s\n", "CVSS v3.1 band", "Threat-score tier");
    const std::size_t rows = std::max<std::size_t>(report.cvss_bands.size(), report.threat_tiers.size());
    for (std::size_t i = 0; i < rows; ++i) {
        std::string left;
        std::string right;
        if (i < report.cvss_bands.size()) {
            left = format("  %-8d %12zu", static_cast<int>(10 - i), report.cvss_bands[i]);
        }
        if (i < report.threat_tiers.size()) {
            right = format("  %-8s %12zu", report.threat_tiers[i].label.c_str(), report.threat_tiers[i].count);
        }
        std::string line = format("%-24s    %s", left.c_str(), right.c_str());
        line.erase(line.find_last_not_of(' ') + 1);
        out << line << '\n';
    }
    out << format("\nCritical (CVSS 9.0-10.0): %zu\n", report.critical);
    if (!report.overlaps.empty()) {
        out << "Top-k overlap (Jaccard, CVSS order vs threat order):\n";
        for (const auto& o : report.overlaps) {
            out << format("  k=%-6zu %s  (%zu/%zu)\n", o.k, ratio4(o.jaccard).c_str(), o.intersection, o.union_size);
        }
    }
    std::size_t moved = 0;
    for (const auto& p : report.placements) moved += p.cvss_rank != p.threat_rank ? 1 : 0;
    out << format("Entries whose position changes: %zu\n", moved);
}

void check(std::ostream& out) {
    if (!out) throw std::ios_base::failure("report output stream failed");
}

}  // namespace

std::optional<ExportFormat> parse_format(std::string_view text) {
    if (text == "text") return ExportFormat::Text;
    if (text == "csv") return ExportFormat::Csv;
    if (text == "json-lines" || text == "jsonl" || text == "structured") return ExportFormat::JsonLines;
    return std::nullopt;
}

void export_portfolio(const RankedPortfolio& portfolio, ExportFormat format, std::ostream& out) {
    switch (format) {
        case ExportFormat::Csv:
            write_csv(portfolio, out);
            break;
        case ExportFormat::Text:
            write_table(portfolio, out);
            break;
        case ExportFormat::JsonLines:
            for (const auto& e : portfolio.entries) out << entry_json(e.vuln, e.rank).dump() << '\n';
            break;
    }
    check(out);
}

void export_report(const RankedPortfolio& portfolio, const ComparisonReport& report, ExportFormat format,
                   std::ostream& out) {
    switch (format) {
        case ExportFormat::Csv:
            write_csv(portfolio, out);
            break;
        case ExportFormat::Text:
            write_summary(report, out);
            out << '\n';
            write_table(portfolio, out);
            break;
        case ExportFormat::JsonLines: {
            for (const auto& e : portfolio.entries) out << entry_json(e.vuln, e.rank).dump() << '\n';
            for (std::size_t i = 0; i < report.cvss_bands.size(); ++i) {
                ordered_json node{{"kind", "cvss_band"}, {"band", 10 - static_cast<int>(i)},
                                  {"count", report.cvss_bands[i]}};
                out << node.dump() << '\n';
            }
            for (const auto& tier : report.threat_tiers) {
                ordered_json node{{"kind", "threat_tier"}, {"tier", tier.label}, {"count", tier.count}};
                out << node.dump() << '\n';
            }
            for (const auto& o : report.overlaps) {
                ordered_json node{{"kind", "overlap"}, {"k", o.k}, {"intersection", o.intersection},
                                  {"union", o.union_size}, {"jaccard", ratio4(o.jaccard)}};
                out << node.dump() << '\n';
            }
            ordered_json summary{{"kind", "summary"}, {"total", report.total}, {"critical", report.critical}};
            out << summary.dump() << '\n';
            break;
        }
    }
    check(out);
}

void export_scored(std::span<const scoring::ScoredVulnerability> scored, std::ostream& out) {
    for (const auto& v : scored) out << entry_json(v, std::nullopt).dump() << '\n';
    check(out);
}

}  // namespace vulnprio::ranking
