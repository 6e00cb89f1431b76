#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vulnprio/cvss.hpp"
#include "vulnprio/types.hpp"

namespace vulnprio::feed {

using Timestamp = std::chrono::sys_seconds;

/// Strict "YYYY-MM-DDTHH:MM:SSZ".
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

class IngestError : public std::runtime_error {
public:
    enum class Kind { Io, Parse, DuplicateId, Schema, InvalidCategory };

    IngestError(Kind kind, std::filesystem::path path, std::size_t line, const std::string& detail);

    Kind kind() const { return kind_; }
    const std::filesystem::path& path() const { return path_; }
    /// 1-based; 0 when the error is not tied to a line.
    std::size_t line() const { return line_; }
    const std::string& detail() const { return detail_; }

private:
    Kind kind_;
    std::filesystem::path path_;
    std::size_t line_;
    std::string detail_;
};

struct ReferenceEntry {
    std::string url;
    ReferenceSource source = ReferenceSource::Other;
    bool is_exploit = false;

    friend bool operator==(const ReferenceEntry&, const ReferenceEntry&) = default;
};

struct CveRecord {
    CveId id;
    std::string description;
    std::optional<cvss::CvssVector> vector;
    std::optional<cvss::Score> published_score;
    std::vector<ReferenceEntry> references;

    bool has_cvss() const { return vector.has_value() || published_score.has_value(); }
};

/// Per-CVE exploit references, URL-deduplicated, in first-seen order.
using ReferenceGroups = std::map<CveId, std::vector<ReferenceEntry>>;

struct ExploitFeed {
    ReferenceGroups groups;
    std::size_t total_lines = 0;
    std::size_t duplicate_urls = 0;
    /// Entries whose source was not recognised; they are kept as Other with
    /// the exploit flag cleared.
    std::size_t unknown_sources = 0;
};

/// SME records carry both categories. Model records may carry only the
/// category whose classifier produced them.
struct LabeledExample {
    CveId cve;
    std::string description;
    std::optional<Utility> utility;
    std::optional<Opportune> opportune;
    Labeler labeler = Labeler::SME;
    Timestamp labeled_at{};

    bool complete() const { return utility.has_value() && opportune.has_value(); }
    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct AssetContext {
    std::string asset_id;
    CveId cve;
    Exposure exposure = Exposure::Private;
    Criticality criticality = Criticality::Low;
};

std::vector<CveRecord> load_cve_records(const std::filesystem::path& path);
void save_cve_records(const std::filesystem::path& path, std::span<const CveRecord> records);

ExploitFeed load_exploit_refs(const std::filesystem::path& path);

/// Adds inline CVE record references to the feed groups, keeping the
/// exact-URL dedup rule.
ReferenceGroups merge_references(ReferenceGroups groups, std::span<const CveRecord> records);

std::vector<LabeledExample> load_labels(const std::filesystem::path& path);

/// Merges `examples` into whatever is already stored at `path` and rewrites
/// the file atomically, one record per CVE in CVE order.
void save_labels(const std::filesystem::path& path, std::span<const LabeledExample> examples);

/// One record per CVE. SME beats Model; within the same labeler the newer
/// timestamp wins (later input on ties). Model records combine per category.
std::vector<LabeledExample> merge_labels(std::span<const LabeledExample> existing,
                                         std::span<const LabeledExample> incoming);

std::map<CveId, LabeledExample> index_labels(std::span<const LabeledExample> examples);

/// Rejects a second entry for the same (asset, cve) pair.
std::vector<AssetContext> load_asset_context(const std::filesystem::path& path);

}  // namespace vulnprio::feed
