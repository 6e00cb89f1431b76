#include "vulnprio/feed.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

namespace vulnprio {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::optional<CveId> CveId::parse(std::string_view text) {
    // CVE-YYYY-NNNN+
    if (text.size() < 13 || !text.starts_with("CVE-") || text[8] != '-') return std::nullopt;
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (!digits(text.substr(4, 4)) || !digits(text.substr(9))) return std::nullopt;
    return CveId(std::string(text));
}

std::optional<Utility> utility_from_int(std::int64_t value) {
    if (value < 0 || value > 2) return std::nullopt;
    return static_cast<Utility>(value);
}

std::optional<Opportune> opportune_from_int(std::int64_t value) {
    if (value < 0 || value > 1) return std::nullopt;
    return static_cast<Opportune>(value);
}

std::string_view to_string(Labeler labeler) { return labeler == Labeler::SME ? "SME" : "Model"; }

std::string_view to_string(Exposure exposure) {
    return exposure == Exposure::Public ? "public" : "private";
}

std::string_view to_string(Criticality criticality) {
    switch (criticality) {
        case Criticality::Low: return "low";
        case Criticality::Medium: return "medium";
        case Criticality::High: return "high";
    }
    return "low";
}

std::string_view to_string(ReferenceSource source) {
    switch (source) {
        case ReferenceSource::ExploitDB: return "ExploitDB";
        case ReferenceSource::Metasploit: return "Metasploit";
        case ReferenceSource::GitHub: return "GitHub";
        case ReferenceSource::Other: return "Other";
    }
    return "Other";
}

std::optional<Labeler> parse_labeler(std::string_view text) {
    const auto l = lower(text);
    if (l == "sme") return Labeler::SME;
    if (l == "model") return Labeler::Model;
    return std::nullopt;
}

std::optional<Exposure> parse_exposure(std::string_view text) {
    const auto l = lower(text);
    if (l == "public") return Exposure::Public;
    if (l == "private") return Exposure::Private;
    return std::nullopt;
}

std::optional<Criticality> parse_criticality(std::string_view text) {
    const auto l = lower(text);
    if (l == "low") return Criticality::Low;
    if (l == "medium") return Criticality::Medium;
    if (l == "high") return Criticality::High;
    return std::nullopt;
}

std::optional<ReferenceSource> parse_source(std::string_view text) {
    const auto l = lower(text);
    if (l == "exploitdb" || l == "exploit-db" || l == "edb") return ReferenceSource::ExploitDB;
    if (l == "metasploit" || l == "msf") return ReferenceSource::Metasploit;
    if (l == "github") return ReferenceSource::GitHub;
    if (l == "other") return ReferenceSource::Other;
    return std::nullopt;
}

}  // namespace vulnprio

namespace vulnprio::feed {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using Kind = IngestError::Kind;

/// Streams a JSON-lines file; blank lines are skipped.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(Kind::Io, path, 0, "cannot open file");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw IngestError(Kind::Parse, path, line_no, e.what());
        }
        if (!record.is_object()) throw IngestError(Kind::Parse, path, line_no, "record is not an object");
        fn(record, line_no);
    }
    if (in.bad()) throw IngestError(Kind::Io, path, line_no, "read failure");
}

class Fields {
public:
    Fields(const json& record, const std::filesystem::path& path, std::size_t line)
        : record_(record), path_(path), line_(line) {}

    [[noreturn]] void fail(Kind kind, const std::string& detail) const {
        throw IngestError(kind, path_, line_, detail);
    }

    bool has(const char* key) const {
        auto it = record_.find(key);
        return it != record_.end() && !it->is_null();
    }

    const json& require(const char* key) const {
        auto it = record_.find(key);
        if (it == record_.end() || it->is_null()) fail(Kind::Schema, std::string("missing field '") + key + "'");
        return *it;
    }

    std::string string(const char* key) const {
        const json& v = require(key);
        if (!v.is_string()) fail(Kind::Schema, std::string("field '") + key + "' must be a string");
        return v.get<std::string>();
    }

    std::optional<std::string> optional_string(const char* key) const {
        if (!has(key)) return std::nullopt;
        return string(key);
    }

    CveId cve(const char* key) const {
        const std::string text = string(key);
        auto id = CveId::parse(text);
        if (!id) fail(Kind::Schema, "invalid CVE id '" + text + "'");
        return *id;
    }

    bool boolean(const char* key) const {
        const json& v = require(key);
        if (!v.is_boolean()) fail(Kind::Schema, std::string("field '") + key + "' must be a boolean");
        return v.get<bool>();
    }

    std::int64_t category(const char* key) const {
        const json& v = require(key);
        if (!v.is_number_integer()) {
            fail(Kind::InvalidCategory, std::string("field '") + key + "' must be an integer category");
        }
        return v.get<std::int64_t>();
    }

private:
    const json& record_;
    const std::filesystem::path& path_;
    std::size_t line_;
};

ReferenceEntry parse_reference(const json& node, const Fields& ctx, std::size_t* unknown_sources) {
    if (!node.is_object()) ctx.fail(Kind::Schema, "reference must be an object");
    auto url_it = node.find("url");
    if (url_it == node.end() || !url_it->is_string() || url_it->get<std::string>().empty()) {
        ctx.fail(Kind::Schema, "reference 'url' must be a non-empty string");
    }
    ReferenceEntry entry;
    entry.url = url_it->get<std::string>();
    auto exploit_it = node.find("exploit");
    if (exploit_it != node.end() && !exploit_it->is_null()) {
        if (!exploit_it->is_boolean()) ctx.fail(Kind::Schema, "reference 'exploit' must be a boolean");
        entry.is_exploit = exploit_it->get<bool>();
    }
    auto source_it = node.find("source");
    if (source_it != node.end() && !source_it->is_null()) {
        if (!source_it->is_string()) ctx.fail(Kind::Schema, "reference 'source' must be a string");
        if (auto source = parse_source(source_it->get<std::string>())) {
            entry.source = *source;
        } else {
            entry.source = ReferenceSource::Other;
            entry.is_exploit = false;
            if (unknown_sources) ++*unknown_sources;
        }
    } else if (entry.is_exploit) {
        // Other + exploit is only accepted when tagged explicitly.
        entry.is_exploit = false;
        if (unknown_sources) ++*unknown_sources;
    }
    return entry;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError(Kind::Io, tmp, 0, "cannot open for writing");
        out << content;
        out.flush();
        if (!out) throw IngestError(Kind::Io, tmp, 0, "write failure");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IngestError(Kind::Io, path, 0, "rename failed: " + ec.message());
}

bool newer_or_equal(const LabeledExample& incoming, const LabeledExample& existing) {
    return incoming.labeled_at >= existing.labeled_at;
}

LabeledExample merge_pair(const LabeledExample& existing, const LabeledExample& incoming) {
    if (existing.labeler != incoming.labeler) {
        return existing.labeler == Labeler::SME ? existing : incoming;
    }
    if (existing.labeler == Labeler::SME) {
        return newer_or_equal(incoming, existing) ? incoming : existing;
    }
    const bool incoming_wins = newer_or_equal(incoming, existing);
    const LabeledExample& base = incoming_wins ? existing : incoming;
    const LabeledExample& top = incoming_wins ? incoming : existing;
    LabeledExample merged = top;
    if (!merged.utility) merged.utility = base.utility;
    if (!merged.opportune) merged.opportune = base.opportune;
    if (merged.description.empty()) merged.description = base.description;
    return merged;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        return std::nullopt;
    }
    auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    auto y = number(0, 4), mo = number(5, 2), d = number(8, 2);
    auto h = number(11, 2), mi = number(14, 2), s = number(17, 2);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *s > 59) return std::nullopt;
    return Timestamp{std::chrono::sys_days{ymd}.time_since_epoch() + std::chrono::hours{*h} +
                     std::chrono::minutes{*mi} + std::chrono::seconds{*s}};
}

std::string format_timestamp(Timestamp ts) {
    const auto days = std::chrono::floor<std::chrono::days>(ts);
    const std::chrono::year_month_day ymd{days};
    const std::chrono::hh_mm_ss hms{ts - days};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

IngestError::IngestError(Kind kind, std::filesystem::path path, std::size_t line, const std::string& detail)
    : std::runtime_error(path.string() + (line ? ":" + std::to_string(line) : std::string{}) + ": " + detail),
      kind_(kind),
      path_(std::move(path)),
      line_(line),
      detail_(detail) {}

std::vector<CveRecord> load_cve_records(const std::filesystem::path& path) {
    std::vector<CveRecord> records;
    std::set<CveId> seen;
    for_each_record(path, [&](const json& node, std::size_t line) {
        Fields f(node, path, line);
        CveRecord record{f.cve("id"), f.string("description"), std::nullopt, std::nullopt, {}};
        if (!seen.insert(record.id).second) f.fail(Kind::DuplicateId, "duplicate CVE id " + record.id.str());

        if (f.has("vector")) {
            try {
                record.vector = cvss::parse_vector(f.string("vector"));
            } catch (const cvss::CvssError& e) {
                f.fail(Kind::Schema, std::string("invalid vector: ") + e.what());
            }
        }
        if (f.has("score")) {
            const json& score = node.at("score");
            try {
                if (score.is_string()) {
                    record.published_score = cvss::Score::parse(score.get<std::string>());
                } else if (score.is_number()) {
                    auto exact = Decimal::from_double(score.get<double>(), 1);
                    if (!exact) f.fail(Kind::Schema, "score must have one decimal place");
                    record.published_score = cvss::Score::parse(exact->to_string());
                } else {
                    f.fail(Kind::Schema, "field 'score' must be a number or string");
                }
            } catch (const cvss::CvssError& e) {
                f.fail(Kind::Schema, std::string("invalid score: ") + e.what());
            }
        }
        if (f.has("references")) {
            const json& refs = node.at("references");
            if (!refs.is_array()) f.fail(Kind::Schema, "field 'references' must be an array");
            for (const json& ref : refs) record.references.push_back(parse_reference(ref, f, nullptr));
        }
        records.push_back(std::move(record));
    });
    return records;
}

void save_cve_records(const std::filesystem::path& path, std::span<const CveRecord> records) {
    std::string out;
    for (const CveRecord& r : records) {
        ordered_json node;
        node["id"] = r.id.str();
        node["description"] = r.description;
        node["vector"] = r.vector ? json(cvss::to_string(*r.vector)) : json(nullptr);
        node["score"] = r.published_score ? json(r.published_score->to_string()) : json(nullptr);
        ordered_json refs = ordered_json::array();
        for (const ReferenceEntry& ref : r.references) {
            refs.push_back({{"url", ref.url}, {"source", to_string(ref.source)}, {"exploit", ref.is_exploit}});
        }
        node["references"] = std::move(refs);
        out += node.dump();
        out += '\n';
    }
    write_atomically(path, out);
}

ExploitFeed load_exploit_refs(const std::filesystem::path& path) {
    ExploitFeed feed;
    std::map<CveId, std::unordered_set<std::string>> urls;
    for_each_record(path, [&](const json& node, std::size_t line) {
        Fields f(node, path, line);
        ++feed.total_lines;
        const CveId cve = f.cve("cve");
        f.string("url");
        f.string("source");
        f.boolean("exploit");
        ReferenceEntry entry = parse_reference(node, f, &feed.unknown_sources);
        if (!urls[cve].insert(entry.url).second) {
            ++feed.duplicate_urls;
            return;
        }
        feed.groups[cve].push_back(std::move(entry));
    });
    return feed;
}

ReferenceGroups merge_references(ReferenceGroups groups, std::span<const CveRecord> records) {
    for (const CveRecord& record : records) {
        if (record.references.empty()) continue;
        auto& group = groups[record.id];
        for (const ReferenceEntry& ref : record.references) {
            const bool present = std::any_of(group.begin(), group.end(),
                                             [&](const ReferenceEntry& e) { return e.url == ref.url; });
            if (!present) group.push_back(ref);
        }
    }
    return groups;
}

std::vector<LabeledExample> load_labels(const std::filesystem::path& path) {
    std::vector<LabeledExample> out;
    for_each_record(path, [&](const json& node, std::size_t line) {
        Fields f(node, path, line);
        const std::string labeler_text = f.string("labeler");
        auto labeler = parse_labeler(labeler_text);
        if (!labeler) f.fail(Kind::Schema, "unknown labeler '" + labeler_text + "'");
        const std::string ts_text = f.string("ts");
        auto ts = parse_timestamp(ts_text);
        if (!ts) f.fail(Kind::Schema, "invalid timestamp '" + ts_text + "'");

        LabeledExample ex{f.cve("cve"), f.optional_string("description").value_or(""),
                          std::nullopt, std::nullopt, *labeler, *ts};
        const bool sme = *labeler == Labeler::SME;
        if (sme || f.has("utility")) {
            auto u = utility_from_int(f.category("utility"));
            if (!u) f.fail(Kind::InvalidCategory, "utility must be 0, 1 or 2");
            ex.utility = u;
        }
        if (sme || f.has("opportune")) {
            auto o = opportune_from_int(f.category("opportune"));
            if (!o) f.fail(Kind::InvalidCategory, "opportune must be 0 or 1");
            ex.opportune = o;
        }
        if (!ex.utility && !ex.opportune) f.fail(Kind::Schema, "model label carries no category");
        out.push_back(std::move(ex));
    });
    return out;
}

std::vector<LabeledExample> merge_labels(std::span<const LabeledExample> existing,
                                         std::span<const LabeledExample> incoming) {
    std::map<CveId, LabeledExample> merged;
    auto absorb = [&merged](const LabeledExample& ex) {
        auto it = merged.find(ex.cve);
        if (it == merged.end()) {
            merged.emplace(ex.cve, ex);
        } else {
            it->second = merge_pair(it->second, ex);
        }
    };
    for (const auto& ex : existing) absorb(ex);
    for (const auto& ex : incoming) absorb(ex);

    std::vector<LabeledExample> out;
    out.reserve(merged.size());
    for (auto& [id, ex] : merged) out.push_back(std::move(ex));
    return out;
}

std::map<CveId, LabeledExample> index_labels(std::span<const LabeledExample> examples) {
    std::map<CveId, LabeledExample> out;
    for (auto& ex : merge_labels({}, examples)) {
        CveId id = ex.cve;
        out.emplace(std::move(id), std::move(ex));
    }
    return out;
}

void save_labels(const std::filesystem::path& path, std::span<const LabeledExample> examples) {
    std::vector<LabeledExample> existing;
    if (std::filesystem::exists(path)) existing = load_labels(path);
    const auto merged = merge_labels(existing, examples);

    std::string out;
    for (const LabeledExample& ex : merged) {
        ordered_json node;
        node["cve"] = ex.cve.str();
        if (!ex.description.empty()) node["description"] = ex.description;
        node["utility"] = ex.utility ? json(to_int(*ex.utility)) : json(nullptr);
        node["opportune"] = ex.opportune ? json(to_int(*ex.opportune)) : json(nullptr);
        node["labeler"] = to_string(ex.labeler);
        node["ts"] = format_timestamp(ex.labeled_at);
        out += node.dump();
        out += '\n';
    }
    write_atomically(path, out);
}

std::vector<AssetContext> load_asset_context(const std::filesystem::path& path) {
    std::vector<AssetContext> out;
    std::set<std::pair<std::string, CveId>> seen;
    for_each_record(path, [&](const json& node, std::size_t line) {
        Fields f(node, path, line);
        const std::string exposure_text = f.string("exposure");
        const std::string criticality_text = f.string("criticality");
        auto exposure = parse_exposure(exposure_text);
        if (!exposure) f.fail(Kind::InvalidCategory, "unknown exposure '" + exposure_text + "'");
        auto criticality = parse_criticality(criticality_text);
        if (!criticality) f.fail(Kind::InvalidCategory, "unknown criticality '" + criticality_text + "'");
        AssetContext ctx{f.optional_string("asset").value_or(""), f.cve("cve"), *exposure, *criticality};
        if (!seen.emplace(ctx.asset_id, ctx.cve).second) {
            f.fail(Kind::DuplicateId, "duplicate context for asset '" + ctx.asset_id + "' and " + ctx.cve.str());
        }
        out.push_back(std::move(ctx));
    });
    return out;
}

}  // namespace vulnprio::feed
