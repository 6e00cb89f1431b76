#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "vulnprio/feed.hpp"
#include "vulnprio/ranking.hpp"
#include "vulnprio/scoring.hpp"
#include "vulnprio/triage.hpp"
#include "vulnprio/wx.hpp"

namespace vulnprio::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const fs::path& require(const std::optional<fs::path>& path, const std::string& key) {
    if (!path) {
        std::string flag = key;
        for (char& c : flag) c = c == '_' ? '-' : c;
        throw ConfigError(key + " is not configured (use --" + flag + ", " + env_var_name(key) +
                          " or the config file)");
    }
    return *path;
}

std::vector<feed::LabeledExample> load_label_store(const RunConfig& config) {
    if (!config.labels || !fs::exists(*config.labels)) return {};
    return feed::load_labels(*config.labels);
}

feed::Timestamp now_timestamp(const RunConfig& config) {
    if (config.now) return *feed::parse_timestamp(*config.now);
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

bool same_file(const fs::path& a, const fs::path& b) {
    std::error_code ec;
    return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) throw feed::IngestError(feed::IngestError::Kind::Io, path, 0, "cannot open for writing");
        body(file);
        file.flush();
        if (!file) throw feed::IngestError(feed::IngestError::Kind::Io, path, 0, "write failed");
    }
    fs::rename(tmp, path);
}

/// Results go to the configured output path, never over an input file.
void emit(const RunConfig& config, Streams io, const std::function<void(std::ostream&)>& body) {
    if (!config.output) {
        body(io.out);
        return;
    }
    for (const auto* input : {&config.cve_feed, &config.exploit_feed, &config.labels, &config.assets,
                              &config.utility_model, &config.opportune_model}) {
        if (*input && same_file(**input, *config.output)) {
            throw ConfigError("output path " + config.output->string() + " is also an input file");
        }
    }
    write_atomically(*config.output, body);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::string fixed4(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    return buf;
}

struct Portfolio {
    std::vector<feed::CveRecord> records;
    feed::ExploitFeed exploits;
    feed::ReferenceGroups references;
    std::vector<feed::AssetContext> assets;
};

Portfolio load_portfolio(const RunConfig& config) {
    Portfolio p;
    p.records = feed::load_cve_records(require(config.cve_feed, "cve_feed"));
    if (config.exploit_feed) p.exploits = feed::load_exploit_refs(*config.exploit_feed);
    p.references = feed::merge_references(p.exploits.groups, p.records);
    if (config.assets) p.assets = feed::load_asset_context(*config.assets);
    return p;
}

std::vector<scoring::ScoredVulnerability> score_all(const RunConfig& config, Streams io) {
    const Portfolio p = load_portfolio(config);
    const auto labels = load_label_store(config);
    const auto result = scoring::score_portfolio(p.records, wx::count_wx(p.references), feed::index_labels(labels),
                                                 p.assets, config.env_weights);
    print_warnings(result.warnings, io.err);
    return result.scored;
}

ordered_json report_json(triage::Task task, const triage::EvalReport& r, std::size_t train_size) {
    ordered_json doc;
    doc["task"] = triage::to_string(task);
    doc["train_size"] = train_size;
    doc["test_size"] = r.total;
    doc["micro_f"] = r.micro_f;
    doc["macro_f"] = r.macro_f;
    doc["weighted_f"] = r.weighted_f;
    doc["accuracy"] = r.accuracy;
    ordered_json classes = ordered_json::array();
    for (const auto& c : r.per_class) {
        classes.push_back({{"category", c.category},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support},
                           {"predicted", c.predicted}});
    }
    doc["per_class"] = classes;
    doc["confusion"] = r.confusion;
    return doc;
}

enum class Answer { Value, Skip, Quit };

/// Reads lines until one is a legal category, 's' or 'q'. End of input
/// counts as 'q'.
Answer ask(Streams io, const std::string& prompt, int max_value, int& value) {
    for (;;) {
        io.out << prompt << ": " << std::flush;
        std::string line;
        if (!std::getline(io.in, line)) return Answer::Quit;
        const auto first = line.find_first_not_of(" \t\r");
        const auto last = line.find_last_not_of(" \t\r");
        const std::string entry = first == std::string::npos ? "" : line.substr(first, last - first + 1);
        if (entry == "q" || entry == "Q") return Answer::Quit;
        if (entry == "s" || entry == "S") return Answer::Skip;
        if (entry.size() == 1 && entry[0] >= '0' && entry[0] <= '0' + max_value) {
            value = entry[0] - '0';
            return Answer::Value;
        }
        io.out << "invalid entry '" << entry << "': enter 0-" << max_value << ", s to skip or q to quit\n";
    }
}

}  // namespace

void cmd_ingest(const RunConfig& config, Streams io) {
    const Portfolio p = load_portfolio(config);
    if (config.labels && !fs::exists(*config.labels)) {
        throw feed::IngestError(feed::IngestError::Kind::Io, *config.labels, 0, "no such file");
    }
    const auto labels = load_label_store(config);
    const wx::WxTable table = wx::count_wx(p.references);

    std::size_t references = 0;
    for (const auto& [cve, refs] : p.references) references += refs.size();
    io.out << p.records.size() << " CVEs, " << references << " references, " << labels.size() << " labels\n";

    std::map<ReferenceSource, std::uint64_t> per_source;
    std::size_t exploited = 0;
    for (const auto& [cve, count] : table.entries()) {
        if (count.count > 0) ++exploited;
        for (const auto& [source, n] : count.per_source) per_source[source] += n;
    }
    io.out << "exploit references: " << table.total();
    for (const auto& [source, n] : per_source) io.out << ", " << to_string(source) << ' ' << n;
    io.out << " (" << exploited << " CVEs with WX > 0)\n";

    std::size_t sme = 0;
    for (const auto& ex : labels) sme += ex.labeler == Labeler::SME ? 1 : 0;
    io.out << "labels: " << sme << " SME, " << labels.size() - sme << " model\n";
    io.out << p.assets.size() << " asset contexts\n";

    std::vector<std::string> warnings;
    if (p.exploits.duplicate_urls > 0) {
        warnings.push_back(std::to_string(p.exploits.duplicate_urls) + " duplicate exploit URLs ignored");
    }
    if (p.exploits.unknown_sources > 0) {
        warnings.push_back(std::to_string(p.exploits.unknown_sources) +
                           " references from unrecognised sources not counted as exploits");
    }
    for (const auto& r : p.records) {
        if (!r.has_cvss()) warnings.push_back(r.id.str() + " has neither a CVSS vector nor a score");
    }
    print_warnings(warnings, io.err);
}

int cmd_train(const RunConfig& config, triage::Task task, bool allow_degenerate, Streams io) {
    const fs::path& model_path = require(config.model_path(task), std::string(triage::to_string(task)) + "_model");
    std::map<CveId, std::string> descriptions;
    if (config.cve_feed) {
        for (auto& r : feed::load_cve_records(*config.cve_feed)) descriptions.emplace(r.id, std::move(r.description));
    }

    std::vector<triage::LabeledDocument> documents;
    std::vector<int> categories;
    std::size_t without_text = 0;
    for (const auto& ex : load_label_store(config)) {
        if (ex.labeler != Labeler::SME) continue;
        std::string text = ex.description;
        if (text.empty()) {
            if (auto it = descriptions.find(ex.cve); it != descriptions.end()) text = it->second;
        }
        if (text.empty()) {
            ++without_text;
            continue;
        }
        const int label = task == triage::Task::Utility ? to_int(*ex.utility) : to_int(*ex.opportune);
        documents.push_back({std::move(text), label});
        categories.push_back(label);
    }
    if (without_text > 0) {
        io.err << "warning: " << without_text << " labelled CVEs have no description and were left out\n";
    }

    const triage::Partition partition = triage::split_indices(categories, config.split_options());
    auto [train_set, test_set] = triage::apply_partition<triage::LabeledDocument>(documents, partition);

    std::vector<std::string> train_texts;
    train_texts.reserve(train_set.size());
    for (const auto& d : train_set) train_texts.push_back(d.text);
    const triage::Vocabulary vocab = triage::Vocabulary::fit(train_texts, config.min_df);
    const triage::TrainResult result = triage::train(task, train_set, vocab, config.train_config());
    print_warnings(result.warnings, io.err);
    if (result.model.constant_class && !allow_degenerate) {
        io.err << "error: refusing to write a constant model; pass --allow-degenerate to keep it\n";
        return 3;
    }

    const triage::EvalReport report = triage::evaluate(result.model, test_set);
    write_atomically(model_path, [&](std::ostream& out) { triage::save_model(result.model, out); });
    fs::path report_path = model_path;
    report_path += ".eval.json";
    write_atomically(report_path, [&](std::ostream& out) {
        out << report_json(task, report, train_set.size()).dump(2) << '\n';
    });

    io.out << triage::to_string(task) << " model: " << train_set.size() << " train / " << test_set.size()
           << " test, " << vocab.size() << " terms\n";
    io.out << "category  precision  recall  f1      support\n";
    for (const auto& c : report.per_class) {
        char line[96];
        std::snprintf(line, sizeof line, "%-8d  %-9s  %-6s  %-6s  %zu\n", c.category, fixed4(c.precision).c_str(),
                      fixed4(c.recall).c_str(), fixed4(c.f1).c_str(), c.support);
        io.out << line;
    }
    io.out << "micro-F " << fixed4(report.micro_f) << "  macro-F " << fixed4(report.macro_f) << "  weighted-F "
           << fixed4(report.weighted_f) << '\n';
    io.out << "model written to " << model_path.string() << '\n';
    return 0;
}

void cmd_predict(const RunConfig& config, triage::Task task, Streams io) {
    const fs::path& model_path = require(config.model_path(task), std::string(triage::to_string(task)) + "_model");
    const fs::path& labels_path = require(config.labels, "labels");
    std::ifstream model_file(model_path, std::ios::binary);
    if (!model_file) throw feed::IngestError(feed::IngestError::Kind::Io, model_path, 0, "cannot open model file");
    const triage::LinearModel model = triage::load_model(model_file);
    if (model.task != task) {
        throw triage::MlError(triage::MlError::Kind::ModelFormat, model_path.string() + " holds a " +
                                                                      std::string(triage::to_string(model.task)) +
                                                                      " model, not " +
                                                                      std::string(triage::to_string(task)));
    }

    const auto records = feed::load_cve_records(require(config.cve_feed, "cve_feed"));
    const auto existing = load_label_store(config);
    const auto index = feed::index_labels(existing);
    const feed::Timestamp stamp = now_timestamp(config);

    std::vector<feed::LabeledExample> predictions;
    std::size_t kept = 0;
    for (const auto& record : records) {
        if (auto it = index.find(record.id); it != index.end() && it->second.labeler == Labeler::SME) {
            ++kept;
            continue;
        }
        const int category = triage::predict(model, triage::featurize(model.vocabulary, record.description)).category;
        feed::LabeledExample ex{record.id, record.description, std::nullopt, std::nullopt, Labeler::Model, stamp};
        if (task == triage::Task::Utility) {
            ex.utility = utility_from_int(category);
        } else {
            ex.opportune = opportune_from_int(category);
        }
        predictions.push_back(std::move(ex));
    }
    if (!predictions.empty()) feed::save_labels(labels_path, predictions);
    io.out << predictions.size() << " " << triage::to_string(task) << " predictions written, " << kept
           << " CVEs keep their SME labels\n";
}

void cmd_score(const RunConfig& config, Streams io) {
    const auto scored = score_all(config, io);
    emit(config, io, [&](std::ostream& out) { ranking::export_scored(scored, out); });
}

void cmd_rank(const RunConfig& config, Streams io) {
    const auto portfolio = ranking::rank(score_all(config, io));
    emit(config, io, [&](std::ostream& out) { ranking::export_portfolio(portfolio, config.format, out); });
}

void cmd_report(const RunConfig& config, Streams io) {
    const auto scored = score_all(config, io);
    const auto comparison = ranking::compare(scored, config.tiers);
    const auto portfolio = ranking::rank(scored);
    emit(config, io,
         [&](std::ostream& out) { ranking::export_report(portfolio, comparison, config.format, out); });
}

void cmd_label(const RunConfig& config, Streams io) {
    const fs::path& labels_path = require(config.labels, "labels");
    const auto records = feed::load_cve_records(require(config.cve_feed, "cve_feed"));
    const auto index = feed::index_labels(load_label_store(config));

    std::vector<feed::LabeledExample> added;
    std::size_t remaining = 0;
    for (const auto& r : records) {
        auto it = index.find(r.id);
        remaining += it == index.end() || it->second.labeler != Labeler::SME ? 1 : 0;
    }
    io.out << remaining << " CVEs without SME labels\n";

    bool quit = false;
    for (const auto& record : records) {
        if (quit) break;
        if (auto it = index.find(record.id); it != index.end() && it->second.labeler == Labeler::SME) continue;

        io.out << '\n' << record.id.str();
        if (record.vector) {
            io.out << "  CVSS " << cvss::base_score(*record.vector).value.to_string();
        } else if (record.published_score) {
            io.out << "  CVSS " << record.published_score->to_string();
        }
        io.out << '\n' << record.description << '\n';

        int utility = 0;
        int opportune = 0;
        Answer a = ask(io, "utility [0/1/2]", 2, utility);
        if (a == Answer::Value) a = ask(io, "opportune [0/1]", 1, opportune);
        if (a == Answer::Quit) quit = true;
        if (a != Answer::Value) continue;

        added.push_back(feed::LabeledExample{record.id, record.description, utility_from_int(utility),
                                             opportune_from_int(opportune), Labeler::SME, now_timestamp(config)});
    }
    if (!added.empty()) feed::save_labels(labels_path, added);
    io.out << added.size() << " labels saved\n";
}

}  // namespace vulnprio::cli
