#include "vulnprio/cli/app.hpp"

#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vulnprio/cvss.hpp"
#include "vulnprio/feed.hpp"

namespace vulnprio::cli {
namespace {

struct FlagSpec {
    const char* key;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"cve_feed", "CVE records (JSON lines)"},
    {"exploit_feed", "exploit references (JSON lines)"},
    {"labels", "utility/opportune label store (JSON lines)"},
    {"assets", "asset context (JSON lines)"},
    {"utility_model", "utility model file"},
    {"opportune_model", "opportune model file"},
    {"output", "write results here instead of stdout"},
    {"format", "text, csv or json-lines"},
    {"seed", "random seed (default 42)"},
    {"min_df", "minimum document frequency for the vocabulary"},
    {"lambda", "SVM regularisation strength"},
    {"epochs", "training epochs"},
    {"train_fraction", "share of labelled examples used for training"},
    {"stratified", "stratify the train/test split by category"},
    {"tiers", "threat-score tier thresholds, descending, comma separated"},
    {"now", "timestamp stamped on new labels"},
};

std::string flag_name(const char* key) {
    std::string name = "--";
    for (const char* c = key; *c; ++c) name += *c == '_' ? '-' : *c;
    return name;
}

triage::Task task_of(const std::string& text) {
    const auto task = triage::parse_task(text);
    if (!task) throw ConfigError("unknown task '" + text + "': expected utility or opportune");
    return *task;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
    CLI::App app{"Threat-score prioritisation of CVE findings", "vulnprio"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
    for (const auto& f : kFlags) {
        options[f.key] = app.add_option(flag_name(f.key), raw[f.key], f.help);
    }

    auto* ingest = app.add_subcommand("ingest", "validate feeds and print a summary");
    std::string task_text;
    bool allow_degenerate = false;
    auto* train = app.add_subcommand("train", "train and evaluate a triage model");
    train->add_option("--task", task_text, "utility or opportune")->required();
    train->add_flag("--allow-degenerate", allow_degenerate, "keep a constant model when only one category occurs");
    auto* predict = app.add_subcommand("predict", "add model labels for CVEs without SME labels");
    predict->add_option("--task", task_text, "utility or opportune")->required();
    auto* score = app.add_subcommand("score", "score every CVE");
    auto* rank = app.add_subcommand("rank", "stack-rank by threat score");
    auto* report = app.add_subcommand("report", "ranked list plus CVSS band comparison");
    auto* label = app.add_subcommand("label", "label CVEs interactively");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitValidation;
    }

    const Streams io{in, out, err};
    try {
        std::map<std::string, std::string> flags;
        for (const auto& [key, option] : options) {
            if (option->count() > 0) flags[key] = raw[key];
        }
        std::optional<std::filesystem::path> config_file;
        if (!config_path.empty()) config_file = config_path;
        const RunConfig config = resolve_config(flags, config_file, env);

        if (ingest->parsed()) cmd_ingest(config, io);
        if (train->parsed()) return cmd_train(config, task_of(task_text), allow_degenerate, io);
        if (predict->parsed()) cmd_predict(config, task_of(task_text), io);
        if (score->parsed()) cmd_score(config, io);
        if (rank->parsed()) cmd_rank(config, io);
        if (report->parsed()) cmd_report(config, io);
        if (label->parsed()) cmd_label(config, io);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const feed::IngestError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cvss::CvssError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const triage::MlError& e) {
        err << "error: " << e.what() << '\n';
        const bool model = e.kind() == triage::MlError::Kind::VersionMismatch ||
                           e.kind() == triage::MlError::Kind::ModelFormat ||
                           e.kind() == triage::MlError::Kind::DimensionMismatch;
        return model ? kExitModel : kExitTraining;
    } catch (const scoring::ScoringError& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == scoring::ScoringError::Kind::InvalidConfig ? kExitValidation : kExitScoring;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace vulnprio::cli
