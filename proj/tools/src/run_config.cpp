#include "vulnprio/cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "vulnprio/feed.hpp"

namespace vulnprio::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

bool is_path_key(const std::string& key) {
    return key == "cve_feed" || key == "exploit_feed" || key == "labels" || key == "assets" ||
           key == "utility_model" || key == "opportune_model" || key == "output";
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw ConfigError("invalid value '" + value + "' for " + key + ": expected " + expected);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const std::string& expected) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) bad_value(key, text, expected);
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
    if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
    bad_value(key, text, "true or false");
}

Decimal parse_weight(const std::string& key, const json& node) {
    std::string text;
    if (node.is_string()) {
        text = node.get<std::string>();
    } else if (node.is_number()) {
        text = node.dump();
    } else {
        throw ConfigError("env_weights." + key + " must be a number");
    }
    const auto value = Decimal::parse(text);
    if (!value) bad_value("env_weights." + key, text, "a decimal number");
    return *value;
}

scoring::EnvWeights parse_env_weights(const json& node) {
    if (!node.is_object()) throw ConfigError("env_weights must be an object");
    scoring::EnvWeights weights;
    for (const auto& [group, table] : node.items()) {
        if (!table.is_object()) throw ConfigError("env_weights." + group + " must be an object");
        for (const auto& [name, value] : table.items()) {
            const std::string key = group + "." + name;
            if (key == "exposure.public") {
                weights.exposure_public = parse_weight(key, value);
            } else if (key == "exposure.private") {
                weights.exposure_private = parse_weight(key, value);
            } else if (key == "criticality.low") {
                weights.criticality_low = parse_weight(key, value);
            } else if (key == "criticality.medium") {
                weights.criticality_medium = parse_weight(key, value);
            } else if (key == "criticality.high") {
                weights.criticality_high = parse_weight(key, value);
            } else {
                throw ConfigError("unknown environmental weight '" + key + "'");
            }
        }
    }
    try {
        weights.validate();
    } catch (const scoring::ScoringError& e) {
        throw ConfigError(e.what());
    }
    return weights;
}

std::string scalar_text(const std::string& key, const json& node) {
    if (node.is_string()) return node.get<std::string>();
    if (node.is_boolean()) return node.get<bool>() ? "true" : "false";
    if (node.is_number()) return node.dump();
    if (node.is_array() && key == "tiers") {
        std::string out;
        for (const json& item : node) {
            if (!item.is_number() && !item.is_string()) throw ConfigError("tiers must be a list of numbers");
            if (!out.empty()) out += ',';
            out += item.is_string() ? item.get<std::string>() : item.dump();
        }
        return out;
    }
    throw ConfigError("config key '" + key + "' has an unsupported value type");
}

struct FileLayer {
    std::map<std::string, std::string> values;
    std::optional<scoring::EnvWeights> env_weights;
};

FileLayer read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file " + path.string() + " must hold a JSON object");

    FileLayer layer;
    const fs::path base = path.parent_path();
    for (const auto& [key, value] : doc.items()) {
        if (key == "env_weights") {
            layer.env_weights = parse_env_weights(value);
            continue;
        }
        if (std::find_if(std::begin(kConfigKeys), std::end(kConfigKeys),
                         [&](const char* k) { return key == k; }) == std::end(kConfigKeys)) {
            throw ConfigError("unknown config key '" + key + "' in " + path.string());
        }
        if (value.is_null()) continue;
        std::string text = scalar_text(key, value);
        if (is_path_key(key) && fs::path(text).is_relative()) text = (base / text).lexically_normal().string();
        layer.values[key] = std::move(text);
    }
    return layer;
}

void apply(RunConfig& config, const std::string& key, const std::string& value) {
    if (is_path_key(key)) {
        if (value.empty()) throw ConfigError(key + " must not be empty");
        const fs::path p(value);
        if (key == "cve_feed") config.cve_feed = p;
        if (key == "exploit_feed") config.exploit_feed = p;
        if (key == "labels") config.labels = p;
        if (key == "assets") config.assets = p;
        if (key == "utility_model") config.utility_model = p;
        if (key == "opportune_model") config.opportune_model = p;
        if (key == "output") config.output = p;
    } else if (key == "format") {
        const auto format = ranking::parse_format(value);
        if (!format) bad_value(key, value, "text, csv or json-lines");
        config.format = *format;
    } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(key, value, "a non-negative integer");
    } else if (key == "min_df") {
        config.min_df = parse_number<std::size_t>(key, value, "a positive integer");
        if (config.min_df < 1) bad_value(key, value, "a positive integer");
    } else if (key == "lambda") {
        config.lambda = parse_number<double>(key, value, "a positive number");
        if (!(config.lambda > 0.0)) bad_value(key, value, "a positive number");
    } else if (key == "epochs") {
        config.epochs = parse_number<int>(key, value, "a positive integer");
        if (config.epochs < 1) bad_value(key, value, "a positive integer");
    } else if (key == "train_fraction") {
        config.train_fraction = parse_number<double>(key, value, "a number between 0 and 1");
        if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
            bad_value(key, value, "a number between 0 and 1");
        }
    } else if (key == "stratified") {
        config.stratified = parse_bool(key, value);
    } else if (key == "tiers") {
        ranking::TierBounds tiers;
        tiers.thresholds.clear();
        std::size_t start = 0;
        while (start <= value.size()) {
            const std::size_t comma = std::min(value.find(',', start), value.size());
            const auto bound = Decimal::parse(value.substr(start, comma - start));
            if (!bound) bad_value(key, value, "comma-separated decimal thresholds");
            tiers.thresholds.push_back(*bound);
            start = comma + 1;
        }
        try {
            tiers.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("tiers: ") + e.what());
        }
        config.tiers = std::move(tiers);
    } else if (key == "now") {
        if (!feed::parse_timestamp(value)) bad_value(key, value, "a timestamp like 2021-03-01T09:00:00Z");
        config.now = value;
    }
}

}  // namespace

EnvLookup process_environment() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* value = std::getenv(name.c_str())) return std::string(value);
        return std::nullopt;
    };
}

std::string env_var_name(const std::string& key) {
    std::string out = "VULNPRIO_";
    for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

RunConfig resolve_config(const std::map<std::string, std::string>& flags,
                         const std::optional<fs::path>& config_file, const EnvLookup& env) {
    std::optional<fs::path> file = config_file;
    if (!file) {
        if (auto from_env = env(env_var_name("config")); from_env && !from_env->empty()) file = *from_env;
    }
    FileLayer layer;
    if (file) layer = read_config_file(*file);

    RunConfig config;
    if (layer.env_weights) config.env_weights = *layer.env_weights;
    for (const char* key : kConfigKeys) {
        std::optional<std::string> value;
        if (auto it = flags.find(key); it != flags.end()) {
            value = it->second;
        } else if (auto from_env = env(env_var_name(key))) {
            value = *from_env;
        } else if (auto it = layer.values.find(key); it != layer.values.end()) {
            value = it->second;
        }
        if (value) apply(config, key, *value);
    }
    return config;
}

}  // namespace vulnprio::cli
