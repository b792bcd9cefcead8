#pragma once

// Pipeline configuration: an INI-style key-value file with one section
// per stage. Unknown sections or keys are startup errors; every default
// is documented in the README's config reference. Relative paths resolve
// against the config file's directory.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parksent::pipeline {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    // [inputs]
    std::string reviews_path;
    std::string pois_path;
    std::string regions_path;
    std::string covariates_path;

    // [classify]
    std::string classifier_kind = "lexicon";
    std::string lexicon_path;
    std::string sidecar_path;
    std::string model_path;   // trained model file for learned kinds
    std::string grid_path;
    int cv_folds = 10;
    int min_df = 2;

    // [aggregate]
    long min_reviews = 10;        // region inclusion threshold
    long poi_min_count = 10;      // per-POI threshold
    std::string region_agg = "pooled";  // pooled | poi-mean
    bool exclude_neutral = false;
    long rank_k = 10;
    long rank_min_cbgs = 50;

    // [spatial]
    std::string weights_spec = "knn:8";  // knn:<k> | adjacency:<file>
    int permutations = 999;
    double alpha = 0.05;
    std::string spatial_level = "cbg";   // cbg | cbsa

    // [regress]
    double vif_threshold = 5.0;
    int knots = 8;
    long corr_min_cbgs = 10;   // within-CBSA correlation inclusion
    int sweep_max = 50;

    // [lsva]
    long lsva_min_count = 30;
    std::string stopwords_path;
    std::vector<std::string> lsva_subsets = {"all", "urban", "rural"};

    // [run]
    std::uint64_t seed = 42;
    std::string out_dir = "out";
};

namespace detail {

inline std::string trim_ws(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"inputs", {"reviews", "pois", "regions", "covariates"}},
        {"classify", {"kind", "lexicon", "sidecar", "model", "grid", "k",
                      "min_df"}},
        {"aggregate", {"min_reviews", "poi_min_count", "region_agg",
                       "exclude_neutral", "rank_k", "rank_min_cbgs"}},
        {"spatial", {"weights", "permutations", "alpha", "level"}},
        {"regress", {"vif_threshold", "knots", "min_cbgs", "sweep_max"}},
        {"lsva", {"min_count", "stopwords", "subsets"}},
        {"run", {"seed", "out"}},
    };
    return keys;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key " + key + " expects a boolean, got: " + v);
}

}  // namespace detail

inline PipelineConfig parse_config(std::istream& in,
                                   const std::filesystem::path& base_dir) {
    PipelineConfig cfg;
    std::string line, section;
    std::size_t line_no = 0;

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_absolute()) return p;
        return (base_dir / path).string();
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim_ws(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = t.substr(1, t.size() - 2);
            if (!detail::allowed_keys().count(section))
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = detail::trim_ws(t.substr(0, eq));
        std::string value = detail::trim_ws(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config: key " + key + " outside any section");
        const auto& allowed = detail::allowed_keys().at(section);
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + key +
                              "' in section [" + section + "]");

        try {
            if (section == "inputs") {
                if (key == "reviews") cfg.reviews_path = resolve(value);
                else if (key == "pois") cfg.pois_path = resolve(value);
                else if (key == "regions") cfg.regions_path = resolve(value);
                else cfg.covariates_path = resolve(value);
            } else if (section == "classify") {
                if (key == "kind") cfg.classifier_kind = value;
                else if (key == "lexicon") cfg.lexicon_path = resolve(value);
                else if (key == "sidecar") cfg.sidecar_path = resolve(value);
                else if (key == "model") cfg.model_path = resolve(value);
                else if (key == "grid") cfg.grid_path = resolve(value);
                else if (key == "k") cfg.cv_folds = std::stoi(value);
                else cfg.min_df = std::stoi(value);
            } else if (section == "aggregate") {
                if (key == "min_reviews") cfg.min_reviews = std::stol(value);
                else if (key == "poi_min_count") cfg.poi_min_count = std::stol(value);
                else if (key == "region_agg") cfg.region_agg = value;
                else if (key == "exclude_neutral")
                    cfg.exclude_neutral = detail::parse_bool(value, key);
                else if (key == "rank_k") cfg.rank_k = std::stol(value);
                else cfg.rank_min_cbgs = std::stol(value);
            } else if (section == "spatial") {
                if (key == "weights") cfg.weights_spec = value;
                else if (key == "permutations") cfg.permutations = std::stoi(value);
                else if (key == "alpha") cfg.alpha = std::stod(value);
                else cfg.spatial_level = value;
            } else if (section == "regress") {
                if (key == "vif_threshold") cfg.vif_threshold = std::stod(value);
                else if (key == "knots") cfg.knots = std::stoi(value);
                else if (key == "min_cbgs") cfg.corr_min_cbgs = std::stol(value);
                else cfg.sweep_max = std::stoi(value);
            } else if (section == "lsva") {
                if (key == "min_count") cfg.lsva_min_count = std::stol(value);
                else if (key == "stopwords") cfg.stopwords_path = resolve(value);
                else {
                    cfg.lsva_subsets.clear();
                    std::stringstream ss(value);
                    std::string item;
                    while (std::getline(ss, item, ','))
                        cfg.lsva_subsets.push_back(detail::trim_ws(item));
                }
            } else {  // run
                if (key == "seed") cfg.seed = std::stoull(value);
                else cfg.out_dir = resolve(value);
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": bad value for " + key + ": " + value);
        }
    }

    if (cfg.region_agg != "pooled" && cfg.region_agg != "poi-mean")
        throw ConfigError("config: region_agg must be pooled or poi-mean");
    if (cfg.spatial_level != "cbg" && cfg.spatial_level != "cbsa")
        throw ConfigError("config: spatial level must be cbg or cbsa");
    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, std::filesystem::path(path).parent_path());
}

// canonical string of every analysis-relevant field; feeds stage hashing
inline std::string config_fingerprint(const PipelineConfig& c) {
    std::ostringstream ss;
    ss << c.classifier_kind << '|' << c.cv_folds << '|' << c.min_df << '|'
       << c.min_reviews << '|' << c.poi_min_count << '|' << c.region_agg << '|'
       << c.exclude_neutral << '|' << c.rank_k << '|' << c.rank_min_cbgs << '|'
       << c.weights_spec << '|' << c.permutations << '|' << c.alpha << '|'
       << c.spatial_level << '|' << c.vif_threshold << '|' << c.knots << '|'
       << c.corr_min_cbgs << '|' << c.sweep_max << '|' << c.lsva_min_count
       << '|' << c.seed;
    for (const auto& s : c.lsva_subsets) ss << '|' << s;
    return ss.str();
}

}  // namespace parksent::pipeline
