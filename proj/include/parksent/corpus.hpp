#pragma once

// Input tables: reviews (JSON-Lines), POIs / region assignments /
// covariates (CSV). Loaders validate eagerly and report problems with
// line numbers; the assembled Corpus is immutable afterward and safe to
// share across threads.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "parksent/csv.hpp"

namespace parksent::corpus {

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PoiCategory {
    Restaurant,
    RetailTrade,
    Recreation,
    PersonalService,
    Apartment,
    Hotel,
    Other,
};

inline constexpr int kNumCategories = 7;

inline std::string_view to_string(PoiCategory c) {
    switch (c) {
        case PoiCategory::Restaurant: return "Restaurant";
        case PoiCategory::RetailTrade: return "RetailTrade";
        case PoiCategory::Recreation: return "Recreation";
        case PoiCategory::PersonalService: return "PersonalService";
        case PoiCategory::Apartment: return "Apartment";
        case PoiCategory::Hotel: return "Hotel";
        case PoiCategory::Other: return "Other";
    }
    return "?";
}

// Unknown category strings fall back to Other; the caller counts these.
inline std::optional<PoiCategory> parse_category(std::string_view s) {
    if (s == "Restaurant") return PoiCategory::Restaurant;
    if (s == "RetailTrade" || s == "Retail Trade") return PoiCategory::RetailTrade;
    if (s == "Recreation") return PoiCategory::Recreation;
    if (s == "PersonalService" || s == "Personal Service")
        return PoiCategory::PersonalService;
    if (s == "Apartment") return PoiCategory::Apartment;
    if (s == "Hotel") return PoiCategory::Hotel;
    if (s == "Other") return PoiCategory::Other;
    return std::nullopt;
}

struct Review {
    std::string review_id;
    std::string poi_id;
    std::string text;
    std::optional<int> rating;          // 1..5 when present
    std::optional<std::string> timestamp;
};

struct Poi {
    std::string poi_id;
    std::string name;
    PoiCategory category = PoiCategory::Other;
    double lat = 0.0;
    double lng = 0.0;
    std::optional<double> avg_score;    // [1,5]
};

struct RegionAssignment {
    std::string poi_id;
    std::string cbg_id;
    std::string cbsa_id;
    bool is_urban = false;
};

struct CovariateTable {
    std::vector<std::string> variables;       // header order
    std::vector<std::string> cbg_ids;         // row order
    std::vector<std::vector<double>> values;  // rows x variables
    std::vector<double> mean;                 // per variable
    std::vector<double> stddev;               // per variable (n-1)
    std::vector<std::size_t> rejected_lines;  // 1-based data line numbers

    int variable_index(std::string_view name) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            if (variables[i] == name) return static_cast<int>(i);
        return -1;
    }
};

// The published CBG-level variable table: 26 names, of which 19 are kept
// for modeling (the rest were dropped upstream for multicollinearity or
// weak explanatory power).
inline const std::vector<std::string>& table_variable_names() {
    static const std::vector<std::string> names = {
        "Population Density", "Employment Density", "Poverty",
        "Rural Population", "Urban Population", "Median Income",
        "Highly-Educated", "Democrat", "Zero Car", "One Car", ">=2 Cars",
        "Male", "Age 18-44", "Age 45-64", "Age over 65", "White", "Asian",
        "African American", "Hispanic", "Others", "POI Density",
        "Road Density", "Parking POI Density", "Walkability",
        "Transit Frequency", "Avg. POI Score"};
    return names;
}

inline const std::vector<std::string>& model_scope_variable_names() {
    static const std::vector<std::string> names = {
        "Population Density", "Employment Density", "Poverty",
        "Rural Population", "Highly-Educated", "Zero Car",
        "Male", "Age 18-44", "Age 45-64", "Age over 65", "Asian",
        "African American", "Hispanic", "Others",
        "Road Density", "Parking POI Density", "Walkability",
        "Transit Frequency", "Avg. POI Score"};
    return names;
}

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace detail

inline std::vector<Review> load_reviews(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open reviews file: " + path);
    std::vector<Review> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw LoadError("reviews line " + std::to_string(line_no) +
                            ": parse error: " + e.what());
        }
        Review r;
        try {
            r.review_id = j.at("review_id").get<std::string>();
            r.poi_id = j.at("poi_id").get<std::string>();
            r.text = j.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw LoadError("reviews line " + std::to_string(line_no) +
                            ": missing field: " + e.what());
        }
        if (detail::trim(r.text).empty())
            throw LoadError("reviews line " + std::to_string(line_no) +
                            ": empty text");
        if (j.contains("rating") && !j["rating"].is_null()) {
            int v = j["rating"].get<int>();
            if (v < 1 || v > 5)
                throw LoadError("reviews line " + std::to_string(line_no) +
                                ": rating out of range: " + std::to_string(v));
            r.rating = v;
        }
        if (j.contains("timestamp") && !j["timestamp"].is_null())
            r.timestamp = j["timestamp"].get<std::string>();
        if (!seen.insert(r.review_id).second)
            throw LoadError("reviews line " + std::to_string(line_no) +
                            ": duplicate review_id: " + r.review_id);
        out.push_back(std::move(r));
    }
    return out;
}

struct PoiLoadResult {
    std::vector<Poi> pois;
    std::size_t unknown_category_count = 0;
};

inline PoiLoadResult load_pois(const std::string& path) {
    auto t = csvio::read_file(path);
    int c_id = t.require_column("poi_id");
    int c_name = t.require_column("name");
    int c_cat = t.require_column("category");
    int c_lat = t.require_column("lat");
    int c_lng = t.require_column("lng");
    int c_score = t.column("avg_score");
    PoiLoadResult res;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        Poi p;
        p.poi_id = row[c_id];
        p.name = row[c_name];
        auto cat = parse_category(row[c_cat]);
        if (cat) {
            p.category = *cat;
        } else {
            p.category = PoiCategory::Other;
            ++res.unknown_category_count;
        }
        auto lat = csvio::to_double(row[c_lat]);
        auto lng = csvio::to_double(row[c_lng]);
        if (!lat || !lng)
            throw LoadError("pois row " + std::to_string(i + 1) +
                            ": unparseable coordinate");
        if (*lat < -90.0 || *lat > 90.0)
            throw LoadError("pois row " + std::to_string(i + 1) +
                            ": lat out of range: " + row[c_lat]);
        if (*lng < -180.0 || *lng > 180.0)
            throw LoadError("pois row " + std::to_string(i + 1) +
                            ": lng out of range: " + row[c_lng]);
        p.lat = *lat;
        p.lng = *lng;
        if (c_score >= 0 && !row[c_score].empty()) {
            auto s = csvio::to_double(row[c_score]);
            if (!s || *s < 1.0 || *s > 5.0)
                throw LoadError("pois row " + std::to_string(i + 1) +
                                ": avg_score out of [1,5]");
            p.avg_score = *s;
        }
        if (!seen.insert(p.poi_id).second)
            throw LoadError("pois row " + std::to_string(i + 1) +
                            ": duplicate poi_id: " + p.poi_id);
        res.pois.push_back(std::move(p));
    }
    return res;
}

inline std::vector<RegionAssignment> load_region_assignments(
        const std::string& path) {
    auto t = csvio::read_file(path);
    int c_poi = t.require_column("poi_id");
    int c_cbg = t.require_column("cbg_id");
    int c_cbsa = t.require_column("cbsa_id");
    int c_urban = t.column("is_urban");
    std::vector<RegionAssignment> out;
    std::unordered_set<std::string> seen_poi;
    std::unordered_map<std::string, std::string> cbg_to_cbsa;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        RegionAssignment a;
        a.poi_id = row[c_poi];
        a.cbg_id = row[c_cbg];
        a.cbsa_id = row[c_cbsa];
        if (c_urban >= 0) {
            const std::string& u = row[c_urban];
            a.is_urban = (u == "true" || u == "1" || u == "TRUE" || u == "True");
        }
        if (!seen_poi.insert(a.poi_id).second)
            throw LoadError("regions row " + std::to_string(i + 1) +
                            ": poi assigned twice: " + a.poi_id);
        auto [it, inserted] = cbg_to_cbsa.emplace(a.cbg_id, a.cbsa_id);
        if (!inserted && it->second != a.cbsa_id)
            throw LoadError("regions row " + std::to_string(i + 1) +
                            ": cbg " + a.cbg_id + " mapped to two cbsas (" +
                            it->second + ", " + a.cbsa_id + ")");
        out.push_back(std::move(a));
    }
    return out;
}

inline CovariateTable load_covariates(const std::string& path) {
    auto t = csvio::read_file(path);
    if (t.header.empty() || t.header[0] != "cbg_id")
        throw LoadError("covariates: first column must be cbg_id");
    CovariateTable ct;
    ct.variables.assign(t.header.begin() + 1, t.header.end());
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        std::vector<double> vals;
        vals.reserve(ct.variables.size());
        bool ok = true;
        for (std::size_t c = 1; c < row.size(); ++c) {
            auto v = csvio::to_double(row[c]);
            if (!v) {
                ok = false;
                break;
            }
            vals.push_back(*v);
        }
        if (!ok) {
            ct.rejected_lines.push_back(i + 1);
            continue;
        }
        if (!seen.insert(row[0]).second)
            throw LoadError("covariates row " + std::to_string(i + 1) +
                            ": duplicate cbg_id: " + row[0]);
        ct.cbg_ids.push_back(row[0]);
        ct.values.push_back(std::move(vals));
    }
    const std::size_t p = ct.variables.size();
    const std::size_t n = ct.values.size();
    ct.mean.assign(p, 0.0);
    ct.stddev.assign(p, 0.0);
    if (n > 0) {
        for (const auto& row : ct.values)
            for (std::size_t j = 0; j < p; ++j) ct.mean[j] += row[j];
        for (std::size_t j = 0; j < p; ++j) ct.mean[j] /= double(n);
        if (n > 1) {
            for (const auto& row : ct.values)
                for (std::size_t j = 0; j < p; ++j) {
                    double d = row[j] - ct.mean[j];
                    ct.stddev[j] += d * d;
                }
            for (std::size_t j = 0; j < p; ++j)
                ct.stddev[j] = std::sqrt(ct.stddev[j] / double(n - 1));
        }
    }
    return ct;
}

struct CorpusReport {
    std::size_t n_reviews = 0;
    std::size_t n_pois = 0;
    std::size_t orphan_reviews = 0;       // review -> unknown poi, excluded
    std::size_t pois_without_reviews = 0;
    std::size_t pois_without_assignment = 0;
    std::size_t cbgs_without_covariates = 0;
    std::vector<std::string> unassigned_poi_ids;
};

// Joined, validated corpus. Reviews with unknown poi_id are dropped (the
// source data is scraped and noisy); POIs without a region assignment stay
// for POI-level work but are excluded from region-level analyses.
struct Corpus {
    std::vector<Review> reviews;
    std::vector<Poi> pois;
    std::vector<RegionAssignment> assignments;
    CovariateTable covariates;
    CorpusReport report;

    std::unordered_map<std::string, std::size_t> poi_index;
    std::unordered_map<std::string, std::size_t> assignment_index;  // by poi
    std::map<std::string, std::string> cbg_to_cbsa;

    const Poi* find_poi(const std::string& poi_id) const {
        auto it = poi_index.find(poi_id);
        return it == poi_index.end() ? nullptr : &pois[it->second];
    }
    const RegionAssignment* find_assignment(const std::string& poi_id) const {
        auto it = assignment_index.find(poi_id);
        return it == assignment_index.end() ? nullptr : &assignments[it->second];
    }
};

inline Corpus assemble(std::vector<Review> reviews, std::vector<Poi> pois,
                       std::vector<RegionAssignment> assignments,
                       CovariateTable covariates) {
    Corpus c;
    c.pois = std::move(pois);
    c.assignments = std::move(assignments);
    c.covariates = std::move(covariates);
    for (std::size_t i = 0; i < c.pois.size(); ++i)
        c.poi_index.emplace(c.pois[i].poi_id, i);
    for (std::size_t i = 0; i < c.assignments.size(); ++i) {
        c.assignment_index.emplace(c.assignments[i].poi_id, i);
        c.cbg_to_cbsa[c.assignments[i].cbg_id] = c.assignments[i].cbsa_id;
    }

    c.report.n_pois = c.pois.size();
    std::unordered_set<std::string> reviewed_pois;
    for (auto& r : reviews) {
        if (!c.poi_index.count(r.poi_id)) {
            ++c.report.orphan_reviews;
            continue;
        }
        reviewed_pois.insert(r.poi_id);
        c.reviews.push_back(std::move(r));
    }
    c.report.n_reviews = c.reviews.size();

    std::unordered_set<std::string> covered_cbgs(c.covariates.cbg_ids.begin(),
                                                 c.covariates.cbg_ids.end());
    std::set<std::string> missing_cov;
    for (const auto& p : c.pois) {
        if (!reviewed_pois.count(p.poi_id)) ++c.report.pois_without_reviews;
        auto* a = c.find_assignment(p.poi_id);
        if (!a) {
            ++c.report.pois_without_assignment;
            c.report.unassigned_poi_ids.push_back(p.poi_id);
        } else if (!covered_cbgs.count(a->cbg_id)) {
            missing_cov.insert(a->cbg_id);
        }
    }
    c.report.cbgs_without_covariates = missing_cov.size();
    std::sort(c.report.unassigned_poi_ids.begin(),
              c.report.unassigned_poi_ids.end());
    return c;
}

inline Corpus load(const std::string& reviews_path, const std::string& pois_path,
                   const std::string& regions_path,
                   const std::string& covariates_path) {
    auto reviews = load_reviews(reviews_path);
    auto pois = load_pois(pois_path);
    auto assignments = load_region_assignments(regions_path);
    auto covariates = load_covariates(covariates_path);
    return assemble(std::move(reviews), std::move(pois.pois),
                    std::move(assignments), std::move(covariates));
}

}  // namespace parksent::corpus
