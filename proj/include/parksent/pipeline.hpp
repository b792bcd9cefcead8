#pragma once

// Orchestration of the six analysis stages:
//   filter -> classify -> aggregate -> spatial -> regress -> lsva
//
// Every stage reads files, writes files, and records (input_hash,
// output_hash) in the manifest. A stage whose input hash matches the
// cached one is skipped wholesale, so reruns that only change downstream
// parameters stay cheap. Outputs are a pure function of (inputs, config,
// seed): map iteration is ordered and every number is printed with 9
// significant digits.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parksent/classifier.hpp"
#include "parksent/config.hpp"
#include "parksent/corpus.hpp"
#include "parksent/correlate.hpp"
#include "parksent/csv.hpp"
#include "parksent/gam.hpp"
#include "parksent/lsva.hpp"
#include "parksent/manifest.hpp"
#include "parksent/model_select.hpp"
#include "parksent/sentiment.hpp"
#include "parksent/spatial.hpp"
#include "parksent/textfilter.hpp"

namespace parksent::pipeline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------
// threshold sensitivity sweep (library level, file-free)
// ---------------------------------------------------------------------

struct SweepRegion {
    std::string region_id;
    long n_scores = 0;          // scored parking sentences in the region
    double mean_sentiment = 0.0;
    std::vector<double> factors;
};

struct SweepTable {
    std::vector<int> thresholds;
    std::vector<std::string> factor_names;
    std::vector<long> region_counts;  // per threshold
    // r[factor][threshold]; nullopt when < 3 regions or degenerate input
    std::vector<std::vector<std::optional<double>>> r;
};

inline SweepTable sensitivity_sweep(std::span<const SweepRegion> regions,
                                    const std::vector<std::string>& factor_names,
                                    int t_lo = 0, int t_hi = 50) {
    SweepTable out;
    out.factor_names = factor_names;
    out.r.assign(factor_names.size(), {});
    for (int t = t_lo; t <= t_hi; ++t) {
        out.thresholds.push_back(t);
        const long floor = std::max<long>(t, 1);
        std::vector<const SweepRegion*> incl;
        for (const auto& r : regions)
            if (r.n_scores >= floor) incl.push_back(&r);
        out.region_counts.push_back(static_cast<long>(incl.size()));
        for (std::size_t f = 0; f < factor_names.size(); ++f) {
            std::optional<double> rv;
            if (incl.size() >= 3) {
                std::vector<double> x, y;
                for (auto* r : incl) {
                    x.push_back(r->factors[f]);
                    y.push_back(r->mean_sentiment);
                }
                try {
                    rv = stats::pearson(x, y).r;
                } catch (const std::invalid_argument&) {
                }
            }
            out.r[f].push_back(rv);
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// stage runner
// ---------------------------------------------------------------------

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage " + stage + ": " + what), stage_name(stage) {}
    std::string stage_name;
};

class Runner {
  public:
    Runner(PipelineConfig cfg, std::string out_dir)
        : cfg_(std::move(cfg)), out_(std::move(out_dir)) {
        fs::create_directories(out_);
        fs::create_directories(fs::path(out_) / "cache");
    }

    const PipelineConfig& config() const { return cfg_; }
    std::string out_path(const std::string& name) const {
        return (fs::path(out_) / name).string();
    }

    Manifest run_all() {
        Manifest m;
        m.stages.push_back(run_stage("filter"));
        m.stages.push_back(run_stage("classify"));
        m.stages.push_back(run_stage("aggregate"));
        m.stages.push_back(run_stage("spatial"));
        m.stages.push_back(run_stage("regress"));
        m.stages.push_back(run_stage("lsva"));
        write_json_file(m.to_json(), out_path("manifest.json"));
        write_json_file(m.timings_json(), out_path("timings.json"));
        return m;
    }

    StageRecord run_stage(const std::string& name) {
        const auto t0 = std::chrono::steady_clock::now();
        StageRecord rec;
        rec.stage = name;
        try {
            std::vector<std::string> input_parts = stage_inputs(name);
            input_parts.push_back(stage_fingerprint(name));
            rec.input_hash = hash_strings(input_parts);
            rec.outputs = stage_outputs(name);

            if (cache_valid(name, rec.input_hash, rec.outputs)) {
                rec.from_cache = true;
            } else {
                execute(name);
                write_cache(name, rec.input_hash, rec.outputs);
            }
            std::vector<std::string> out_hashes;
            for (const auto& f : rec.outputs)
                out_hashes.push_back(hash_file(out_path(f)));
            rec.output_hash = hash_strings(out_hashes);
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        return rec;
    }

    // ------------------------------------------------------------------
    // individual stages (public so CLI subcommands can run them directly)
    // ------------------------------------------------------------------

    void execute(const std::string& name) {
        if (name == "filter") stage_filter();
        else if (name == "classify") stage_classify();
        else if (name == "aggregate") stage_aggregate();
        else if (name == "spatial") stage_spatial();
        else if (name == "regress") stage_regress();
        else if (name == "lsva") stage_lsva();
        else throw std::invalid_argument("unknown stage: " + name);
    }

    void stage_filter() {
        const auto& c = corpus();
        std::ofstream out(out_path("mentions.jsonl"), std::ios::binary);
        for (const auto& m : text::extract_parking_sentences(c.reviews)) {
            nlohmann::json j;
            j["uid"] = text::sentence_uid(m.sentence.review_id, m.sentence.index);
            j["review_id"] = m.sentence.review_id;
            j["index"] = m.sentence.index;
            j["trigger"] = m.trigger;
            j["trigger_pos"] = std::string(text::to_string(m.trigger_pos));
            j["text"] = m.sentence.text;
            out << j.dump() << "\n";
        }
    }

    void stage_classify() {
        auto mentions = load_mentions();
        classify::TrainedClassifier model = resolve_model();
        std::vector<std::string> texts, uids;
        for (const auto& [uid, text] : mentions) {
            uids.push_back(uid);
            texts.push_back(text);
        }
        auto labels = classify::predict(model, texts, uids);
        std::ofstream out(out_path("labels.jsonl"), std::ios::binary);
        for (std::size_t i = 0; i < uids.size(); ++i) {
            nlohmann::json j;
            j["sentence_uid"] = uids[i];
            j["label"] = std::string(to_string(labels[i]));
            out << j.dump() << "\n";
        }
    }

    void stage_aggregate() {
        auto records = sentence_records();
        sentiment::AggregationOptions poi_opt;
        poi_opt.min_count = cfg_.poi_min_count;
        poi_opt.exclude_neutral = cfg_.exclude_neutral;
        auto pois = sentiment::aggregate_poi(records, poi_opt);

        {
            csvio::Writer w(out_path("poi_sentiment.csv"));
            w.row({"poi_id", "category", "n_parking_sentences",
                   "weighted_sentiment"});
            for (const auto& p : pois.included)
                w.row({p.poi_id, std::string(corpus::to_string(p.category)),
                       std::to_string(p.n_parking_sentences),
                       csvio::fmt_sig(p.weighted_sentiment)});
        }

        sentiment::AggregationOptions reg_opt;
        reg_opt.min_count = cfg_.min_reviews;
        reg_opt.exclude_neutral = cfg_.exclude_neutral;
        auto mode = cfg_.region_agg == "poi-mean"
                        ? sentiment::AggregationMode::PoiMeans
                        : sentiment::AggregationMode::PooledSentences;
        auto cbg = sentiment::aggregate_region(records, sentiment::RegionLevel::Cbg,
                                               reg_opt, mode);
        auto cbsa = sentiment::aggregate_region(
            records, sentiment::RegionLevel::Cbsa, reg_opt, mode);

        for (const auto* agg : {&cbg, &cbsa}) {
            const bool is_cbg = agg == &cbg;
            csvio::Writer w(out_path(is_cbg ? "cbg_sentiment.csv"
                                            : "cbsa_sentiment.csv"));
            w.row({"region_id", "level", "n_reviews", "mean_sentiment"});
            for (const auto& r : agg->included)
                w.row({r.region_id, std::string(to_string(r.level)),
                       std::to_string(r.n_reviews),
                       csvio::fmt_sig(r.mean_sentiment)});
        }

        // CBSA ranking, filtered by member-CBG count
        std::map<std::string, std::set<std::string>> cbgs_of;
        for (const auto& a : corpus().assignments)
            cbgs_of[a.cbsa_id].insert(a.cbg_id);
        std::map<std::string, long> cbg_counts;
        for (const auto& [id, s] : cbgs_of)
            cbg_counts[id] = static_cast<long>(s.size());
        auto ranking = sentiment::rank_regions(cbsa.included, cfg_.rank_k,
                                               cfg_.rank_min_cbgs, cbg_counts);
        {
            csvio::Writer w(out_path("cbsa_ranking.csv"));
            w.row({"list", "rank", "region_id", "mean_sentiment", "n_reviews"});
            for (std::size_t i = 0; i < ranking.top.size(); ++i)
                w.row({"top", std::to_string(i + 1), ranking.top[i].region_id,
                       csvio::fmt_sig(ranking.top[i].mean_sentiment),
                       std::to_string(ranking.top[i].n_reviews)});
            for (std::size_t i = 0; i < ranking.bottom.size(); ++i)
                w.row({"bottom", std::to_string(i + 1),
                       ranking.bottom[i].region_id,
                       csvio::fmt_sig(ranking.bottom[i].mean_sentiment),
                       std::to_string(ranking.bottom[i].n_reviews)});
        }

        write_wilcoxon_matrix(pois.included);

        nlohmann::json summary;
        summary["pois_included"] = pois.included.size();
        summary["pois_excluded_below_min"] = pois.excluded_pois;
        summary["cbgs_included"] = cbg.included.size();
        summary["cbgs_excluded_below_min"] = cbg.excluded_regions;
        summary["cbsas_included"] = cbsa.included.size();
        summary["cbsas_excluded_below_min"] = cbsa.excluded_regions;
        summary["ranking_filtered_below_min_cbgs"] = ranking.filtered_out;
        write_json_file(summary, out_path("aggregate_summary.json"));
    }

    void stage_spatial() {
        const bool cbg_level = cfg_.spatial_level == "cbg";
        auto level = cbg_level ? sentiment::RegionLevel::Cbg
                               : sentiment::RegionLevel::Cbsa;
        auto records = sentence_records();
        sentiment::AggregationOptions opt;
        opt.min_count = cfg_.min_reviews;
        opt.exclude_neutral = cfg_.exclude_neutral;
        auto mode = cfg_.region_agg == "poi-mean"
                        ? sentiment::AggregationMode::PoiMeans
                        : sentiment::AggregationMode::PooledSentences;
        auto agg = sentiment::aggregate_region(records, level, opt, mode);
        if (agg.included.size() < 3)
            throw std::runtime_error("fewer than 3 regions after thresholding");

        std::vector<double> values;
        std::vector<std::string> ids;
        for (const auto& r : agg.included) {
            ids.push_back(r.region_id);
            values.push_back(r.mean_sentiment);
        }

        spatial::SpatialWeights weights;
        if (cfg_.weights_spec.rfind("knn:", 0) == 0) {
            int k = std::stoi(cfg_.weights_spec.substr(4));
            auto cents = centroids(cbg_level);
            std::vector<spatial::Centroid> cs;
            for (const auto& id : ids) {
                auto it = cents.find(id);
                if (it == cents.end())
                    throw std::runtime_error("no centroid for region " + id);
                cs.push_back({id, it->second.first, it->second.second});
            }
            weights = spatial::build_knn_weights(cs, k);
        } else if (cfg_.weights_spec.rfind("adjacency:", 0) == 0) {
            weights = spatial::build_adjacency_weights_from_file(
                ids, cfg_.weights_spec.substr(10));
        } else {
            throw std::runtime_error("bad weights spec: " + cfg_.weights_spec);
        }

        auto moran = spatial::morans_i(values, weights, cfg_.permutations,
                                       cfg_.seed);
        auto local = spatial::lisa(values, weights, cfg_.permutations,
                                   cfg_.alpha, cfg_.seed);

        nlohmann::json mj;
        mj["level"] = cfg_.spatial_level;
        mj["i"] = moran.i;
        mj["expected_i"] = moran.expected_i;
        mj["p_value"] = moran.p_value;
        mj["n_permutations"] = moran.n_permutations;
        mj["n_regions"] = moran.n;
        mj["n_islands"] = weights.islands.size();
        write_json_file(mj, out_path("moran.json"));

        csvio::Writer w(out_path("lisa.csv"));
        w.row({"region_id", "value", "local_i", "cluster", "p_value"});
        for (std::size_t i = 0; i < local.size(); ++i)
            w.row({local[i].region_id, csvio::fmt_sig(values[i]),
                   csvio::fmt_sig(local[i].local_i),
                   std::string(to_string(local[i].cluster)),
                   csvio::fmt_sig(local[i].p_value)});
    }

    void stage_regress() {
        auto records = sentence_records();
        const auto& cov = corpus().covariates;
        if (cov.variables.empty())
            throw std::runtime_error("no covariates loaded");

        // CBG-level observations for correlation analyses
        sentiment::AggregationOptions opt;
        opt.min_count = cfg_.min_reviews;
        opt.exclude_neutral = cfg_.exclude_neutral;
        auto cbg = sentiment::aggregate_region(
            records, sentiment::RegionLevel::Cbg, opt);
        std::map<std::string, std::size_t> cov_row;
        for (std::size_t i = 0; i < cov.cbg_ids.size(); ++i)
            cov_row[cov.cbg_ids[i]] = i;

        std::vector<regress::CbgObservation> obs;
        for (const auto& r : cbg.included) {
            auto it = cov_row.find(r.region_id);
            if (it == cov_row.end()) continue;
            regress::CbgObservation o;
            o.cbg_id = r.region_id;
            o.cbsa_id = corpus().cbg_to_cbsa.count(r.region_id)
                            ? corpus().cbg_to_cbsa.at(r.region_id)
                            : "";
            o.sentiment = r.mean_sentiment;
            o.factors = cov.values[it->second];
            obs.push_back(std::move(o));
        }

        auto within = regress::within_cbsa_correlations(obs, cov.variables,
                                                        cfg_.corr_min_cbgs);
        {
            csvio::Writer w(out_path("correlations_within.csv"));
            w.row({"factor", "mean_r", "median_r", "pooled_r", "pooled_p",
                   "fraction_significant", "n_cbsas"});
            for (const auto& f : within.factors)
                w.row({f.factor, csvio::fmt_sig(f.mean_r),
                       csvio::fmt_sig(f.median_r), csvio::fmt_sig(f.pooled_r),
                       csvio::fmt_sig(f.pooled_p),
                       csvio::fmt_sig(f.fraction_significant),
                       std::to_string(f.n_cbsas)});
        }

        // CBSA-level observations: sentiment + mean covariates of members
        {
            std::map<std::string, std::vector<const regress::CbgObservation*>>
                by_cbsa;
            for (const auto& o : obs) by_cbsa[o.cbsa_id].push_back(&o);
            auto cbsa_agg = sentiment::aggregate_region(
                records, sentiment::RegionLevel::Cbsa, opt);
            std::map<std::string, double> cbsa_sent;
            for (const auto& r : cbsa_agg.included)
                cbsa_sent[r.region_id] = r.mean_sentiment;
            std::vector<regress::CbsaObservation> cobs;
            for (const auto& [id, members] : by_cbsa) {
                if (!cbsa_sent.count(id) || members.empty()) continue;
                regress::CbsaObservation o;
                o.cbsa_id = id;
                o.sentiment = cbsa_sent[id];
                o.factors.assign(cov.variables.size(), 0.0);
                for (auto* m : members)
                    for (std::size_t f = 0; f < o.factors.size(); ++f)
                        o.factors[f] += m->factors[f];
                for (auto& v : o.factors) v /= double(members.size());
                cobs.push_back(std::move(o));
            }
            auto between = regress::between_cbsa_correlations(cobs,
                                                              cov.variables);
            csvio::Writer w(out_path("correlations_between.csv"));
            w.row({"factor", "r", "p", "n_cbsas"});
            for (const auto& e : between)
                w.row({e.factor, csvio::fmt_sig(e.r), csvio::fmt_sig(e.p),
                       std::to_string(e.n)});
        }

        // cohort comparison: CBGs with vs without parking reviews
        {
            std::set<std::string> with_ids;
            for (const auto& r : records)
                if (!r.cbg_id.empty() &&
                    sentiment::score_label(r.label).has_value())
                    with_ids.insert(r.cbg_id);
            std::vector<std::vector<double>> with_rows, without_rows;
            for (std::size_t i = 0; i < cov.cbg_ids.size(); ++i) {
                if (with_ids.count(cov.cbg_ids[i]))
                    with_rows.push_back(cov.values[i]);
                else
                    without_rows.push_back(cov.values[i]);
            }
            csvio::Writer w(out_path("cohort.csv"));
            w.row({"variable", "relative_difference", "absolute_flag",
                   "p_value", "mean_with", "mean_without"});
            if (!with_rows.empty() && !without_rows.empty()) {
                for (const auto& d : regress::cohort_difference(
                         with_rows, without_rows, cov.variables))
                    w.row({d.variable, csvio::fmt_sig(d.relative_difference),
                           d.absolute ? "1" : "0", csvio::fmt_sig(d.p_value),
                           csvio::fmt_sig(d.mean_with),
                           csvio::fmt_sig(d.mean_without)});
            }
        }

        write_table1(records, cov, cov_row);
        write_sweep(records, cov, cov_row);
    }

    // standalone entry point for the sweep subcommand
    void stage_sweep() {
        auto records = sentence_records();
        const auto& cov = corpus().covariates;
        std::map<std::string, std::size_t> cov_row;
        for (std::size_t i = 0; i < cov.cbg_ids.size(); ++i)
            cov_row[cov.cbg_ids[i]] = i;
        write_sweep(records, cov, cov_row);
    }

    // standalone entry point for the compare subcommand
    void stage_compare() {
        auto records = sentence_records();
        sentiment::AggregationOptions poi_opt;
        poi_opt.min_count = cfg_.poi_min_count;
        poi_opt.exclude_neutral = cfg_.exclude_neutral;
        auto pois = sentiment::aggregate_poi(records, poi_opt);
        write_wilcoxon_matrix(pois.included);
    }

    void stage_lsva() {
        auto records = sentence_records();
        auto mentions = load_mentions();
        auto labels = load_labels();

        // rebuild labeled sentences with their urban flag
        struct Item {
            lsva::LabeledSentence sentence;
            bool is_urban;
            corpus::PoiCategory category;
            bool has_region;
        };
        std::vector<Item> items;
        for (const auto& [uid, text] : mentions) {
            auto lit = labels.find(uid);
            if (lit == labels.end()) continue;
            Item item;
            item.sentence = {text, lit->second};
            const std::string review_id = uid.substr(0, uid.rfind('#'));
            item.is_urban = false;
            item.has_region = false;
            item.category = corpus::PoiCategory::Other;
            auto rit = review_poi_.find(review_id);
            if (rit != review_poi_.end()) {
                const auto* poi = corpus().find_poi(rit->second);
                if (poi) item.category = poi->category;
                const auto* a = corpus().find_assignment(rit->second);
                if (a) {
                    item.is_urban = a->is_urban;
                    item.has_region = true;
                }
            }
            items.push_back(std::move(item));
        }

        lsva::LsvaOptions opt;
        opt.min_count = cfg_.lsva_min_count;
        if (!cfg_.stopwords_path.empty())
            opt.stopwords = lsva::load_stopword_file(cfg_.stopwords_path);

        for (const auto& subset : cfg_.lsva_subsets) {
            std::vector<lsva::LabeledSentence> sel;
            for (const auto& item : items) {
                bool keep = false;
                if (subset == "all") keep = true;
                else if (subset == "urban") keep = item.has_region && item.is_urban;
                else if (subset == "rural") keep = item.has_region && !item.is_urban;
                else if (subset.rfind("category:", 0) == 0) {
                    auto cat = corpus::parse_category(subset.substr(9));
                    if (!cat)
                        throw std::runtime_error("lsva: unknown category subset " +
                                                 subset);
                    keep = item.category == *cat;
                } else {
                    throw std::runtime_error("lsva: unknown subset " + subset);
                }
                if (keep) sel.push_back(item.sentence);
            }
            auto table = lsva::compute_lsva(sel, opt);
            std::string fname = "lsva_" + subset + ".csv";
            for (auto& c : fname)
                if (c == ':') c = '_';
            csvio::Writer w(out_path(fname));
            w.row({"term", "n_total", "n_positive", "n_negative", "salience",
                   "valence"});
            for (const auto& e : table)
                w.row({e.term, std::to_string(e.n_total),
                       std::to_string(e.n_positive),
                       std::to_string(e.n_negative), csvio::fmt_sig(e.salience),
                       csvio::fmt_sig(e.valence)});
        }
    }

    // joined classified sentences (shared by aggregate/spatial/regress)
    std::vector<sentiment::SentenceRecord> sentence_records() {
        auto mentions = load_mentions();
        auto labels = load_labels();
        std::vector<sentiment::SentenceRecord> out;
        for (const auto& [uid, text] : mentions) {
            auto lit = labels.find(uid);
            if (lit == labels.end())
                throw std::runtime_error("labels.jsonl missing uid " + uid);
            const std::string review_id = uid.substr(0, uid.rfind('#'));
            auto rit = review_poi_.find(review_id);
            if (rit == review_poi_.end()) continue;
            sentiment::SentenceRecord rec;
            rec.poi_id = rit->second;
            rec.label = lit->second;
            if (const auto* poi = corpus().find_poi(rec.poi_id))
                rec.category = poi->category;
            if (const auto* a = corpus().find_assignment(rec.poi_id)) {
                rec.cbg_id = a->cbg_id;
                rec.cbsa_id = a->cbsa_id;
                rec.is_urban = a->is_urban;
            }
            out.push_back(std::move(rec));
        }
        return out;
    }

    const corpus::Corpus& corpus() {
        if (!corpus_) {
            corpus_ = corpus::load(cfg_.reviews_path, cfg_.pois_path,
                                   cfg_.regions_path, cfg_.covariates_path);
            for (const auto& r : corpus_->reviews)
                review_poi_[r.review_id] = r.poi_id;
        }
        return *corpus_;
    }

  private:
    // Only the config fields a stage actually consumes enter its input
    // hash, so changing a downstream parameter leaves upstream stages
    // cached. The seed feeds the spatial stage alone (the only in-pipeline
    // randomness consumer).
    std::string stage_fingerprint(const std::string& name) const {
        std::ostringstream ss;
        if (name == "classify") {
            ss << cfg_.classifier_kind << '|' << cfg_.min_df;
        } else if (name == "aggregate") {
            ss << cfg_.min_reviews << '|' << cfg_.poi_min_count << '|'
               << cfg_.region_agg << '|' << cfg_.exclude_neutral << '|'
               << cfg_.rank_k << '|' << cfg_.rank_min_cbgs;
        } else if (name == "spatial") {
            ss << cfg_.min_reviews << '|' << cfg_.region_agg << '|'
               << cfg_.exclude_neutral << '|' << cfg_.weights_spec << '|'
               << cfg_.permutations << '|' << cfg_.alpha << '|'
               << cfg_.spatial_level << '|' << cfg_.seed;
        } else if (name == "regress") {
            ss << cfg_.min_reviews << '|' << cfg_.region_agg << '|'
               << cfg_.exclude_neutral << '|' << cfg_.vif_threshold << '|'
               << cfg_.knots << '|' << cfg_.corr_min_cbgs << '|'
               << cfg_.sweep_max;
        } else if (name == "lsva") {
            ss << cfg_.lsva_min_count;
            for (const auto& s : cfg_.lsva_subsets) ss << '|' << s;
        }
        return name + ":" + ss.str();
    }

    std::vector<std::string> stage_inputs(const std::string& name) {
        std::vector<std::string> parts;
        auto add_file = [&](const std::string& p) {
            if (!p.empty()) parts.push_back(hash_file(p));
        };
        if (name == "filter") {
            add_file(cfg_.reviews_path);
            add_file(cfg_.pois_path);
        } else if (name == "classify") {
            parts.push_back(hash_file(out_path("mentions.jsonl")));
            add_file(cfg_.lexicon_path);
            add_file(cfg_.sidecar_path);
            add_file(cfg_.model_path);
        } else {
            parts.push_back(hash_file(out_path("mentions.jsonl")));
            parts.push_back(hash_file(out_path("labels.jsonl")));
            add_file(cfg_.pois_path);
            add_file(cfg_.regions_path);
            add_file(cfg_.covariates_path);
            if (name == "lsva") add_file(cfg_.stopwords_path);
        }
        return parts;
    }

    std::vector<std::string> stage_outputs(const std::string& name) const {
        if (name == "filter") return {"mentions.jsonl"};
        if (name == "classify") return {"labels.jsonl"};
        if (name == "aggregate")
            return {"poi_sentiment.csv", "cbg_sentiment.csv",
                    "cbsa_sentiment.csv", "cbsa_ranking.csv",
                    "wilcoxon_matrix.csv", "aggregate_summary.json"};
        if (name == "spatial") return {"moran.json", "lisa.csv"};
        if (name == "regress")
            return {"correlations_within.csv", "correlations_between.csv",
                    "cohort.csv", "table1.csv", "sweep.csv"};
        if (name == "lsva") {
            std::vector<std::string> out;
            for (auto subset : cfg_.lsva_subsets) {
                for (auto& c : subset)
                    if (c == ':') c = '_';
                out.push_back("lsva_" + subset + ".csv");
            }
            return out;
        }
        throw std::invalid_argument("unknown stage: " + name);
    }

    bool cache_valid(const std::string& name, const std::string& input_hash,
                     const std::vector<std::string>& outputs) const {
        std::ifstream in(out_path("cache/" + name + ".json"));
        if (!in) return false;
        nlohmann::json j;
        try {
            in >> j;
        } catch (...) {
            return false;
        }
        if (j.value("input_hash", "") != input_hash) return false;
        for (const auto& f : outputs)
            if (!fs::exists(out_path(f))) return false;
        return true;
    }

    void write_cache(const std::string& name, const std::string& input_hash,
                     const std::vector<std::string>& outputs) const {
        nlohmann::json j;
        j["input_hash"] = input_hash;
        j["outputs"] = outputs;
        write_json_file(j, out_path("cache/" + name + ".json"));
    }

    classify::TrainedClassifier resolve_model() {
        auto kind = classify::parse_kind(cfg_.classifier_kind);
        classify::TrainedClassifier model;
        model.kind = kind;
        switch (kind) {
            case classify::ClassifierKind::Lexicon:
                if (cfg_.lexicon_path.empty())
                    throw std::runtime_error("lexicon kind needs classify.lexicon");
                model.model = classify::load_lexicon(cfg_.lexicon_path);
                return model;
            case classify::ClassifierKind::External:
                if (cfg_.sidecar_path.empty())
                    throw std::runtime_error(
                        "external kind needs classify.sidecar");
                model.model = classify::load_sidecar(cfg_.sidecar_path);
                return model;
            default:
                if (cfg_.model_path.empty())
                    throw std::runtime_error(
                        "learned kinds need classify.model (train first)");
                return classify::load_model(cfg_.model_path);
        }
    }

    // ordered uid -> text
    std::vector<std::pair<std::string, std::string>> load_mentions() {
        std::ifstream in(out_path("mentions.jsonl"));
        if (!in)
            throw std::runtime_error("mentions.jsonl not found; run filter");
        std::vector<std::pair<std::string, std::string>> out;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            out.emplace_back(j.at("uid").get<std::string>(),
                             j.at("text").get<std::string>());
        }
        return out;
    }

    std::map<std::string, AttitudeLabel> load_labels() {
        std::ifstream in(out_path("labels.jsonl"));
        if (!in)
            throw std::runtime_error("labels.jsonl not found; run classify");
        std::map<std::string, AttitudeLabel> out;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto j = nlohmann::json::parse(line);
            out[j.at("sentence_uid").get<std::string>()] =
                require_label(j.at("label").get<std::string>());
        }
        return out;
    }

    // region centroids derived from member POI coordinates
    std::map<std::string, std::pair<double, double>> centroids(bool cbg_level) {
        std::map<std::string, std::pair<double, double>> sums;
        std::map<std::string, long> counts;
        for (const auto& a : corpus().assignments) {
            const auto* poi = corpus().find_poi(a.poi_id);
            if (!poi) continue;
            const std::string& key = cbg_level ? a.cbg_id : a.cbsa_id;
            sums[key].first += poi->lat;
            sums[key].second += poi->lng;
            ++counts[key];
        }
        std::map<std::string, std::pair<double, double>> out;
        for (auto& [id, s] : sums)
            out[id] = {s.first / double(counts[id]),
                       s.second / double(counts[id])};
        return out;
    }

    void write_wilcoxon_matrix(const std::vector<sentiment::PoiSentiment>& pois) {
        auto cells = sentiment::pairwise_wilcoxon(pois);
        std::set<std::string> cats;
        for (const auto& c : cells) {
            cats.insert(std::string(corpus::to_string(c.a)));
            cats.insert(std::string(corpus::to_string(c.b)));
        }
        std::map<std::pair<std::string, std::string>, double> p;
        for (const auto& c : cells) {
            std::string a(corpus::to_string(c.a)), b(corpus::to_string(c.b));
            p[{a, b}] = c.result.p;
            p[{b, a}] = c.result.p;
        }
        csvio::Writer w(out_path("wilcoxon_matrix.csv"));
        std::vector<std::string> header = {"category"};
        for (const auto& c : cats) header.push_back(c);
        w.row(header);
        for (const auto& a : cats) {
            std::vector<std::string> row = {a};
            for (const auto& b : cats) {
                if (a == b) row.push_back("1");
                else row.push_back(csvio::fmt_sig(p.at({a, b})));
            }
            w.row(row);
        }
    }

    struct ModelCell {
        std::map<std::string, std::string> values;  // row label -> cell text
        bool fitted = false;
    };

    void write_table1(const std::vector<sentiment::SentenceRecord>& records,
                      const corpus::CovariateTable& cov,
                      const std::map<std::string, std::size_t>& cov_row) {
        auto cents = centroids(true);
        const std::vector<std::string> model_names = {
            "All", "Restaurant", "RetailTrade", "Recreation",
            "Hotel", "PersonalService", "Apartment"};

        std::map<std::string, ModelCell> cells;
        for (const auto& model : model_names)
            cells[model] = fit_one_model(model, records, cov, cov_row, cents);

        std::vector<std::string> row_labels = {"(Intercept)"};
        for (const auto& v : cov.variables) row_labels.push_back(v);
        for (int c = 0; c < corpus::kNumCategories; ++c) {
            std::string label =
                "category:" +
                std::string(corpus::to_string(static_cast<corpus::PoiCategory>(c)));
            for (const auto& [model, cell] : cells)
                if (cell.values.count(label)) {
                    row_labels.push_back(label);
                    break;
                }
        }
        row_labels.push_back("ti(Lat,Lng) edf");
        row_labels.push_back("s(CBSA) edf");
        row_labels.push_back("R2 (Adjusted)");
        row_labels.push_back("Sample size");

        csvio::Writer w(out_path("table1.csv"));
        std::vector<std::string> header = {"variable"};
        for (const auto& m : model_names) header.push_back(m);
        w.row(header);
        for (const auto& label : row_labels) {
            std::vector<std::string> row = {label};
            for (const auto& m : model_names) {
                const auto& cell = cells[m];
                auto it = cell.values.find(label);
                row.push_back(it == cell.values.end() ? "" : it->second);
            }
            w.row(row);
        }
    }

    ModelCell fit_one_model(
            const std::string& model_name,
            const std::vector<sentiment::SentenceRecord>& records,
            const corpus::CovariateTable& cov,
            const std::map<std::string, std::size_t>& cov_row,
            const std::map<std::string, std::pair<double, double>>& cents) {
        ModelCell cell;
        const bool all = model_name == "All";

        // response cells: (cbg) or (cbg, category) sentence-score means
        struct Acc {
            double sum = 0.0;
            long n = 0;
        };
        std::map<std::pair<std::string, int>, Acc> acc;
        for (const auto& r : records) {
            if (r.cbg_id.empty()) continue;
            auto score = sentiment::score_label(r.label);
            if (!score) continue;
            if (cfg_.exclude_neutral && r.label == AttitudeLabel::Neutral)
                continue;
            if (!all &&
                std::string(corpus::to_string(r.category)) != model_name)
                continue;
            int cat = all ? static_cast<int>(r.category) : -1;
            auto& a = acc[{r.cbg_id, cat}];
            a.sum += *score;
            ++a.n;
        }

        std::vector<regress::RegressionRow> rows;
        for (const auto& [key, a] : acc) {
            if (a.n < cfg_.min_reviews) continue;
            auto cit = cov_row.find(key.first);
            auto git = cents.find(key.first);
            if (cit == cov_row.end() || git == cents.end()) continue;
            if (!corpus().cbg_to_cbsa.count(key.first)) continue;
            regress::RegressionRow row;
            row.cbg_id = key.first;
            row.cbsa_id = corpus().cbg_to_cbsa.at(key.first);
            row.lat = git->second.first;
            row.lng = git->second.second;
            row.y = a.sum / double(a.n);
            row.covariates = cov.values[cit->second];
            if (all) row.category = key.second;
            rows.push_back(std::move(row));
        }
        if (rows.size() < std::max<std::size_t>(cov.variables.size() + 2, 8))
            return cell;  // too few observations: blank column

        // drop covariates constant over these rows, then VIF, then stepwise
        std::vector<int> usable;
        for (std::size_t j = 0; j < cov.variables.size(); ++j) {
            double first = rows[0].covariates[j];
            bool constant = true;
            for (const auto& r : rows)
                if (r.covariates[j] != first) {
                    constant = false;
                    break;
                }
            if (!constant) usable.push_back(static_cast<int>(j));
        }
        if (usable.empty()) return cell;

        Eigen::MatrixXd x(rows.size(), usable.size());
        Eigen::VectorXd y(rows.size());
        std::vector<std::string> names;
        for (std::size_t j = 0; j < usable.size(); ++j)
            names.push_back(cov.variables[usable[j]]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            y(i) = rows[i].y;
            for (std::size_t j = 0; j < usable.size(); ++j)
                x(i, j) = rows[i].covariates[usable[j]];
        }

        auto vif = regress::vif_filter(x, names, cfg_.vif_threshold);
        Eigen::MatrixXd xv(rows.size(), vif.kept_cols.size());
        std::vector<std::string> vnames;
        for (std::size_t j = 0; j < vif.kept_cols.size(); ++j) {
            xv.col(j) = x.col(vif.kept_cols[j]);
            vnames.push_back(names[vif.kept_cols[j]]);
        }
        auto step = regress::stepwise_aic(xv, y, vnames);
        std::vector<std::string> selected;
        for (int j : step.selected) selected.push_back(vnames[j]);
        if (selected.empty()) selected.push_back(vnames[0]);

        // restrict each row's covariates to the selected variables
        std::vector<int> sel_idx;
        for (const auto& s : selected)
            sel_idx.push_back(cov.variable_index(s));
        for (auto& r : rows) {
            std::vector<double> v;
            for (int j : sel_idx) v.push_back(r.covariates[j]);
            r.covariates = std::move(v);
        }

        regress::DesignOptions dopt;
        dopt.knots = cfg_.knots;
        try {
            auto design = regress::build_design(rows, selected, dopt);
            auto fit = regress::fit_gam(design);
            for (const auto& t : fit.linear) {
                std::string text = csvio::fmt_sig(t.coefficient);
                auto stars = regress::significance_stars(t.p_value);
                if (!stars.empty()) text += " " + stars;
                std::string label = t.label;
                if (label.rfind("category:", 0) == 0) {
                    int cat = std::stoi(label.substr(9));
                    label = "category:" + std::string(corpus::to_string(
                                              static_cast<corpus::PoiCategory>(cat)));
                }
                cell.values[label] = text;
            }
            for (std::size_t b = 0; b < fit.block_names.size(); ++b)
                cell.values[fit.block_names[b] + " edf"] =
                    csvio::fmt_sig(fit.block_edf[b]);
            cell.values["R2 (Adjusted)"] = csvio::fmt_sig(fit.adjusted_r2);
            cell.values["Sample size"] = std::to_string(rows.size());
            cell.fitted = true;
        } catch (const std::exception&) {
            // insufficient data for the smooth terms: leave the column blank
        }
        return cell;
    }

    void write_sweep(const std::vector<sentiment::SentenceRecord>& records,
                     const corpus::CovariateTable& cov,
                     const std::map<std::string, std::size_t>& cov_row) {
        // per-CBG score tallies over all thresholds at once
        struct Tally {
            double sum = 0.0;
            long n = 0;
        };
        std::map<std::string, Tally> tally;
        for (const auto& r : records) {
            if (r.cbg_id.empty()) continue;
            auto score = sentiment::score_label(r.label);
            if (!score) continue;
            auto& t = tally[r.cbg_id];
            t.sum += *score;
            ++t.n;
        }
        std::vector<SweepRegion> regions;
        for (const auto& [cbg, t] : tally) {
            auto it = cov_row.find(cbg);
            if (it == cov_row.end()) continue;
            SweepRegion r;
            r.region_id = cbg;
            r.n_scores = t.n;
            r.mean_sentiment = t.sum / double(t.n);
            r.factors = cov.values[it->second];
            regions.push_back(std::move(r));
        }
        auto table = sensitivity_sweep(regions, cov.variables, 0,
                                       cfg_.sweep_max);

        csvio::Writer w(out_path("sweep.csv"));
        std::vector<std::string> header = {"factor"};
        for (int t : table.thresholds) header.push_back("t" + std::to_string(t));
        w.row(header);
        {
            std::vector<std::string> row = {"__region_count"};
            for (long c : table.region_counts) row.push_back(std::to_string(c));
            w.row(row);
        }
        for (std::size_t f = 0; f < table.factor_names.size(); ++f) {
            std::vector<std::string> row = {table.factor_names[f]};
            for (const auto& r : table.r[f])
                row.push_back(r ? csvio::fmt_sig(*r) : "");
            w.row(row);
        }
    }

    PipelineConfig cfg_;
    std::string out_;
    std::optional<corpus::Corpus> corpus_;
    std::map<std::string, std::string> review_poi_;
};

}  // namespace parksent::pipeline
