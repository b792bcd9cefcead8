#pragma once

// Model wrapper tying TF-IDF features to a concrete classifier kind, plus
// JSON (de)serialization and the precomputed-label adapter ("external"):
// transformer-scale models run elsewhere and hand their labels over as a
// JSON-Lines sidecar {sentence_uid, label}.

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "parksent/attitude.hpp"
#include "parksent/csv.hpp"
#include "parksent/forest.hpp"
#include "parksent/lexicon.hpp"
#include "parksent/linear.hpp"
#include "parksent/metrics.hpp"
#include "parksent/tfidf.hpp"

namespace parksent::classify {

enum class ClassifierKind { Logistic, Sgd, Forest, Lexicon, External };

inline std::string_view to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Logistic: return "logistic";
        case ClassifierKind::Sgd: return "sgd";
        case ClassifierKind::Forest: return "forest";
        case ClassifierKind::Lexicon: return "lexicon";
        case ClassifierKind::External: return "external";
    }
    return "?";
}

inline ClassifierKind parse_kind(std::string_view s) {
    if (s == "logistic") return ClassifierKind::Logistic;
    if (s == "sgd") return ClassifierKind::Sgd;
    if (s == "forest") return ClassifierKind::Forest;
    if (s == "lexicon") return ClassifierKind::Lexicon;
    if (s == "external") return ClassifierKind::External;
    throw std::runtime_error("unknown classifier kind: " + std::string(s));
}

// string-valued hyperparameters as read from grid files
using HyperParams = std::map<std::string, std::string>;

namespace detail {

inline double hp_double(const HyperParams& hp, const std::string& key,
                        double dflt) {
    auto it = hp.find(key);
    if (it == hp.end()) return dflt;
    auto v = csvio::to_double(it->second);
    if (!v) throw std::runtime_error("hyperparameter " + key +
                                     ": not a number: " + it->second);
    return *v;
}

inline int hp_int(const HyperParams& hp, const std::string& key, int dflt) {
    return static_cast<int>(hp_double(hp, key, dflt));
}

inline std::string hp_str(const HyperParams& hp, const std::string& key,
                          const std::string& dflt) {
    auto it = hp.find(key);
    return it == hp.end() ? dflt : it->second;
}

inline std::vector<std::string> label_names() {
    return {"positive", "neutral", "negative", "unrelated"};
}

}  // namespace detail

struct ExternalModel {
    std::map<std::string, AttitudeLabel> by_uid;
};

inline ExternalModel load_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label sidecar: " + path);
    ExternalModel m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        m.by_uid[j.at("sentence_uid").get<std::string>()] =
            require_label(j.at("label").get<std::string>());
    }
    return m;
}

struct TrainedClassifier {
    ClassifierKind kind = ClassifierKind::Lexicon;
    TfidfModel tfidf;  // unused by Lexicon/External
    std::variant<std::monostate, LinearModel, ForestModel, LexiconModel,
                 ExternalModel>
        model;
    HyperParams hyperparameters;

    AttitudeLabel predict_one(const std::string& text,
                              const std::string& uid = {}) const {
        switch (kind) {
            case ClassifierKind::Logistic:
            case ClassifierKind::Sgd: {
                const auto& lm = std::get<LinearModel>(model);
                return static_cast<AttitudeLabel>(lm.predict(tfidf.transform(text)));
            }
            case ClassifierKind::Forest: {
                const auto& fm = std::get<ForestModel>(model);
                return static_cast<AttitudeLabel>(fm.predict(tfidf.transform(text)));
            }
            case ClassifierKind::Lexicon:
                return std::get<LexiconModel>(model).classify(text);
            case ClassifierKind::External: {
                const auto& em = std::get<ExternalModel>(model);
                auto it = em.by_uid.find(uid);
                if (it == em.by_uid.end())
                    throw std::runtime_error("sidecar missing sentence id: " + uid);
                return it->second;
            }
        }
        throw std::logic_error("unreachable");
    }
};

// Order-preserving batch prediction. External kind reports every missing
// uid at once.
inline std::vector<AttitudeLabel> predict(
        const TrainedClassifier& model, const std::vector<std::string>& texts,
        const std::vector<std::string>& uids = {}) {
    std::vector<AttitudeLabel> out;
    out.reserve(texts.size());
    if (model.kind == ClassifierKind::External) {
        const auto& em = std::get<ExternalModel>(model.model);
        std::vector<std::string> missing;
        for (const auto& uid : uids)
            if (!em.by_uid.count(uid)) missing.push_back(uid);
        if (uids.size() != texts.size())
            throw std::runtime_error("external prediction requires one uid per sentence");
        if (!missing.empty()) {
            std::string msg = "sidecar missing sentence ids:";
            for (const auto& m : missing) msg += " " + m;
            throw std::runtime_error(msg);
        }
        for (const auto& uid : uids) out.push_back(em.by_uid.at(uid));
        return out;
    }
    for (std::size_t i = 0; i < texts.size(); ++i)
        out.push_back(model.predict_one(texts[i]));
    return out;
}

// Trains on already-transformed features (Lexicon/External train nothing).
inline TrainedClassifier train_classifier(
        ClassifierKind kind, const std::vector<SparseVec>& features,
        const std::vector<int>& labels, std::size_t dim,
        const HyperParams& hp, std::uint64_t seed) {
    TrainedClassifier out;
    out.kind = kind;
    out.hyperparameters = hp;
    switch (kind) {
        case ClassifierKind::Logistic: {
            double C = detail::hp_double(hp, "C", 1.0);
            int max_iter = detail::hp_int(hp, "max_iter", 100);
            // "solver" accepted for grid compatibility; one deterministic
            // full-batch optimizer backs all of them
            out.model = train_logistic(features, labels, kNumLabels, dim, C,
                                       max_iter, detail::label_names());
            break;
        }
        case ClassifierKind::Sgd: {
            double alpha = detail::hp_double(hp, "alpha", 1e-4);
            int max_iter = detail::hp_int(hp, "max_iter", 1000);
            auto penalty = parse_sgd_penalty(detail::hp_str(hp, "penalty", "l2"));
            out.model = train_sgd(features, labels, kNumLabels, dim, alpha,
                                  max_iter, penalty, seed,
                                  detail::label_names());
            break;
        }
        case ClassifierKind::Forest: {
            ForestParams p;
            p.n_estimators = detail::hp_int(hp, "n_estimators", 100);
            p.max_depth = detail::hp_int(hp, "max_depth", 0);
            p.min_samples_leaf = detail::hp_int(hp, "min_samples_leaf", 1);
            out.model = train_forest(features, labels, kNumLabels, dim, p,
                                     seed, detail::label_names());
            break;
        }
        case ClassifierKind::Lexicon:
        case ClassifierKind::External:
            throw std::runtime_error(
                "train_classifier: kind is rule-based/precomputed, nothing to train");
    }
    return out;
}

// Convenience: fit TF-IDF on the texts, then train.
inline TrainedClassifier train_on_texts(ClassifierKind kind,
                                        const std::vector<std::string>& texts,
                                        const std::vector<AttitudeLabel>& labels,
                                        const HyperParams& hp,
                                        std::uint64_t seed, int min_df = 2) {
    TrainedClassifier out;
    if (kind == ClassifierKind::Lexicon || kind == ClassifierKind::External)
        throw std::runtime_error("train_on_texts: kind needs no training");
    auto tfidf = build_tfidf(texts, min_df);
    std::vector<SparseVec> X = tfidf.transform_all(texts);
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        y[i] = static_cast<int>(labels[i]);
    out = train_classifier(kind, X, y, tfidf.dim(), hp, seed);
    out.tfidf = std::move(tfidf);
    return out;
}

struct LabeledExample {
    std::string text;
    AttitudeLabel label = AttitudeLabel::Neutral;
    bool is_train = true;
};

inline std::vector<LabeledExample> load_labeled_csv(const std::string& path) {
    auto t = csvio::read_file(path);
    int c_text = t.require_column("text");
    int c_label = t.require_column("label");
    int c_split = t.column("split");
    std::vector<LabeledExample> out;
    for (const auto& row : t.rows) {
        LabeledExample e;
        e.text = row[c_text];
        if (e.text.empty()) throw std::runtime_error("labeled csv: empty text");
        e.label = require_label(row[c_label]);
        if (c_split >= 0) e.is_train = row[c_split] != "test";
        out.push_back(std::move(e));
    }
    return out;
}

// --- JSON serialization -----------------------------------------------

inline nlohmann::json to_json(const TrainedClassifier& m) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(m.kind));
    j["hyperparameters"] = m.hyperparameters;
    if (m.kind == ClassifierKind::Logistic || m.kind == ClassifierKind::Sgd ||
        m.kind == ClassifierKind::Forest) {
        nlohmann::json tf;
        tf["min_df"] = m.tfidf.min_df;
        tf["ngram_lo"] = m.tfidf.ngram_lo;
        tf["ngram_hi"] = m.tfidf.ngram_hi;
        tf["vocabulary"] = m.tfidf.vocabulary;
        tf["idf"] = m.tfidf.idf;
        j["tfidf"] = std::move(tf);
    }
    switch (m.kind) {
        case ClassifierKind::Logistic:
        case ClassifierKind::Sgd: {
            const auto& lm = std::get<LinearModel>(m.model);
            j["weights"] = lm.weights;
            j["bias"] = lm.bias;
            break;
        }
        case ClassifierKind::Forest: {
            const auto& fm = std::get<ForestModel>(m.model);
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : fm.trees) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& n : t.nodes)
                    nodes.push_back({n.feature, n.threshold, n.left, n.right,
                                     n.label});
                trees.push_back(std::move(nodes));
            }
            j["trees"] = std::move(trees);
            break;
        }
        case ClassifierKind::Lexicon: {
            const auto& lx = std::get<LexiconModel>(m.model);
            j["valence"] = std::map<std::string, double>(lx.valence.begin(),
                                                         lx.valence.end());
            break;
        }
        case ClassifierKind::External: {
            const auto& em = std::get<ExternalModel>(m.model);
            nlohmann::json labels = nlohmann::json::object();
            for (const auto& [uid, l] : em.by_uid)
                labels[uid] = std::string(to_string(l));
            j["labels"] = std::move(labels);
            break;
        }
    }
    return j;
}

inline TrainedClassifier from_json(const nlohmann::json& j) {
    TrainedClassifier m;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("hyperparameters"))
        m.hyperparameters = j["hyperparameters"].get<HyperParams>();
    if (j.contains("tfidf")) {
        const auto& tf = j["tfidf"];
        m.tfidf.min_df = tf.at("min_df").get<int>();
        m.tfidf.ngram_lo = tf.at("ngram_lo").get<int>();
        m.tfidf.ngram_hi = tf.at("ngram_hi").get<int>();
        m.tfidf.vocabulary =
            tf.at("vocabulary").get<std::map<std::string, int>>();
        m.tfidf.idf = tf.at("idf").get<std::vector<double>>();
    }
    switch (m.kind) {
        case ClassifierKind::Logistic:
        case ClassifierKind::Sgd: {
            LinearModel lm;
            lm.weights = j.at("weights").get<std::vector<std::vector<double>>>();
            lm.bias = j.at("bias").get<std::vector<double>>();
            lm.n_classes = static_cast<int>(lm.weights.size());
            lm.dim = lm.weights.empty() ? 0 : lm.weights[0].size();
            m.model = std::move(lm);
            break;
        }
        case ClassifierKind::Forest: {
            ForestModel fm;
            fm.n_classes = kNumLabels;
            for (const auto& tj : j.at("trees")) {
                DecisionTree t;
                t.n_classes = kNumLabels;
                for (const auto& nj : tj) {
                    TreeNode n;
                    n.feature = nj[0].get<int>();
                    n.threshold = nj[1].get<double>();
                    n.left = nj[2].get<int>();
                    n.right = nj[3].get<int>();
                    n.label = nj[4].get<int>();
                    t.nodes.push_back(n);
                }
                fm.trees.push_back(std::move(t));
            }
            m.model = std::move(fm);
            break;
        }
        case ClassifierKind::Lexicon: {
            LexiconModel lx;
            for (auto& [k, v] : j.at("valence").items())
                lx.valence[k] = v.get<double>();
            m.model = std::move(lx);
            break;
        }
        case ClassifierKind::External: {
            ExternalModel em;
            for (auto& [uid, l] : j.at("labels").items())
                em.by_uid[uid] = require_label(l.get<std::string>());
            m.model = std::move(em);
            break;
        }
    }
    return m;
}

inline void save_model(const TrainedClassifier& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << to_json(m).dump(1) << "\n";
}

inline TrainedClassifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace parksent::classify
