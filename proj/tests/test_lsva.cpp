#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "parksent/csv.hpp"
#include "parksent/lsva.hpp"
#include "parksent/stopwords.hpp"

using namespace parksent;
using namespace parksent::lsva;

namespace {

const std::string kFixtures = PARKSENT_FIXTURE_DIR;

// Brute-force recount oracle, written independently of compute_lsva: its
// own tokenizer (lowercase, strip punctuation) and naive per-term loops.
struct OracleEntry {
    long total = 0, pos = 0, neg = 0;
};

std::map<std::string, OracleEntry> oracle_counts(
        const std::vector<LabeledSentence>& sentences) {
    std::map<std::string, OracleEntry> out;
    for (const auto& s : sentences) {
        std::set<std::string> terms;
        std::string cur;
        for (char ch : s.text + " ") {
            unsigned char c = static_cast<unsigned char>(ch);
            if (std::isalnum(c) || c == '\'') {
                cur.push_back(static_cast<char>(std::tolower(c)));
            } else if (!cur.empty()) {
                while (!cur.empty() && cur.front() == '\'') cur.erase(0, 1);
                while (!cur.empty() && cur.back() == '\'') cur.pop_back();
                if (!cur.empty()) terms.insert(cur);
                cur.clear();
            }
        }
        for (const auto& t : terms) {
            auto& e = out[t];
            ++e.total;
            if (s.label == AttitudeLabel::Positive) ++e.pos;
            if (s.label == AttitudeLabel::Negative) ++e.neg;
        }
    }
    return out;
}

std::vector<LabeledSentence> load_fixture() {
    auto t = csvio::read_file(kFixtures + std::string("/lsva_sentences.csv"));
    int c_text = t.require_column("text");
    int c_label = t.require_column("label");
    std::vector<LabeledSentence> out;
    for (const auto& row : t.rows)
        out.push_back({row[c_text], require_label(row[c_label])});
    return out;
}

}  // namespace

TEST_CASE("lsva: all-positive term at N = 10", "[lsva]") {
    std::vector<LabeledSentence> sentences;
    for (int i = 0; i < 10; ++i)
        sentences.push_back({"ample room", AttitudeLabel::Positive});
    LsvaOptions opt;
    opt.min_count = 1;
    auto table = compute_lsva(sentences, opt);
    REQUIRE(table.size() == 2);  // "ample" and "room"
    CHECK(table[0].salience == Catch::Approx(1.0));
    CHECK(table[0].valence == Catch::Approx(1.0));
}

TEST_CASE("lsva: balanced positive/negative term has valence 0", "[lsva]") {
    std::vector<LabeledSentence> sentences;
    for (int i = 0; i < 6; ++i)
        sentences.push_back({"meter", i % 2 ? AttitudeLabel::Positive
                                            : AttitudeLabel::Negative});
    LsvaOptions opt;
    opt.min_count = 1;
    auto table = compute_lsva(sentences, opt);
    REQUIRE(table.size() == 1);
    CHECK(table[0].valence == Catch::Approx(0.0));
    CHECK(table[0].n_total == 6);
}

TEST_CASE("lsva: neutral and unrelated count toward N_total only", "[lsva]") {
    std::vector<LabeledSentence> sentences = {
        {"garage", AttitudeLabel::Positive},
        {"garage", AttitudeLabel::Neutral},
        {"garage", AttitudeLabel::Unrelated},
        {"garage", AttitudeLabel::Negative},
    };
    LsvaOptions opt;
    opt.min_count = 1;
    auto table = compute_lsva(sentences, opt);
    REQUIRE(table.size() == 1);
    CHECK(table[0].n_total == 4);
    CHECK(table[0].n_positive == 1);
    CHECK(table[0].n_negative == 1);
    CHECK(table[0].valence == Catch::Approx(0.0));
}

TEST_CASE("lsva: term counted once per sentence despite repeats", "[lsva]") {
    std::vector<LabeledSentence> sentences = {
        {"spot spot spot", AttitudeLabel::Positive},
        {"spot", AttitudeLabel::Positive},
    };
    LsvaOptions opt;
    opt.min_count = 1;
    auto table = compute_lsva(sentences, opt);
    REQUIRE(table.size() == 1);
    CHECK(table[0].n_total == 2);
}

TEST_CASE("lsva: empty subset yields an empty table", "[lsva]") {
    std::vector<LabeledSentence> none;
    CHECK(compute_lsva(none).empty());
}

TEST_CASE("lsva: fixture equals the brute-force recount oracle exactly",
          "[lsva]") {
    auto sentences = load_fixture();
    REQUIRE(sentences.size() == 200);
    LsvaOptions opt;
    opt.min_count = 1;
    opt.use_default_stopwords = false;  // oracle covers every term
    auto table = compute_lsva(sentences, opt);
    auto oracle = oracle_counts(sentences);

    REQUIRE(table.size() == oracle.size());
    for (const auto& e : table) {
        auto it = oracle.find(e.term);
        REQUIRE(it != oracle.end());
        CHECK(e.n_total == it->second.total);
        CHECK(e.n_positive == it->second.pos);
        CHECK(e.n_negative == it->second.neg);
        CHECK(e.salience == std::log10(double(it->second.total)));
        CHECK(e.valence == double(it->second.pos - it->second.neg) /
                               double(it->second.total));
    }
}

TEST_CASE("lsva: stopwords and min_count filters", "[lsva]") {
    auto sentences = load_fixture();
    LsvaOptions opt;
    opt.min_count = 5;
    auto table = compute_lsva(sentences, opt);
    for (const auto& e : table) {
        CHECK(e.n_total >= 5);
        CHECK(default_stopwords().count(e.term) == 0);
        CHECK(e.salience >= std::log10(5.0) - 1e-12);
    }
}

TEST_CASE("lsva: 10^salience round-trips to N_total", "[lsva]") {
    auto sentences = load_fixture();
    LsvaOptions opt;
    opt.min_count = 2;
    for (const auto& e : compute_lsva(sentences, opt)) {
        long back = std::lround(std::pow(10.0, e.salience));
        CHECK(back == e.n_total);
    }
}

TEST_CASE("lsva: duplicating a sentence scales its terms' totals", "[lsva]") {
    auto sentences = load_fixture();
    LsvaOptions opt;
    opt.min_count = 1;
    opt.use_default_stopwords = false;
    auto base = compute_lsva(sentences, opt);

    // duplicate the first sentence twice more (k = 2 -> factor k+1 on its terms)
    auto dup = sentences;
    dup.push_back(sentences[0]);
    dup.push_back(sentences[0]);
    auto boosted = compute_lsva(dup, opt);

    std::map<std::string, LsvaEntry> base_map, boost_map;
    for (auto& e : base) base_map[e.term] = e;
    for (auto& e : boosted) boost_map[e.term] = e;
    std::set<std::string> first_terms;
    {
        std::stringstream ss(sentences[0].text);
        LsvaOptions one;
        one.min_count = 1;
        one.use_default_stopwords = false;
        for (auto& e : compute_lsva(std::vector<LabeledSentence>{sentences[0]},
                                    one))
            first_terms.insert(e.term);
    }
    for (const auto& term : first_terms)
        CHECK(boost_map.at(term).n_total == base_map.at(term).n_total + 2);
}

TEST_CASE("lsva: relabeling positive as negative negates valences", "[lsva]") {
    auto sentences = load_fixture();
    auto flipped = sentences;
    for (auto& s : flipped) {
        if (s.label == AttitudeLabel::Positive) s.label = AttitudeLabel::Negative;
        else if (s.label == AttitudeLabel::Negative)
            s.label = AttitudeLabel::Positive;
    }
    LsvaOptions opt;
    opt.min_count = 1;
    opt.use_default_stopwords = false;
    auto base = compute_lsva(sentences, opt);
    auto neg = compute_lsva(flipped, opt);
    REQUIRE(base.size() == neg.size());
    std::map<std::string, double> neg_val;
    for (auto& e : neg) neg_val[e.term] = e.valence;
    for (auto& e : base)
        CHECK(neg_val.at(e.term) == Catch::Approx(-e.valence).margin(1e-15));
}

TEST_CASE("lsva: default stopword list has 127 distinct entries", "[lsva]") {
    CHECK(kDefaultStopwords.size() == 127);
    CHECK(default_stopwords().size() == 127);
}
