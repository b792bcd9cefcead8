#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parksent/corpus.hpp"

using namespace parksent;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = PARKSENT_FIXTURE_DIR;

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("parksent_corpus_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++) + ".tmp");
        std::ofstream(path) << contents;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("reviews: well-formed lines round-trip", "[corpus]") {
    TempFile f(R"({"review_id":"r1","poi_id":"p1","text":"Good.","rating":4}
{"review_id":"r2","poi_id":"p1","text":"Bad."}
{"review_id":"r3","poi_id":"p2","text":"Meh.","timestamp":"2021-01-02T00:00:00Z"}
)");
    auto reviews = corpus::load_reviews(f.str());
    REQUIRE(reviews.size() == 3);
    CHECK(reviews[0].rating == 4);
    CHECK_FALSE(reviews[1].rating.has_value());
    CHECK(reviews[2].timestamp == "2021-01-02T00:00:00Z");
}

TEST_CASE("reviews: empty text names the line", "[corpus]") {
    TempFile f(R"({"review_id":"r1","poi_id":"p1","text":"ok"}
{"review_id":"r2","poi_id":"p1","text":"   "}
)");
    try {
        corpus::load_reviews(f.str());
        FAIL("expected LoadError");
    } catch (const corpus::LoadError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("reviews: duplicate id rejected", "[corpus]") {
    TempFile f(R"({"review_id":"r1","poi_id":"p1","text":"a"}
{"review_id":"r1","poi_id":"p2","text":"b"}
)");
    CHECK_THROWS_AS(corpus::load_reviews(f.str()), corpus::LoadError);
}

TEST_CASE("reviews: bundled mini corpus loads with unique ids", "[corpus]") {
    auto path = kFixtures + std::string("/mini/reviews.jsonl");
    auto reviews = corpus::load_reviews(path);

    // independent line-count oracle over the raw file
    std::ifstream in(path);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;

    CHECK(reviews.size() == lines);
    CHECK(reviews.size() == 500);
}

TEST_CASE("pois: known and unknown categories", "[corpus]") {
    TempFile f("poi_id,name,category,lat,lng,avg_score\n"
               "p1,Joe's,Restaurant,40.0,-75.0,4.2\n"
               "p2,MoMA,Museum,40.1,-75.1,\n");
    auto res = corpus::load_pois(f.str());
    REQUIRE(res.pois.size() == 2);
    CHECK(res.pois[0].category == corpus::PoiCategory::Restaurant);
    CHECK(res.pois[1].category == corpus::PoiCategory::Other);
    CHECK(res.unknown_category_count == 1);
}

TEST_CASE("pois: latitude out of range", "[corpus]") {
    TempFile f("poi_id,name,category,lat,lng,avg_score\n"
               "p1,X,Hotel,91,-75.0,3.0\n");
    CHECK_THROWS_AS(corpus::load_pois(f.str()), corpus::LoadError);
}

TEST_CASE("regions: join and flags", "[corpus]") {
    TempFile pois("poi_id,name,category,lat,lng,avg_score\n"
                  "p1,A,Hotel,40,-75,4\n"
                  "p2,B,Hotel,41,-76,4\n");
    TempFile regions("poi_id,cbg_id,cbsa_id,is_urban\n"
                     "p1,cbgA,cbsaX,true\n");
    TempFile reviews(R"({"review_id":"r1","poi_id":"p1","text":"ok"}
)");
    TempFile cov("cbg_id,v1\ncbgA,1.0\n");
    auto c = corpus::load(reviews.str(), pois.str(), regions.str(), cov.str());
    auto* a = c.find_assignment("p1");
    REQUIRE(a != nullptr);
    CHECK(a->cbg_id == "cbgA");
    CHECK(a->cbsa_id == "cbsaX");
    CHECK(c.report.pois_without_assignment == 1);
    REQUIRE(c.report.unassigned_poi_ids.size() == 1);
    CHECK(c.report.unassigned_poi_ids[0] == "p2");
}

TEST_CASE("regions: conflicting cbg->cbsa rows rejected", "[corpus]") {
    TempFile f("poi_id,cbg_id,cbsa_id,is_urban\n"
               "p1,cbgA,cbsaX,true\n"
               "p2,cbgA,cbsaY,true\n");
    CHECK_THROWS_AS(corpus::load_region_assignments(f.str()), corpus::LoadError);
}

TEST_CASE("covariates: means match column averages", "[corpus]") {
    TempFile f("cbg_id,a,b,c\ng1,1,10,100\ng2,3,20,300\n");
    auto ct = corpus::load_covariates(f.str());
    REQUIRE(ct.values.size() == 2);
    CHECK(ct.mean[0] == Catch::Approx(2.0));
    CHECK(ct.mean[1] == Catch::Approx(15.0));
    CHECK(ct.mean[2] == Catch::Approx(200.0));
}

TEST_CASE("covariates: blank cell rejects the row with a report", "[corpus]") {
    TempFile f("cbg_id,a,b\ng1,1,2\ng2,3,\ng3,5,6\n");
    auto ct = corpus::load_covariates(f.str());
    CHECK(ct.values.size() == 2);
    REQUIRE(ct.rejected_lines.size() == 1);
    CHECK(ct.rejected_lines[0] == 2);
}

TEST_CASE("covariates: published variable names recognized", "[corpus]") {
    auto ct = corpus::load_covariates(kFixtures +
                                      std::string("/covariates_full_table.csv"));
    CHECK(ct.variables.size() == corpus::table_variable_names().size());
    CHECK(corpus::table_variable_names().size() == 26);
    CHECK(corpus::model_scope_variable_names().size() == 19);
    for (const auto& name : corpus::table_variable_names())
        CHECK(ct.variable_index(name) >= 0);
    for (const auto& name : corpus::model_scope_variable_names())
        CHECK(ct.variable_index(name) >= 0);
}

TEST_CASE("validate: consistent fixture has no orphans", "[corpus]") {
    TempFile pois("poi_id,name,category,lat,lng,avg_score\np1,A,Hotel,40,-75,4\n");
    TempFile regions("poi_id,cbg_id,cbsa_id,is_urban\np1,cbgA,cbsaX,true\n");
    TempFile reviews(R"({"review_id":"r1","poi_id":"p1","text":"ok"}
)");
    TempFile cov("cbg_id,v1\ncbgA,1.0\n");
    auto c = corpus::load(reviews.str(), pois.str(), regions.str(), cov.str());
    CHECK(c.report.orphan_reviews == 0);
    CHECK(c.report.pois_without_reviews == 0);
    CHECK(c.report.pois_without_assignment == 0);
    CHECK(c.report.cbgs_without_covariates == 0);
}

TEST_CASE("validate: orphan review and uncovered cbg are reported", "[corpus]") {
    TempFile pois("poi_id,name,category,lat,lng,avg_score\np1,A,Hotel,40,-75,4\n");
    TempFile regions("poi_id,cbg_id,cbsa_id,is_urban\np1,cbgA,cbsaX,true\n");
    TempFile reviews(R"({"review_id":"r1","poi_id":"p1","text":"ok"}
{"review_id":"r2","poi_id":"ghost","text":"orphan"}
)");
    TempFile cov("cbg_id,v1\ncbgZ,1.0\n");
    auto c = corpus::load(reviews.str(), pois.str(), regions.str(), cov.str());
    CHECK(c.report.orphan_reviews == 1);
    CHECK(c.report.n_reviews == 1);
    CHECK(c.report.cbgs_without_covariates == 1);
}

TEST_CASE("loading is deterministic", "[corpus]") {
    auto path = kFixtures + std::string("/mini/reviews.jsonl");
    auto a = corpus::load_reviews(path);
    auto b = corpus::load_reviews(path);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].review_id == b[i].review_id);
        CHECK(a[i].text == b[i].text);
    }
}
