#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "parksent/pipeline.hpp"
#include "parksent/rng.hpp"

using namespace parksent;
using namespace parksent::pipeline;

namespace {

const std::string kFixtures = PARKSENT_FIXTURE_DIR;
namespace fs = std::filesystem;

std::string fresh_out_dir(const std::string& stem) {
    auto p = fs::temp_directory_path() /
             ("parksent_" + stem + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("sweep: region count non-increasing and boundary threshold",
          "[cli]") {
    auto eng = rng::derive(77, 0);
    std::vector<SweepRegion> regions;
    for (int i = 0; i < 40; ++i) {
        SweepRegion r;
        r.region_id = "g" + std::to_string(i);
        r.n_scores = 1 + static_cast<long>(rng::uniform_index(eng, 40));
        r.mean_sentiment = rng::normal(eng);
        r.factors = {rng::normal(eng)};
        regions.push_back(std::move(r));
    }
    auto table = sensitivity_sweep(regions, {"f"}, 0, 50);
    REQUIRE(table.thresholds.size() == 51);
    // threshold 0 includes every region with >= 1 review
    CHECK(table.region_counts[0] == 40);
    for (std::size_t t = 1; t < table.region_counts.size(); ++t)
        CHECK(table.region_counts[t] <= table.region_counts[t - 1]);
}

TEST_CASE("sweep: planted noise attenuates the low-threshold correlation",
          "[cli]") {
    // strong linear signal in well-sampled regions, pure noise in
    // low-count regions
    auto eng = rng::derive(20240810, 9);
    std::vector<SweepRegion> regions;
    for (int i = 0; i < 25; ++i) {
        SweepRegion r;
        r.region_id = "good" + std::to_string(i);
        r.n_scores = 12 + static_cast<long>(rng::uniform_index(eng, 30));
        double x = rng::normal(eng);
        r.factors = {x};
        r.mean_sentiment = 0.8 * x + 0.05 * rng::normal(eng);
        regions.push_back(std::move(r));
    }
    for (int i = 0; i < 20; ++i) {
        SweepRegion r;
        r.region_id = "noise" + std::to_string(i);
        r.n_scores = 1 + static_cast<long>(rng::uniform_index(eng, 8));
        r.factors = {rng::normal(eng)};
        r.mean_sentiment = 2.0 * rng::normal(eng);
        regions.push_back(std::move(r));
    }
    auto table = sensitivity_sweep(regions, {"f"}, 0, 50);
    REQUIRE(table.r[0][0].has_value());
    REQUIRE(table.r[0][10].has_value());
    CHECK(std::abs(*table.r[0][10]) > std::abs(*table.r[0][0]));
}

TEST_CASE("sweep: cells go missing when fewer than 3 regions remain", "[cli]") {
    std::vector<SweepRegion> regions;
    for (int i = 0; i < 5; ++i) {
        SweepRegion r;
        r.region_id = "g" + std::to_string(i);
        r.n_scores = 4;
        r.mean_sentiment = 0.1 * i;
        r.factors = {1.0 * i};
        regions.push_back(std::move(r));
    }
    auto table = sensitivity_sweep(regions, {"f"}, 0, 10);
    CHECK(table.r[0][0].has_value());
    CHECK(table.region_counts[5] == 0);
    CHECK_FALSE(table.r[0][5].has_value());
}

TEST_CASE("pipeline: full run on the mini corpus", "[cli]") {
    auto cfg = load_config(kFixtures + std::string("/mini/run.conf"));
    auto out = fresh_out_dir("run");
    Runner runner(cfg, out);
    auto manifest = runner.run_all();

    REQUIRE(manifest.stages.size() == 6);
    std::vector<std::string> expected = {"filter", "classify", "aggregate",
                                         "spatial", "regress", "lsva"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(manifest.stages[i].stage == expected[i]);
        CHECK_FALSE(manifest.stages[i].input_hash.empty());
        CHECK_FALSE(manifest.stages[i].output_hash.empty());
        for (const auto& f : manifest.stages[i].outputs)
            CHECK(fs::exists(fs::path(out) / f));
    }
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    CHECK(fs::exists(fs::path(out) / "table1.csv"));
    CHECK(fs::exists(fs::path(out) / "wilcoxon_matrix.csv"));
    CHECK(fs::exists(fs::path(out) / "lisa.csv"));
    CHECK(fs::exists(fs::path(out) / "lsva_all.csv"));
    CHECK(fs::exists(fs::path(out) / "sweep.csv"));
    fs::remove_all(out);
}

TEST_CASE("pipeline: rerun with the same seed is bytewise identical", "[cli]") {
    auto cfg = load_config(kFixtures + std::string("/mini/run.conf"));
    auto out_a = fresh_out_dir("det_a");
    auto out_b = fresh_out_dir("det_b");
    auto manifest_a = Runner(cfg, out_a).run_all();
    auto manifest_b = Runner(cfg, out_b).run_all();

    CHECK(slurp(out_a + "/manifest.json") == slurp(out_b + "/manifest.json"));
    for (const auto& stage : manifest_a.stages)
        for (const auto& f : stage.outputs)
            CHECK(slurp(out_a + "/" + f) == slurp(out_b + "/" + f));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("pipeline: stages are resumable from cache", "[cli]") {
    auto cfg = load_config(kFixtures + std::string("/mini/run.conf"));
    auto out = fresh_out_dir("cache");
    auto first = Runner(cfg, out).run_all();
    for (const auto& s : first.stages) CHECK_FALSE(s.from_cache);

    auto second = Runner(cfg, out).run_all();
    for (const auto& s : second.stages) CHECK(s.from_cache);
    for (std::size_t i = 0; i < first.stages.size(); ++i)
        CHECK(first.stages[i].output_hash == second.stages[i].output_hash);

    // changing a downstream parameter leaves upstream stages cached
    auto cfg2 = cfg;
    cfg2.lsva_min_count += 1;
    auto third = Runner(cfg2, out).run_all();
    for (std::size_t i = 0; i + 1 < third.stages.size(); ++i)
        CHECK(third.stages[i].from_cache);
    CHECK_FALSE(third.stages.back().from_cache);  // lsva reruns
    fs::remove_all(out);
}

TEST_CASE("pipeline: stage failure names the stage", "[cli]") {
    auto cfg = load_config(kFixtures + std::string("/mini/run.conf"));
    cfg.reviews_path = "/nonexistent/reviews.jsonl";
    auto out = fresh_out_dir("fail");
    Runner runner(cfg, out);
    try {
        runner.run_all();
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage_name == "filter");
        CHECK(std::string(e.what()).find("filter") != std::string::npos);
    }
    fs::remove_all(out);
}
