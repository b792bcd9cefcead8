#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "parksent/config.hpp"

using namespace parksent::pipeline;

namespace {

const std::string kFixtures = PARKSENT_FIXTURE_DIR;

PipelineConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "/base");
}

}  // namespace

TEST_CASE("config: defaults are documented values", "[cli]") {
    auto cfg = parse("");
    CHECK(cfg.min_reviews == 10);
    CHECK(cfg.poi_min_count == 10);
    CHECK(cfg.weights_spec == "knn:8");
    CHECK(cfg.permutations == 999);
    CHECK(cfg.alpha == 0.05);
    CHECK(cfg.vif_threshold == 5.0);
    CHECK(cfg.knots == 8);
    CHECK(cfg.lsva_min_count == 30);
    CHECK(cfg.cv_folds == 10);
    CHECK(cfg.seed == 42);
    CHECK(cfg.sweep_max == 50);
}

TEST_CASE("config: unknown key is a startup error naming the key", "[cli]") {
    try {
        parse("[aggregate]\nmin_reviews = 5\nbogus_key = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("config: unknown section rejected", "[cli]") {
    CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
}

TEST_CASE("config: relative paths resolve against the config directory",
          "[cli]") {
    auto cfg = parse("[inputs]\nreviews = data/r.jsonl\n");
    CHECK(cfg.reviews_path == "/base/data/r.jsonl");
    auto abs = parse("[inputs]\nreviews = /abs/r.jsonl\n");
    CHECK(abs.reviews_path == "/abs/r.jsonl");
}

TEST_CASE("config: comments and blank lines ignored", "[cli]") {
    auto cfg = parse("# comment\n\n[run]\nseed = 7\n; another\n");
    CHECK(cfg.seed == 7);
}

TEST_CASE("config: value validation", "[cli]") {
    CHECK_THROWS_AS(parse("[aggregate]\nregion_agg = bogus\n"), ConfigError);
    CHECK_THROWS_AS(parse("[spatial]\nlevel = county\n"), ConfigError);
    CHECK_THROWS_AS(parse("[aggregate]\nexclude_neutral = perhaps\n"),
                    ConfigError);
}

TEST_CASE("config: bundled run.conf parses", "[cli]") {
    auto cfg = load_config(kFixtures + std::string("/mini/run.conf"));
    CHECK(cfg.classifier_kind == "lexicon");
    CHECK(cfg.min_reviews == 3);
    CHECK(cfg.weights_spec == "knn:3");
    CHECK(cfg.permutations == 199);
    CHECK(cfg.knots == 4);
    CHECK(cfg.lsva_subsets ==
          std::vector<std::string>{"all", "urban", "rural"});
    CHECK(cfg.reviews_path.find("reviews.jsonl") != std::string::npos);
}

TEST_CASE("config: fingerprint tracks analysis-relevant fields", "[cli]") {
    auto a = parse("[run]\nseed = 1\n");
    auto b = parse("[run]\nseed = 2\n");
    auto c = parse("[aggregate]\nmin_reviews = 11\n");
    CHECK(config_fingerprint(a) != config_fingerprint(b));
    CHECK(config_fingerprint(a) != config_fingerprint(c));
    auto a2 = parse("[run]\nseed = 1\n");
    CHECK(config_fingerprint(a) == config_fingerprint(a2));
}
