// parksent: parking-sentiment analytics over POI review corpora.
//
// Subcommands mirror the pipeline stages; `run` executes all of them with
// caching and writes a manifest. See README.md for the config reference.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "parksent/crossval.hpp"
#include "parksent/pipeline.hpp"

namespace fs = std::filesystem;
using namespace parksent;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

pipeline::PipelineConfig resolve_config(const GlobalArgs& g) {
    pipeline::PipelineConfig cfg;
    if (!g.config_path.empty()) cfg = pipeline::load_config(g.config_path);
    if (g.seed_set) cfg.seed = g.seed;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    return cfg;
}

int run_stage_command(const GlobalArgs& g, const std::string& stage) {
    auto cfg = resolve_config(g);
    pipeline::Runner runner(cfg, cfg.out_dir);
    if (stage == "compare") runner.stage_compare();
    else if (stage == "sweep") runner.stage_sweep();
    else runner.execute(stage);
    std::cout << stage << ": done -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_ingest(const GlobalArgs& g) {
    auto cfg = resolve_config(g);
    auto corpus = corpus::load(cfg.reviews_path, cfg.pois_path,
                               cfg.regions_path, cfg.covariates_path);
    const auto& r = corpus.report;
    nlohmann::json j;
    j["reviews_retained"] = r.n_reviews;
    j["orphan_reviews_excluded"] = r.orphan_reviews;
    j["pois"] = r.n_pois;
    j["pois_without_reviews"] = r.pois_without_reviews;
    j["pois_without_assignment"] = r.pois_without_assignment;
    j["cbgs_without_covariates"] = r.cbgs_without_covariates;
    j["covariate_rows"] = corpus.covariates.cbg_ids.size();
    j["covariate_rows_rejected"] = corpus.covariates.rejected_lines.size();
    std::cout << j.dump(1) << "\n";
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        pipeline::write_json_file(
            j, (fs::path(cfg.out_dir) / "ingest_report.json").string());
    }
    return 0;
}

int cmd_train(const GlobalArgs& g, const std::string& labeled_path,
              const std::string& kind_str, const std::string& grid_path,
              int k) {
    auto cfg = resolve_config(g);
    fs::create_directories(cfg.out_dir);
    auto all = classify::load_labeled_csv(labeled_path);
    std::vector<classify::LabeledExample> train, test;
    for (auto& e : all) (e.is_train ? train : test).push_back(e);
    if (train.empty()) {
        std::cerr << "train: no rows with split=train\n";
        return 1;
    }

    auto kind = classify::parse_kind(kind_str);
    classify::HyperParams best;
    if (!grid_path.empty()) {
        auto grid = classify::load_grid(grid_path);
        if (grid.kind != kind) {
            std::cerr << "train: grid file kind disagrees with --kind\n";
            return 1;
        }
        auto report = classify::cross_validate(grid, train, k, cfg.seed,
                                               cfg.min_df);
        best = report.best;
        csvio::Writer w((fs::path(cfg.out_dir) / "cv_report.csv").string());
        w.row({"params", "mean_accuracy"});
        for (const auto& cell : report.cells) {
            std::string desc;
            for (const auto& [key, v] : cell.params)
                desc += key + "=" + v + " ";
            w.row({desc, csvio::fmt_sig(cell.mean_accuracy)});
        }
        for (const auto& warning : report.warnings)
            std::cerr << "warning: " << warning << "\n";
        std::cout << "best mean cv accuracy: "
                  << csvio::fmt_sig(report.best_mean_accuracy) << "\n";
    }

    std::vector<std::string> texts;
    std::vector<AttitudeLabel> labels;
    for (auto& e : train) {
        texts.push_back(e.text);
        labels.push_back(e.label);
    }
    auto model =
        classify::train_on_texts(kind, texts, labels, best, cfg.seed, cfg.min_df);
    auto model_path = (fs::path(cfg.out_dir) / "model.json").string();
    classify::save_model(model, model_path);
    std::cout << "model written: " << model_path << "\n";

    if (!test.empty()) {
        std::vector<std::string> t;
        std::vector<AttitudeLabel> truth;
        for (auto& e : test) {
            t.push_back(e.text);
            truth.push_back(e.label);
        }
        auto metrics = classify::evaluate(truth, classify::predict(model, t));
        nlohmann::json mj;
        mj["accuracy"] = metrics.accuracy;
        for (int c = 0; c < kNumLabels; ++c) {
            auto name = std::string(to_string(static_cast<AttitudeLabel>(c)));
            mj["precision"][name] = metrics.precision[c];
            mj["recall"][name] = metrics.recall[c];
            mj["f1"][name] = metrics.f1[c];
        }
        pipeline::write_json_file(
            mj, (fs::path(cfg.out_dir) / "metrics.json").string());
        std::cout << "test accuracy: " << csvio::fmt_sig(metrics.accuracy)
                  << "\n";
    }
    return 0;
}

int cmd_run(const GlobalArgs& g) {
    auto cfg = resolve_config(g);
    pipeline::Runner runner(cfg, cfg.out_dir);
    auto manifest = runner.run_all();
    for (const auto& s : manifest.stages)
        std::cout << s.stage << (s.from_cache ? " (cached)" : "") << " in "
                  << csvio::fmt_sig(s.seconds) << "s -> " << s.outputs.size()
                  << " file(s)\n";
    std::cout << "manifest: " << runner.out_path("manifest.json") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parking-sentiment analytics pipeline"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path,
                   "config file (key = value, INI sections)");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", g.seed,
                                    "run seed (overrides config)");

    app.add_subcommand("ingest", "load and validate the four input tables");
    app.add_subcommand("filter", "extract parking-related sentences");
    app.add_subcommand("classify", "label extracted sentences");
    app.add_subcommand("aggregate", "sentiment tables at POI/CBG/CBSA level");
    app.add_subcommand("compare", "pairwise rank-sum matrix across POI types");
    app.add_subcommand("spatial", "global and local spatial autocorrelation");
    app.add_subcommand("regress", "correlations, model selection and GAM fits");
    app.add_subcommand("lsva", "lexical salience-valence tables");
    app.add_subcommand("sweep", "threshold sensitivity sweep");
    app.add_subcommand("run", "full pipeline with caching and manifest");

    auto* train = app.add_subcommand("train", "fit and select a classifier");
    std::string labeled_path, kind = "logistic", grid_path;
    int folds = 10;
    train->add_option("--labeled", labeled_path,
                      "labeled CSV (text,label,split)")
        ->required();
    train->add_option("--kind", kind, "logistic | sgd | forest");
    train->add_option("--grid", grid_path, "grid-search JSON file");
    train->add_option("--k", folds, "cross-validation folds");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = seed_opt->count() > 0;

    try {
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "ingest") return cmd_ingest(g);
        if (name == "train")
            return cmd_train(g, labeled_path, kind, grid_path, folds);
        if (name == "run") return cmd_run(g);
        return run_stage_command(g, name);
    } catch (const pipeline::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
