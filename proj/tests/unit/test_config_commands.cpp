#include "carets/commands.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace carets;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_experiment(const testutil::TmpDir& tmp, long n_points) {
    testutil::write_csv(tmp.file("data.csv"),
                        testutil::synthetic_series(n_points, 5));
    ExperimentConfig cfg;
    cfg.data_path = tmp.file("data.csv");
    cfg.output_dir = tmp.file("out");
    cfg.num_folds = 3;
    cfg.horizon = 3;
    cfg.enc_hidden_dim = 8;
    cfg.enc_num_heads = 2;
    cfg.head_fc_hidden = 8;
    cfg.max_epochs = 4;
    cfg.patience = 3;
    cfg.batch_size = 32;
    return cfg;
}

}  // namespace

TEST_CASE("config round-trips through serialize/parse") {
    ExperimentConfig cfg;
    cfg.data_path = "somewhere/data.csv";
    cfg.variant = "carets3";
    cfg.encoder = "lstm";
    cfg.horizon = 8;
    cfg.learning_rate = 0.00125;
    cfg.single_task = true;
    cfg.fold_workers = 4;
    const std::string text = cfg.serialize();
    const ExperimentConfig back = ExperimentConfig::parse_text(text, "test");
    CHECK(back.serialize() == text);
    CHECK(back.variant == "carets3");
    CHECK(back.horizon == 8);
    CHECK(back.single_task == true);
    CHECK(back.learning_rate == 0.00125);
}

TEST_CASE("unknown keys and malformed rows are config errors") {
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::parse_text("varient = carets2\n", "test"),
        doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("no_equals_here\n", "test"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("horizon = six\n", "test"),
                    ConfigError);
    // comments and blank lines are fine
    CHECK_NOTHROW(ExperimentConfig::parse_text("# comment\n\nhorizon = 4\n", "test"));
}

TEST_CASE("train/test boundary resolution") {
    ExperimentConfig cfg;
    CHECK(cfg.resolved_train_points(8784) == 6048);
    CHECK(cfg.resolved_train_points(2000) == 1377);
    cfg.train_points = 100;
    CHECK(cfg.resolved_train_points(2000) == 100);
    cfg.train_points = 2000;
    CHECK_THROWS_AS(cfg.resolved_train_points(2000), ConfigError);
}

TEST_CASE("output root environment override") {
    ExperimentConfig cfg;
    cfg.output_dir = "exp";
    ::setenv("CARETS_OUTPUT_ROOT", "/tmp/carets_root", 1);
    CHECK(cfg.resolved_output_dir() == "/tmp/carets_root/exp");
    cfg.output_dir = "/abs/path";
    CHECK(cfg.resolved_output_dir() == "/abs/path");
    ::unsetenv("CARETS_OUTPUT_ROOT");
    cfg.output_dir = "exp";
    CHECK(cfg.resolved_output_dir() == "exp");
}

TEST_CASE("prepare writes the expected window counts and is idempotent") {
    testutil::TmpDir tmp("prep");
    ExperimentConfig cfg = tiny_experiment(tmp, 300);
    cfg.horizon = 6;
    cmd_prepare(cfg);

    const fs::path dir = fs::path(cfg.output_dir) / "prepared";
    REQUIRE(fs::exists(dir / "windows_train.tsv"));
    REQUIRE(fs::exists(dir / "windows_test.tsv"));
    REQUIRE(fs::exists(dir / "scaler.txt"));
    REQUIRE(fs::exists(dir / "folds.txt"));

    // L - 17 windows per segment for the 15 -> 6 scheme
    const long split = cfg.resolved_train_points(300);
    const WindowDataset train =
        WindowDataset::load((dir / "windows_train.tsv").string());
    const WindowDataset test =
        WindowDataset::load((dir / "windows_test.tsv").string());
    CHECK(train.size() == split - 17);
    CHECK(test.size() == (300 - split) - 17);

    const std::string before = slurp((dir / "windows_train.tsv").string()) +
                               slurp((dir / "scaler.txt").string()) +
                               slurp((dir / "folds.txt").string());
    cmd_prepare(cfg);
    const std::string after = slurp((dir / "windows_train.tsv").string()) +
                              slurp((dir / "scaler.txt").string()) +
                              slurp((dir / "folds.txt").string());
    CHECK(before == after);
}

TEST_CASE("prepare surfaces ingestion errors with row context") {
    testutil::TmpDir tmp("prep_bad");
    {
        std::ofstream out(tmp.file("bad.csv"));
        out << "timestamp,value\n2025-01-01T00:00:00,1\nbroken,2\n";
    }
    ExperimentConfig cfg;
    cfg.data_path = tmp.file("bad.csv");
    cfg.output_dir = tmp.file("out");
    CHECK_THROWS_WITH_AS(cmd_prepare(cfg), doctest::Contains("row 3"), DataError);
    CHECK_THROWS_AS(cmd_prepare(ExperimentConfig{}), ConfigError);
}

TEST_CASE("cv requires a prepared dataset") {
    testutil::TmpDir tmp("noprep");
    ExperimentConfig cfg;
    cfg.data_path = tmp.file("whatever.csv");
    cfg.output_dir = tmp.file("out");
    CHECK_THROWS_WITH_AS(cmd_cv(cfg), doctest::Contains("prepare"), DataError);
}

TEST_CASE("train and cv commands produce run artifacts") {
    testutil::TmpDir tmp("runs");
    ExperimentConfig cfg = tiny_experiment(tmp, 260);
    cfg.variant = "carets1";
    cfg.encoder = "cnn";
    cmd_prepare(cfg);

    cmd_train(cfg, 1);
    const fs::path tdir =
        fs::path(cfg.output_dir) / "runs" / "train-carets1-cnn-fold1";
    CHECK(fs::exists(tdir / "checkpoint.txt"));
    CHECK(fs::exists(tdir / "training_log.tsv"));
    CHECK(fs::exists(tdir / "metrics_test.txt"));

    cfg.include_persistence = true;
    const CVSummary summary = cmd_cv(cfg);
    CHECK(summary.folds.size() == 3);
    const fs::path cdir = fs::path(cfg.output_dir) / "runs" / "carets1-cnn";
    CHECK(fs::exists(cdir / "summary.txt"));
    CHECK(fs::exists(cdir / "fold_01" / "metrics_test.txt"));
    CHECK(fs::exists(cdir / "fold_03" / "metrics_val.txt"));
    const fs::path pdir = fs::path(cfg.output_dir) / "runs" / "persistence";
    CHECK(fs::exists(pdir / "summary.txt"));

    // report over the two run dirs
    cmd_report(cfg, {cdir.string(), pdir.string()});
    const fs::path rdir = fs::path(cfg.output_dir) / "report";
    REQUIRE(fs::exists(rdir / "comparison.tsv"));
    const std::string cmp = slurp((rdir / "comparison.tsv").string());
    CHECK(cmp.find("carets1") != std::string::npos);
    CHECK(cmp.find("persistence") != std::string::npos);
    CHECK(fs::exists(rdir / "carets1-cnn-rmse-steps.tsv"));
    CHECK(fs::exists(rdir / "carets1-cnn-trend-acc-steps.tsv"));

    // step-curve values reproduce the summary entries exactly
    const std::string curve =
        slurp((rdir / "carets1-cnn-rmse-steps.tsv").string());
    std::istringstream in(slurp((cdir / "summary.txt").string()));
    std::string line;
    std::string step1_mean;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key, val;
        ss >> key >> val;
        if (key == "test_rmse_step_1_mean") step1_mean = val;
    }
    REQUIRE(!step1_mean.empty());
    CHECK(curve.find(step1_mean) != std::string::npos);
}

TEST_CASE("report requires existing run summaries") {
    testutil::TmpDir tmp("report_bad");
    ExperimentConfig cfg;
    cfg.output_dir = tmp.file("out");
    CHECK_THROWS_AS(cmd_report(cfg, {}), ConfigError);
    CHECK_THROWS_AS(cmd_report(cfg, {tmp.file("missing_run")}), DataError);
}
