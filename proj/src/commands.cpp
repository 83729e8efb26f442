#include "carets/commands.hpp"

#include "carets/baselines.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace carets {

namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
}

std::string fold_dir_name(int fold_id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "fold_%02d", fold_id);
    return buf;
}

// Scaled-to-native RMSE conversion: Min-Max is affine, so errors scale by
// the fitted value range.
void to_native_units(MetricsReport& report, const MinMaxScaler& scaler) {
    const int c = scaler.column_index("value");
    const double range = scaler.max(c) - scaler.min(c);
    report.rmse_avg *= range;
    report.rmse_per_step *= range;
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key, val;
        ss >> key >> val;
        kv[key] = val;
    }
    return kv;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void print_summary_row(const std::string& tag, const CVSummary& summary) {
    const auto collect = [&](auto pick) {
        std::vector<double> v;
        for (const auto& f : summary.folds) v.push_back(pick(f));
        return mean_std(v);
    };
    const MeanStd train = collect([](const FoldOutcome& f) { return f.train.rmse_avg; });
    const MeanStd val = collect([](const FoldOutcome& f) { return f.val.rmse_avg; });
    const MeanStd test = collect([](const FoldOutcome& f) { return f.test.rmse_avg; });
    const MeanStd acc = collect([](const FoldOutcome& f) { return f.test.trend_acc_avg; });
    std::cout << tag << "  train " << fmt4(train.mean) << " ± " << fmt4(train.std)
              << "  val " << fmt4(val.mean) << " ± " << fmt4(val.std) << "  test "
              << fmt4(test.mean) << " ± " << fmt4(test.std) << "  trend_acc "
              << fmt4(acc.mean) << " ± " << fmt4(acc.std) << "\n";
}

}  // namespace

std::string run_tag(const ExperimentConfig& config) {
    std::string tag = config.variant + "-" + config.encoder;
    if (config.single_task) tag += "-single";
    return tag;
}

void cmd_prepare(const ExperimentConfig& config) {
    if (config.data_path.empty())
        throw ConfigError("prepare: data_path is required");
    const auto series = load_series(config.data_path);
    const long L = static_cast<long>(series.size());
    const long split = config.resolved_train_points(L);
    const long min_len = config.n_lags + config.horizon;
    if (split < min_len || L - split < min_len)
        throw DataError("prepare: segments of " + std::to_string(split) + "/" +
                        std::to_string(L - split) +
                        " points are too short for the windowing scheme");

    const std::vector<SeriesRecord> train_records(series.begin(),
                                                  series.begin() + split);
    const std::vector<SeriesRecord> test_records(series.begin() + split,
                                                 series.end());

    // Scaler columns come from the training pool only.
    std::vector<std::vector<double>> cols(4);
    for (const auto& r : train_records) {
        cols[0].push_back(r.month);
        cols[1].push_back(r.weekday);
        cols[2].push_back(r.hour);
        cols[3].push_back(r.value);
    }
    MinMaxScaler scaler;
    scaler.fit({"month", "weekday", "hour", "value"}, cols);

    const auto train_windows =
        build_windows(train_records, config.n_lags, config.horizon, scaler);
    const auto test_windows =
        build_windows(test_records, config.n_lags, config.horizon, scaler);
    const auto folds = make_folds(static_cast<long>(train_windows.size()),
                                  config.num_folds,
                                  static_cast<std::uint64_t>(config.seed));

    const fs::path dir = fs::path(config.resolved_output_dir()) / "prepared";
    fs::create_directories(dir);
    scaler.save((dir / "scaler.txt").string());
    WindowDataset::from_samples(train_windows).save((dir / "windows_train.tsv").string());
    WindowDataset::from_samples(test_windows).save((dir / "windows_test.tsv").string());
    save_folds(folds, static_cast<long>(train_windows.size()),
               static_cast<std::uint64_t>(config.seed),
               (dir / "folds.txt").string());
    write_text((dir / "prepare_config.txt").string(), config.serialize());

    std::cout << "prepared " << train_windows.size() << " train-pool and "
              << test_windows.size() << " test windows ("
              << config.n_lags << " lags -> " << config.horizon << " steps) in "
              << dir.string() << "\n";
}

Prepared load_prepared(const ExperimentConfig& config) {
    const fs::path dir = fs::path(config.resolved_output_dir()) / "prepared";
    if (!fs::exists(dir / "windows_train.tsv"))
        throw DataError("no prepared dataset in '" + dir.string() +
                        "'; run `carets prepare` first");
    Prepared p;
    p.data.pool = WindowDataset::load((dir / "windows_train.tsv").string());
    p.data.test = WindowDataset::load((dir / "windows_test.tsv").string());
    p.data.folds = load_folds((dir / "folds.txt").string());
    p.scaler = MinMaxScaler::load((dir / "scaler.txt").string());
    if (p.data.pool.horizon() != config.horizon)
        throw ConfigError("prepared dataset horizon " +
                          std::to_string(p.data.pool.horizon()) +
                          " does not match configured horizon " +
                          std::to_string(config.horizon) +
                          "; re-run `carets prepare`");
    return p;
}

void cmd_train(const ExperimentConfig& config, int fold_id) {
    Prepared p = load_prepared(config);
    if (fold_id < 1 || fold_id > static_cast<int>(p.data.folds.size()))
        throw ConfigError("train: fold " + std::to_string(fold_id) +
                          " out of range (have " +
                          std::to_string(p.data.folds.size()) + ")");
    const FoldSplit& fold = p.data.folds[fold_id - 1];

    TrainConfig tc = config.train_config();
    tc.seed = static_cast<std::uint64_t>(config.seed) +
              static_cast<std::uint64_t>(fold_id);
    VariantModel model(config.variant_enum(), config.encoder_config(),
                       config.head_config(), tc.mode, tc.seed);
    const TrainResult training = train_model(model, p.data.pool, fold, tc);

    MetricsReport train = evaluate(model, p.data.pool.gather(fold.train_indices),
                                   Split::Train);
    MetricsReport val = evaluate(model, p.data.pool.gather(fold.val_indices),
                                 Split::Val);
    MetricsReport test = evaluate(model, p.data.test, Split::Test);
    if (config.native_units)
        for (auto* r : {&train, &val, &test}) to_native_units(*r, p.scaler);

    const fs::path dir = fs::path(config.resolved_output_dir()) / "runs" /
                         (std::string("train-") + run_tag(config) + "-fold" +
                          std::to_string(fold_id));
    fs::create_directories(dir);
    model.save((dir / "checkpoint.txt").string());
    save_training_log(training.log, (dir / "training_log.tsv").string());
    save_metrics(train, (dir / "metrics_train.txt").string());
    save_metrics(val, (dir / "metrics_val.txt").string());
    save_metrics(test, (dir / "metrics_test.txt").string());
    write_text((dir / "run_config.txt").string(), config.serialize());

    std::cout << "fold " << fold_id << ": stopped at epoch "
              << training.stopped_epoch << " (best " << training.best_epoch
              << "), val RMSE " << fmt4(training.best_val_rmse) << ", test RMSE "
              << fmt4(test.rmse_avg) << ", test trend acc "
              << fmt4(test.trend_acc_avg) << "\n";
}

CVSummary cmd_cv(const ExperimentConfig& config) {
    Prepared p = load_prepared(config);
    const TrainConfig tc = config.train_config();
    CVSummary summary =
        cross_validate(config.variant_enum(), config.encoder_config(),
                       config.head_config(), p.data, tc, config.fold_workers);
    if (config.native_units)
        for (auto& f : summary.folds)
            for (auto* r : {&f.train, &f.val, &f.test}) to_native_units(*r, p.scaler);

    const fs::path dir =
        fs::path(config.resolved_output_dir()) / "runs" / run_tag(config);
    fs::create_directories(dir);
    for (const auto& f : summary.folds) {
        const fs::path fdir = dir / fold_dir_name(f.fold_id);
        fs::create_directories(fdir);
        save_training_log(f.training.log, (fdir / "training_log.tsv").string());
        save_metrics(f.train, (fdir / "metrics_train.txt").string());
        save_metrics(f.val, (fdir / "metrics_val.txt").string());
        save_metrics(f.test, (fdir / "metrics_test.txt").string());
    }
    save_cv_summary(summary, (dir / "summary.txt").string());
    write_text((dir / "run_config.txt").string(), config.serialize());
    print_summary_row(run_tag(config), summary);

    if (config.include_persistence) {
        MetricsReport pool_ref = evaluate_persistence(p.data.pool, Split::Train);
        MetricsReport test_ref = evaluate_persistence(p.data.test, Split::Test);
        if (config.native_units)
            for (auto* r : {&pool_ref, &test_ref}) to_native_units(*r, p.scaler);
        const fs::path pdir =
            fs::path(config.resolved_output_dir()) / "runs" / "persistence";
        fs::create_directories(pdir);
        save_metrics(test_ref, (pdir / "metrics_test.txt").string());
        std::ostringstream out;
        out << "# carets cv-summary v1\n";
        out << "variant persistence\nencoder -\nmode -\n";
        out << "horizon " << p.data.test.horizon() << "\n";
        out << "num_folds 1\n";
        const auto emit_pair = [&](const std::string& prefix,
                                   const MetricsReport& r) {
            out << prefix << "_rmse_avg_mean " << fmt_double(r.rmse_avg) << "\n";
            out << prefix << "_rmse_avg_std 0\n";
            for (long j = 0; j < r.rmse_per_step.size(); ++j) {
                out << prefix << "_rmse_step_" << (j + 1) << "_mean "
                    << fmt_double(r.rmse_per_step(j)) << "\n";
                out << prefix << "_rmse_step_" << (j + 1) << "_std 0\n";
            }
            out << prefix << "_trend_acc_avg_mean " << fmt_double(r.trend_acc_avg)
                << "\n";
            out << prefix << "_trend_acc_avg_std 0\n";
            for (long j = 0; j < r.trend_acc_per_step.size(); ++j) {
                out << prefix << "_trend_acc_step_" << (j + 1) << "_mean "
                    << fmt_double(r.trend_acc_per_step(j)) << "\n";
                out << prefix << "_trend_acc_step_" << (j + 1) << "_std 0\n";
            }
        };
        // No fold structure: the training pool stands in for train and val.
        emit_pair("train", pool_ref);
        emit_pair("val", pool_ref);
        emit_pair("test", test_ref);
        out << "time_seconds_mean 0\ntime_seconds_std 0\n";
        write_text((pdir / "summary.txt").string(), out.str());
        std::cout << "persistence  test " << fmt4(test_ref.rmse_avg)
                  << "  trend_acc " << fmt4(test_ref.trend_acc_avg) << "\n";
    }

    // Paired view against the multi-task counterpart when one exists.
    if (config.single_task) {
        ExperimentConfig multi = config;
        multi.single_task = false;
        const fs::path other = fs::path(config.resolved_output_dir()) / "runs" /
                               run_tag(multi) / "summary.txt";
        if (fs::exists(other)) {
            const auto kv = read_kv_file(other.string());
            const auto get = [&](const std::string& k) {
                const auto it = kv.find(k);
                return it == kv.end() ? 0.0 : parse_double(it->second, other.string());
            };
            const auto local = [&](auto pick) {
                std::vector<double> v;
                for (const auto& f : summary.folds) v.push_back(pick(f));
                return mean_std(v);
            };
            const MeanStd st_rmse =
                local([](const FoldOutcome& f) { return f.test.rmse_avg; });
            const MeanStd st_acc =
                local([](const FoldOutcome& f) { return f.test.trend_acc_avg; });
            const MeanStd st_time =
                local([](const FoldOutcome& f) { return f.test.wall_clock_seconds; });
            std::cout << "multi-task vs single-task (" << config.variant << "-"
                      << config.encoder << ", test):\n";
            std::cout << "  multi   RMSE " << fmt4(get("test_rmse_avg_mean")) << " ± "
                      << fmt4(get("test_rmse_avg_std")) << "  trend_acc "
                      << fmt4(get("test_trend_acc_avg_mean")) << " ± "
                      << fmt4(get("test_trend_acc_avg_std")) << "  time "
                      << fmt4(get("time_seconds_mean")) << "s\n";
            std::cout << "  single  RMSE " << fmt4(st_rmse.mean) << " ± "
                      << fmt4(st_rmse.std) << "  trend_acc " << fmt4(st_acc.mean)
                      << " ± " << fmt4(st_acc.std) << "  time "
                      << fmt4(st_time.mean) << "s\n";
        }
    }
    return summary;
}

void cmd_report(const ExperimentConfig& config,
                const std::vector<std::string>& run_dirs) {
    if (run_dirs.empty()) throw ConfigError("report: no run directories given");
    const fs::path dir = fs::path(config.resolved_output_dir()) / "report";
    fs::create_directories(dir);

    std::ostringstream cmp;
    cmp << "approach\tencoder\tmode\ttrain_rmse_mean\ttrain_rmse_std"
        << "\tval_rmse_mean\tval_rmse_std\ttest_rmse_mean\ttest_rmse_std"
        << "\ttest_trend_acc_mean\ttest_trend_acc_std\ttime_seconds_mean\n";

    for (const auto& run_dir : run_dirs) {
        const fs::path summary_path = fs::path(run_dir) / "summary.txt";
        if (!fs::exists(summary_path))
            throw DataError("report: missing '" + summary_path.string() + "'");
        const auto kv = read_kv_file(summary_path.string());
        const auto get = [&](const std::string& k) -> std::string {
            const auto it = kv.find(k);
            if (it == kv.end())
                throw DataError(summary_path.string() + ": missing key '" + k + "'");
            return it->second;
        };
        const std::string tag = fs::path(run_dir).filename().string();
        cmp << get("variant") << '\t' << get("encoder") << '\t' << get("mode")
            << '\t' << get("train_rmse_avg_mean") << '\t'
            << get("train_rmse_avg_std") << '\t' << get("val_rmse_avg_mean")
            << '\t' << get("val_rmse_avg_std") << '\t' << get("test_rmse_avg_mean")
            << '\t' << get("test_rmse_avg_std") << '\t'
            << get("test_trend_acc_avg_mean") << '\t'
            << get("test_trend_acc_avg_std") << '\t'
            << (kv.count("time_seconds_mean") ? kv.at("time_seconds_mean") : "0")
            << '\n';

        const long k = parse_long(get("horizon"), summary_path.string());
        std::ostringstream rmse_curve, acc_curve;
        rmse_curve << "step\trmse_mean\trmse_std\n";
        acc_curve << "step\ttrend_acc_mean\ttrend_acc_std\n";
        for (long j = 1; j <= k; ++j) {
            rmse_curve << j << '\t' << get("test_rmse_step_" + std::to_string(j) + "_mean")
                       << '\t' << get("test_rmse_step_" + std::to_string(j) + "_std")
                       << '\n';
            acc_curve << j << '\t'
                      << get("test_trend_acc_step_" + std::to_string(j) + "_mean")
                      << '\t' << get("test_trend_acc_step_" + std::to_string(j) + "_std")
                      << '\n';
        }
        write_text((dir / (tag + "-rmse-steps.tsv")).string(), rmse_curve.str());
        write_text((dir / (tag + "-trend-acc-steps.tsv")).string(), acc_curve.str());
    }
    write_text((dir / "comparison.tsv").string(), cmp.str());
    std::cout << "report written to " << dir.string() << " (" << run_dirs.size()
              << " runs)\n";
}

}  // namespace carets
