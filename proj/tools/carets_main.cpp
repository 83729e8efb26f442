#include "carets/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CliState {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    int fold = 1;
    std::vector<std::string> run_dirs;
};

void add_common_options(CLI::App* sub, CliState& state) {
    sub->add_option("-c,--config", state.config_path, "experiment config file");
    const auto kv = [sub, &state](const std::string& flag, const std::string& key,
                                  const std::string& desc) {
        sub->add_option_function<std::string>(
            flag, [&state, key](const std::string& v) { state.overrides[key] = v; },
            desc);
    };
    kv("--data-path", "data_path", "input CSV (timestamp,value)");
    kv("--output-dir", "output_dir", "output directory");
    kv("--variant", "variant", "carets1..4 or baseline1..3");
    kv("--encoder", "encoder", "cnn, lstm or transformer");
    kv("--n-lags", "n_lags", "number of lagged observations");
    kv("--horizon", "horizon", "forecast steps");
    kv("--num-folds", "num_folds", "cross-validation folds");
    kv("--train-points", "train_points", "chronological train/test boundary");
    kv("--max-epochs", "max_epochs", "epoch cap");
    kv("--patience", "patience", "early-stopping patience");
    kv("--learning-rate", "learning_rate", "Adam learning rate");
    kv("--batch-size", "batch_size", "mini-batch size");
    kv("--seed", "seed", "global random seed");
    kv("--reg-coeff", "reg_coeff", "log-variance regularization coefficient");
    kv("--fold-workers", "fold_workers", "parallel fold workers");
    kv("--enc-num-layers", "enc_num_layers", "encoder layers");
    kv("--enc-hidden-dim", "enc_hidden_dim", "encoder hidden units");
    kv("--enc-kernel-size", "enc_kernel_size", "CNN kernel size");
    kv("--enc-padding", "enc_padding", "CNN padding");
    kv("--enc-num-heads", "enc_num_heads", "transformer attention heads");
    kv("--head-num-fc-layers", "head_num_fc_layers", "head FC layers");
    kv("--head-fc-hidden", "head_fc_hidden", "head FC hidden units");
    sub->add_flag_callback(
        "--single-task",
        [&state] { state.overrides["single_task"] = "true"; },
        "optimize the output-prediction loss only");
    sub->add_flag_callback(
        "--include-persistence",
        [&state] { state.overrides["include_persistence"] = "true"; },
        "add the persistence reference to cv outputs");
    sub->add_flag_callback(
        "--native-units",
        [&state] { state.overrides["native_units"] = "true"; },
        "report RMSE in native units instead of scaled [0,1]");
}

carets::ExperimentConfig build_config(const CliState& state) {
    carets::ExperimentConfig cfg;
    if (!state.config_path.empty())
        cfg = carets::ExperimentConfig::parse_file(state.config_path);
    for (const auto& [key, value] : state.overrides)
        cfg.set(key, value, "command line");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carets: dual-stream trend/deviation multi-step forecasting"};
    app.require_subcommand(1);
    CliState state;

    CLI::App* prepare = app.add_subcommand(
        "prepare", "build scaled windows, scaler and folds from a CSV");
    add_common_options(prepare, state);

    CLI::App* train =
        app.add_subcommand("train", "train one model on a single fold");
    add_common_options(train, state);
    train->add_option("--fold", state.fold, "fold id (1-based)");

    CLI::App* cv = app.add_subcommand(
        "cv", "cross-validate the configured variant and encoder");
    add_common_options(cv, state);

    CLI::App* report = app.add_subcommand(
        "report", "emit comparison and step-curve tables from run dirs");
    add_common_options(report, state);
    report->add_option("run_dirs", state.run_dirs, "completed run directories")
        ->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const carets::ExperimentConfig cfg = build_config(state);
        if (prepare->parsed()) {
            carets::cmd_prepare(cfg);
        } else if (train->parsed()) {
            carets::cmd_train(cfg, state.fold);
        } else if (cv->parsed()) {
            carets::cmd_cv(cfg);
        } else if (report->parsed()) {
            carets::cmd_report(cfg, state.run_dirs);
        }
    } catch (const carets::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const carets::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const carets::TrainError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
