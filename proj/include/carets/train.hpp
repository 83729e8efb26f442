#pragma once

#include "carets/folds.hpp"
#include "carets/model.hpp"
#include "carets/windows.hpp"

#include <string>
#include <vector>

namespace carets {

struct TrainConfig {
    int max_epochs = 600;
    int patience = 50;
    double learning_rate = 0.001;
    int batch_size = 64;
    std::uint64_t seed = 2025;
    TrainMode mode = TrainMode::MultiTask;
    double reg_coeff = 0.01;

    void validate() const;
};

enum class Split { Train, Val, Test };
std::string to_string(Split s);

struct MetricsReport {
    VectorXd rmse_per_step;
    double rmse_avg = 0.0;
    VectorXd trend_acc_per_step;
    double trend_acc_avg = 0.0;
    Split split = Split::Test;
    double wall_clock_seconds = 0.0;
};

struct EpochLogRow {
    int epoch = 0;
    double l_ca = 0.0, l_de = 0.0, l_op = 0.0;
    double log_var_ca = 0.0, log_var_de = 0.0, log_var_op = 0.0;
    double reg_penalty = 0.0, total = 0.0;
    double val_rmse = 0.0;
};

struct TrainResult {
    std::vector<EpochLogRow> log;
    int best_epoch = 0;
    double best_val_rmse = 0.0;
    int stopped_epoch = 0;
    double train_seconds = 0.0;
};

// Adam mini-batch training with early stopping on validation average RMSE;
// the best-validation parameters are restored before returning. Log-variances
// are clamped after every step.
TrainResult train_model(VariantModel& model, const WindowDataset& pool,
                        const FoldSplit& fold, const TrainConfig& cfg);

// Per-step RMSE (scaled units) and trend accuracy over a sample set.
MetricsReport evaluate(VariantModel& model, const WindowDataset& samples,
                       Split split);

// Fraction of (sample, step) pairs whose predicted direction matches the
// label; `up_pred` and `labels` hold 0/1 entries.
struct TrendAccuracy {
    VectorXd per_step;
    double avg = 0.0;
};
TrendAccuracy trend_accuracy(const MatrixXd& up_pred, const MatrixXd& labels);

MetricsReport evaluate_persistence(const WindowDataset& samples, Split split);

struct FoldOutcome {
    int fold_id = 0;
    MetricsReport train, val, test;
    TrainResult training;
};

struct CVSummary {
    Variant variant = Variant::Carets1;
    EncoderKind encoder = EncoderKind::Cnn;
    TrainMode mode = TrainMode::MultiTask;
    int horizon = 0;
    std::vector<FoldOutcome> folds;
};

struct PreparedData {
    WindowDataset pool;
    WindowDataset test;
    std::vector<FoldSplit> folds;
};

// One independent training per fold (fresh init seeded seed + fold_id), each
// evaluated on train/val/test. Results are identical whether folds run
// sequentially or on `fold_workers` threads.
CVSummary cross_validate(Variant variant, const EncoderConfig& encoder_config,
                         const HeadConfig& head_config, const PreparedData& data,
                         const TrainConfig& cfg, int fold_workers = 1);

// Population mean and standard deviation.
struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};
MeanStd mean_std(const std::vector<double>& values);

void save_metrics(const MetricsReport& report, const std::string& path);
MetricsReport load_metrics(const std::string& path);

void save_training_log(const std::vector<EpochLogRow>& log, const std::string& path);

void save_cv_summary(const CVSummary& summary, const std::string& path);

}  // namespace carets
