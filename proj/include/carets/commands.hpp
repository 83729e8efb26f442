#pragma once

#include "carets/config.hpp"

#include <string>
#include <vector>

namespace carets {

// Library-level command implementations behind the CLI. All artifacts land
// under config.resolved_output_dir():
//   prepared/            window stores, scaler, fold assignments
//   runs/<tag>/          per-run metrics, logs, checkpoints, summary
//   report/              comparison and step-curve tables

// Ingests the CSV, fits the scaler on the chronological training pool,
// builds windows per segment and the fold assignment. Idempotent for a
// fixed config.
void cmd_prepare(const ExperimentConfig& config);

// Trains one model on the given fold of the prepared dataset.
void cmd_train(const ExperimentConfig& config, int fold_id);

// Full cross-validation for the configured variant/encoder; returns the
// summary and writes per-fold artifacts plus summary.txt.
CVSummary cmd_cv(const ExperimentConfig& config);

// Emits comparison and per-step tables from completed run directories.
void cmd_report(const ExperimentConfig& config,
                const std::vector<std::string>& run_dirs);

// Run directory naming, e.g. "carets2-transformer" or
// "carets2-transformer-single".
std::string run_tag(const ExperimentConfig& config);

struct Prepared {
    PreparedData data;
    MinMaxScaler scaler;
};
Prepared load_prepared(const ExperimentConfig& config);

}  // namespace carets
