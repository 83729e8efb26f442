#pragma once

#include "carets/model.hpp"
#include "carets/train.hpp"

#include <string>

namespace carets {

// Flat key-value experiment configuration. Unknown keys are errors so typos
// fail loudly. CLI flags override file values; CARETS_OUTPUT_ROOT (or the
// equivalent setter) re-roots a relative output_dir.
struct ExperimentConfig {
    std::string data_path;
    std::string output_dir = "out";
    std::string variant = "carets2";
    std::string encoder = "transformer";
    int n_lags = 12;
    int horizon = 6;
    int num_folds = 10;
    // Chronological boundary: explicit point count, or 0 to use the
    // reference ratio 6048/8784 of the series length.
    long train_points = 0;
    int max_epochs = 600;
    int patience = 50;
    double learning_rate = 0.001;
    int batch_size = 64;
    long seed = 2025;
    double reg_coeff = 0.01;
    bool single_task = false;
    bool include_persistence = false;
    bool native_units = false;
    int fold_workers = 1;
    int enc_num_layers = 2;
    int enc_hidden_dim = 64;
    int enc_kernel_size = 3;
    int enc_padding = 1;
    int enc_num_heads = 4;
    int head_num_fc_layers = 2;
    int head_fc_hidden = 64;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text,
                                       const std::string& origin);
    void set(const std::string& key, const std::string& value,
             const std::string& origin);
    std::string serialize() const;

    long resolved_train_points(long series_length) const;
    std::string resolved_output_dir() const;

    Variant variant_enum() const { return variant_from_string(variant); }
    EncoderConfig encoder_config() const;
    HeadConfig head_config() const;
    TrainConfig train_config() const;
};

}  // namespace carets
