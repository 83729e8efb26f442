#pragma once

#include "carets/encoders.hpp"
#include "carets/heads.hpp"
#include "carets/losses.hpp"
#include "carets/windows.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carets {

enum class Variant {
    Carets1,
    Carets2,
    Carets3,
    Carets4,
    Baseline1,
    Baseline2,
    Baseline3,
};

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);
bool is_carets(Variant v);
Arch arch_of(Variant v);

// Single-task training keeps only the output-prediction objective; hard
// trend decisions are replaced by continuous surrogates so the trend stream
// stays trainable through the fused forecast.
enum class TrainMode { MultiTask, SingleTask };

TrainMode mode_from_string(const std::string& s);
std::string to_string(TrainMode m);

struct HeadConfig {
    int num_fc_layers = 2;
    int fc_hidden = 64;
    int horizon = 6;

    void validate() const;
};

// Outputs of one forward pass plus the intermediates backward() needs.
struct ForwardResult {
    MatrixXd y_hat;     // (B, K), always via the variant's fusion rule
    MatrixXd p_up;      // (B, K); sigmoid prob (scalar forms) or softmax p_up
    MatrixXd p_down;    // (B, K); pair forms only, exactly 1 - p_up
    MatrixXd d_hat;     // (B, K) in {+1, -1}; trend-stream variants only
    MatrixXd dev;       // (B, K); non-negative magnitude or signed deviation
    MatrixXd dev_up;    // (B, K)
    MatrixXd dev_down;  // (B, K)

    // caches
    MatrixXd h;       // encoder features
    MatrixXd logits;  // (B, K) or (B, 2K) interleaved (up, down) pairs
    MatrixXd tanh_z;  // continuous surrogate for the sign-magnitude fusion
    MatrixXd concat;  // sequential variant / baseline fusion input
};

class VariantModel {
public:
    VariantModel(Variant variant, const EncoderConfig& encoder_config,
                 const HeadConfig& head_config, TrainMode mode,
                 std::uint64_t init_seed);

    ForwardResult forward(const WindowDataset& batch);
    LossBreakdown compute_losses(const ForwardResult& r, const WindowDataset& batch,
                                 double reg_coeff) const;
    // Accumulates parameter and log-variance gradients for the given pass.
    void backward(const ForwardResult& r, const WindowDataset& batch,
                  const LossBreakdown& breakdown, double reg_coeff);

    // Upward-trend decisions in {0,1}: the classification stream where one
    // exists, sign(y_hat - x_n) with ties counted upward otherwise.
    MatrixXd predicted_up(const ForwardResult& r, const VectorXd& x_n) const;

    // Parameters the optimizer updates (includes active log-variances when
    // multi-task weighting is in effect).
    std::vector<nn::ParamView> trainable_params();
    std::vector<nn::ParamView> network_params();
    void zero_grads();
    void clamp_uncertainty() { clamp_state(uncertainty, arch); }

    // True when the multi-task objective with uncertainty weighting applies.
    bool multitask() const { return mode == TrainMode::MultiTask && is_carets(variant); }
    bool pair_form() const {
        return variant == Variant::Carets3 || variant == Variant::Carets4;
    }
    int horizon() const { return head_config.horizon; }

    void save(const std::string& path) const;
    static VariantModel load(const std::string& path);

    Variant variant;
    TrainMode mode;
    Arch arch;
    EncoderConfig encoder_config;
    HeadConfig head_config;

    UncertaintyState uncertainty;
    double g_log_var_ca = 0.0;
    double g_log_var_de = 0.0;
    double g_log_var_op = 0.0;

    std::unique_ptr<Encoder> encoder;
    FcStack trend_head;     // carets1/2: K logits; carets3/4: 2K pair logits
    FcStack dev_head;       // carets1
    FcStack dev_up_head;    // carets2/3
    FcStack dev_down_head;  // carets2/3
    FcStack reg_head;       // carets4: (d + 2K) -> K signed deviations
    FcStack direct_head;    // baseline1
    FcStack stream1, stream2;  // baseline2/3 dual streams
    nn::Dense fuse_fc;         // baseline2/3 single fusion layer

private:
    nn::Relu dev_act_, dev_up_act_, dev_down_act_;
};

VariantModel build_variant(Variant variant, const EncoderConfig& encoder_config,
                           const HeadConfig& head_config,
                           TrainMode mode = TrainMode::MultiTask,
                           std::uint64_t init_seed = 2025);

}  // namespace carets
