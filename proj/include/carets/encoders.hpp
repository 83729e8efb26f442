#pragma once

#include "carets/common.hpp"
#include "carets/nn.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carets {

enum class EncoderKind { Cnn, Lstm, Transformer };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string to_string(EncoderKind k);

struct EncoderConfig {
    EncoderKind kind = EncoderKind::Cnn;
    int num_layers = 2;
    int hidden_dim = 64;
    int kernel_size = 3;  // CNN only
    int padding = 1;      // CNN only
    int num_heads = 4;    // Transformer only

    void validate() const;
};

// Maps an input window, treated as a length-n single-channel sequence, to a
// fixed hidden_dim feature vector. The three encoder kinds are
// interchangeable behind this interface.
class Encoder {
public:
    virtual ~Encoder() = default;

    // x: (batch, n) windows. Returns h: (batch, hidden_dim).
    virtual MatrixXd forward(const MatrixXd& x) = 0;
    // gh: (batch, hidden_dim). Accumulates parameter gradients.
    virtual void backward(const MatrixXd& gh) = 0;

    virtual void collect(std::vector<nn::ParamView>& out) = 0;
    virtual void zero_grads() = 0;

    const EncoderConfig& config() const { return config_; }
    int feature_dim() const { return config_.hidden_dim; }

protected:
    explicit Encoder(const EncoderConfig& cfg) : config_(cfg) {}
    EncoderConfig config_;
    long batch_ = 0;
    long seq_ = 0;
};

// Stacked 1-D convolutions (first layer 1 -> d channels), ReLU between
// layers, then global average pooling over positions.
class CnnEncoder : public Encoder {
public:
    CnnEncoder(const EncoderConfig& cfg, Rng& rng);

    MatrixXd forward(const MatrixXd& x) override;
    void backward(const MatrixXd& gh) override;
    void collect(std::vector<nn::ParamView>& out) override;
    void zero_grads() override;

    std::vector<nn::Conv1d> convs;
    std::vector<nn::Relu> acts;
    std::vector<long> lengths;  // sequence length after each layer
};

// Stacked LSTM layers; the feature vector is the top layer's final hidden
// state.
class LstmEncoder : public Encoder {
public:
    LstmEncoder(const EncoderConfig& cfg, Rng& rng);

    MatrixXd forward(const MatrixXd& x) override;
    void backward(const MatrixXd& gh) override;
    void collect(std::vector<nn::ParamView>& out) override;
    void zero_grads() override;

    std::vector<nn::LstmLayer> layers;
};

// Per-position projection to hidden_dim, additive sinusoidal positional
// encodings, num_layers post-norm encoder blocks, then mean pooling.
class TransformerEncoder : public Encoder {
public:
    TransformerEncoder(const EncoderConfig& cfg, Rng& rng);

    MatrixXd forward(const MatrixXd& x) override;
    void backward(const MatrixXd& gh) override;
    void collect(std::vector<nn::ParamView>& out) override;
    void zero_grads() override;

    nn::Dense proj;
    MatrixXd positional;  // lazily sized to the input length
    std::vector<nn::TransformerLayer> layers;
    MatrixXd prepool;  // last pre-pooling activations, kept for backward
};

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg, Rng& rng);

}  // namespace carets
