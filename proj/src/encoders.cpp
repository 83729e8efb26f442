#include "carets/encoders.hpp"

namespace carets {

EncoderKind encoder_kind_from_string(const std::string& s) {
    if (s == "cnn") return EncoderKind::Cnn;
    if (s == "lstm") return EncoderKind::Lstm;
    if (s == "transformer") return EncoderKind::Transformer;
    throw ConfigError("unknown encoder '" + s + "' (expected cnn|lstm|transformer)");
}

std::string to_string(EncoderKind k) {
    switch (k) {
        case EncoderKind::Cnn: return "cnn";
        case EncoderKind::Lstm: return "lstm";
        case EncoderKind::Transformer: return "transformer";
    }
    return "?";
}

void EncoderConfig::validate() const {
    if (num_layers < 1) throw ConfigError("encoder: num_layers must be >= 1");
    if (hidden_dim < 1) throw ConfigError("encoder: hidden_dim must be >= 1");
    if (kind == EncoderKind::Cnn && kernel_size < 1)
        throw ConfigError("encoder: kernel_size must be >= 1");
    if (kind == EncoderKind::Cnn && padding < 0)
        throw ConfigError("encoder: padding must be >= 0");
    if (kind == EncoderKind::Transformer && hidden_dim % num_heads != 0)
        throw ConfigError("encoder: hidden_dim must be divisible by num_heads");
}

// ------------------------------------------------------------ CnnEncoder

CnnEncoder::CnnEncoder(const EncoderConfig& cfg, Rng& rng) : Encoder(cfg) {
    cfg.validate();
    if (cfg.kind != EncoderKind::Cnn)
        throw ConfigError("CnnEncoder built with non-CNN config");
    convs.reserve(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
        const long in_ch = l == 0 ? 1 : cfg.hidden_dim;
        convs.emplace_back(in_ch, cfg.hidden_dim, cfg.kernel_size, cfg.padding, rng);
    }
    acts.resize(cfg.num_layers > 0 ? cfg.num_layers - 1 : 0);
}

MatrixXd CnnEncoder::forward(const MatrixXd& x) {
    batch_ = x.rows();
    seq_ = x.cols();
    // (batch, n) window -> (batch*n, 1) single-channel sequence
    MatrixXd cur(batch_ * seq_, 1);
    for (long b = 0; b < batch_; ++b)
        for (long s = 0; s < seq_; ++s) cur(b * seq_ + s, 0) = x(b, s);

    lengths.assign(1, seq_);
    for (std::size_t l = 0; l < convs.size(); ++l) {
        cur = convs[l].forward(cur, batch_, lengths.back());
        lengths.push_back(convs[l].out_len(lengths.back()));
        if (l + 1 < convs.size()) cur = acts[l].forward(cur);
    }
    return nn::mean_pool(cur, batch_, lengths.back());
}

void CnnEncoder::backward(const MatrixXd& gh) {
    MatrixXd g = nn::mean_pool_backward(gh, batch_, lengths.back());
    for (long l = static_cast<long>(convs.size()) - 1; l >= 0; --l) {
        if (l + 1 < static_cast<long>(convs.size())) g = acts[l].backward(g);
        g = convs[l].backward(g);
    }
}

void CnnEncoder::collect(std::vector<nn::ParamView>& out) {
    for (std::size_t l = 0; l < convs.size(); ++l)
        convs[l].collect("encoder.conv" + std::to_string(l), out);
}

void CnnEncoder::zero_grads() {
    for (auto& c : convs) c.zero_grads();
}

// ----------------------------------------------------------- LstmEncoder

LstmEncoder::LstmEncoder(const EncoderConfig& cfg, Rng& rng) : Encoder(cfg) {
    cfg.validate();
    if (cfg.kind != EncoderKind::Lstm)
        throw ConfigError("LstmEncoder built with non-LSTM config");
    layers.reserve(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
        const long in = l == 0 ? 1 : cfg.hidden_dim;
        layers.emplace_back(in, cfg.hidden_dim, rng);
    }
}

MatrixXd LstmEncoder::forward(const MatrixXd& x) {
    batch_ = x.rows();
    seq_ = x.cols();
    MatrixXd cur(batch_ * seq_, 1);
    for (long b = 0; b < batch_; ++b)
        for (long s = 0; s < seq_; ++s) cur(b * seq_ + s, 0) = x(b, s);
    for (auto& layer : layers) cur = layer.forward(cur, batch_, seq_);
    // Final hidden state of the top layer.
    MatrixXd h(batch_, config_.hidden_dim);
    for (long b = 0; b < batch_; ++b) h.row(b) = cur.row(b * seq_ + seq_ - 1);
    return h;
}

void LstmEncoder::backward(const MatrixXd& gh) {
    MatrixXd g = MatrixXd::Zero(batch_ * seq_, config_.hidden_dim);
    for (long b = 0; b < batch_; ++b) g.row(b * seq_ + seq_ - 1) = gh.row(b);
    for (long l = static_cast<long>(layers.size()) - 1; l >= 0; --l)
        g = layers[l].backward(g);
}

void LstmEncoder::collect(std::vector<nn::ParamView>& out) {
    for (std::size_t l = 0; l < layers.size(); ++l)
        layers[l].collect("encoder.lstm" + std::to_string(l), out);
}

void LstmEncoder::zero_grads() {
    for (auto& l : layers) l.zero_grads();
}

// ---------------------------------------------------- TransformerEncoder

TransformerEncoder::TransformerEncoder(const EncoderConfig& cfg, Rng& rng)
    : Encoder(cfg) {
    cfg.validate();
    if (cfg.kind != EncoderKind::Transformer)
        throw ConfigError("TransformerEncoder built with non-Transformer config");
    proj = nn::Dense(1, cfg.hidden_dim, rng);
    layers.reserve(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l)
        layers.emplace_back(cfg.hidden_dim, cfg.num_heads, rng);
}

MatrixXd TransformerEncoder::forward(const MatrixXd& x) {
    batch_ = x.rows();
    seq_ = x.cols();
    MatrixXd cur(batch_ * seq_, 1);
    for (long b = 0; b < batch_; ++b)
        for (long s = 0; s < seq_; ++s) cur(b * seq_ + s, 0) = x(b, s);
    cur = proj.forward(cur);
    if (positional.rows() != seq_ || positional.cols() != config_.hidden_dim)
        positional = nn::sinusoidal_positions(seq_, config_.hidden_dim);
    for (long b = 0; b < batch_; ++b) cur.middleRows(b * seq_, seq_) += positional;
    for (auto& layer : layers) cur = layer.forward(cur, batch_, seq_);
    prepool = cur;
    return nn::mean_pool(cur, batch_, seq_);
}

void TransformerEncoder::backward(const MatrixXd& gh) {
    MatrixXd g = nn::mean_pool_backward(gh, batch_, seq_);
    for (long l = static_cast<long>(layers.size()) - 1; l >= 0; --l)
        g = layers[l].backward(g);
    proj.backward(g);
}

void TransformerEncoder::collect(std::vector<nn::ParamView>& out) {
    proj.collect("encoder.proj", out);
    for (std::size_t l = 0; l < layers.size(); ++l)
        layers[l].collect("encoder.block" + std::to_string(l), out);
}

void TransformerEncoder::zero_grads() {
    proj.zero_grads();
    for (auto& l : layers) l.zero_grads();
}

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& cfg, Rng& rng) {
    switch (cfg.kind) {
        case EncoderKind::Cnn: return std::make_unique<CnnEncoder>(cfg, rng);
        case EncoderKind::Lstm: return std::make_unique<LstmEncoder>(cfg, rng);
        case EncoderKind::Transformer:
            return std::make_unique<TransformerEncoder>(cfg, rng);
    }
    throw ConfigError("unknown encoder kind");
}

}  // namespace carets
