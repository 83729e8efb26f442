#pragma once

#include "carets/common.hpp"

#include <string>
#include <vector>

namespace carets::nn {

// Flat view over one parameter tensor and its gradient. The optimizer,
// checkpointing and the finite-difference harness all work through this.
struct ParamView {
    std::string name;
    double* value = nullptr;
    double* grad = nullptr;
    std::size_t size = 0;
};

// Uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void init_uniform(MatrixXd& m, long fan_in, Rng& rng);
void init_uniform(VectorXd& v, long fan_in, Rng& rng);

// Sequence tensors are stored batch-major: row b*seq + s of a (batch*seq, C)
// matrix holds sample b at position s.

class Dense {
public:
    Dense() = default;
    Dense(long in, long out, Rng& rng);

    MatrixXd forward(const MatrixXd& x);
    // Accumulates parameter grads, returns gradient w.r.t. the input.
    MatrixXd backward(const MatrixXd& gy);

    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    long in_dim() const { return W.rows(); }
    long out_dim() const { return W.cols(); }

    MatrixXd W, gW;
    VectorXd b, gb;

private:
    MatrixXd x_;
};

class Relu {
public:
    MatrixXd forward(const MatrixXd& x);
    MatrixXd backward(const MatrixXd& gy) const;

private:
    MatrixXd mask_;
};

// 1-D convolution over a (batch*seq, in_ch) sequence, zero padding.
// Output length per sample is seq + 2*padding - kernel + 1.
class Conv1d {
public:
    Conv1d() = default;
    Conv1d(long in_ch, long out_ch, int kernel, int padding, Rng& rng);

    MatrixXd forward(const MatrixXd& x, long batch, long seq);
    MatrixXd backward(const MatrixXd& gy);

    long out_len(long seq) const { return seq + 2 * padding_ - kernel_ + 1; }
    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    // W stacks the kernel taps: rows [j*in_ch, (j+1)*in_ch) hold tap j.
    MatrixXd W, gW;
    VectorXd b, gb;

private:
    long in_ch_ = 0, out_ch_ = 0;
    int kernel_ = 0, padding_ = 0;
    long batch_ = 0, seq_ = 0;
    MatrixXd x_;
};

// Single LSTM layer (gate order i, f, g, o). Produces the full hidden
// sequence so layers stack uniformly; backward is truncation-free BPTT.
class LstmLayer {
public:
    LstmLayer() = default;
    LstmLayer(long in, long hidden, Rng& rng);

    MatrixXd forward(const MatrixXd& x, long batch, long seq);
    MatrixXd backward(const MatrixXd& gh_seq);

    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    MatrixXd Wx, gWx;  // (in, 4h)
    MatrixXd Wh, gWh;  // (h, 4h)
    VectorXd b, gb;    // (4h)

private:
    long in_ = 0, hidden_ = 0, batch_ = 0, seq_ = 0;
    MatrixXd x_;
    std::vector<MatrixXd> gate_i_, gate_f_, gate_g_, gate_o_, c_, tanh_c_, h_;
};

class LayerNorm {
public:
    LayerNorm() = default;
    explicit LayerNorm(long dim);

    MatrixXd forward(const MatrixXd& x);
    MatrixXd backward(const MatrixXd& gy);

    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    VectorXd gamma, ggamma, beta, gbeta;

private:
    static constexpr double kEps = 1e-5;
    MatrixXd xhat_;
    VectorXd inv_std_;
};

class SelfAttention {
public:
    SelfAttention() = default;
    SelfAttention(long dim, int num_heads, Rng& rng);

    MatrixXd forward(const MatrixXd& x, long batch, long seq);
    MatrixXd backward(const MatrixXd& gy);

    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    Dense wq, wk, wv, wo;

private:
    long dim_ = 0, batch_ = 0, seq_ = 0;
    int heads_ = 0;
    MatrixXd q_, k_, v_, ctx_;
    std::vector<MatrixXd> attn_;  // per head, (batch*seq, seq)
};

// Post-norm encoder block: LN(x + attention(x)) then LN(x + feed-forward(x)).
class TransformerLayer {
public:
    TransformerLayer() = default;
    TransformerLayer(long dim, int num_heads, Rng& rng);

    MatrixXd forward(const MatrixXd& x, long batch, long seq);
    MatrixXd backward(const MatrixXd& gy);

    void collect(const std::string& prefix, std::vector<ParamView>& out);
    void zero_grads();

    SelfAttention attn;
    LayerNorm ln1, ln2;
    Dense ff1, ff2;
    Relu ff_act;
};

// Fixed sinusoidal positional table, (seq, dim).
MatrixXd sinusoidal_positions(long seq, long dim);

// Mean over positions: (batch*seq, C) -> (batch, C), and its adjoint.
MatrixXd mean_pool(const MatrixXd& x, long batch, long seq);
MatrixXd mean_pool_backward(const MatrixXd& gy, long batch, long seq);

class Adam {
public:
    Adam(std::vector<ParamView> params, double lr, double beta1 = 0.9,
         double beta2 = 0.999, double eps = 1e-8);

    void step();

    const std::vector<ParamView>& params() const { return params_; }

private:
    std::vector<ParamView> params_;
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// Stable logistic function.
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace carets::nn
