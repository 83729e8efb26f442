#include "carets/nn.hpp"

#include <cmath>

namespace carets::nn {

void init_uniform(MatrixXd& m, long fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (long c = 0; c < m.cols(); ++c)
        for (long r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-bound, bound);
}

void init_uniform(VectorXd& v, long fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (long i = 0; i < v.size(); ++i) v(i) = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------- Dense

Dense::Dense(long in, long out, Rng& rng) {
    W.resize(in, out);
    b.resize(out);
    init_uniform(W, in, rng);
    init_uniform(b, in, rng);
    gW = MatrixXd::Zero(in, out);
    gb = VectorXd::Zero(out);
}

MatrixXd Dense::forward(const MatrixXd& x) {
    x_ = x;
    MatrixXd y = x * W;
    y.rowwise() += b.transpose();
    return y;
}

MatrixXd Dense::backward(const MatrixXd& gy) {
    gW.noalias() += x_.transpose() * gy;
    gb.noalias() += gy.colwise().sum().transpose();
    return gy * W.transpose();
}

void Dense::collect(const std::string& prefix, std::vector<ParamView>& out) {
    out.push_back({prefix + ".W", W.data(), gW.data(),
                   static_cast<std::size_t>(W.size())});
    out.push_back({prefix + ".b", b.data(), gb.data(),
                   static_cast<std::size_t>(b.size())});
}

void Dense::zero_grads() {
    gW.setZero();
    gb.setZero();
}

// ----------------------------------------------------------------- Relu

MatrixXd Relu::forward(const MatrixXd& x) {
    mask_ = (x.array() > 0.0).cast<double>().matrix();
    return x.cwiseProduct(mask_);
}

MatrixXd Relu::backward(const MatrixXd& gy) const { return gy.cwiseProduct(mask_); }

// --------------------------------------------------------------- Conv1d

Conv1d::Conv1d(long in_ch, long out_ch, int kernel, int padding, Rng& rng)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), padding_(padding) {
    W.resize(in_ch * kernel, out_ch);
    b.resize(out_ch);
    init_uniform(W, in_ch * kernel, rng);
    init_uniform(b, in_ch * kernel, rng);
    gW = MatrixXd::Zero(W.rows(), W.cols());
    gb = VectorXd::Zero(out_ch);
}

MatrixXd Conv1d::forward(const MatrixXd& x, long batch, long seq) {
    x_ = x;
    batch_ = batch;
    seq_ = seq;
    const long so = out_len(seq);
    if (so < 1) throw ConfigError("conv1d: kernel/padding leave no output positions");
    MatrixXd y = b.transpose().replicate(batch * so, 1);
    for (int j = 0; j < kernel_; ++j) {
        const MatrixXd Wj = W.middleRows(static_cast<long>(j) * in_ch_, in_ch_);
        for (long bi = 0; bi < batch; ++bi) {
            // Source position for output s is s + j - padding.
            const long lo_out = std::max<long>(0, padding_ - j);
            const long hi_out = std::min<long>(so - 1, seq - 1 + padding_ - j);
            if (lo_out > hi_out) continue;
            const long rows = hi_out - lo_out + 1;
            y.middleRows(bi * so + lo_out, rows).noalias() +=
                x.middleRows(bi * seq + lo_out + j - padding_, rows) * Wj;
        }
    }
    return y;
}

MatrixXd Conv1d::backward(const MatrixXd& gy) {
    const long so = out_len(seq_);
    MatrixXd gx = MatrixXd::Zero(batch_ * seq_, in_ch_);
    gb.noalias() += gy.colwise().sum().transpose();
    for (int j = 0; j < kernel_; ++j) {
        const MatrixXd Wj = W.middleRows(static_cast<long>(j) * in_ch_, in_ch_);
        MatrixXd gWj = MatrixXd::Zero(in_ch_, out_ch_);
        for (long bi = 0; bi < batch_; ++bi) {
            const long lo_out = std::max<long>(0, padding_ - j);
            const long hi_out = std::min<long>(so - 1, seq_ - 1 + padding_ - j);
            if (lo_out > hi_out) continue;
            const long rows = hi_out - lo_out + 1;
            const auto gy_block = gy.middleRows(bi * so + lo_out, rows);
            gWj.noalias() +=
                x_.middleRows(bi * seq_ + lo_out + j - padding_, rows).transpose() *
                gy_block;
            gx.middleRows(bi * seq_ + lo_out + j - padding_, rows).noalias() +=
                gy_block * Wj.transpose();
        }
        gW.middleRows(static_cast<long>(j) * in_ch_, in_ch_) += gWj;
    }
    return gx;
}

void Conv1d::collect(const std::string& prefix, std::vector<ParamView>& out) {
    out.push_back({prefix + ".W", W.data(), gW.data(),
                   static_cast<std::size_t>(W.size())});
    out.push_back({prefix + ".b", b.data(), gb.data(),
                   static_cast<std::size_t>(b.size())});
}

void Conv1d::zero_grads() {
    gW.setZero();
    gb.setZero();
}

// ------------------------------------------------------------- LstmLayer

LstmLayer::LstmLayer(long in, long hidden, Rng& rng) : in_(in), hidden_(hidden) {
    Wx.resize(in, 4 * hidden);
    Wh.resize(hidden, 4 * hidden);
    b.resize(4 * hidden);
    init_uniform(Wx, in, rng);
    init_uniform(Wh, hidden, rng);
    init_uniform(b, hidden, rng);
    gWx = MatrixXd::Zero(Wx.rows(), Wx.cols());
    gWh = MatrixXd::Zero(Wh.rows(), Wh.cols());
    gb = VectorXd::Zero(b.size());
}

MatrixXd LstmLayer::forward(const MatrixXd& x, long batch, long seq) {
    x_ = x;
    batch_ = batch;
    seq_ = seq;
    const long h = hidden_;
    gate_i_.assign(seq, {});
    gate_f_.assign(seq, {});
    gate_g_.assign(seq, {});
    gate_o_.assign(seq, {});
    c_.assign(seq, {});
    tanh_c_.assign(seq, {});
    h_.assign(seq, {});

    MatrixXd out(batch * seq, h);
    MatrixXd h_prev = MatrixXd::Zero(batch, h);
    MatrixXd c_prev = MatrixXd::Zero(batch, h);
    MatrixXd x_s(batch, in_);
    for (long s = 0; s < seq; ++s) {
        for (long bi = 0; bi < batch; ++bi) x_s.row(bi) = x.row(bi * seq + s);
        MatrixXd a = x_s * Wx + h_prev * Wh;
        a.rowwise() += b.transpose();
        gate_i_[s] = a.leftCols(h).unaryExpr([](double z) { return sigmoid(z); });
        gate_f_[s] = a.middleCols(h, h).unaryExpr([](double z) { return sigmoid(z); });
        gate_g_[s] = a.middleCols(2 * h, h).array().tanh().matrix();
        gate_o_[s] = a.rightCols(h).unaryExpr([](double z) { return sigmoid(z); });
        c_[s] = gate_f_[s].cwiseProduct(c_prev) + gate_i_[s].cwiseProduct(gate_g_[s]);
        tanh_c_[s] = c_[s].array().tanh().matrix();
        h_[s] = gate_o_[s].cwiseProduct(tanh_c_[s]);
        for (long bi = 0; bi < batch; ++bi) out.row(bi * seq + s) = h_[s].row(bi);
        h_prev = h_[s];
        c_prev = c_[s];
    }
    return out;
}

MatrixXd LstmLayer::backward(const MatrixXd& gh_seq) {
    const long h = hidden_;
    MatrixXd gx = MatrixXd::Zero(batch_ * seq_, in_);
    MatrixXd gh_next = MatrixXd::Zero(batch_, h);  // from step s+1
    MatrixXd gc_next = MatrixXd::Zero(batch_, h);
    MatrixXd gh_s(batch_, h), x_s(batch_, in_);
    for (long s = seq_ - 1; s >= 0; --s) {
        for (long bi = 0; bi < batch_; ++bi)
            gh_s.row(bi) = gh_seq.row(bi * seq_ + s);
        gh_s += gh_next;

        const MatrixXd& i = gate_i_[s];
        const MatrixXd& f = gate_f_[s];
        const MatrixXd& g = gate_g_[s];
        const MatrixXd& o = gate_o_[s];
        const MatrixXd& tc = tanh_c_[s];
        const MatrixXd c_prev =
            s > 0 ? c_[s - 1] : MatrixXd::Zero(batch_, h).eval();
        const MatrixXd h_prev =
            s > 0 ? h_[s - 1] : MatrixXd::Zero(batch_, h).eval();

        MatrixXd go = gh_s.cwiseProduct(tc);
        MatrixXd gc = gc_next +
                      gh_s.cwiseProduct(o).cwiseProduct(
                          (1.0 - tc.array().square()).matrix());
        MatrixXd gi = gc.cwiseProduct(g);
        MatrixXd gf = gc.cwiseProduct(c_prev);
        MatrixXd gg = gc.cwiseProduct(i);
        gc_next = gc.cwiseProduct(f);

        // Through the gate nonlinearities.
        MatrixXd ga(batch_, 4 * h);
        ga.leftCols(h) = gi.cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
        ga.middleCols(h, h) =
            gf.cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
        ga.middleCols(2 * h, h) = gg.cwiseProduct((1.0 - g.array().square()).matrix());
        ga.rightCols(h) = go.cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());

        for (long bi = 0; bi < batch_; ++bi) x_s.row(bi) = x_.row(bi * seq_ + s);
        gWx.noalias() += x_s.transpose() * ga;
        gWh.noalias() += h_prev.transpose() * ga;
        gb.noalias() += ga.colwise().sum().transpose();
        gh_next = ga * Wh.transpose();
        const MatrixXd gx_s = ga * Wx.transpose();
        for (long bi = 0; bi < batch_; ++bi) gx.row(bi * seq_ + s) = gx_s.row(bi);
    }
    return gx;
}

void LstmLayer::collect(const std::string& prefix, std::vector<ParamView>& out) {
    out.push_back({prefix + ".Wx", Wx.data(), gWx.data(),
                   static_cast<std::size_t>(Wx.size())});
    out.push_back({prefix + ".Wh", Wh.data(), gWh.data(),
                   static_cast<std::size_t>(Wh.size())});
    out.push_back({prefix + ".b", b.data(), gb.data(),
                   static_cast<std::size_t>(b.size())});
}

void LstmLayer::zero_grads() {
    gWx.setZero();
    gWh.setZero();
    gb.setZero();
}

// ------------------------------------------------------------- LayerNorm

LayerNorm::LayerNorm(long dim) {
    gamma = VectorXd::Ones(dim);
    beta = VectorXd::Zero(dim);
    ggamma = VectorXd::Zero(dim);
    gbeta = VectorXd::Zero(dim);
}

MatrixXd LayerNorm::forward(const MatrixXd& x) {
    const long d = x.cols();
    xhat_.resize(x.rows(), d);
    inv_std_.resize(x.rows());
    for (long r = 0; r < x.rows(); ++r) {
        const double mu = x.row(r).mean();
        const double var = (x.row(r).array() - mu).square().mean();
        const double inv = 1.0 / std::sqrt(var + kEps);
        inv_std_(r) = inv;
        xhat_.row(r) = ((x.row(r).array() - mu) * inv).matrix();
    }
    MatrixXd y = (xhat_.array().rowwise() * gamma.transpose().array()).matrix();
    y.rowwise() += beta.transpose();
    return y;
}

MatrixXd LayerNorm::backward(const MatrixXd& gy) {
    const long d = gy.cols();
    ggamma.noalias() += gy.cwiseProduct(xhat_).colwise().sum().transpose();
    gbeta.noalias() += gy.colwise().sum().transpose();
    MatrixXd gxhat = (gy.array().rowwise() * gamma.transpose().array()).matrix();
    MatrixXd gx(gy.rows(), d);
    for (long r = 0; r < gy.rows(); ++r) {
        const double sum_g = gxhat.row(r).sum();
        const double sum_gx = gxhat.row(r).dot(xhat_.row(r));
        gx.row(r) = ((inv_std_(r) / static_cast<double>(d)) *
                     (static_cast<double>(d) * gxhat.row(r).array() - sum_g -
                      xhat_.row(r).array() * sum_gx))
                        .matrix();
    }
    return gx;
}

void LayerNorm::collect(const std::string& prefix, std::vector<ParamView>& out) {
    out.push_back({prefix + ".gamma", gamma.data(), ggamma.data(),
                   static_cast<std::size_t>(gamma.size())});
    out.push_back({prefix + ".beta", beta.data(), gbeta.data(),
                   static_cast<std::size_t>(beta.size())});
}

void LayerNorm::zero_grads() {
    ggamma.setZero();
    gbeta.setZero();
}

// --------------------------------------------------------- SelfAttention

SelfAttention::SelfAttention(long dim, int num_heads, Rng& rng)
    : wq(dim, dim, rng), wk(dim, dim, rng), wv(dim, dim, rng), wo(dim, dim, rng),
      dim_(dim), heads_(num_heads) {
    if (dim % num_heads != 0)
        throw ConfigError("attention: dim must be divisible by num_heads");
}

MatrixXd SelfAttention::forward(const MatrixXd& x, long batch, long seq) {
    batch_ = batch;
    seq_ = seq;
    q_ = wq.forward(x);
    k_ = wk.forward(x);
    v_ = wv.forward(x);
    const long dh = dim_ / heads_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    attn_.assign(heads_, MatrixXd(batch * seq, seq));
    ctx_.resize(batch * seq, dim_);
    for (int hd = 0; hd < heads_; ++hd) {
        for (long bi = 0; bi < batch; ++bi) {
            const auto qb = q_.block(bi * seq, hd * dh, seq, dh);
            const auto kb = k_.block(bi * seq, hd * dh, seq, dh);
            const auto vb = v_.block(bi * seq, hd * dh, seq, dh);
            MatrixXd scores = qb * kb.transpose() * scale;
            for (long r = 0; r < seq; ++r) {
                const double m = scores.row(r).maxCoeff();
                scores.row(r) = (scores.row(r).array() - m).exp().matrix();
                scores.row(r) /= scores.row(r).sum();
            }
            attn_[hd].middleRows(bi * seq, seq) = scores;
            ctx_.block(bi * seq, hd * dh, seq, dh).noalias() = scores * vb;
        }
    }
    return wo.forward(ctx_);
}

MatrixXd SelfAttention::backward(const MatrixXd& gy) {
    const long dh = dim_ / heads_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    MatrixXd gctx = wo.backward(gy);
    MatrixXd gq(batch_ * seq_, dim_), gk(batch_ * seq_, dim_),
        gv(batch_ * seq_, dim_);
    for (int hd = 0; hd < heads_; ++hd) {
        for (long bi = 0; bi < batch_; ++bi) {
            const auto qb = q_.block(bi * seq_, hd * dh, seq_, dh);
            const auto kb = k_.block(bi * seq_, hd * dh, seq_, dh);
            const auto vb = v_.block(bi * seq_, hd * dh, seq_, dh);
            const auto ab = attn_[hd].middleRows(bi * seq_, seq_);
            const auto gctx_b = gctx.block(bi * seq_, hd * dh, seq_, dh);

            MatrixXd ga = gctx_b * vb.transpose();
            gv.block(bi * seq_, hd * dh, seq_, dh).noalias() =
                ab.transpose() * gctx_b;
            // Softmax rows: gs = (ga - rowsum(ga .* a)) .* a
            MatrixXd gs(seq_, seq_);
            for (long r = 0; r < seq_; ++r) {
                const double dot = ga.row(r).dot(ab.row(r));
                gs.row(r) = ((ga.row(r).array() - dot) * ab.row(r).array()).matrix();
            }
            gs *= scale;
            gq.block(bi * seq_, hd * dh, seq_, dh).noalias() = gs * kb;
            gk.block(bi * seq_, hd * dh, seq_, dh).noalias() = gs.transpose() * qb;
        }
    }
    MatrixXd gx = wq.backward(gq);
    gx += wk.backward(gk);
    gx += wv.backward(gv);
    return gx;
}

void SelfAttention::collect(const std::string& prefix, std::vector<ParamView>& out) {
    wq.collect(prefix + ".wq", out);
    wk.collect(prefix + ".wk", out);
    wv.collect(prefix + ".wv", out);
    wo.collect(prefix + ".wo", out);
}

void SelfAttention::zero_grads() {
    wq.zero_grads();
    wk.zero_grads();
    wv.zero_grads();
    wo.zero_grads();
}

// ------------------------------------------------------ TransformerLayer

TransformerLayer::TransformerLayer(long dim, int num_heads, Rng& rng)
    : attn(dim, num_heads, rng), ln1(dim), ln2(dim), ff1(dim, dim, rng),
      ff2(dim, dim, rng) {}

MatrixXd TransformerLayer::forward(const MatrixXd& x, long batch, long seq) {
    const MatrixXd a = attn.forward(x, batch, seq);
    const MatrixXd x1 = ln1.forward(x + a);
    const MatrixXd f = ff2.forward(ff_act.forward(ff1.forward(x1)));
    return ln2.forward(x1 + f);
}

MatrixXd TransformerLayer::backward(const MatrixXd& gy) {
    const MatrixXd g2 = ln2.backward(gy);
    const MatrixXd gf = ff1.backward(ff_act.backward(ff2.backward(g2)));
    const MatrixXd gx1 = ln1.backward(g2 + gf);
    const MatrixXd ga = attn.backward(gx1);
    return gx1 + ga;
}

void TransformerLayer::collect(const std::string& prefix,
                               std::vector<ParamView>& out) {
    attn.collect(prefix + ".attn", out);
    ln1.collect(prefix + ".ln1", out);
    ff1.collect(prefix + ".ff1", out);
    ff2.collect(prefix + ".ff2", out);
    ln2.collect(prefix + ".ln2", out);
}

void TransformerLayer::zero_grads() {
    attn.zero_grads();
    ln1.zero_grads();
    ln2.zero_grads();
    ff1.zero_grads();
    ff2.zero_grads();
}

// ----------------------------------------------------------- free helpers

MatrixXd sinusoidal_positions(long seq, long dim) {
    MatrixXd p(seq, dim);
    for (long s = 0; s < seq; ++s) {
        for (long i = 0; i < dim; i += 2) {
            const double rate =
                std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
            p(s, i) = std::sin(static_cast<double>(s) * rate);
            if (i + 1 < dim) p(s, i + 1) = std::cos(static_cast<double>(s) * rate);
        }
    }
    return p;
}

MatrixXd mean_pool(const MatrixXd& x, long batch, long seq) {
    MatrixXd y = MatrixXd::Zero(batch, x.cols());
    for (long bi = 0; bi < batch; ++bi)
        y.row(bi) = x.middleRows(bi * seq, seq).colwise().mean();
    return y;
}

MatrixXd mean_pool_backward(const MatrixXd& gy, long batch, long seq) {
    MatrixXd gx(batch * seq, gy.cols());
    const double inv = 1.0 / static_cast<double>(seq);
    for (long bi = 0; bi < batch; ++bi)
        for (long s = 0; s < seq; ++s) gx.row(bi * seq + s) = gy.row(bi) * inv;
    return gx;
}

// ------------------------------------------------------------------ Adam

Adam::Adam(std::vector<ParamView> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        m_[i].assign(params_[i].size, 0.0);
        v_[i].assign(params_[i].size, 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        for (std::size_t j = 0; j < p.size; ++j) {
            const double g = p.grad[j];
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
            const double mhat = m_[i][j] / bc1;
            const double vhat = v_[i][j] / bc2;
            p.value[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace carets::nn
