#include "carets/heads.hpp"

#include <cmath>

namespace carets {

double trend_sigmoid(double z) { return nn::sigmoid(z); }

int trend_decide(double p) { return p >= 0.5 ? 1 : -1; }

ProbPair trend_softmax(double z_up, double z_down) {
    const double m = std::max(z_up, z_down);
    const double eu = std::exp(z_up - m);
    const double ed = std::exp(z_down - m);
    ProbPair p;
    p.up = eu / (eu + ed);
    p.down = 1.0 - p.up;
    return p;
}

VectorXd fuse_sign_magnitude(double x_n, const VectorXd& d_hat,
                             const VectorXd& dev_hat) {
    if ((dev_hat.array() < 0.0).any())
        throw TrainError("fuse_sign_magnitude: negative deviation");
    return (x_n + (d_hat.array() * dev_hat.array())).matrix();
}

VectorXd fuse_selected_direction(double x_n, const VectorXd& d_hat,
                                 const VectorXd& dev_up,
                                 const VectorXd& dev_down) {
    VectorXd y(d_hat.size());
    for (long k = 0; k < d_hat.size(); ++k)
        y(k) = d_hat(k) > 0.0 ? x_n + dev_up(k) : x_n - dev_down(k);
    return y;
}

VectorXd fuse_soft_weighted(double x_n, const VectorXd& p_up,
                            const VectorXd& dev_up, const VectorXd& dev_down) {
    return (x_n + p_up.array() * dev_up.array() -
            (1.0 - p_up.array()) * dev_down.array())
        .matrix();
}

FcStack::FcStack(long in, long hidden, long out, int num_fc_layers, Rng& rng) {
    if (num_fc_layers < 1) throw ConfigError("head: num_fc_layers must be >= 1");
    layers.reserve(num_fc_layers);
    for (int l = 0; l < num_fc_layers; ++l) {
        const long li = l == 0 ? in : hidden;
        const long lo = l == num_fc_layers - 1 ? out : hidden;
        layers.emplace_back(li, lo, rng);
    }
    acts.resize(num_fc_layers - 1);
}

MatrixXd FcStack::forward(const MatrixXd& x) {
    MatrixXd cur = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        cur = layers[l].forward(cur);
        if (l + 1 < layers.size()) cur = acts[l].forward(cur);
    }
    return cur;
}

MatrixXd FcStack::backward(const MatrixXd& gy) {
    MatrixXd g = gy;
    for (long l = static_cast<long>(layers.size()) - 1; l >= 0; --l) {
        if (l + 1 < static_cast<long>(layers.size())) g = acts[l].backward(g);
        g = layers[l].backward(g);
    }
    return g;
}

void FcStack::collect(const std::string& prefix, std::vector<nn::ParamView>& out) {
    for (std::size_t l = 0; l < layers.size(); ++l)
        layers[l].collect(prefix + ".fc" + std::to_string(l), out);
}

void FcStack::zero_grads() {
    for (auto& l : layers) l.zero_grads();
}

}  // namespace carets
