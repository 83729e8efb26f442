#pragma once

#include "carets/common.hpp"
#include "carets/nn.hpp"

#include <string>
#include <vector>

namespace carets {

// p = 1 / (1 + e^{-z})
double trend_sigmoid(double z);

// +1 for upward iff p >= 0.5, else -1.
int trend_decide(double p);

// Softmax over one (up, down) logit pair, max-subtracted for stability.
// Guarantees p_up + p_down == 1 exactly.
struct ProbPair {
    double up = 0.0;
    double down = 0.0;
};
ProbPair trend_softmax(double z_up, double z_down);

// y_hat = x_n + d_hat * dev_hat; deviations must be non-negative.
VectorXd fuse_sign_magnitude(double x_n, const VectorXd& d_hat,
                             const VectorXd& dev_hat);

// y_hat = x_n + dev_up if upward, x_n - dev_down otherwise.
VectorXd fuse_selected_direction(double x_n, const VectorXd& d_hat,
                                 const VectorXd& dev_up,
                                 const VectorXd& dev_down);

// y_hat = x_n + p_up * dev_up - (1 - p_up) * dev_down.
VectorXd fuse_soft_weighted(double x_n, const VectorXd& p_up,
                            const VectorXd& dev_up, const VectorXd& dev_down);

// num_fc_layers linear maps with ReLU between; all hidden layers share
// fc_hidden units.
class FcStack {
public:
    FcStack() = default;
    FcStack(long in, long hidden, long out, int num_fc_layers, Rng& rng);

    MatrixXd forward(const MatrixXd& x);
    MatrixXd backward(const MatrixXd& gy);

    void collect(const std::string& prefix, std::vector<nn::ParamView>& out);
    void zero_grads();

    std::vector<nn::Dense> layers;
    std::vector<nn::Relu> acts;
};

}  // namespace carets
