#pragma once

#include "carets/common.hpp"

#include <string>

namespace carets {

// Parallel dual-stream models carry three task losses; the sequential design
// folds deviation estimation into output prediction and keeps two.
enum class Arch { A, B };

// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any log.
constexpr double kProbEps = 1e-7;

inline double clamp_prob(double p) {
    return std::min(std::max(p, kProbEps), 1.0 - kProbEps);
}

// Mean over steps of -[t log p + (1-t) log(1-p)].
double loss_bce(const VectorXd& p, const VectorXd& t);

// Mean squared error between predicted and true absolute deviations.
double loss_de_abs(const VectorXd& dev_hat, const VectorXd& dev);

// Direction-masked deviation loss: the head matching the ground-truth trend
// is penalized, the other receives nothing at that step.
double loss_de_directional(const VectorXd& up_hat, const VectorXd& down_hat,
                           const VectorXd& up, const VectorXd& down,
                           const VectorXd& t);

// Mean over steps of -[t_up log p_up + t_down log p_down] on (up, down) pairs.
double loss_ce_pair(const VectorXd& p_up, const VectorXd& p_down,
                    const VectorXd& t);

// Mean squared error between forecast and ground truth.
double loss_op(const VectorXd& y_hat, const VectorXd& y);

// Learnable log-variances governing the task weights. Only the active set
// for the architecture participates in the loss and the optimizer.
struct UncertaintyState {
    double log_var_ca = 0.0;
    double log_var_de = 0.0;
    double log_var_op = 0.0;

    static constexpr double kBound = 10.0;
};

// alpha_i = 1/(2 sigma_i^2) expressed through the log-variance.
double task_weight(double log_var);

// Projects every active log-variance into [-10, 10]; run after each
// optimizer step.
void clamp_state(UncertaintyState& state, Arch arch);
double clamp_log_var(double v);

struct LossBreakdown {
    double l_ca = 0.0;
    double l_de = 0.0;  // unused for Arch::B
    double l_op = 0.0;
    double weight_ca = 0.0;
    double weight_de = 0.0;
    double weight_op = 0.0;
    double reg_penalty = 0.0;
    double total = 0.0;
};

// total = sum_i [ 1/2 e^{-log var_i} L_i + 1/2 log var_i ]
//       + reg_coeff * sum_i (log var_i)^2,  i over the active task set.
// Throws TrainError naming the offending term if any active loss is
// non-finite.
LossBreakdown total_loss(double l_ca, double l_de, double l_op,
                         const UncertaintyState& state, Arch arch,
                         double reg_coeff);

// d total / d log_var for one active task.
double total_loss_grad_log_var(double loss, double log_var, double reg_coeff);

}  // namespace carets
