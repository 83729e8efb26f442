#include "carets/losses.hpp"

#include <cmath>

namespace carets {

namespace {

void check_lengths(const VectorXd& a, const VectorXd& b, const char* what) {
    if (a.size() != b.size())
        throw TrainError(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
}

}  // namespace

double loss_bce(const VectorXd& p, const VectorXd& t) {
    check_lengths(p, t, "loss_bce");
    double sum = 0.0;
    for (long k = 0; k < p.size(); ++k) {
        const double pc = clamp_prob(p(k));
        sum += -(t(k) * std::log(pc) + (1.0 - t(k)) * std::log(1.0 - pc));
    }
    return sum / static_cast<double>(p.size());
}

double loss_de_abs(const VectorXd& dev_hat, const VectorXd& dev) {
    check_lengths(dev_hat, dev, "loss_de_abs");
    return (dev_hat - dev).squaredNorm() / static_cast<double>(dev.size());
}

double loss_de_directional(const VectorXd& up_hat, const VectorXd& down_hat,
                           const VectorXd& up, const VectorXd& down,
                           const VectorXd& t) {
    check_lengths(up_hat, up, "loss_de_directional");
    check_lengths(down_hat, down, "loss_de_directional");
    check_lengths(up_hat, t, "loss_de_directional");
    double sum = 0.0;
    for (long k = 0; k < t.size(); ++k) {
        const double eu = up_hat(k) - up(k);
        const double ed = down_hat(k) - down(k);
        sum += t(k) * eu * eu + (1.0 - t(k)) * ed * ed;
    }
    return sum / static_cast<double>(t.size());
}

double loss_ce_pair(const VectorXd& p_up, const VectorXd& p_down,
                    const VectorXd& t) {
    check_lengths(p_up, p_down, "loss_ce_pair");
    check_lengths(p_up, t, "loss_ce_pair");
    double sum = 0.0;
    for (long k = 0; k < t.size(); ++k) {
        sum += -(t(k) * std::log(clamp_prob(p_up(k))) +
                 (1.0 - t(k)) * std::log(clamp_prob(p_down(k))));
    }
    return sum / static_cast<double>(t.size());
}

double loss_op(const VectorXd& y_hat, const VectorXd& y) {
    check_lengths(y_hat, y, "loss_op");
    return (y_hat - y).squaredNorm() / static_cast<double>(y.size());
}

double task_weight(double log_var) { return 0.5 * std::exp(-log_var); }

double clamp_log_var(double v) {
    return std::min(std::max(v, -UncertaintyState::kBound),
                    UncertaintyState::kBound);
}

void clamp_state(UncertaintyState& state, Arch arch) {
    state.log_var_ca = clamp_log_var(state.log_var_ca);
    state.log_var_op = clamp_log_var(state.log_var_op);
    if (arch == Arch::A) state.log_var_de = clamp_log_var(state.log_var_de);
}

LossBreakdown total_loss(double l_ca, double l_de, double l_op,
                         const UncertaintyState& state, Arch arch,
                         double reg_coeff) {
    const bool with_de = arch == Arch::A;
    if (!std::isfinite(l_ca))
        throw TrainError("non-finite loss term l_ca");
    if (with_de && !std::isfinite(l_de))
        throw TrainError("non-finite loss term l_de");
    if (!std::isfinite(l_op))
        throw TrainError("non-finite loss term l_op");

    LossBreakdown out;
    out.l_ca = l_ca;
    out.l_de = with_de ? l_de : 0.0;
    out.l_op = l_op;
    out.weight_ca = task_weight(state.log_var_ca);
    out.weight_op = task_weight(state.log_var_op);
    out.weight_de = with_de ? task_weight(state.log_var_de) : 0.0;

    double total = out.weight_ca * l_ca + 0.5 * state.log_var_ca +
                   out.weight_op * l_op + 0.5 * state.log_var_op;
    double reg = state.log_var_ca * state.log_var_ca +
                 state.log_var_op * state.log_var_op;
    if (with_de) {
        total += out.weight_de * l_de + 0.5 * state.log_var_de;
        reg += state.log_var_de * state.log_var_de;
    }
    out.reg_penalty = reg_coeff * reg;
    out.total = total + out.reg_penalty;
    return out;
}

double total_loss_grad_log_var(double loss, double log_var, double reg_coeff) {
    return -0.5 * std::exp(-log_var) * loss + 0.5 + 2.0 * reg_coeff * log_var;
}

}  // namespace carets
