#include "carets/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace carets {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::Map<const VectorXd> flat(const MatrixXd& m) {
    return {m.data(), m.size()};
}

// d/dp of the clamped cross-entropy terms is zero once a probability is
// saturated past the clamp; the masks keep backward consistent with forward.
inline bool in_clamp_range(double p) {
    return p > kProbEps && p < 1.0 - kProbEps;
}

}  // namespace

Variant variant_from_string(const std::string& s) {
    if (s == "carets1") return Variant::Carets1;
    if (s == "carets2") return Variant::Carets2;
    if (s == "carets3") return Variant::Carets3;
    if (s == "carets4") return Variant::Carets4;
    if (s == "baseline1") return Variant::Baseline1;
    if (s == "baseline2") return Variant::Baseline2;
    if (s == "baseline3") return Variant::Baseline3;
    throw ConfigError("unknown variant '" + s +
                      "' (expected carets1..4 or baseline1..3)");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Carets1: return "carets1";
        case Variant::Carets2: return "carets2";
        case Variant::Carets3: return "carets3";
        case Variant::Carets4: return "carets4";
        case Variant::Baseline1: return "baseline1";
        case Variant::Baseline2: return "baseline2";
        case Variant::Baseline3: return "baseline3";
    }
    return "?";
}

bool is_carets(Variant v) {
    return v == Variant::Carets1 || v == Variant::Carets2 ||
           v == Variant::Carets3 || v == Variant::Carets4;
}

Arch arch_of(Variant v) { return v == Variant::Carets4 ? Arch::B : Arch::A; }

TrainMode mode_from_string(const std::string& s) {
    if (s == "multi_task") return TrainMode::MultiTask;
    if (s == "single_task") return TrainMode::SingleTask;
    throw ConfigError("unknown mode '" + s + "'");
}

std::string to_string(TrainMode m) {
    return m == TrainMode::MultiTask ? "multi_task" : "single_task";
}

void HeadConfig::validate() const {
    if (num_fc_layers < 1) throw ConfigError("head: num_fc_layers must be >= 1");
    if (fc_hidden < 1) throw ConfigError("head: fc_hidden must be >= 1");
    if (horizon < 1) throw ConfigError("head: horizon must be >= 1");
}

VariantModel::VariantModel(Variant variant_, const EncoderConfig& encoder_config_,
                           const HeadConfig& head_config_, TrainMode mode_,
                           std::uint64_t init_seed)
    : variant(variant_), mode(mode_), arch(arch_of(variant_)),
      encoder_config(encoder_config_), head_config(head_config_) {
    encoder_config.validate();
    head_config.validate();
    Rng rng(init_seed);
    encoder = make_encoder(encoder_config, rng);
    const long d = encoder_config.hidden_dim;
    const long k = head_config.horizon;
    const long hid = head_config.fc_hidden;
    const int nl = head_config.num_fc_layers;
    switch (variant) {
        case Variant::Carets1:
            trend_head = FcStack(d, hid, k, nl, rng);
            dev_head = FcStack(d, hid, k, nl, rng);
            break;
        case Variant::Carets2:
            trend_head = FcStack(d, hid, k, nl, rng);
            dev_up_head = FcStack(d, hid, k, nl, rng);
            dev_down_head = FcStack(d, hid, k, nl, rng);
            break;
        case Variant::Carets3:
            trend_head = FcStack(d, hid, 2 * k, nl, rng);
            dev_up_head = FcStack(d, hid, k, nl, rng);
            dev_down_head = FcStack(d, hid, k, nl, rng);
            break;
        case Variant::Carets4:
            trend_head = FcStack(d, hid, 2 * k, nl, rng);
            reg_head = FcStack(d + 2 * k, hid, k, nl, rng);
            break;
        case Variant::Baseline1:
            direct_head = FcStack(d, hid, k, nl, rng);
            break;
        case Variant::Baseline2:
        case Variant::Baseline3:
            stream1 = FcStack(d, hid, k, nl, rng);
            stream2 = FcStack(d, hid, k, nl, rng);
            fuse_fc = nn::Dense(2 * k, k, rng);
            break;
    }
}

ForwardResult VariantModel::forward(const WindowDataset& batch) {
    const long B = batch.size();
    const long K = head_config.horizon;
    if (batch.horizon() != K)
        throw TrainError("model horizon " + std::to_string(K) +
                         " does not match batch horizon " +
                         std::to_string(batch.horizon()));
    ForwardResult r;
    r.h = encoder->forward(batch.features);
    const bool continuous = mode == TrainMode::SingleTask;

    switch (variant) {
        case Variant::Carets1: {
            r.logits = trend_head.forward(r.h);
            r.p_up = r.logits.unaryExpr([](double z) { return trend_sigmoid(z); });
            r.d_hat = r.p_up.unaryExpr(
                [](double p) { return static_cast<double>(trend_decide(p)); });
            r.dev = dev_act_.forward(dev_head.forward(r.h));
            if (continuous) {
                r.tanh_z = r.logits.array().tanh().matrix();
                r.y_hat = r.tanh_z.cwiseProduct(r.dev);
            } else {
                r.y_hat = r.d_hat.cwiseProduct(r.dev);
            }
            r.y_hat.colwise() += batch.x_n;
            break;
        }
        case Variant::Carets2: {
            r.logits = trend_head.forward(r.h);
            r.p_up = r.logits.unaryExpr([](double z) { return trend_sigmoid(z); });
            r.d_hat = r.p_up.unaryExpr(
                [](double p) { return static_cast<double>(trend_decide(p)); });
            r.dev_up = dev_up_act_.forward(dev_up_head.forward(r.h));
            r.dev_down = dev_down_act_.forward(dev_down_head.forward(r.h));
            r.y_hat.resize(B, K);
            if (continuous) {
                r.y_hat = r.p_up.cwiseProduct(r.dev_up) -
                          (1.0 - r.p_up.array()).matrix().cwiseProduct(r.dev_down);
            } else {
                for (long b = 0; b < B; ++b)
                    for (long k = 0; k < K; ++k)
                        r.y_hat(b, k) = r.d_hat(b, k) > 0.0 ? r.dev_up(b, k)
                                                            : -r.dev_down(b, k);
            }
            r.y_hat.colwise() += batch.x_n;
            break;
        }
        case Variant::Carets3:
        case Variant::Carets4: {
            r.logits = trend_head.forward(r.h);
            r.p_up.resize(B, K);
            r.p_down.resize(B, K);
            for (long b = 0; b < B; ++b) {
                for (long k = 0; k < K; ++k) {
                    const ProbPair p =
                        trend_softmax(r.logits(b, 2 * k), r.logits(b, 2 * k + 1));
                    r.p_up(b, k) = p.up;
                    r.p_down(b, k) = p.down;
                }
            }
            r.d_hat = (r.p_up.array() >= r.p_down.array())
                          .select(MatrixXd::Constant(B, K, 1.0),
                                  MatrixXd::Constant(B, K, -1.0));
            if (variant == Variant::Carets3) {
                r.dev_up = dev_up_act_.forward(dev_up_head.forward(r.h));
                r.dev_down = dev_down_act_.forward(dev_down_head.forward(r.h));
                r.y_hat = r.p_up.cwiseProduct(r.dev_up) -
                          r.p_down.cwiseProduct(r.dev_down);
                r.y_hat.colwise() += batch.x_n;
            } else {
                // Sequential design: trend probabilities condition the
                // regression stream through feature concatenation.
                r.concat.resize(B, r.h.cols() + 2 * K);
                r.concat.leftCols(r.h.cols()) = r.h;
                for (long k = 0; k < K; ++k) {
                    r.concat.col(r.h.cols() + 2 * k) = r.p_up.col(k);
                    r.concat.col(r.h.cols() + 2 * k + 1) = r.p_down.col(k);
                }
                r.dev = reg_head.forward(r.concat);
                r.y_hat = r.dev;
                r.y_hat.colwise() += batch.x_n;
            }
            break;
        }
        case Variant::Baseline1: {
            r.y_hat = direct_head.forward(r.h);
            break;
        }
        case Variant::Baseline2:
        case Variant::Baseline3: {
            const MatrixXd s1 = stream1.forward(r.h);
            const MatrixXd s2 = stream2.forward(r.h);
            r.concat.resize(B, 2 * K);
            r.concat.leftCols(K) = s1;
            r.concat.rightCols(K) = s2;
            const MatrixXd fused = fuse_fc.forward(r.concat);
            if (variant == Variant::Baseline3) {
                r.dev = fused;  // residual bookkeeping: y_hat - x_n == fused
                r.y_hat = fused;
                r.y_hat.colwise() += batch.x_n;
            } else {
                r.y_hat = fused;
            }
            break;
        }
    }
    return r;
}

LossBreakdown VariantModel::compute_losses(const ForwardResult& r,
                                           const WindowDataset& batch,
                                           double reg_coeff) const {
    const double l_op = loss_op(flat(r.y_hat), flat(batch.targets));
    if (!multitask()) {
        // Baselines and the single-task ablation optimize the output
        // prediction alone.
        if (!std::isfinite(l_op)) throw TrainError("non-finite loss term l_op");
        LossBreakdown out;
        out.l_ca = kNaN;
        out.l_de = kNaN;
        out.l_op = l_op;
        out.weight_ca = kNaN;
        out.weight_de = kNaN;
        out.weight_op = kNaN;
        out.reg_penalty = 0.0;
        out.total = l_op;
        return out;
    }

    double l_ca = 0.0, l_de = 0.0;
    switch (variant) {
        case Variant::Carets1:
            l_ca = loss_bce(flat(r.p_up), flat(batch.trend));
            l_de = loss_de_abs(flat(r.dev), flat(batch.dev_abs));
            break;
        case Variant::Carets2:
            l_ca = loss_bce(flat(r.p_up), flat(batch.trend));
            l_de = loss_de_directional(flat(r.dev_up), flat(r.dev_down),
                                       flat(batch.dev_up), flat(batch.dev_down),
                                       flat(batch.trend));
            break;
        case Variant::Carets3:
            l_ca = loss_ce_pair(flat(r.p_up), flat(r.p_down), flat(batch.trend));
            l_de = loss_de_directional(flat(r.dev_up), flat(r.dev_down),
                                       flat(batch.dev_up), flat(batch.dev_down),
                                       flat(batch.trend));
            break;
        case Variant::Carets4:
            l_ca = loss_ce_pair(flat(r.p_up), flat(r.p_down), flat(batch.trend));
            break;
        default:
            break;
    }
    return total_loss(l_ca, l_de, l_op, uncertainty, arch, reg_coeff);
}

void VariantModel::backward(const ForwardResult& r, const WindowDataset& batch,
                            const LossBreakdown& breakdown, double reg_coeff) {
    const long B = batch.size();
    const long K = head_config.horizon;
    const double m = static_cast<double>(B * K);
    const bool mt = multitask();
    const double w_op = mt ? breakdown.weight_op : 1.0;
    const double w_ca = mt ? breakdown.weight_ca : 0.0;
    const double w_de = mt ? breakdown.weight_de : 0.0;
    const bool continuous = mode == TrainMode::SingleTask;

    const MatrixXd g_yhat = w_op * 2.0 / m * (r.y_hat - batch.targets);
    MatrixXd gh;

    // Binary cross-entropy gradient w.r.t. the scalar logit; d_hat (or its
    // surrogate) never feeds gradient back through the decision threshold.
    const auto bce_logit_grad = [&](MatrixXd& gz) {
        for (long b = 0; b < B; ++b)
            for (long k = 0; k < K; ++k)
                gz(b, k) += in_clamp_range(r.p_up(b, k))
                                ? w_ca * (r.p_up(b, k) - batch.trend(b, k)) / m
                                : 0.0;
    };
    // Cross-entropy on clamped softmax pairs, gradient w.r.t. p_up.
    const auto ce_pup_grad = [&](MatrixXd& gp) {
        for (long b = 0; b < B; ++b) {
            for (long k = 0; k < K; ++k) {
                double g = 0.0;
                if (in_clamp_range(r.p_up(b, k)))
                    g -= batch.trend(b, k) / clamp_prob(r.p_up(b, k));
                if (in_clamp_range(r.p_down(b, k)))
                    g += (1.0 - batch.trend(b, k)) / clamp_prob(r.p_down(b, k));
                gp(b, k) += w_ca * g / m;
            }
        }
    };

    switch (variant) {
        case Variant::Carets1: {
            MatrixXd g_dev = w_de * 2.0 / m * (r.dev - batch.dev_abs);
            MatrixXd gz = MatrixXd::Zero(B, K);
            if (continuous) {
                g_dev += g_yhat.cwiseProduct(r.tanh_z);
                gz += g_yhat.cwiseProduct(r.dev).cwiseProduct(
                    (1.0 - r.tanh_z.array().square()).matrix());
            } else {
                g_dev += g_yhat.cwiseProduct(r.d_hat);
            }
            bce_logit_grad(gz);
            gh = dev_head.backward(dev_act_.backward(g_dev));
            gh += trend_head.backward(gz);
            break;
        }
        case Variant::Carets2: {
            MatrixXd g_up =
                w_de * 2.0 / m *
                (r.dev_up - batch.dev_up).cwiseProduct(batch.trend);
            MatrixXd g_down =
                w_de * 2.0 / m *
                (r.dev_down - batch.dev_down)
                    .cwiseProduct((1.0 - batch.trend.array()).matrix());
            MatrixXd gz = MatrixXd::Zero(B, K);
            if (continuous) {
                g_up += g_yhat.cwiseProduct(r.p_up);
                g_down -= g_yhat.cwiseProduct((1.0 - r.p_up.array()).matrix());
                gz += g_yhat.cwiseProduct(r.dev_up + r.dev_down)
                          .cwiseProduct(r.p_up)
                          .cwiseProduct((1.0 - r.p_up.array()).matrix());
            } else {
                for (long b = 0; b < B; ++b) {
                    for (long k = 0; k < K; ++k) {
                        if (r.d_hat(b, k) > 0.0)
                            g_up(b, k) += g_yhat(b, k);
                        else
                            g_down(b, k) -= g_yhat(b, k);
                    }
                }
            }
            bce_logit_grad(gz);
            gh = dev_up_head.backward(dev_up_act_.backward(g_up));
            gh += dev_down_head.backward(dev_down_act_.backward(g_down));
            gh += trend_head.backward(gz);
            break;
        }
        case Variant::Carets3: {
            MatrixXd g_up =
                w_de * 2.0 / m *
                    (r.dev_up - batch.dev_up).cwiseProduct(batch.trend) +
                g_yhat.cwiseProduct(r.p_up);
            MatrixXd g_down =
                w_de * 2.0 / m *
                    (r.dev_down - batch.dev_down)
                        .cwiseProduct((1.0 - batch.trend.array()).matrix()) -
                g_yhat.cwiseProduct(r.p_down);
            MatrixXd gp = g_yhat.cwiseProduct(r.dev_up + r.dev_down);
            ce_pup_grad(gp);
            // Through the pair softmax: dp_up/dz_up = p_up p_down.
            MatrixXd gz(B, 2 * K);
            for (long b = 0; b < B; ++b) {
                for (long k = 0; k < K; ++k) {
                    const double gu =
                        gp(b, k) * r.p_up(b, k) * r.p_down(b, k);
                    gz(b, 2 * k) = gu;
                    gz(b, 2 * k + 1) = -gu;
                }
            }
            gh = dev_up_head.backward(dev_up_act_.backward(g_up));
            gh += dev_down_head.backward(dev_down_act_.backward(g_down));
            gh += trend_head.backward(gz);
            break;
        }
        case Variant::Carets4: {
            const MatrixXd g_concat = reg_head.backward(g_yhat);
            const long d = r.h.cols();
            MatrixXd gp = MatrixXd::Zero(B, K);
            for (long k = 0; k < K; ++k)
                gp.col(k) =
                    g_concat.col(d + 2 * k) - g_concat.col(d + 2 * k + 1);
            ce_pup_grad(gp);
            MatrixXd gz(B, 2 * K);
            for (long b = 0; b < B; ++b) {
                for (long k = 0; k < K; ++k) {
                    const double gu = gp(b, k) * r.p_up(b, k) * r.p_down(b, k);
                    gz(b, 2 * k) = gu;
                    gz(b, 2 * k + 1) = -gu;
                }
            }
            gh = g_concat.leftCols(d);
            gh += trend_head.backward(gz);
            break;
        }
        case Variant::Baseline1: {
            gh = direct_head.backward(g_yhat);
            break;
        }
        case Variant::Baseline2:
        case Variant::Baseline3: {
            const MatrixXd g_concat = fuse_fc.backward(g_yhat);
            gh = stream1.backward(g_concat.leftCols(K));
            gh += stream2.backward(g_concat.rightCols(K));
            break;
        }
    }
    encoder->backward(gh);

    if (mt) {
        g_log_var_ca += total_loss_grad_log_var(breakdown.l_ca,
                                                uncertainty.log_var_ca, reg_coeff);
        g_log_var_op += total_loss_grad_log_var(breakdown.l_op,
                                                uncertainty.log_var_op, reg_coeff);
        if (arch == Arch::A)
            g_log_var_de += total_loss_grad_log_var(
                breakdown.l_de, uncertainty.log_var_de, reg_coeff);
    }
}

MatrixXd VariantModel::predicted_up(const ForwardResult& r,
                                    const VectorXd& x_n) const {
    const long B = r.y_hat.rows();
    const long K = r.y_hat.cols();
    MatrixXd up(B, K);
    switch (variant) {
        case Variant::Carets1:
        case Variant::Carets2:
            for (long b = 0; b < B; ++b)
                for (long k = 0; k < K; ++k)
                    up(b, k) = trend_decide(r.p_up(b, k)) > 0 ? 1.0 : 0.0;
            break;
        case Variant::Carets3:
        case Variant::Carets4:
            up = (r.p_up.array() >= r.p_down.array()).cast<double>().matrix();
            break;
        default:
            // Regression-only models: direction of the forecast relative to
            // the latest observation; ties count as upward like the labels.
            for (long b = 0; b < B; ++b)
                for (long k = 0; k < K; ++k)
                    up(b, k) = r.y_hat(b, k) >= x_n(b) ? 1.0 : 0.0;
            break;
    }
    return up;
}

std::vector<nn::ParamView> VariantModel::network_params() {
    std::vector<nn::ParamView> out;
    encoder->collect(out);
    switch (variant) {
        case Variant::Carets1:
            trend_head.collect("trend", out);
            dev_head.collect("dev", out);
            break;
        case Variant::Carets2:
        case Variant::Carets3:
            trend_head.collect("trend", out);
            dev_up_head.collect("dev_up", out);
            dev_down_head.collect("dev_down", out);
            break;
        case Variant::Carets4:
            trend_head.collect("trend", out);
            reg_head.collect("reg", out);
            break;
        case Variant::Baseline1:
            direct_head.collect("direct", out);
            break;
        case Variant::Baseline2:
        case Variant::Baseline3:
            stream1.collect("stream1", out);
            stream2.collect("stream2", out);
            fuse_fc.collect("fuse", out);
            break;
    }
    return out;
}

std::vector<nn::ParamView> VariantModel::trainable_params() {
    std::vector<nn::ParamView> out = network_params();
    if (multitask()) {
        out.push_back({"log_var_ca", &uncertainty.log_var_ca, &g_log_var_ca, 1});
        if (arch == Arch::A)
            out.push_back({"log_var_de", &uncertainty.log_var_de, &g_log_var_de, 1});
        out.push_back({"log_var_op", &uncertainty.log_var_op, &g_log_var_op, 1});
    }
    return out;
}

void VariantModel::zero_grads() {
    encoder->zero_grads();
    trend_head.zero_grads();
    dev_head.zero_grads();
    dev_up_head.zero_grads();
    dev_down_head.zero_grads();
    reg_head.zero_grads();
    direct_head.zero_grads();
    stream1.zero_grads();
    stream2.zero_grads();
    if (fuse_fc.W.size() > 0) fuse_fc.zero_grads();
    g_log_var_ca = g_log_var_de = g_log_var_op = 0.0;
}

void VariantModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint '" + path + "'");
    out << "# carets checkpoint v1\n";
    out << "variant " << to_string(variant) << "\n";
    out << "mode " << to_string(mode) << "\n";
    out << "encoder.kind " << to_string(encoder_config.kind) << "\n";
    out << "encoder.num_layers " << encoder_config.num_layers << "\n";
    out << "encoder.hidden_dim " << encoder_config.hidden_dim << "\n";
    out << "encoder.kernel_size " << encoder_config.kernel_size << "\n";
    out << "encoder.padding " << encoder_config.padding << "\n";
    out << "encoder.num_heads " << encoder_config.num_heads << "\n";
    out << "head.num_fc_layers " << head_config.num_fc_layers << "\n";
    out << "head.fc_hidden " << head_config.fc_hidden << "\n";
    out << "head.horizon " << head_config.horizon << "\n";
    out << "log_var_ca " << fmt_hex(uncertainty.log_var_ca) << "\n";
    out << "log_var_de " << fmt_hex(uncertainty.log_var_de) << "\n";
    out << "log_var_op " << fmt_hex(uncertainty.log_var_op) << "\n";
    auto params = const_cast<VariantModel*>(this)->network_params();
    out << "params " << params.size() << "\n";
    for (const auto& p : params) {
        out << "param " << p.name << ' ' << p.size;
        for (std::size_t i = 0; i < p.size; ++i) out << ' ' << fmt_hex(p.value[i]);
        out << "\n";
    }
}

VariantModel VariantModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != "# carets checkpoint v1")
        throw DataError(path + ": not a carets checkpoint");

    std::string variant_s, mode_s;
    EncoderConfig ec;
    HeadConfig hc;
    double lv_ca = 0, lv_de = 0, lv_op = 0;
    long n_params = -1;

    auto read_kv = [&](const std::string& key, const std::string& val) {
        if (key == "variant") variant_s = val;
        else if (key == "mode") mode_s = val;
        else if (key == "encoder.kind") ec.kind = encoder_kind_from_string(val);
        else if (key == "encoder.num_layers") ec.num_layers = static_cast<int>(parse_long(val, path));
        else if (key == "encoder.hidden_dim") ec.hidden_dim = static_cast<int>(parse_long(val, path));
        else if (key == "encoder.kernel_size") ec.kernel_size = static_cast<int>(parse_long(val, path));
        else if (key == "encoder.padding") ec.padding = static_cast<int>(parse_long(val, path));
        else if (key == "encoder.num_heads") ec.num_heads = static_cast<int>(parse_long(val, path));
        else if (key == "head.num_fc_layers") hc.num_fc_layers = static_cast<int>(parse_long(val, path));
        else if (key == "head.fc_hidden") hc.fc_hidden = static_cast<int>(parse_long(val, path));
        else if (key == "head.horizon") hc.horizon = static_cast<int>(parse_long(val, path));
        else if (key == "log_var_ca") lv_ca = parse_double(val, path);
        else if (key == "log_var_de") lv_de = parse_double(val, path);
        else if (key == "log_var_op") lv_op = parse_double(val, path);
        else throw DataError(path + ": unknown checkpoint key '" + key + "'");
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "params") {
            ss >> n_params;
            break;
        }
        std::string val;
        ss >> val;
        read_kv(key, val);
    }
    if (n_params < 0) throw DataError(path + ": missing params section");

    VariantModel model(variant_from_string(variant_s), ec, hc,
                       mode_from_string(mode_s), 0);
    model.uncertainty.log_var_ca = lv_ca;
    model.uncertainty.log_var_de = lv_de;
    model.uncertainty.log_var_op = lv_op;

    auto params = model.network_params();
    if (static_cast<long>(params.size()) != n_params)
        throw DataError(path + ": parameter count mismatch");
    for (auto& p : params) {
        if (!std::getline(in, line))
            throw DataError(path + ": truncated checkpoint");
        std::istringstream ss(line);
        std::string kw, name;
        std::size_t size = 0;
        ss >> kw >> name >> size;
        if (kw != "param" || name != p.name || size != p.size)
            throw DataError(path + ": parameter record mismatch at '" + p.name +
                            "' (got '" + name + "')");
        std::string tok;
        for (std::size_t i = 0; i < size; ++i) {
            if (!(ss >> tok))
                throw DataError(path + ": truncated values for '" + name + "'");
            p.value[i] = parse_double(tok, path);
        }
    }
    return model;
}

VariantModel build_variant(Variant variant, const EncoderConfig& encoder_config,
                           const HeadConfig& head_config, TrainMode mode,
                           std::uint64_t init_seed) {
    return {variant, encoder_config, head_config, mode, init_seed};
}

}  // namespace carets
