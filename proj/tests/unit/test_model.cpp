#include "carets/model.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace carets;

namespace {

EncoderConfig small_encoder(EncoderKind kind = EncoderKind::Cnn) {
    EncoderConfig cfg;
    cfg.kind = kind;
    cfg.num_layers = 2;
    cfg.hidden_dim = 8;
    cfg.num_heads = 2;
    return cfg;
}

HeadConfig small_heads(int horizon = 3) {
    HeadConfig hc;
    hc.num_fc_layers = 2;
    hc.fc_hidden = 8;
    hc.horizon = horizon;
    return hc;
}

// Keeps scalar-form probabilities away from the 0.5 decision boundary so
// finite differences never cross the threshold.
void bias_trend_away_from_half(VariantModel& model, const WindowDataset& batch) {
    for (int attempt = 0; attempt < 20; ++attempt) {
        const ForwardResult r = model.forward(batch);
        double closest = 1.0;
        for (long i = 0; i < r.p_up.size(); ++i)
            closest = std::min(closest, std::abs(r.p_up.data()[i] - 0.5));
        if (closest > 5e-3) return;
        auto& bias = model.trend_head.layers.back().b;
        bias.array() += (attempt % 2 == 0 ? 0.11 : -0.23);
    }
    FAIL("could not move trend probabilities away from 0.5");
}

double model_total(VariantModel& model, const WindowDataset& batch,
                   double reg_coeff) {
    const ForwardResult r = model.forward(batch);
    return model.compute_losses(r, batch, reg_coeff).total;
}

}  // namespace

TEST_CASE("variant wiring matches the model table") {
    const WindowDataset data = testutil::random_dataset(5, 15, 3, 41);

    SUBCASE("sign-magnitude variant has one non-negative deviation head") {
        VariantModel m = build_variant(Variant::Carets1, small_encoder(EncoderKind::Lstm),
                                       small_heads(), TrainMode::MultiTask, 7);
        const ForwardResult r = m.forward(data);
        CHECK(r.logits.cols() == 3);
        CHECK(r.dev.cols() == 3);
        CHECK((r.dev.array() >= 0.0).all());
        CHECK(r.dev_up.size() == 0);
        // residual consistency: the forecast is exactly the fusion formula
        for (long i = 0; i < 5; ++i)
            for (int k = 0; k < 3; ++k) {
                CHECK(r.y_hat(i, k) ==
                      data.x_n(i) + r.d_hat(i, k) * r.dev(i, k));
                CHECK(std::abs(r.y_hat(i, k) - data.x_n(i)) ==
                      doctest::Approx(r.dev(i, k)).epsilon(1e-12));
            }
    }

    SUBCASE("direction-specific variant selects one deviation per step") {
        VariantModel m = build_variant(Variant::Carets2,
                                       small_encoder(EncoderKind::Transformer),
                                       small_heads(), TrainMode::MultiTask, 7);
        const ForwardResult r = m.forward(data);
        CHECK(r.logits.cols() == 3);  // binary trend head
        CHECK((r.dev_up.array() >= 0.0).all());
        CHECK((r.dev_down.array() >= 0.0).all());
        for (long i = 0; i < 5; ++i)
            for (int k = 0; k < 3; ++k) {
                const double diff = r.y_hat(i, k) - data.x_n(i);
                if (r.d_hat(i, k) > 0)
                    CHECK(diff >= 0.0);
                else
                    CHECK(diff <= 0.0);
            }
    }

    SUBCASE("soft-fusion variant stays inside the deviation interval") {
        VariantModel m = build_variant(Variant::Carets3, small_encoder(),
                                       small_heads(), TrainMode::MultiTask, 7);
        const ForwardResult r = m.forward(data);
        CHECK(r.logits.cols() == 6);  // paired logits
        for (long i = 0; i < 5; ++i)
            for (int k = 0; k < 3; ++k) {
                CHECK(r.p_up(i, k) + r.p_down(i, k) == 1.0);
                CHECK(r.y_hat(i, k) >=
                      data.x_n(i) - r.dev_down(i, k) - 1e-12);
                CHECK(r.y_hat(i, k) <= data.x_n(i) + r.dev_up(i, k) + 1e-12);
            }
    }

    SUBCASE("sequential variant concatenates probabilities into the regressor") {
        VariantModel m = build_variant(Variant::Carets4, small_encoder(EncoderKind::Cnn),
                                       small_heads(), TrainMode::MultiTask, 7);
        const ForwardResult r = m.forward(data);
        CHECK(r.concat.cols() == 8 + 2 * 3);  // hidden_dim + 2K
        CHECK(r.logits.cols() == 6);
        // signed deviation: forecast is x_n plus the raw regression output
        for (long i = 0; i < 5; ++i)
            for (int k = 0; k < 3; ++k)
                CHECK(r.y_hat(i, k) == data.x_n(i) + r.dev(i, k));
    }

    SUBCASE("64-dim encoder with horizon 6 gives a 76-wide fused input") {
        EncoderConfig ec;  // defaults: hidden 64
        ec.kind = EncoderKind::Cnn;
        HeadConfig hc;
        hc.horizon = 6;
        VariantModel m = build_variant(Variant::Carets4, ec, hc);
        const WindowDataset d6 = testutil::random_dataset(2, 15, 6, 42);
        const ForwardResult r = m.forward(d6);
        CHECK(r.concat.cols() == 76);
    }
}

TEST_CASE("all variant/encoder pairs are legal") {
    const WindowDataset data = testutil::random_dataset(3, 15, 3, 43);
    for (Variant v : {Variant::Carets1, Variant::Carets2, Variant::Carets3,
                      Variant::Carets4, Variant::Baseline1, Variant::Baseline2,
                      Variant::Baseline3}) {
        for (EncoderKind k :
             {EncoderKind::Cnn, EncoderKind::Lstm, EncoderKind::Transformer}) {
            VariantModel m =
                build_variant(v, small_encoder(k), small_heads(), TrainMode::MultiTask, 3);
            const ForwardResult r = m.forward(data);
            CHECK(r.y_hat.rows() == 3);
            CHECK(r.y_hat.cols() == 3);
            CHECK(r.y_hat.allFinite());
        }
    }
}

TEST_CASE("trend decisions follow probabilities, ties go upward") {
    const WindowDataset data = testutil::random_dataset(6, 15, 3, 44);
    VariantModel m3 = build_variant(Variant::Carets3, small_encoder(),
                                    small_heads(), TrainMode::MultiTask, 11);
    const ForwardResult r3 = m3.forward(data);
    const MatrixXd up3 = m3.predicted_up(r3, data.x_n);
    for (long i = 0; i < up3.rows(); ++i)
        for (long k = 0; k < up3.cols(); ++k)
            CHECK(up3(i, k) ==
                  (r3.p_up(i, k) >= r3.p_down(i, k) ? 1.0 : 0.0));

    VariantModel b1 = build_variant(Variant::Baseline1, small_encoder(),
                                    small_heads(), TrainMode::MultiTask, 11);
    const ForwardResult rb = b1.forward(data);
    const MatrixXd upb = b1.predicted_up(rb, data.x_n);
    for (long i = 0; i < upb.rows(); ++i)
        for (long k = 0; k < upb.cols(); ++k)
            CHECK(upb(i, k) == (rb.y_hat(i, k) >= data.x_n(i) ? 1.0 : 0.0));
}

TEST_CASE("loss breakdown recomposes and activates the right tasks") {
    const WindowDataset data = testutil::random_dataset(8, 15, 3, 45);

    VariantModel m2 = build_variant(Variant::Carets2, small_encoder(),
                                    small_heads(), TrainMode::MultiTask, 13);
    const ForwardResult r2 = m2.forward(data);
    const LossBreakdown b2 = m2.compute_losses(r2, data, 0.01);
    CHECK(std::isfinite(b2.l_ca));
    CHECK(std::isfinite(b2.l_de));
    CHECK(std::isfinite(b2.l_op));
    CHECK(b2.total == doctest::Approx(b2.weight_ca * b2.l_ca +
                                      b2.weight_de * b2.l_de +
                                      b2.weight_op * b2.l_op + b2.reg_penalty)
                          .epsilon(1e-12));

    VariantModel m4 = build_variant(Variant::Carets4, small_encoder(),
                                    small_heads(), TrainMode::MultiTask, 13);
    const ForwardResult r4 = m4.forward(data);
    const LossBreakdown b4 = m4.compute_losses(r4, data, 0.0);
    // two-task architecture: no deviation term
    CHECK(b4.weight_de == 0.0);
    CHECK(b4.total ==
          doctest::Approx(b4.weight_ca * b4.l_ca + b4.weight_op * b4.l_op)
              .epsilon(1e-12));

    VariantModel bl = build_variant(Variant::Baseline2, small_encoder(),
                                    small_heads(), TrainMode::MultiTask, 13);
    const ForwardResult rb = bl.forward(data);
    const LossBreakdown bb = bl.compute_losses(rb, data, 0.01);
    CHECK(bb.total == bb.l_op);
    CHECK(bb.reg_penalty == 0.0);
}

TEST_CASE("differentiability audit: every variant matches finite differences") {
    const WindowDataset data = testutil::random_dataset(4, 15, 3, 46);
    const double reg_coeff = 0.01;

    for (Variant v : {Variant::Carets1, Variant::Carets2, Variant::Carets3,
                      Variant::Carets4, Variant::Baseline1, Variant::Baseline2,
                      Variant::Baseline3}) {
        CAPTURE(to_string(v));
        VariantModel m =
            build_variant(v, small_encoder(), small_heads(), TrainMode::MultiTask, 21);
        if (m.multitask()) {
            m.uncertainty.log_var_ca = 0.3;
            m.uncertainty.log_var_de = -0.4;
            m.uncertainty.log_var_op = 0.2;
        }
        if (v == Variant::Carets1 || v == Variant::Carets2)
            bias_trend_away_from_half(m, data);

        m.zero_grads();
        const ForwardResult r = m.forward(data);
        const LossBreakdown breakdown = m.compute_losses(r, data, reg_coeff);
        m.backward(r, data, breakdown, reg_coeff);
        const auto res = testutil::grad_check(
            m.trainable_params(),
            [&]() { return model_total(m, data, reg_coeff); });
        INFO("worst: ", res.worst);
        CHECK(res.max_rel < 1e-4);
    }
}

TEST_CASE("single-task surrogates keep the trend stream trainable") {
    const WindowDataset data = testutil::random_dataset(4, 15, 3, 47);
    for (Variant v : {Variant::Carets1, Variant::Carets2}) {
        CAPTURE(to_string(v));
        VariantModel m =
            build_variant(v, small_encoder(), small_heads(), TrainMode::SingleTask, 23);
        bias_trend_away_from_half(m, data);
        m.zero_grads();
        const ForwardResult r = m.forward(data);
        const LossBreakdown breakdown = m.compute_losses(r, data, 0.0);
        CHECK(breakdown.total == breakdown.l_op);
        m.backward(r, data, breakdown, 0.0);
        // gradients reach the trend head through the fused forecast alone
        double trend_grad_norm = 0.0;
        std::vector<nn::ParamView> params;
        m.trend_head.collect("trend", params);
        for (const auto& p : params)
            for (std::size_t i = 0; i < p.size; ++i)
                trend_grad_norm += std::abs(p.grad[i]);
        CHECK(trend_grad_norm > 0.0);
        const auto res = testutil::grad_check(
            m.trainable_params(), [&]() { return model_total(m, data, 0.0); });
        INFO("worst: ", res.worst);
        CHECK(res.max_rel < 1e-4);
    }
}

TEST_CASE("continuous surrogate changes the forecast, not the decision") {
    const WindowDataset data = testutil::random_dataset(4, 15, 3, 48);
    VariantModel hard = build_variant(Variant::Carets1, small_encoder(),
                                      small_heads(), TrainMode::MultiTask, 29);
    VariantModel soft = build_variant(Variant::Carets1, small_encoder(),
                                      small_heads(), TrainMode::SingleTask, 29);
    const ForwardResult rh = hard.forward(data);
    const ForwardResult rs = soft.forward(data);
    CHECK((rh.p_up - rs.p_up).cwiseAbs().maxCoeff() == 0.0);
    CHECK((rh.y_hat - rs.y_hat).cwiseAbs().maxCoeff() > 0.0);
    // |tanh(z)| <= 1, so the soft forecast never exceeds the hard one
    for (long i = 0; i < 4; ++i)
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(rs.y_hat(i, k) - data.x_n(i)) <=
                  std::abs(rh.y_hat(i, k) - data.x_n(i)) + 1e-15);
}

TEST_CASE("checkpoints round-trip losslessly") {
    testutil::TmpDir tmp("ckpt");
    const WindowDataset data = testutil::random_dataset(3, 15, 3, 49);
    for (Variant v : {Variant::Carets2, Variant::Carets4, Variant::Baseline3}) {
        VariantModel m = build_variant(v, small_encoder(EncoderKind::Transformer),
                                       small_heads(), TrainMode::MultiTask, 31);
        m.uncertainty.log_var_ca = 0.12345678901234567;
        m.uncertainty.log_var_op = -1.9876543210987654;
        const auto path = tmp.file("model_" + to_string(v) + ".txt");
        m.save(path);
        VariantModel loaded = VariantModel::load(path);
        CHECK(loaded.variant == m.variant);
        CHECK(loaded.encoder_config.kind == m.encoder_config.kind);
        CHECK(loaded.uncertainty.log_var_ca == m.uncertainty.log_var_ca);
        CHECK(loaded.uncertainty.log_var_op == m.uncertainty.log_var_op);

        auto pa = m.network_params();
        auto pb = loaded.network_params();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            REQUIRE(pa[i].size == pb[i].size);
            for (std::size_t j = 0; j < pa[i].size; ++j)
                CHECK(pa[i].value[j] == pb[i].value[j]);  // bitwise
        }
        const ForwardResult ra = m.forward(data);
        const ForwardResult rb = loaded.forward(data);
        CHECK((ra.y_hat - rb.y_hat).cwiseAbs().maxCoeff() == 0.0);
    }
}
