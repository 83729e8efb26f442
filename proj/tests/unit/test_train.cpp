#include "carets/train.hpp"

#include "carets/baselines.hpp"

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

HeadConfig small_heads(int horizon) {
    HeadConfig hc;
    hc.num_fc_layers = 2;
    hc.fc_hidden = 8;
    hc.horizon = horizon;
    return hc;
}

TrainConfig quick_config(int max_epochs, int patience, std::uint64_t seed = 2025) {
    TrainConfig tc;
    tc.max_epochs = max_epochs;
    tc.patience = patience;
    tc.batch_size = 32;
    tc.seed = seed;
    return tc;
}

PreparedData tiny_prepared(long n_points, int num_folds, std::uint64_t seed) {
    PreparedData p;
    const auto values = testutil::synthetic_series(n_points, seed);
    const long split = n_points * 2 / 3;
    p.pool = testutil::windows_from_series(
        std::vector<double>(values.begin(), values.begin() + split), 12, 3);
    p.test = testutil::windows_from_series(
        std::vector<double>(values.begin() + split, values.end()), 12, 3);
    p.folds = make_folds(p.pool.size(), num_folds, 2025);
    return p;
}

}  // namespace

TEST_CASE("trend accuracy counting") {
    MatrixXd labels(2, 2), pred(2, 2);
    labels << 1, 0, 1, 1;
    pred = labels;
    TrendAccuracy acc = trend_accuracy(pred, labels);
    CHECK(acc.avg == 1.0);

    // pair argmax semantics: p_up = 0.4 < p_down -> predicted down, label up
    pred(0, 0) = 0.0;
    acc = trend_accuracy(pred, labels);
    CHECK(acc.per_step(0) == 0.5);
    CHECK(acc.per_step(1) == 1.0);
    CHECK(acc.avg == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("persistence metrics on constant and shifted series") {
    // constant series: persistence is perfect
    WindowDataset flat = testutil::windows_from_series(
        std::vector<double>(40, 5.0), 12, 3);
    MetricsReport r = evaluate_persistence(flat, Split::Test);
    CHECK(r.rmse_avg == 0.0);
    // labels are all "up" under the tie rule, persistence predicts up
    CHECK(r.trend_acc_avg == 1.0);

    // every target exactly 0.1 above x_n in scaled units
    WindowDataset ds = testutil::random_dataset(10, 15, 3, 61);
    for (long i = 0; i < ds.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            ds.targets(i, k) = ds.x_n(i) + 0.1;
            ds.trend(i, k) = 1.0;
        }
    MetricsReport r2 = evaluate_persistence(ds, Split::Test);
    for (int k = 0; k < 3; ++k)
        CHECK(r2.rmse_per_step(k) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r2.rmse_avg == doctest::Approx(0.1).epsilon(1e-12));
    // persistence trend accuracy equals the upward rate (here 1.0: all up)
    CHECK(r2.trend_acc_avg == 1.0);
}

TEST_CASE("evaluate matches a hand-rolled metric loop") {
    const WindowDataset data = testutil::random_dataset(5, 15, 2, 62);
    VariantModel m = build_variant(Variant::Carets3, small_encoder(),
                                   small_heads(2), TrainMode::MultiTask, 17);
    const MetricsReport report = evaluate(m, data, Split::Val);
    REQUIRE(report.rmse_per_step.size() == 2);

    // independent spreadsheet-style computation on the same predictions
    const ForwardResult r = m.forward(data);
    const MatrixXd up = m.predicted_up(r, data.x_n);
    for (int k = 0; k < 2; ++k) {
        double sq = 0.0;
        double hits = 0.0;
        for (long i = 0; i < 5; ++i) {
            const double e = r.y_hat(i, k) - data.targets(i, k);
            sq += e * e;
            if ((up(i, k) > 0.5) == (data.trend(i, k) > 0.5)) hits += 1.0;
        }
        CHECK(report.rmse_per_step(k) ==
              doctest::Approx(std::sqrt(sq / 5.0)).epsilon(1e-12));
        CHECK(report.trend_acc_per_step(k) ==
              doctest::Approx(hits / 5.0).epsilon(1e-15));
    }
    CHECK(report.rmse_avg ==
          doctest::Approx(report.rmse_per_step.mean()).epsilon(1e-15));
    CHECK(report.trend_acc_avg >= 0.0);
    CHECK(report.trend_acc_avg <= 1.0);

    WindowDataset empty;
    CHECK_THROWS_AS(evaluate(m, empty, Split::Test), TrainError);
}

TEST_CASE("evaluation is invariant to sample order") {
    const WindowDataset data = testutil::random_dataset(200, 15, 3, 63);
    VariantModel m = build_variant(Variant::Carets2, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 19);
    const MetricsReport a = evaluate(m, data, Split::Test);

    std::vector<long> order(data.size());
    for (long i = 0; i < data.size(); ++i) order[i] = i;
    Rng rng(7);
    rng.shuffle(order);
    const MetricsReport b = evaluate(m, data.gather(order), Split::Test);

    CHECK((a.rmse_per_step - b.rmse_per_step).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(a.rmse_avg - b.rmse_avg) < 1e-12);
    CHECK((a.trend_acc_per_step - b.trend_acc_per_step).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("training improves validation RMSE on a learnable series") {
    PreparedData p = tiny_prepared(240, 3, 71);
    VariantModel m = build_variant(Variant::Carets2, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 2026);
    const TrainResult result =
        train_model(m, p.pool, p.folds[0], quick_config(50, 49));
    REQUIRE(!result.log.empty());
    CHECK(result.best_val_rmse < result.log.front().val_rmse);
    CHECK(result.best_epoch >= 1);
}

TEST_CASE("early stopping halts patience epochs after the best and restores it") {
    PreparedData p = tiny_prepared(160, 3, 73);
    VariantModel m = build_variant(Variant::Carets1, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 2027);
    const int patience = 6;
    const TrainConfig tc = quick_config(400, patience);
    const TrainResult result = train_model(m, p.pool, p.folds[0], tc);
    if (result.stopped_epoch < tc.max_epochs) {
        CHECK(result.stopped_epoch == result.best_epoch + patience);
    }
    // the restored parameters reproduce the reported best validation RMSE
    const MetricsReport val =
        evaluate(m, p.pool.gather(p.folds[0].val_indices), Split::Val);
    CHECK(val.rmse_avg == doctest::Approx(result.best_val_rmse).epsilon(1e-12));
    // no later epoch did better than what was restored
    for (const auto& row : result.log)
        CHECK(row.val_rmse >= result.best_val_rmse);
}

TEST_CASE("identical seeds give identical epoch logs") {
    PreparedData p = tiny_prepared(160, 3, 77);
    const TrainConfig tc = quick_config(8, 7);

    VariantModel a = build_variant(Variant::Carets4, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 2025);
    VariantModel b = build_variant(Variant::Carets4, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 2025);
    const TrainResult ra = train_model(a, p.pool, p.folds[0], tc);
    const TrainResult rb = train_model(b, p.pool, p.folds[0], tc);
    REQUIRE(ra.log.size() == rb.log.size());
    for (std::size_t i = 0; i < ra.log.size(); ++i) {
        CHECK(ra.log[i].total == rb.log[i].total);
        CHECK(ra.log[i].val_rmse == rb.log[i].val_rmse);
        CHECK(ra.log[i].log_var_ca == rb.log[i].log_var_ca);
    }
}

TEST_CASE("log-variances stay inside the clamp throughout training") {
    PreparedData p = tiny_prepared(160, 3, 79);
    VariantModel m = build_variant(Variant::Carets3, small_encoder(),
                                   small_heads(3), TrainMode::MultiTask, 2028);
    const TrainResult result =
        train_model(m, p.pool, p.folds[0], quick_config(10, 9));
    for (const auto& row : result.log) {
        CHECK(row.log_var_ca >= -10.0);
        CHECK(row.log_var_ca <= 10.0);
        CHECK(row.log_var_de >= -10.0);
        CHECK(row.log_var_de <= 10.0);
        CHECK(row.log_var_op >= -10.0);
        CHECK(row.log_var_op <= 10.0);
    }
}

TEST_CASE("cross-validation yields one outcome per fold, deterministically") {
    PreparedData p = tiny_prepared(200, 3, 81);
    const TrainConfig tc = quick_config(6, 5);
    const CVSummary a = cross_validate(Variant::Baseline1, small_encoder(),
                                       small_heads(3), p, tc, 1);
    REQUIRE(a.folds.size() == 3);
    for (int f = 0; f < 3; ++f) CHECK(a.folds[f].fold_id == f + 1);

    const CVSummary b = cross_validate(Variant::Baseline1, small_encoder(),
                                       small_heads(3), p, tc, 1);
    const CVSummary c = cross_validate(Variant::Baseline1, small_encoder(),
                                       small_heads(3), p, tc, 2);  // parallel
    for (int f = 0; f < 3; ++f) {
        CHECK(a.folds[f].test.rmse_avg == b.folds[f].test.rmse_avg);
        CHECK(a.folds[f].test.rmse_avg == c.folds[f].test.rmse_avg);
        CHECK(a.folds[f].val.rmse_avg == c.folds[f].val.rmse_avg);
        CHECK(a.folds[f].test.trend_acc_avg == c.folds[f].test.trend_acc_avg);
    }
}

TEST_CASE("metrics files round-trip") {
    testutil::TmpDir tmp("metrics");
    MetricsReport r;
    r.split = Split::Test;
    r.rmse_per_step = VectorXd::LinSpaced(3, 0.1, 0.3);
    r.rmse_avg = r.rmse_per_step.mean();
    r.trend_acc_per_step = VectorXd::LinSpaced(3, 0.8, 0.9);
    r.trend_acc_avg = r.trend_acc_per_step.mean();
    r.wall_clock_seconds = 1.25;
    const auto path = tmp.file("metrics_test.txt");
    save_metrics(r, path);
    const MetricsReport loaded = load_metrics(path);
    CHECK(loaded.split == Split::Test);
    CHECK(loaded.rmse_avg == r.rmse_avg);
    CHECK((loaded.rmse_per_step - r.rmse_per_step).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.trend_acc_per_step - r.trend_acc_per_step).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(loaded.wall_clock_seconds == r.wall_clock_seconds);
}

TEST_CASE("mean and std over fold values") {
    const MeanStd ms = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(ms.mean == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(ms.std == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
}
