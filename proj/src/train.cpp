#include "carets/train.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace carets {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Flat snapshot of network parameters plus the uncertainty state, used to
// restore the best-validation checkpoint.
struct ParamSnapshot {
    std::vector<double> values;
    UncertaintyState uncertainty;

    static ParamSnapshot capture(VariantModel& model) {
        ParamSnapshot s;
        for (const auto& p : model.network_params())
            s.values.insert(s.values.end(), p.value, p.value + p.size);
        s.uncertainty = model.uncertainty;
        return s;
    }

    void restore(VariantModel& model) const {
        std::size_t pos = 0;
        for (auto& p : model.network_params()) {
            std::copy(values.begin() + pos, values.begin() + pos + p.size, p.value);
            pos += p.size;
        }
        model.uncertainty = uncertainty;
    }
};

double validation_rmse(VariantModel& model, const WindowDataset& val) {
    constexpr long kChunk = 512;
    const long n = val.size();
    const int k = val.horizon();
    VectorXd sq = VectorXd::Zero(k);
    for (long start = 0; start < n; start += kChunk) {
        std::vector<long> idx;
        for (long i = start; i < std::min(n, start + kChunk); ++i) idx.push_back(i);
        const WindowDataset chunk = val.gather(idx);
        const ForwardResult r = model.forward(chunk);
        sq += (r.y_hat - chunk.targets).array().square().colwise().sum().matrix();
    }
    double avg = 0.0;
    for (int j = 0; j < k; ++j) avg += std::sqrt(sq(j) / static_cast<double>(n));
    return avg / static_cast<double>(k);
}

}  // namespace

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 1 || patience >= max_epochs)
        throw ConfigError("train: patience must be in [1, max_epochs)");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (learning_rate <= 0.0) throw ConfigError("train: learning_rate must be > 0");
}

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

TrainResult train_model(VariantModel& model, const WindowDataset& pool,
                        const FoldSplit& fold, const TrainConfig& cfg) {
    cfg.validate();
    if (fold.train_indices.empty() || fold.val_indices.empty())
        throw TrainError("train_model: empty fold");
    const auto t0 = Clock::now();

    const WindowDataset train_set = pool.gather(fold.train_indices);
    const WindowDataset val_set = pool.gather(fold.val_indices);
    const long n_train = train_set.size();

    nn::Adam optimizer(model.trainable_params(), cfg.learning_rate);

    TrainResult result;
    ParamSnapshot best = ParamSnapshot::capture(model);
    double best_rmse = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int since_best = 0;

    std::vector<long> order(n_train);
    for (long i = 0; i < n_train; ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x45504f43ULL + epoch));
        shuffle_rng.shuffle(order);

        double sum_ca = 0.0, sum_de = 0.0, sum_op = 0.0, sum_reg = 0.0,
               sum_total = 0.0;
        long n_batches = 0;
        for (long start = 0; start < n_train; start += cfg.batch_size) {
            std::vector<long> idx(order.begin() + start,
                                  order.begin() +
                                      std::min<long>(n_train, start + cfg.batch_size));
            const WindowDataset batch = train_set.gather(idx);
            model.zero_grads();
            const ForwardResult r = model.forward(batch);
            LossBreakdown breakdown;
            try {
                breakdown = model.compute_losses(r, batch, cfg.reg_coeff);
            } catch (const TrainError& e) {
                throw TrainError(std::string(e.what()) + " (epoch " +
                                 std::to_string(epoch) + ", batch " +
                                 std::to_string(n_batches + 1) + ")");
            }
            model.backward(r, batch, breakdown, cfg.reg_coeff);
            optimizer.step();
            model.clamp_uncertainty();

            sum_ca += breakdown.l_ca;
            sum_de += breakdown.l_de;
            sum_op += breakdown.l_op;
            sum_reg += breakdown.reg_penalty;
            sum_total += breakdown.total;
            ++n_batches;
        }

        EpochLogRow row;
        row.epoch = epoch;
        const double nb = static_cast<double>(n_batches);
        row.l_ca = sum_ca / nb;
        row.l_de = sum_de / nb;
        row.l_op = sum_op / nb;
        row.reg_penalty = sum_reg / nb;
        row.total = sum_total / nb;
        row.log_var_ca = model.uncertainty.log_var_ca;
        row.log_var_de = model.uncertainty.log_var_de;
        row.log_var_op = model.uncertainty.log_var_op;
        row.val_rmse = validation_rmse(model, val_set);
        result.log.push_back(row);

        if (row.val_rmse < best_rmse) {
            best_rmse = row.val_rmse;
            best_epoch = epoch;
            best = ParamSnapshot::capture(model);
            since_best = 0;
        } else {
            ++since_best;
        }
        result.stopped_epoch = epoch;
        if (since_best >= cfg.patience) break;
    }

    best.restore(model);
    result.best_epoch = best_epoch;
    result.best_val_rmse = best_rmse;
    result.train_seconds = seconds_since(t0);
    return result;
}

TrendAccuracy trend_accuracy(const MatrixXd& up_pred, const MatrixXd& labels) {
    if (up_pred.rows() != labels.rows() || up_pred.cols() != labels.cols())
        throw TrainError("trend_accuracy: shape mismatch");
    const long n = labels.rows();
    const long k = labels.cols();
    TrendAccuracy acc;
    acc.per_step = VectorXd::Zero(k);
    for (long j = 0; j < k; ++j) {
        long hits = 0;
        for (long i = 0; i < n; ++i)
            if ((up_pred(i, j) > 0.5) == (labels(i, j) > 0.5)) ++hits;
        acc.per_step(j) = static_cast<double>(hits) / static_cast<double>(n);
    }
    acc.avg = acc.per_step.mean();
    return acc;
}

MetricsReport evaluate(VariantModel& model, const WindowDataset& samples,
                       Split split) {
    if (samples.size() == 0) throw TrainError("evaluate: empty sample set");
    const auto t0 = Clock::now();
    constexpr long kChunk = 512;
    const long n = samples.size();
    const int k = samples.horizon();

    VectorXd sq = VectorXd::Zero(k);
    MatrixXd up_pred(n, k);
    for (long start = 0; start < n; start += kChunk) {
        std::vector<long> idx;
        for (long i = start; i < std::min(n, start + kChunk); ++i) idx.push_back(i);
        const WindowDataset chunk = samples.gather(idx);
        const ForwardResult r = model.forward(chunk);
        sq += (r.y_hat - chunk.targets).array().square().colwise().sum().matrix();
        up_pred.middleRows(start, chunk.size()) =
            model.predicted_up(r, chunk.x_n);
    }

    MetricsReport report;
    report.split = split;
    report.rmse_per_step.resize(k);
    for (int j = 0; j < k; ++j)
        report.rmse_per_step(j) = std::sqrt(sq(j) / static_cast<double>(n));
    report.rmse_avg = report.rmse_per_step.mean();
    const TrendAccuracy acc = trend_accuracy(up_pred, samples.trend);
    report.trend_acc_per_step = acc.per_step;
    report.trend_acc_avg = acc.avg;
    report.wall_clock_seconds = seconds_since(t0);
    return report;
}

MetricsReport evaluate_persistence(const WindowDataset& samples, Split split) {
    if (samples.size() == 0) throw TrainError("evaluate: empty sample set");
    const long n = samples.size();
    const int k = samples.horizon();
    MetricsReport report;
    report.split = split;
    report.rmse_per_step.resize(k);
    for (int j = 0; j < k; ++j) {
        const double sq =
            (samples.targets.col(j) - samples.x_n).array().square().sum();
        report.rmse_per_step(j) = std::sqrt(sq / static_cast<double>(n));
    }
    report.rmse_avg = report.rmse_per_step.mean();
    // Persistence always predicts "no change", labelled upward by the tie
    // rule, so its accuracy is the upward rate of the labels.
    const MatrixXd up = MatrixXd::Ones(n, k);
    const TrendAccuracy acc = trend_accuracy(up, samples.trend);
    report.trend_acc_per_step = acc.per_step;
    report.trend_acc_avg = acc.avg;
    return report;
}

CVSummary cross_validate(Variant variant, const EncoderConfig& encoder_config,
                         const HeadConfig& head_config, const PreparedData& data,
                         const TrainConfig& cfg, int fold_workers) {
    if (data.folds.empty()) throw TrainError("cross_validate: no folds");
    if (data.test.size() == 0) throw TrainError("cross_validate: empty test set");

    CVSummary summary;
    summary.variant = variant;
    summary.encoder = encoder_config.kind;
    summary.mode = cfg.mode;
    summary.horizon = head_config.horizon;
    summary.folds.resize(data.folds.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto run_fold = [&](std::size_t fi) {
        const FoldSplit& fold = data.folds[fi];
        const auto t0 = Clock::now();
        VariantModel model(variant, encoder_config, head_config, cfg.mode,
                           cfg.seed + static_cast<std::uint64_t>(fold.fold_id));
        TrainConfig fold_cfg = cfg;
        fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(fold.fold_id);
        FoldOutcome out;
        out.fold_id = fold.fold_id;
        out.training = train_model(model, data.pool, fold, fold_cfg);
        out.train = evaluate(model, data.pool.gather(fold.train_indices), Split::Train);
        out.val = evaluate(model, data.pool.gather(fold.val_indices), Split::Val);
        out.test = evaluate(model, data.test, Split::Test);
        // One wall clock per fold: training plus all three evaluations.
        const double elapsed = seconds_since(t0);
        out.train.wall_clock_seconds = elapsed;
        out.val.wall_clock_seconds = elapsed;
        out.test.wall_clock_seconds = elapsed;
        summary.folds[fi] = std::move(out);
    };

    auto worker = [&]() {
        for (;;) {
            const std::size_t fi = next.fetch_add(1);
            if (fi >= data.folds.size() || failed.load()) return;
            try {
                run_fold(fi);
            } catch (const std::exception& e) {
                failed.store(true);
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty())
                    failure = "fold " + std::to_string(data.folds[fi].fold_id) +
                              ": " + e.what();
            }
        }
    };

    const int workers = std::max(1, std::min<int>(fold_workers,
                                                  static_cast<int>(data.folds.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failed.load()) throw TrainError("cross_validate aborted: " + failure);
    return summary;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd ms;
    if (values.empty()) return ms;
    double sum = 0.0;
    for (double v : values) sum += v;
    ms.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - ms.mean) * (v - ms.mean);
    ms.std = std::sqrt(sq / static_cast<double>(values.size()));
    return ms;
}

void save_metrics(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write metrics file '" + path + "'");
    const long k = report.rmse_per_step.size();
    out << "# carets metrics v1\n";
    out << "split " << to_string(report.split) << "\n";
    out << "horizon " << k << "\n";
    out << "rmse_avg " << fmt_double(report.rmse_avg) << "\n";
    for (long j = 0; j < k; ++j)
        out << "rmse_step_" << (j + 1) << ' ' << fmt_double(report.rmse_per_step(j))
            << "\n";
    out << "trend_acc_avg " << fmt_double(report.trend_acc_avg) << "\n";
    for (long j = 0; j < k; ++j)
        out << "trend_acc_step_" << (j + 1) << ' '
            << fmt_double(report.trend_acc_per_step(j)) << "\n";
    out << "time_seconds " << fmt_double(report.wall_clock_seconds) << "\n";
}

MetricsReport load_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open metrics file '" + path + "'");
    std::string line;
    std::getline(in, line);
    MetricsReport report;
    long k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key, val;
        ss >> key >> val;
        if (key == "split") {
            if (val == "train") report.split = Split::Train;
            else if (val == "val") report.split = Split::Val;
            else report.split = Split::Test;
        } else if (key == "horizon") {
            k = parse_long(val, path);
            report.rmse_per_step = VectorXd::Zero(k);
            report.trend_acc_per_step = VectorXd::Zero(k);
        } else if (key == "rmse_avg") {
            report.rmse_avg = parse_double(val, path);
        } else if (key == "trend_acc_avg") {
            report.trend_acc_avg = parse_double(val, path);
        } else if (key == "time_seconds") {
            report.wall_clock_seconds = parse_double(val, path);
        } else if (key.rfind("rmse_step_", 0) == 0) {
            const long j = parse_long(key.substr(10), path);
            report.rmse_per_step(j - 1) = parse_double(val, path);
        } else if (key.rfind("trend_acc_step_", 0) == 0) {
            const long j = parse_long(key.substr(15), path);
            report.trend_acc_per_step(j - 1) = parse_double(val, path);
        } else {
            throw DataError(path + ": unknown metrics key '" + key + "'");
        }
    }
    return report;
}

void save_training_log(const std::vector<EpochLogRow>& log,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write training log '" + path + "'");
    out << "epoch\tl_ca\tl_de\tl_op\tlog_var_ca\tlog_var_de\tlog_var_op\t"
           "reg_penalty\ttotal\tval_rmse\n";
    for (const auto& row : log) {
        out << row.epoch << '\t' << fmt_double(row.l_ca) << '\t'
            << fmt_double(row.l_de) << '\t' << fmt_double(row.l_op) << '\t'
            << fmt_double(row.log_var_ca) << '\t' << fmt_double(row.log_var_de)
            << '\t' << fmt_double(row.log_var_op) << '\t'
            << fmt_double(row.reg_penalty) << '\t' << fmt_double(row.total) << '\t'
            << fmt_double(row.val_rmse) << '\n';
    }
}

void save_cv_summary(const CVSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write cv summary '" + path + "'");
    out << "# carets cv-summary v1\n";
    out << "variant " << to_string(summary.variant) << "\n";
    out << "encoder " << to_string(summary.encoder) << "\n";
    out << "mode " << to_string(summary.mode) << "\n";
    out << "horizon " << summary.horizon << "\n";
    out << "num_folds " << summary.folds.size() << "\n";

    const auto emit = [&](const std::string& prefix,
                          const std::vector<double>& values) {
        const MeanStd ms = mean_std(values);
        out << prefix << "_mean " << fmt_double(ms.mean) << "\n";
        out << prefix << "_std " << fmt_double(ms.std) << "\n";
    };

    for (Split split : {Split::Train, Split::Val, Split::Test}) {
        const auto pick = [&](const FoldOutcome& f) -> const MetricsReport& {
            switch (split) {
                case Split::Train: return f.train;
                case Split::Val: return f.val;
                default: return f.test;
            }
        };
        const std::string sp = to_string(split);
        std::vector<double> v;
        for (const auto& f : summary.folds) v.push_back(pick(f).rmse_avg);
        emit(sp + "_rmse_avg", v);
        for (int j = 0; j < summary.horizon; ++j) {
            v.clear();
            for (const auto& f : summary.folds)
                v.push_back(pick(f).rmse_per_step(j));
            emit(sp + "_rmse_step_" + std::to_string(j + 1), v);
        }
        v.clear();
        for (const auto& f : summary.folds) v.push_back(pick(f).trend_acc_avg);
        emit(sp + "_trend_acc_avg", v);
        for (int j = 0; j < summary.horizon; ++j) {
            v.clear();
            for (const auto& f : summary.folds)
                v.push_back(pick(f).trend_acc_per_step(j));
            emit(sp + "_trend_acc_step_" + std::to_string(j + 1), v);
        }
    }
    std::vector<double> times;
    for (const auto& f : summary.folds) times.push_back(f.test.wall_clock_seconds);
    emit("time_seconds", times);
}

}  // namespace carets
