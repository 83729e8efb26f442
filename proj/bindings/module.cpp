#include "carets/baselines.hpp"
#include "carets/commands.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace carets;

namespace {

VectorXd to_vec(const std::vector<double>& v) {
    VectorXd out(static_cast<long>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<long>(i)) = v[i];
    return out;
}

ExperimentConfig config_from_dict(const py::dict& d) {
    ExperimentConfig cfg;
    for (auto item : d) {
        const std::string key = py::cast<std::string>(item.first);
        const std::string value = py::cast<std::string>(py::str(item.second));
        cfg.set(key, value == "True" ? "true" : value == "False" ? "false" : value,
                "config dict");
    }
    return cfg;
}

py::dict metrics_to_dict(const MetricsReport& r) {
    py::dict out;
    out["split"] = to_string(r.split);
    out["rmse_avg"] = r.rmse_avg;
    out["rmse_per_step"] = r.rmse_per_step;
    out["trend_acc_avg"] = r.trend_acc_avg;
    out["trend_acc_per_step"] = r.trend_acc_per_step;
    out["time_seconds"] = r.wall_clock_seconds;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "carets: dual-stream trend/deviation multi-step forecasting";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<TrainError>(m, "TrainError");

    // ------------------------------------------------------ data pipeline
    py::class_<SeriesRecord>(m, "SeriesRecord")
        .def_readonly("hours_since_epoch", &SeriesRecord::hours_since_epoch)
        .def_readonly("month", &SeriesRecord::month)
        .def_readonly("weekday", &SeriesRecord::weekday)
        .def_readonly("hour", &SeriesRecord::hour)
        .def_readonly("value", &SeriesRecord::value)
        .def("__repr__", [](const SeriesRecord& r) {
            return "SeriesRecord(" + format_timestamp(r.hours_since_epoch) + ", " +
                   fmt_double(r.value) + ")";
        });

    m.def("load_series", &load_series, py::arg("path"),
          "Load a timestamp,value CSV of hourly records");
    m.def("format_timestamp", &format_timestamp, py::arg("hours_since_epoch"));

    py::class_<MinMaxScaler>(m, "MinMaxScaler")
        .def(py::init<>())
        .def("fit", &MinMaxScaler::fit, py::arg("names"), py::arg("columns"))
        .def("apply", &MinMaxScaler::apply, py::arg("column"), py::arg("value"))
        .def("invert", &MinMaxScaler::invert, py::arg("column"), py::arg("value"))
        .def("apply_column", &MinMaxScaler::apply_column)
        .def("invert_column", &MinMaxScaler::invert_column)
        .def("column_index", &MinMaxScaler::column_index)
        .def_property_readonly("num_columns", &MinMaxScaler::num_columns)
        .def("min", &MinMaxScaler::min)
        .def("max", &MinMaxScaler::max)
        .def("save", &MinMaxScaler::save)
        .def_static("load", &MinMaxScaler::load);

    m.def(
        "make_trend_labels",
        [](const std::vector<double>& y, double x_n) {
            return make_trend_labels(y, x_n);
        },
        py::arg("y"), py::arg("x_n"),
        "Per-step upward/downward labels; ties count as upward");
    m.def(
        "make_deviation_targets",
        [](const std::vector<double>& y, double x_n) {
            const DeviationTargets d = make_deviation_targets(y, x_n);
            return py::make_tuple(d.abs, d.up, d.down);
        },
        py::arg("y"), py::arg("x_n"),
        "(|y - x_n|, max(y - x_n, 0), max(x_n - y, 0)) per step");

    py::class_<WindowDataset>(m, "WindowDataset")
        .def_readonly("features", &WindowDataset::features)
        .def_readonly("x_n", &WindowDataset::x_n)
        .def_readonly("targets", &WindowDataset::targets)
        .def_readonly("trend", &WindowDataset::trend)
        .def_readonly("dev_abs", &WindowDataset::dev_abs)
        .def_readonly("dev_up", &WindowDataset::dev_up)
        .def_readonly("dev_down", &WindowDataset::dev_down)
        .def("__len__", &WindowDataset::size)
        .def_property_readonly("horizon", &WindowDataset::horizon)
        .def("save", &WindowDataset::save)
        .def_static("load", &WindowDataset::load);

    m.def(
        "build_windows",
        [](const std::vector<SeriesRecord>& series, int n_lags, int horizon,
           const MinMaxScaler& scaler) {
            return WindowDataset::from_samples(
                build_windows(series, n_lags, horizon, scaler));
        },
        py::arg("series"), py::arg("n_lags"), py::arg("horizon"),
        py::arg("scaler"),
        "Sliding supervised windows; count is len(series) - n_lags - horizon + 1");

    m.def(
        "make_folds",
        [](long num_pool_windows, int num_folds, std::uint64_t seed) {
            py::list out;
            for (const auto& f : make_folds(num_pool_windows, num_folds, seed)) {
                py::dict d;
                d["fold_id"] = f.fold_id;
                d["train_indices"] = f.train_indices;
                d["val_indices"] = f.val_indices;
                out.append(d);
            }
            return out;
        },
        py::arg("num_pool_windows"), py::arg("num_folds") = 10,
        py::arg("seed") = 2025);

    // ------------------------------------------------------------- losses
    m.def("loss_bce", [](const std::vector<double>& p, const std::vector<double>& t) {
        return loss_bce(to_vec(p), to_vec(t));
    });
    m.def("loss_de_abs",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              return loss_de_abs(to_vec(a), to_vec(b));
          });
    m.def("loss_de_directional",
          [](const std::vector<double>& uh, const std::vector<double>& dh,
             const std::vector<double>& u, const std::vector<double>& d,
             const std::vector<double>& t) {
              return loss_de_directional(to_vec(uh), to_vec(dh), to_vec(u),
                                         to_vec(d), to_vec(t));
          });
    m.def("loss_ce_pair",
          [](const std::vector<double>& pu, const std::vector<double>& pd,
             const std::vector<double>& t) {
              return loss_ce_pair(to_vec(pu), to_vec(pd), to_vec(t));
          });
    m.def("loss_op", [](const std::vector<double>& yh, const std::vector<double>& y) {
        return loss_op(to_vec(yh), to_vec(y));
    });
    m.def("task_weight", &task_weight, py::arg("log_var"),
          "0.5 * exp(-log_var), the inverse-variance task weight");
    m.def("clamp_log_var", &clamp_log_var);
    m.def(
        "total_loss",
        [](double l_ca, double l_de, double l_op, double log_var_ca,
           double log_var_de, double log_var_op, const std::string& arch,
           double reg_coeff) {
            UncertaintyState s;
            s.log_var_ca = log_var_ca;
            s.log_var_de = log_var_de;
            s.log_var_op = log_var_op;
            const Arch a = arch == "b" ? Arch::B : Arch::A;
            const LossBreakdown out = total_loss(l_ca, l_de, l_op, s, a, reg_coeff);
            py::dict d;
            d["l_ca"] = out.l_ca;
            d["l_de"] = out.l_de;
            d["l_op"] = out.l_op;
            d["weight_ca"] = out.weight_ca;
            d["weight_de"] = out.weight_de;
            d["weight_op"] = out.weight_op;
            d["reg_penalty"] = out.reg_penalty;
            d["total"] = out.total;
            return d;
        },
        py::arg("l_ca"), py::arg("l_de"), py::arg("l_op"),
        py::arg("log_var_ca") = 0.0, py::arg("log_var_de") = 0.0,
        py::arg("log_var_op") = 0.0, py::arg("arch") = "a",
        py::arg("reg_coeff") = 0.0);

    // ------------------------------------------------------ trend / fusion
    m.def("trend_sigmoid", &trend_sigmoid, py::arg("z"));
    m.def("trend_decide", &trend_decide, py::arg("p"));
    m.def(
        "trend_softmax",
        [](double z_up, double z_down) {
            const ProbPair p = trend_softmax(z_up, z_down);
            return py::make_tuple(p.up, p.down);
        },
        py::arg("z_up"), py::arg("z_down"));
    m.def("fuse_carets1",
          [](double x_n, const std::vector<double>& d, const std::vector<double>& dev) {
              return fuse_sign_magnitude(x_n, to_vec(d), to_vec(dev));
          });
    m.def("fuse_carets2",
          [](double x_n, const std::vector<double>& d, const std::vector<double>& up,
             const std::vector<double>& down) {
              return fuse_selected_direction(x_n, to_vec(d), to_vec(up), to_vec(down));
          });
    m.def("fuse_carets3",
          [](double x_n, const std::vector<double>& p_up,
             const std::vector<double>& up, const std::vector<double>& down) {
              return fuse_soft_weighted(x_n, to_vec(p_up), to_vec(up), to_vec(down));
          });
    m.def("persistence_forecast",
          [](double x_n, int horizon) { return persistence_forecast(x_n, horizon); });

    // -------------------------------------------------------------- models
    py::class_<ForwardResult>(m, "ForwardResult")
        .def_readonly("y_hat", &ForwardResult::y_hat)
        .def_readonly("p_up", &ForwardResult::p_up)
        .def_readonly("p_down", &ForwardResult::p_down)
        .def_readonly("d_hat", &ForwardResult::d_hat)
        .def_readonly("dev", &ForwardResult::dev)
        .def_readonly("dev_up", &ForwardResult::dev_up)
        .def_readonly("dev_down", &ForwardResult::dev_down);

    py::class_<VariantModel>(m, "VariantModel")
        .def(py::init([](const std::string& variant, const std::string& encoder,
                         int horizon, int hidden_dim, int num_layers,
                         int num_heads, int fc_hidden, int num_fc_layers,
                         const std::string& mode, std::uint64_t seed) {
                 EncoderConfig ec;
                 ec.kind = encoder_kind_from_string(encoder);
                 ec.hidden_dim = hidden_dim;
                 ec.num_layers = num_layers;
                 ec.num_heads = num_heads;
                 HeadConfig hc;
                 hc.horizon = horizon;
                 hc.fc_hidden = fc_hidden;
                 hc.num_fc_layers = num_fc_layers;
                 return VariantModel(variant_from_string(variant), ec, hc,
                                     mode_from_string(mode), seed);
             }),
             py::arg("variant"), py::arg("encoder"), py::arg("horizon") = 6,
             py::arg("hidden_dim") = 64, py::arg("num_layers") = 2,
             py::arg("num_heads") = 4, py::arg("fc_hidden") = 64,
             py::arg("num_fc_layers") = 2, py::arg("mode") = "multi_task",
             py::arg("seed") = 2025)
        .def("forward", &VariantModel::forward, py::arg("batch"))
        .def("predicted_up", &VariantModel::predicted_up, py::arg("result"),
             py::arg("x_n"))
        .def("save", &VariantModel::save)
        .def_static("load", &VariantModel::load)
        .def_property_readonly("variant",
                               [](const VariantModel& m) { return to_string(m.variant); })
        .def_property_readonly("encoder",
                               [](const VariantModel& m) {
                                   return to_string(m.encoder_config.kind);
                               })
        .def_property_readonly("horizon", &VariantModel::horizon);

    m.def(
        "train_model",
        [](VariantModel& model, const WindowDataset& pool,
           const std::vector<long>& train_indices,
           const std::vector<long>& val_indices, int max_epochs, int patience,
           double learning_rate, int batch_size, std::uint64_t seed,
           double reg_coeff) {
            FoldSplit fold;
            fold.fold_id = 1;
            fold.train_indices = train_indices;
            fold.val_indices = val_indices;
            TrainConfig tc;
            tc.max_epochs = max_epochs;
            tc.patience = patience;
            tc.learning_rate = learning_rate;
            tc.batch_size = batch_size;
            tc.seed = seed;
            tc.mode = model.mode;
            tc.reg_coeff = reg_coeff;
            const TrainResult r = train_model(model, pool, fold, tc);
            py::dict out;
            out["best_epoch"] = r.best_epoch;
            out["best_val_rmse"] = r.best_val_rmse;
            out["stopped_epoch"] = r.stopped_epoch;
            out["train_seconds"] = r.train_seconds;
            py::list log;
            for (const auto& row : r.log) {
                py::dict e;
                e["epoch"] = row.epoch;
                e["l_ca"] = row.l_ca;
                e["l_de"] = row.l_de;
                e["l_op"] = row.l_op;
                e["log_var_ca"] = row.log_var_ca;
                e["log_var_de"] = row.log_var_de;
                e["log_var_op"] = row.log_var_op;
                e["total"] = row.total;
                e["val_rmse"] = row.val_rmse;
                log.append(e);
            }
            out["log"] = log;
            return out;
        },
        py::arg("model"), py::arg("pool"), py::arg("train_indices"),
        py::arg("val_indices"), py::arg("max_epochs") = 600,
        py::arg("patience") = 50, py::arg("learning_rate") = 0.001,
        py::arg("batch_size") = 64, py::arg("seed") = 2025,
        py::arg("reg_coeff") = 0.01);

    m.def(
        "evaluate",
        [](VariantModel& model, const WindowDataset& samples) {
            return metrics_to_dict(evaluate(model, samples, Split::Test));
        },
        py::arg("model"), py::arg("samples"));
    m.def(
        "evaluate_persistence",
        [](const WindowDataset& samples) {
            return metrics_to_dict(evaluate_persistence(samples, Split::Test));
        },
        py::arg("samples"));

    // ------------------------------------------------------------ commands
    m.def(
        "prepare", [](const py::dict& d) { cmd_prepare(config_from_dict(d)); },
        py::arg("config"), "Run the prepare pipeline from a config dict");
    m.def(
        "cross_validate",
        [](const py::dict& d) {
            const ExperimentConfig cfg = config_from_dict(d);
            const CVSummary s = cmd_cv(cfg);
            py::list folds;
            for (const auto& f : s.folds) {
                py::dict fd;
                fd["fold_id"] = f.fold_id;
                fd["train"] = metrics_to_dict(f.train);
                fd["val"] = metrics_to_dict(f.val);
                fd["test"] = metrics_to_dict(f.test);
                folds.append(fd);
            }
            py::dict out;
            out["variant"] = to_string(s.variant);
            out["encoder"] = to_string(s.encoder);
            out["folds"] = folds;
            return out;
        },
        py::arg("config"),
        "Run cross-validation from a config dict (requires a prepared dataset)");
}
