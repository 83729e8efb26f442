#pragma once

#include "carets/common.hpp"
#include "carets/nn.hpp"
#include "carets/series.hpp"
#include "carets/scaler.hpp"
#include "carets/windows.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace testutil {

// Unique scratch directory, removed on destruction.
class TmpDir {
public:
    explicit TmpDir(const std::string& hint) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("carets_" + hint + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }
    std::string path() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

// Hourly records starting 2025-01-01T00:00:00 with the given values.
inline std::vector<carets::SeriesRecord> hourly_records(
    const std::vector<double>& values) {
    std::vector<carets::SeriesRecord> out;
    out.reserve(values.size());
    const carets::SeriesRecord first =
        carets::parse_record("2025-01-01T00:00:00", 0.0, "test");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::int64_t h = first.hours_since_epoch + static_cast<std::int64_t>(i);
        carets::SeriesRecord r =
            carets::parse_record(carets::format_timestamp(h), values[i], "test");
        out.push_back(r);
    }
    return out;
}

inline void write_csv(const std::string& path, const std::vector<double>& values,
                      const std::string& start = "2025-01-01T00:00:00") {
    std::ofstream out(path);
    out << "timestamp,value\n";
    const carets::SeriesRecord first = carets::parse_record(start, 0.0, "test");
    for (std::size_t i = 0; i < values.size(); ++i)
        out << carets::format_timestamp(first.hours_since_epoch +
                                        static_cast<std::int64_t>(i))
            << ',' << carets::fmt_double(values[i]) << "\n";
}

// Daily sinusoidal cycle plus a mild linear trend and 5% noise.
inline std::vector<double> synthetic_series(long n, std::uint64_t seed,
                                            double amplitude = 3.0,
                                            double slope = 0.001,
                                            double noise_frac = 0.05) {
    carets::Rng rng(seed);
    std::vector<double> v(n);
    for (long t = 0; t < n; ++t)
        v[t] = 10.0 + amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / 24.0) +
               slope * static_cast<double>(t) +
               noise_frac * amplitude * rng.normal();
    return v;
}

// Windows over an hourly series, scaler fitted on the whole series.
inline carets::WindowDataset windows_from_series(const std::vector<double>& values,
                                                 int n_lags, int horizon) {
    const auto records = hourly_records(values);
    std::vector<std::vector<double>> cols(4);
    for (const auto& r : records) {
        cols[0].push_back(r.month);
        cols[1].push_back(r.weekday);
        cols[2].push_back(r.hour);
        cols[3].push_back(r.value);
    }
    carets::MinMaxScaler scaler;
    scaler.fit({"month", "weekday", "hour", "value"}, cols);
    return carets::WindowDataset::from_samples(
        carets::build_windows(records, n_lags, horizon, scaler));
}

// Random window dataset with self-consistent labels and deviation targets.
inline carets::WindowDataset random_dataset(long n, int n_features, int horizon,
                                            std::uint64_t seed) {
    carets::Rng rng(seed);
    std::vector<carets::WindowSample> samples(n);
    for (long i = 0; i < n; ++i) {
        auto& w = samples[i];
        w.anchor = i;
        w.features.resize(n_features);
        for (int j = 0; j < n_features; ++j) w.features[j] = rng.uniform();
        w.x_n = w.features.back();
        w.targets.resize(horizon);
        for (int k = 0; k < horizon; ++k)
            w.targets[k] = w.x_n + rng.uniform(-0.5, 0.5);
        w.trend = carets::make_trend_labels(w.targets, w.x_n);
        auto dev = carets::make_deviation_targets(w.targets, w.x_n);
        w.dev_abs = std::move(dev.abs);
        w.dev_up = std::move(dev.up);
        w.dev_down = std::move(dev.down);
    }
    return carets::WindowDataset::from_samples(samples);
}

struct GradCheckResult {
    double max_rel = 0.0;
    std::string worst;
};

// Central finite differences against already-accumulated analytic gradients.
// The loss functor must recompute the loss from current parameter values.
inline GradCheckResult grad_check(const std::vector<carets::nn::ParamView>& params,
                                  const std::function<double()>& loss_fn,
                                  double h = 1e-5) {
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params)
        analytic.emplace_back(p.grad, p.grad + p.size);

    GradCheckResult res;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        for (std::size_t j = 0; j < p.size; ++j) {
            const double orig = p.value[j];
            const double step = h * std::max(1.0, std::abs(orig));
            p.value[j] = orig + step;
            const double lp = loss_fn();
            p.value[j] = orig - step;
            const double lm = loss_fn();
            p.value[j] = orig;
            const double fd = (lp - lm) / (2.0 * step);
            const double a = analytic[i][j];
            const double denom = std::max(std::abs(a), std::abs(fd));
            double rel = 0.0;
            if (denom < 1e-6) {
                rel = std::abs(a - fd) < 1e-8 ? 0.0 : 1.0;
            } else {
                rel = std::abs(a - fd) / denom;
            }
            if (rel > res.max_rel) {
                res.max_rel = rel;
                res.worst = p.name + "[" + std::to_string(j) + "] analytic " +
                            std::to_string(a) + " fd " + std::to_string(fd);
            }
        }
    }
    return res;
}

}  // namespace testutil
