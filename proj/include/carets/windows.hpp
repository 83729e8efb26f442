#pragma once

#include "carets/common.hpp"
#include "carets/scaler.hpp"
#include "carets/series.hpp"

#include <string>
#include <vector>

namespace carets {

// One supervised example. Features are ordered
//   [month, weekday, hour, lag_{n_lags-1}, ..., lag_0]
// so the final entry is always x_n, the most recent (scaled) observation.
struct WindowSample {
    std::vector<double> features;
    double x_n = 0.0;
    std::vector<double> targets;     // K scaled future values
    std::vector<int> trend;          // K entries in {0,1}, 1 = upward
    std::vector<double> dev_abs;     // |y - x_n|
    std::vector<double> dev_up;      // max(y - x_n, 0)
    std::vector<double> dev_down;    // max(x_n - y, 0)
    long anchor = 0;                 // index of the current step in its segment
};

// Upward iff y >= x_n; a tie is labelled upward.
std::vector<int> make_trend_labels(const std::vector<double>& y, double x_n);

struct DeviationTargets {
    std::vector<double> abs;
    std::vector<double> up;
    std::vector<double> down;
};
DeviationTargets make_deviation_targets(const std::vector<double>& y, double x_n);

// One sample per valid anchor: count = L - n_lags - horizon + 1.
std::vector<WindowSample> build_windows(const std::vector<SeriesRecord>& series,
                                        int n_lags, int horizon,
                                        const MinMaxScaler& scaler);

// Column-oriented view of a window list, used by training and evaluation.
struct WindowDataset {
    MatrixXd features;   // (N, n_features)
    VectorXd x_n;        // (N)
    MatrixXd targets;    // (N, K)
    MatrixXd trend;      // (N, K), entries 0/1
    MatrixXd dev_abs;    // (N, K)
    MatrixXd dev_up;     // (N, K)
    MatrixXd dev_down;   // (N, K)
    std::vector<long> anchors;

    long size() const { return features.rows(); }
    int num_features() const { return static_cast<int>(features.cols()); }
    int horizon() const { return static_cast<int>(targets.cols()); }

    static WindowDataset from_samples(const std::vector<WindowSample>& samples);
    WindowDataset gather(const std::vector<long>& indices) const;

    void save(const std::string& path) const;
    static WindowDataset load(const std::string& path);
};

}  // namespace carets
