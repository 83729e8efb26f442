#include "carets/windows.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace carets {

std::vector<int> make_trend_labels(const std::vector<double>& y, double x_n) {
    std::vector<int> t(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) t[k] = y[k] >= x_n ? 1 : 0;
    return t;
}

DeviationTargets make_deviation_targets(const std::vector<double>& y, double x_n) {
    DeviationTargets d;
    d.abs.resize(y.size());
    d.up.resize(y.size());
    d.down.resize(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        d.abs[k] = std::abs(y[k] - x_n);
        d.up[k] = std::max(y[k] - x_n, 0.0);
        d.down[k] = std::max(x_n - y[k], 0.0);
    }
    return d;
}

std::vector<WindowSample> build_windows(const std::vector<SeriesRecord>& series,
                                        int n_lags, int horizon,
                                        const MinMaxScaler& scaler) {
    const long L = static_cast<long>(series.size());
    if (n_lags < 1 || horizon < 1)
        throw DataError("build_windows: n_lags and horizon must be >= 1");
    if (L < n_lags + horizon)
        throw DataError("build_windows: series of length " + std::to_string(L) +
                        " is shorter than n_lags + horizon = " +
                        std::to_string(n_lags + horizon));

    const int c_month = scaler.column_index("month");
    const int c_weekday = scaler.column_index("weekday");
    const int c_hour = scaler.column_index("hour");
    const int c_value = scaler.column_index("value");

    std::vector<WindowSample> out;
    out.reserve(static_cast<std::size_t>(L - n_lags - horizon + 1));
    // `anchor` is the index of the current time step; lags are the n_lags most
    // recent observations ending at the anchor itself.
    for (long anchor = n_lags - 1; anchor + horizon < L; ++anchor) {
        WindowSample w;
        w.anchor = anchor;
        w.features.reserve(3 + static_cast<std::size_t>(n_lags));
        const auto& cur = series[anchor];
        w.features.push_back(scaler.apply(c_month, cur.month));
        w.features.push_back(scaler.apply(c_weekday, cur.weekday));
        w.features.push_back(scaler.apply(c_hour, cur.hour));
        for (long i = anchor - n_lags + 1; i <= anchor; ++i)
            w.features.push_back(scaler.apply(c_value, series[i].value));
        w.x_n = w.features.back();

        w.targets.resize(horizon);
        for (int k = 0; k < horizon; ++k)
            w.targets[k] = scaler.apply(c_value, series[anchor + 1 + k].value);

        w.trend = make_trend_labels(w.targets, w.x_n);
        auto dev = make_deviation_targets(w.targets, w.x_n);
        w.dev_abs = std::move(dev.abs);
        w.dev_up = std::move(dev.up);
        w.dev_down = std::move(dev.down);
        out.push_back(std::move(w));
    }
    return out;
}

WindowDataset WindowDataset::from_samples(const std::vector<WindowSample>& samples) {
    WindowDataset d;
    if (samples.empty()) return d;
    const long n = static_cast<long>(samples.size());
    const int nf = static_cast<int>(samples[0].features.size());
    const int k = static_cast<int>(samples[0].targets.size());
    d.features.resize(n, nf);
    d.x_n.resize(n);
    d.targets.resize(n, k);
    d.trend.resize(n, k);
    d.dev_abs.resize(n, k);
    d.dev_up.resize(n, k);
    d.dev_down.resize(n, k);
    d.anchors.resize(n);
    for (long i = 0; i < n; ++i) {
        const auto& s = samples[i];
        for (int j = 0; j < nf; ++j) d.features(i, j) = s.features[j];
        d.x_n(i) = s.x_n;
        for (int j = 0; j < k; ++j) {
            d.targets(i, j) = s.targets[j];
            d.trend(i, j) = s.trend[j];
            d.dev_abs(i, j) = s.dev_abs[j];
            d.dev_up(i, j) = s.dev_up[j];
            d.dev_down(i, j) = s.dev_down[j];
        }
        d.anchors[i] = s.anchor;
    }
    return d;
}

WindowDataset WindowDataset::gather(const std::vector<long>& indices) const {
    WindowDataset d;
    const long n = static_cast<long>(indices.size());
    d.features.resize(n, features.cols());
    d.x_n.resize(n);
    d.targets.resize(n, targets.cols());
    d.trend.resize(n, trend.cols());
    d.dev_abs.resize(n, dev_abs.cols());
    d.dev_up.resize(n, dev_up.cols());
    d.dev_down.resize(n, dev_down.cols());
    d.anchors.resize(n);
    for (long i = 0; i < n; ++i) {
        const long src = indices[i];
        d.features.row(i) = features.row(src);
        d.x_n(i) = x_n(src);
        d.targets.row(i) = targets.row(src);
        d.trend.row(i) = trend.row(src);
        d.dev_abs.row(i) = dev_abs.row(src);
        d.dev_up.row(i) = dev_up.row(src);
        d.dev_down.row(i) = dev_down.row(src);
        d.anchors[i] = anchors[src];
    }
    return d;
}

void WindowDataset::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write window store '" + path + "'");
    const int k = horizon();
    out << "# carets windows v1\n";
    out << "n_windows " << size() << "\n";
    out << "n_features " << num_features() << "\n";
    out << "horizon " << k << "\n";
    for (long i = 0; i < size(); ++i) {
        out << anchors[i];
        for (int j = 0; j < num_features(); ++j)
            out << '\t' << fmt_double(features(i, j));
        for (int j = 0; j < k; ++j) out << '\t' << fmt_double(targets(i, j));
        for (int j = 0; j < k; ++j) out << '\t' << static_cast<int>(trend(i, j));
        for (int j = 0; j < k; ++j) out << '\t' << fmt_double(dev_abs(i, j));
        for (int j = 0; j < k; ++j) out << '\t' << fmt_double(dev_up(i, j));
        for (int j = 0; j < k; ++j) out << '\t' << fmt_double(dev_down(i, j));
        out << '\n';
    }
}

WindowDataset WindowDataset::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open window store '" + path + "'");
    std::string line, key;
    std::getline(in, line);  // banner
    long n = 0, nf = 0, k = 0;
    for (long* field : {&n, &nf, &k}) {
        if (!std::getline(in, line))
            throw DataError(path + ": truncated window store header");
        std::istringstream ss(line);
        ss >> key >> *field;
    }
    WindowDataset d;
    d.features.resize(n, nf);
    d.x_n.resize(n);
    d.targets.resize(n, k);
    d.trend.resize(n, k);
    d.dev_abs.resize(n, k);
    d.dev_up.resize(n, k);
    d.dev_down.resize(n, k);
    d.anchors.resize(n);
    for (long i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw DataError(path + ": truncated window store at row " +
                            std::to_string(i));
        std::istringstream ss(line);
        ss >> d.anchors[i];
        for (long j = 0; j < nf; ++j) ss >> d.features(i, j);
        for (long j = 0; j < k; ++j) ss >> d.targets(i, j);
        for (long j = 0; j < k; ++j) ss >> d.trend(i, j);
        for (long j = 0; j < k; ++j) ss >> d.dev_abs(i, j);
        for (long j = 0; j < k; ++j) ss >> d.dev_up(i, j);
        for (long j = 0; j < k; ++j) ss >> d.dev_down(i, j);
        if (!ss) throw DataError(path + ": malformed window row " + std::to_string(i));
        d.x_n(i) = d.features(i, nf - 1);
    }
    return d;
}

}  // namespace carets
