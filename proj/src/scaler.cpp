#include "carets/scaler.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace carets {

void MinMaxScaler::fit(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size())
        throw DataError("scaler: name/column count mismatch");
    names_ = names;
    mins_.assign(columns.size(), 0.0);
    maxs_.assign(columns.size(), 0.0);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto& col = columns[c];
        if (col.empty())
            throw DataError("scaler: column '" + names[c] + "' is empty");
        double lo = col[0], hi = col[0];
        for (double v : col) {
            if (!std::isfinite(v))
                throw DataError("scaler: non-finite value in column '" + names[c] +
                                "'");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        mins_[c] = lo;
        maxs_[c] = hi;
    }
}

void MinMaxScaler::check_column(int column) const {
    if (column < 0 || column >= num_columns())
        throw DataError("scaler: column index " + std::to_string(column) +
                        " out of range (have " + std::to_string(num_columns()) +
                        " columns)");
}

double MinMaxScaler::apply(int column, double v) const {
    check_column(column);
    const double lo = mins_[column], hi = maxs_[column];
    if (hi == lo) return 0.0;  // constant column
    return (v - lo) / (hi - lo);
}

double MinMaxScaler::invert(int column, double v) const {
    check_column(column);
    const double lo = mins_[column], hi = maxs_[column];
    if (hi == lo) return lo;
    return lo + v * (hi - lo);
}

std::vector<double> MinMaxScaler::apply_column(int column,
                                               const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = apply(column, v[i]);
    return out;
}

std::vector<double> MinMaxScaler::invert_column(int column,
                                                const std::vector<double>& v) const {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = invert(column, v[i]);
    return out;
}

int MinMaxScaler::column_index(const std::string& name) const {
    for (int i = 0; i < num_columns(); ++i)
        if (names_[i] == name) return i;
    throw DataError("scaler: unknown column '" + name + "'");
}

void MinMaxScaler::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write scaler file '" + path + "'");
    out << "# carets scaler v1\n";
    out << "columns " << num_columns() << "\n";
    for (int i = 0; i < num_columns(); ++i)
        out << "column " << names_[i] << " min " << fmt_double(mins_[i]) << " max "
            << fmt_double(maxs_[i]) << "\n";
}

MinMaxScaler MinMaxScaler::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scaler file '" + path + "'");
    std::string line;
    std::getline(in, line);  // banner
    long n = 0;
    {
        std::string key;
        std::getline(in, line);
        std::istringstream ss(line);
        ss >> key >> n;
        if (key != "columns") throw DataError(path + ": malformed scaler file");
    }
    MinMaxScaler s;
    for (long i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw DataError(path + ": truncated scaler file");
        std::istringstream ss(line);
        std::string kw, name, kmin, vmin, kmax, vmax;
        ss >> kw >> name >> kmin >> vmin >> kmax >> vmax;
        if (kw != "column" || kmin != "min" || kmax != "max")
            throw DataError(path + ": malformed scaler row '" + line + "'");
        s.names_.push_back(name);
        s.mins_.push_back(parse_double(vmin, path));
        s.maxs_.push_back(parse_double(vmax, path));
    }
    return s;
}

}  // namespace carets
