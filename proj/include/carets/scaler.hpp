#pragma once

#include "carets/common.hpp"

#include <string>
#include <vector>

namespace carets {

// Per-column Min-Max scaler. Fitted on training data only. A constant column
// (max == min) maps to 0 and inverts back to the stored constant.
// Out-of-range values extrapolate linearly; there is no clipping.
class MinMaxScaler {
public:
    MinMaxScaler() = default;

    void fit(const std::vector<std::string>& names,
             const std::vector<std::vector<double>>& columns);

    double apply(int column, double v) const;
    double invert(int column, double v) const;

    std::vector<double> apply_column(int column, const std::vector<double>& v) const;
    std::vector<double> invert_column(int column, const std::vector<double>& v) const;

    int num_columns() const { return static_cast<int>(names_.size()); }
    int column_index(const std::string& name) const;
    const std::string& name(int column) const { return names_.at(column); }
    double min(int column) const { return mins_.at(column); }
    double max(int column) const { return maxs_.at(column); }
    bool fitted() const { return !names_.empty(); }

    void save(const std::string& path) const;
    static MinMaxScaler load(const std::string& path);

private:
    void check_column(int column) const;

    std::vector<std::string> names_;
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

}  // namespace carets
