#pragma once

#include "carets/common.hpp"

#include <string>
#include <vector>

namespace carets {

struct FoldSplit {
    int fold_id = 0;                  // 1-based
    std::vector<long> train_indices;  // pool indices outside the fold
    std::vector<long> val_indices;    // this fold's validation slice
};

// Uniform random assignment of pool window indices to `num_folds` validation
// folds, sizes differing by at most one. Deterministic given the seed.
std::vector<FoldSplit> make_folds(long num_pool_windows, int num_folds = 10,
                                  std::uint64_t seed = 2025);

void save_folds(const std::vector<FoldSplit>& folds, long num_pool_windows,
                std::uint64_t seed, const std::string& path);
std::vector<FoldSplit> load_folds(const std::string& path);

}  // namespace carets
