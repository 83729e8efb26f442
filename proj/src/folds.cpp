#include "carets/folds.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace carets {

std::vector<FoldSplit> make_folds(long num_pool_windows, int num_folds,
                                  std::uint64_t seed) {
    if (num_folds < 1) throw DataError("make_folds: num_folds must be >= 1");
    if (num_pool_windows < num_folds)
        throw DataError("make_folds: " + std::to_string(num_pool_windows) +
                        " windows cannot fill " + std::to_string(num_folds) +
                        " folds");

    std::vector<long> order(num_pool_windows);
    for (long i = 0; i < num_pool_windows; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    // First (N mod F) folds take the extra index, so sizes differ by at most 1.
    const long base = num_pool_windows / num_folds;
    const long extra = num_pool_windows % num_folds;
    std::vector<FoldSplit> folds(num_folds);
    long pos = 0;
    for (int f = 0; f < num_folds; ++f) {
        const long size = base + (f < extra ? 1 : 0);
        folds[f].fold_id = f + 1;
        folds[f].val_indices.assign(order.begin() + pos, order.begin() + pos + size);
        std::sort(folds[f].val_indices.begin(), folds[f].val_indices.end());
        pos += size;
    }
    for (int f = 0; f < num_folds; ++f) {
        auto& train = folds[f].train_indices;
        train.reserve(num_pool_windows - folds[f].val_indices.size());
        const auto& val = folds[f].val_indices;
        std::size_t vi = 0;
        for (long i = 0; i < num_pool_windows; ++i) {
            if (vi < val.size() && val[vi] == i) {
                ++vi;
            } else {
                train.push_back(i);
            }
        }
    }
    return folds;
}

void save_folds(const std::vector<FoldSplit>& folds, long num_pool_windows,
                std::uint64_t seed, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write folds file '" + path + "'");
    out << "# carets folds v1\n";
    out << "num_folds " << folds.size() << "\n";
    out << "num_pool_windows " << num_pool_windows << "\n";
    out << "seed " << seed << "\n";
    for (const auto& f : folds) {
        out << "fold " << f.fold_id << " val";
        for (long idx : f.val_indices) out << ' ' << idx;
        out << "\n";
    }
}

std::vector<FoldSplit> load_folds(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open folds file '" + path + "'");
    std::string line, key;
    std::getline(in, line);  // banner
    long num_folds = 0, num_pool = 0;
    std::uint64_t seed = 0;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, line)) throw DataError(path + ": truncated folds file");
        std::istringstream ss(line);
        ss >> key;
        if (key == "num_folds")
            ss >> num_folds;
        else if (key == "num_pool_windows")
            ss >> num_pool;
        else if (key == "seed")
            ss >> seed;
        else
            throw DataError(path + ": unexpected folds header '" + line + "'");
    }
    std::vector<FoldSplit> folds;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string kw, valkw;
        FoldSplit f;
        ss >> kw >> f.fold_id >> valkw;
        if (kw != "fold" || valkw != "val")
            throw DataError(path + ": malformed fold row '" + line + "'");
        long idx;
        while (ss >> idx) f.val_indices.push_back(idx);
        folds.push_back(std::move(f));
    }
    if (static_cast<long>(folds.size()) != num_folds)
        throw DataError(path + ": fold count mismatch");
    // Rebuild train side as the complement of each validation slice.
    for (auto& f : folds) {
        std::vector<char> in_val(num_pool, 0);
        for (long idx : f.val_indices) {
            if (idx < 0 || idx >= num_pool)
                throw DataError(path + ": fold index out of range");
            in_val[idx] = 1;
        }
        for (long i = 0; i < num_pool; ++i)
            if (!in_val[i]) f.train_indices.push_back(i);
    }
    return folds;
}

}  // namespace carets
