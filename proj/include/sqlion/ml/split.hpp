#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "sqlion/error.hpp"
#include "sqlion/ml/labeled_dataset.hpp"
#include "sqlion/rng.hpp"

namespace sqlion {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1; the first floor(n * test_fraction) positions
/// form the test set and the remainder the training set.
inline SplitIndices split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("split: dataset is empty");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidArgument("split: test fraction must lie in (0, 1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);

    // The epsilon keeps products such as 10 * 0.3 from flooring to 2.
    auto test_size = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction + 1e-9));
    SplitIndices out;
    out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
    return out;
}

struct TrainTestSplit {
    LabeledDataset train;
    LabeledDataset test;
};

inline TrainTestSplit split(const LabeledDataset& data, double test_fraction, std::uint64_t seed) {
    auto idx = split_indices(data.size(), test_fraction, seed);
    TrainTestSplit out;
    out.train.rows.reserve(idx.train.size());
    out.test.rows.reserve(idx.test.size());
    for (auto i : idx.train) out.train.rows.push_back(data.rows[i]);
    for (auto i : idx.test) out.test.rows.push_back(data.rows[i]);
    return out;
}

} // namespace sqlion
