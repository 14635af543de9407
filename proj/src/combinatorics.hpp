#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kpath::detail {

/// Calls f(std::span<const T>) for every r-subset of `pool`, in lexicographic order of
/// positions. Stops early when f returns false.
template <class T, class F>
bool for_each_combination(std::span<const T> pool, std::size_t r, F&& f) {
    if (r > pool.size()) return true;
    std::vector<std::size_t> idx(r);
    std::vector<T> pick(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    while (true) {
        for (std::size_t i = 0; i < r; ++i) pick[i] = pool[idx[i]];
        if (!f(std::span<const T>(pick))) return false;
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == pool.size() - r + (i - 1)) --i;
        if (i == 0) return true;
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace kpath::detail
