#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace bosrec {

/// One non-negative Fock index per mode. All per-mode exponent and
/// occupation bookkeeping in the reconstruction formulas runs through
/// this type so that mode-count mismatches surface as errors instead of
/// silent truncation.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> values) : idx_(values) { validate(); }
    explicit MultiIndex(std::vector<int> values) : idx_(std::move(values)) { validate(); }

    static MultiIndex zeros(int modes) { return MultiIndex(std::vector<int>(modes, 0)); }

    int modes() const { return static_cast<int>(idx_.size()); }
    int operator[](int j) const { return idx_[static_cast<std::size_t>(j)]; }
    int& operator[](int j) { return idx_[static_cast<std::size_t>(j)]; }

    int total() const {
        int s = 0;
        for (int v : idx_) s += v;
        return s;
    }

    const std::vector<int>& values() const { return idx_; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.idx_ == b.idx_; }

    std::string to_string() const {
        std::string s;
        for (std::size_t j = 0; j < idx_.size(); ++j) {
            if (j > 0) s += ':';
            s += std::to_string(idx_[j]);
        }
        return s;
    }

private:
    void validate() const {
        for (int v : idx_) {
            if (v < 0) throw std::invalid_argument("MultiIndex: entries must be non-negative");
        }
    }

    std::vector<int> idx_;
};

/// Odometer-style iteration over the box [lo, hi] (inclusive, per mode).
/// Does nothing if the box is empty in any direction.
template <typename Fn>
void for_each_in_box(const std::vector<int>& lo, const std::vector<int>& hi, Fn&& fn) {
    const std::size_t n = lo.size();
    for (std::size_t j = 0; j < n; ++j) {
        if (hi[j] < lo[j]) return;
    }
    std::vector<int> cur = lo;
    while (true) {
        fn(cur);
        std::size_t j = 0;
        while (j < n && cur[j] == hi[j]) {
            cur[j] = lo[j];
            ++j;
        }
        if (j == n) return;
        ++cur[j];
    }
}

struct MultiIndexPairHash {
    std::size_t operator()(const std::pair<std::vector<int>, std::vector<int>>& p) const {
        std::size_t h = 0x9e3779b97f4a7c15ull;
        auto mix = [&h](int v) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        for (int v : p.first) mix(v);
        mix(-1);
        for (int v : p.second) mix(v);
        return h;
    }
};

}  // namespace bosrec
