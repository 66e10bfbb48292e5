#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/point.hpp"
#include "imkit/rng.hpp"

namespace imkit {

/// Disjoint index sets D₁, D₂ covering 0..n−1.
struct SplitSpec {
    std::vector<std::size_t> d1;
    std::vector<std::size_t> d2;
    std::optional<std::uint64_t> permutation_seed;

    /// First ⌊n/2⌋ observations in D₁, the rest in D₂.
    static SplitSpec first_half(std::size_t n) {
        SplitSpec s;
        for (std::size_t i = 0; i < n; ++i) (i < n / 2 ? s.d1 : s.d2).push_back(i);
        return s;
    }

    static SplitSpec random(std::size_t n, std::uint64_t seed) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        RngStream rng(seed, 0x5917);
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_u64() % i]);
        SplitSpec s;
        s.d1.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n / 2));
        s.d2.assign(perm.begin() + static_cast<std::ptrdiff_t>(n / 2), perm.end());
        std::sort(s.d1.begin(), s.d1.end());
        std::sort(s.d2.begin(), s.d2.end());
        s.permutation_seed = seed;
        return s;
    }

    std::size_t n() const { return d1.size() + d2.size(); }

    void validate(std::size_t n_data) const {
        if (d1.empty() || d2.empty()) throw ConfigError("SplitSpec: both halves must be nonempty");
        std::vector<char> seen(n_data, 0);
        for (const auto* part : {&d1, &d2})
            for (std::size_t i : *part) {
                if (i >= n_data) throw ConfigError("SplitSpec: index out of range");
                if (seen[i]++) throw ConfigError("SplitSpec: index sets overlap");
            }
        if (n() != n_data) throw ConfigError("SplitSpec: index sets do not cover the data");
    }

    std::pair<Sample, Sample> apply(const Sample& x) const {
        Sample a, b;
        a.reserve(d1.size());
        b.reserve(d2.size());
        for (std::size_t i : d1) a.push_back(x[i]);
        for (std::size_t i : d2) b.push_back(x[i]);
        return {std::move(a), std::move(b)};
    }
};

}  // namespace imkit
