#pragma once

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "cumper/grid.hpp"
#include "cumper/persistence.hpp"
#include "cumper/vectorize.hpp"

namespace testutil {

/// 5x5 toy sublevel fixture with five thresholds; a ring of 1s encloses the 0.
inline cumper::ValueGrid toy_grid() {
    return cumper::ValueGrid::from_rows({{3, 3, 4, 5, 5},
                                         {3, 1, 1, 1, 5},
                                         {4, 1, 0, 1, 4},
                                         {5, 1, 1, 1, 3},
                                         {5, 5, 4, 3, 2}});
}

inline cumper::ValueGrid random_grid(std::mt19937_64& rng, int h, int w, int max_value) {
    std::uniform_int_distribution<int> v(0, max_value);
    std::vector<double> vals(static_cast<std::size_t>(h) * w);
    for (auto& x : vals) x = v(rng);
    return cumper::ValueGrid(h, w, std::move(vals));
}

inline cumper::ValueGrid random_real_grid(std::mt19937_64& rng, int h, int w) {
    std::uniform_real_distribution<double> v(0.0, 1.0);
    std::vector<double> vals(static_cast<std::size_t>(h) * w);
    for (auto& x : vals) x = v(rng);
    return cumper::ValueGrid(h, w, std::move(vals));
}

inline cumper::BinaryGrid random_mask(std::mt19937_64& rng, int h, int w, double density = 0.5) {
    std::bernoulli_distribution b(density);
    std::vector<std::uint8_t> act(static_cast<std::size_t>(h) * w);
    for (auto& x : act) x = b(rng);
    return cumper::BinaryGrid(h, w, std::move(act));
}

/// Random finite diagram with points in [0, span]^2 above the diagonal.
inline std::vector<cumper::PersistencePair> random_pairs(std::mt19937_64& rng, int count, double span,
                                                         int dim = 0) {
    std::uniform_real_distribution<double> u(0.0, span);
    std::vector<std::pair<double, double>> bd;
    for (int i = 0; i < count; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        bd.emplace_back(a, b);
    }
    return cumper::make_pairs(bd, dim);
}

/// Random bifiltration built from a monotone compact stack.
inline cumper::BiFiltration random_bifiltration(std::mt19937_64& rng, int h, int w, int slices, int levels) {
    std::uniform_int_distribution<int> v(0, levels);
    std::vector<double> base(static_cast<std::size_t>(h) * w);
    for (auto& x : base) x = v(rng);
    std::vector<cumper::ValueGrid> stack;
    for (int s = 0; s < slices; ++s) {
        stack.emplace_back(h, w, base);
        std::uniform_int_distribution<int> drop(0, 2);
        for (auto& x : base) x = std::max(0.0, x - drop(rng));
    }
    cumper::CompactMultiFiltration cmf(levels, std::move(stack));
    return cumper::expand_bifiltration(cmf);
}

}  // namespace testutil
