#pragma once

// Summaries of multiparameter filtrations: slicing into single-parameter
// diagrams, Betti numbers of masks, Hilbert functions and color Betti
// tensors.

#include <cstddef>
#include <utility>
#include <vector>

#include "cumper/error.hpp"
#include "cumper/filtrations.hpp"
#include "cumper/grid.hpp"
#include "cumper/parallel.hpp"
#include "cumper/persistence.hpp"

namespace cumper {

/// One diagram per slice of an M x N grid. Births and deaths are 1-based
/// level indices; `clip_value` (N + 1) is the sentinel level of pixels that
/// never activate along the slice and also the value essential deaths are
/// clipped to before vectorizing.
struct SlicedDiagrams {
    std::vector<PersistenceDiagram> slices;
    std::vector<double> levels;
    double clip_value = 0.0;

    int size() const noexcept { return static_cast<int>(slices.size()); }
};

enum class SliceAxis { rows, columns };

inline std::vector<double> level_indices(int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

/// Restricts a diagram computed on levels 1..n+1 to the visible range 1..n:
/// classes born at n + 1 never existed, classes alive at n are essential.
inline void restrict_to_levels(PersistenceDiagram& pd, int n) {
    for (auto* pairs : {&pd.dim0, &pd.dim1}) {
        std::erase_if(*pairs, [n](const PersistencePair& p) { return p.birth > n; });
        for (auto& p : *pairs)
            if (p.death > n) {
                p.death = kInfinity;
                p.death_coord = {-1, -1};
            }
    }
}

/// Fixes one parameter and reads the other as a single filtration. Each
/// slice becomes a first-activation grid whose diagram is computed with
/// sentinel N + 2, so never-active pixels (level N + 1) act as padding.
inline SlicedDiagrams slice_rows(const BiFiltration& bif, SliceAxis axis = SliceAxis::rows,
                                 HomologyDims dims = HomologyDims::both, unsigned workers = 1) {
    const int m = axis == SliceAxis::rows ? bif.rows() : bif.cols();
    const int n = axis == SliceAxis::rows ? bif.cols() : bif.rows();
    std::vector<ValueGrid> grids;
    grids.reserve(static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s)
        grids.push_back(axis == SliceAxis::rows ? bif.first_activation(s) : bif.first_activation_column(s));
    SlicedDiagrams out;
    out.slices = compute_pd_many(grids, dims, n + 2.0, workers);
    for (auto& pd : out.slices) restrict_to_levels(pd, n);
    out.levels = level_indices(n);
    out.clip_value = n + 1.0;
    return out;
}

/// Betti numbers of the cubical complex spanned by the active pixels:
/// b0 counts 4-connected components, b1 counts the holes read from the dual
/// of the 0/1 indicator grid.
inline std::pair<int, int> betti_numbers(const BinaryGrid& mask) {
    if (mask.count() == 0) return {0, 0};
    std::vector<double> indicator(mask.size());
    for (std::size_t i = 0; i < indicator.size(); ++i) indicator[i] = mask.active()[i] ? 0.0 : 1.0;
    PersistenceDiagram pd = compute_pd(ValueGrid(mask.height(), mask.width(), std::move(indicator)),
                                       HomologyDims::both, 2.0);
    int b0 = 0;
    int b1 = 0;
    for (const auto& p : pd.dim0) b0 += p.birth <= 0.0 && 0.0 < p.death;
    for (const auto& p : pd.dim1) b1 += p.birth <= 0.0 && 0.0 < p.death;
    return {b0, b1};
}

inline int betti_number(const BinaryGrid& mask, int dim) {
    auto [b0, b1] = betti_numbers(mask);
    if (dim == 0) return b0;
    if (dim == 1) return b1;
    throw InvalidInput("homology dimension must be 0 or 1");
}

/// H(s, t) = rank H_k(K_{s,t}) over the whole grid.
struct HilbertGrid {
    int rows = 0;
    int cols = 0;
    int dim = 0;
    std::vector<int> values;

    int operator()(int s, int t) const {
        return values[static_cast<std::size_t>(s) * static_cast<std::size_t>(cols) +
                      static_cast<std::size_t>(t)];
    }
};

inline HilbertGrid hilbert_function(const BiFiltration& bif, int dim, unsigned workers = 1) {
    if (dim != 0 && dim != 1) throw InvalidInput("homology dimension must be 0 or 1");
    HilbertGrid h{bif.rows(), bif.cols(), dim,
                  std::vector<int>(static_cast<std::size_t>(bif.rows()) * bif.cols())};
    parallel_for(h.values.size(), workers, [&](std::size_t i) {
        const int s = static_cast<int>(i / static_cast<std::size_t>(bif.cols()));
        const int t = static_cast<int>(i % static_cast<std::size_t>(bif.cols()));
        h.values[i] = betti_number(bif.at(s, t), dim);
    });
    return h;
}

/// beta^k_{m,n,r} over an N1 x N2 x N3 color membership grid.
struct BettiTensor {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
    int dim = 0;
    std::vector<int> values;

    int operator()(int m, int n, int r) const {
        return values[(static_cast<std::size_t>(m) * n2 + n) * n3 + r];
    }
};

inline BettiTensor color_betti_tensor(const ColorMembership& membership, int dim, unsigned workers = 1) {
    if (dim != 0 && dim != 1) throw InvalidInput("homology dimension must be 0 or 1");
    BettiTensor b{membership.extent(0), membership.extent(1), membership.extent(2), dim, {}};
    b.values.resize(static_cast<std::size_t>(b.n1) * b.n2 * b.n3);
    parallel_for(b.values.size(), workers, [&](std::size_t i) {
        const int r = static_cast<int>(i % b.n3);
        const int n = static_cast<int>((i / b.n3) % b.n2);
        const int m = static_cast<int>(i / (static_cast<std::size_t>(b.n2) * b.n3));
        b.values[i] = betti_number(membership.at(m, n, r), dim);
    });
    return b;
}

}  // namespace cumper
