#pragma once

// Cubical persistence of 2D grids by union-find.
//
// Dimension 0 runs the elder rule over the 4-connected vertex complex of the
// grid padded once with the infinity sentinel. Dimension 1 is read off the
// dual: the grid is padded with the sentinel, negated and padded again, and
// the same union-find runs over 8-connectivity. Every pair keeps the pixel
// coordinates whose values realize its birth and death so that gradients can
// be routed back onto the grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cumper/error.hpp"
#include "cumper/filtrations.hpp"
#include "cumper/grid.hpp"
#include "cumper/parallel.hpp"

namespace cumper {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class HomologyDims : unsigned { h0 = 1, h1 = 2, both = 3 };

constexpr bool includes(HomologyDims set, int dim) {
    return (static_cast<unsigned>(set) & (1u << dim)) != 0;
}

struct PersistencePair {
    int dim = 0;
    double birth = 0.0;
    double death = kInfinity;
    PixelCoord birth_coord;
    PixelCoord death_coord{-1, -1};  // {-1, -1} for essential classes
    int slice_index = 0;

    bool essential() const noexcept { return std::isinf(death); }
    double persistence() const noexcept { return death - birth; }
};

struct PersistenceDiagram {
    std::vector<PersistencePair> dim0;
    std::vector<PersistencePair> dim1;

    const std::vector<PersistencePair>& pairs(int dim) const {
        if (dim == 0) return dim0;
        if (dim == 1) return dim1;
        throw InvalidInput("homology dimension must be 0 or 1");
    }
    std::vector<PersistencePair>& pairs(int dim) {
        return const_cast<std::vector<PersistencePair>&>(std::as_const(*this).pairs(dim));
    }

    /// (birth, death) values of one dimension, sorted; coordinates dropped.
    std::vector<std::pair<double, double>> values(int dim) const {
        std::vector<std::pair<double, double>> out;
        out.reserve(pairs(dim).size());
        for (const auto& p : pairs(dim)) out.emplace_back(p.birth, p.death);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t essential_count(int dim) const {
        return static_cast<std::size_t>(std::count_if(pairs(dim).begin(), pairs(dim).end(),
                                                      [](const auto& p) { return p.essential(); }));
    }
};

/// Edge between two grid vertices, addressed by linear index into the grid it
/// was enumerated from. `index` is vertex * offsets + offset and fixes the
/// order among equal values.
struct GridEdge {
    double value = 0.0;
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    std::uint32_t index = 0;
    std::uint8_t offset = 0;
};

/// Edges of one grid sorted by value descending, ties by ascending index.
struct SortedEdgeList {
    int height = 0;
    int width = 0;
    int dim = 0;
    std::vector<GridEdge> edges;
};

namespace detail {

struct Offset {
    int drow;
    int dcol;
};

inline constexpr Offset kOffsets[4] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

inline ValueGrid pad(const ValueGrid& grid, double value) {
    const int h = grid.height() + 2;
    const int w = grid.width() + 2;
    std::vector<double> out(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), value);
    for (int r = 0; r < grid.height(); ++r)
        for (int c = 0; c < grid.width(); ++c)
            out[static_cast<std::size_t>(r + 1) * w + static_cast<std::size_t>(c + 1)] = grid(r, c);
    return ValueGrid(h, w, std::move(out));
}

}  // namespace detail

/// Enumerates grid edges: 4-neighborhood for dim 0, plus both diagonals for
/// dim 1. Edge value is the larger endpoint value.
inline SortedEdgeList enumerate_sorted_edges(const ValueGrid& grid, int dim) {
    if (dim != 0 && dim != 1) throw InvalidInput("enumerate_sorted_edges: dim must be 0 or 1");
    const int h = grid.height();
    const int w = grid.width();
    const int num_offsets = dim == 0 ? 2 : 4;
    if (static_cast<std::size_t>(h) * w * num_offsets >= std::numeric_limits<std::uint32_t>::max())
        throw InvalidInput("grid too large for 32-bit edge indexing");

    SortedEdgeList list{h, w, dim, {}};
    list.edges.reserve(static_cast<std::size_t>(h) * w * num_offsets);
    auto vals = grid.values();
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const auto vert = static_cast<std::uint32_t>(grid.index(r, c));
            for (int o = 0; o < num_offsets; ++o) {
                const int r2 = r + detail::kOffsets[o].drow;
                const int c2 = c + detail::kOffsets[o].dcol;
                if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
                const auto nb = static_cast<std::uint32_t>(grid.index(r2, c2));
                list.edges.push_back({std::max(vals[vert], vals[nb]), vert, nb,
                                      vert * static_cast<std::uint32_t>(num_offsets) +
                                          static_cast<std::uint32_t>(o),
                                      static_cast<std::uint8_t>(o)});
            }
        }
    std::sort(list.edges.begin(), list.edges.end(), [](const GridEdge& a, const GridEdge& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.index < b.index;
    });
    return list;
}

/// Disjoint sets over grid vertices with path compression and union by rank.
/// Each root remembers the birth of its component and the vertex realizing it.
class BirthUnionFind {
public:
    explicit BirthUnionFind(std::span<const double> births)
        : parent_(births.size()), rank_(births.size(), 0), birth_(births.begin(), births.end()),
          birth_vertex_(births.size()) {
        std::iota(parent_.begin(), parent_.end(), 0u);
        std::iota(birth_vertex_.begin(), birth_vertex_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            std::uint32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    double birth(std::uint32_t root) const { return birth_[root]; }
    std::uint32_t birth_vertex(std::uint32_t root) const { return birth_vertex_[root]; }

    /// Joins two roots; the merged component keeps `survivor`'s birth.
    void unite(std::uint32_t a, std::uint32_t b, std::uint32_t survivor) {
        const double b_birth = birth_[survivor];
        const std::uint32_t b_vertex = birth_vertex_[survivor];
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        birth_[a] = b_birth;
        birth_vertex_[a] = b_vertex;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::vector<double> birth_;
    std::vector<std::uint32_t> birth_vertex_;
};

/// Pair as produced by the union-find sweep, in coordinates of the grid the
/// sweep ran on. `death_vertex` is the endpoint of the killing edge whose
/// value realizes the edge value.
struct RawPair {
    std::uint32_t birth_vertex = 0;
    std::uint32_t death_vertex = 0;
    double birth = 0.0;
    double death = kInfinity;
    bool essential = false;
};

/// Elder-rule sweep over the edges in ascending filtration order (the sorted
/// list is consumed from its tail). When two components meet, the one with
/// the larger birth dies at the current edge. For dim 0 the surviving
/// component is appended as an essential pair.
inline std::vector<RawPair> joint_pairs(const ValueGrid& grid, const SortedEdgeList& sorted, int dim) {
    if (sorted.height != grid.height() || sorted.width != grid.width())
        throw InvalidInput("joint_pairs: edge list was built for a different grid");
    auto vals = grid.values();
    BirthUnionFind uf(vals);
    std::vector<RawPair> out;
    for (auto it = sorted.edges.rbegin(); it != sorted.edges.rend(); ++it) {
        const GridEdge& e = *it;
        const std::uint32_t ru = uf.find(e.u);
        const std::uint32_t rv = uf.find(e.v);
        if (ru == rv) continue;
        const double bu = uf.birth(ru);
        const double bv = uf.birth(rv);
        const std::uint32_t dying = bu >= bv ? ru : rv;
        const std::uint32_t elder = bu >= bv ? rv : ru;
        const std::uint32_t death_vertex = vals[e.u] >= vals[e.v] ? e.u : e.v;
        out.push_back({uf.birth_vertex(dying), death_vertex, uf.birth(dying), e.value, false});
        uf.unite(ru, rv, elder);
    }
    if (dim == 0 && !vals.empty()) {
        const std::uint32_t root = uf.find(0);
        out.push_back({uf.birth_vertex(root), 0, uf.birth(root), kInfinity, true});
    }
    return out;
}

namespace detail {

inline PixelCoord unpad(const ValueGrid& padded, std::uint32_t vertex, int layers) {
    const int r = static_cast<int>(vertex / static_cast<std::uint32_t>(padded.width()));
    const int c = static_cast<int>(vertex % static_cast<std::uint32_t>(padded.width()));
    return {r - layers, c - layers};
}

inline void require_sentinel(const ValueGrid& grid, double sentinel) {
    if (!std::isfinite(sentinel) || !(sentinel > grid.max_value()))
        throw InvalidInput("infinity sentinel " + std::to_string(sentinel) +
                           " must exceed every grid value (max " + std::to_string(grid.max_value()) + ")");
}

inline std::vector<PersistencePair> dim0_pairs(const ValueGrid& grid, double sentinel) {
    ValueGrid primal = pad(grid, sentinel);
    auto raw = joint_pairs(primal, enumerate_sorted_edges(primal, 0), 0);
    std::vector<PersistencePair> out;
    for (const auto& p : raw) {
        if (p.essential) {
            out.push_back({0, p.birth, kInfinity, unpad(primal, p.birth_vertex, 1), {-1, -1}, 0});
            continue;
        }
        if (p.birth == p.death) continue;
        out.push_back({0, p.birth, p.death, unpad(primal, p.birth_vertex, 1),
                       unpad(primal, p.death_vertex, 1), 0});
    }
    return out;
}

// A dual component is born at a local maximum of the grid and dies at the
// saddle where it joins an older one. Read back in the grid's own values
// that is a loop born at the saddle and filled at the maximum.
inline std::vector<PersistencePair> dim1_pairs(const ValueGrid& grid, double sentinel) {
    ValueGrid dual = pad(negate(pad(grid, sentinel)), sentinel);
    auto raw = joint_pairs(dual, enumerate_sorted_edges(dual, 1), 1);
    std::vector<PersistencePair> out;
    for (const auto& p : raw) {
        if (p.essential || p.birth == p.death) continue;
        PixelCoord saddle = unpad(dual, p.death_vertex, 2);
        PixelCoord peak = unpad(dual, p.birth_vertex, 2);
        if (!grid.contains(saddle) || !grid.contains(peak)) continue;  // outer face
        out.push_back({1, -p.death, -p.birth, saddle, peak, 0});
    }
    return out;
}

}  // namespace detail

/// Persistence diagram of the sublevel filtration of `grid`. `sentinel` plays
/// the role of +infinity for padding and must exceed every grid value.
/// Zero-persistence pairs are not emitted.
inline PersistenceDiagram compute_pd(const ValueGrid& grid, HomologyDims dims, double sentinel) {
    detail::require_sentinel(grid, sentinel);
    PersistenceDiagram pd;
    if (includes(dims, 0)) pd.dim0 = detail::dim0_pairs(grid, sentinel);
    if (includes(dims, 1)) pd.dim1 = detail::dim1_pairs(grid, sentinel);
    return pd;
}

/// Overload choosing max + 1 as the sentinel.
inline PersistenceDiagram compute_pd(const ValueGrid& grid, HomologyDims dims = HomologyDims::both) {
    return compute_pd(grid, dims, grid.max_value() + 1.0);
}

/// Diagrams of many grids sharing one sentinel; one task per grid.
inline std::vector<PersistenceDiagram> compute_pd_many(std::span<const ValueGrid> grids,
                                                       HomologyDims dims, double sentinel,
                                                       unsigned workers = 1) {
    std::vector<PersistenceDiagram> out(grids.size());
    parallel_for(grids.size(), workers, [&](std::size_t i) {
        out[i] = compute_pd(grids[i], dims, sentinel);
        for (auto* v : {&out[i].dim0, &out[i].dim1})
            for (auto& p : *v) p.slice_index = static_cast<int>(i);
    });
    return out;
}

/// One diagram per slice Z'_s of a compact stack, computed on the integer
/// levels with sentinel N + 1.
inline std::vector<PersistenceDiagram> compute_pd_batch(const CompactMultiFiltration& cmf,
                                                        HomologyDims dims = HomologyDims::both,
                                                        unsigned workers = 1) {
    return compute_pd_many(cmf.slices(), dims, cmf.num_levels() + 1.0, workers);
}

/// Upstream gradient of a scalar loss with respect to one pair's values.
struct PairCotangent {
    double d_birth = 0.0;
    double d_death = 0.0;
};

/// Routes per-pair cotangents onto the pixels that realize each birth and
/// death. Cotangent spans run parallel to diagram.dim0 / diagram.dim1; an
/// empty span skips that dimension. Essential deaths carry no gradient.
inline ValueGrid scatter_gradients(const PersistenceDiagram& diagram,
                                   std::span<const PairCotangent> dim0,
                                   std::span<const PairCotangent> dim1, int height, int width) {
    ValueGrid shape(height, width);
    std::vector<double> acc(shape.size(), 0.0);
    auto route = [&](const std::vector<PersistencePair>& pairs, std::span<const PairCotangent> cot) {
        if (cot.empty()) return;
        if (cot.size() != pairs.size())
            throw InvalidInput("scatter_gradients: cotangent count does not match pair count");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            if (!shape.contains(p.birth_coord))
                throw InvalidInput("scatter_gradients: birth coordinate outside grid");
            acc[shape.index(p.birth_coord.row, p.birth_coord.col)] += cot[i].d_birth;
            if (p.essential()) continue;
            if (!shape.contains(p.death_coord))
                throw InvalidInput("scatter_gradients: death coordinate outside grid");
            acc[shape.index(p.death_coord.row, p.death_coord.col)] += cot[i].d_death;
        }
    };
    route(diagram.dim0, dim0);
    route(diagram.dim1, dim1);
    return ValueGrid(height, width, std::move(acc));
}

}  // namespace cumper
