#pragma once

// Reference persistence for small grids: the full cubical chain complex of
// the vertex construction, reduced column by column over GF(2). Slow by
// construction and independent of the union-find engine; it never uses
// duality, so the engine's dimension-1 path is checked against plain linear
// algebra.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cumper/error.hpp"
#include "cumper/grid.hpp"
#include "cumper/persistence.hpp"

namespace cumper::oracle {

inline constexpr int kMaxSide = 64;

/// Cell of the cubical complex in doubled coordinates: vertices sit at
/// (even, even), edges at one odd coordinate, squares at (odd, odd).
struct Cell {
    int dim = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct CubicalChainComplex {
    std::vector<Cell> cells;
    std::vector<std::vector<std::size_t>> boundary;  // indices into `cells`

    std::size_t count(int dim) const {
        return static_cast<std::size_t>(
            std::count_if(cells.begin(), cells.end(), [dim](const Cell& c) { return c.dim == dim; }));
    }

    /// True when every boundary of a boundary cancels over GF(2).
    bool boundary_squared_vanishes() const {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            std::unordered_map<std::size_t, int> parity;
            for (std::size_t f : boundary[i])
                for (std::size_t g : boundary[f]) parity[g] ^= 1;
            for (const auto& [_, odd] : parity)
                if (odd) return false;
        }
        return true;
    }

    /// Faces never enter the filtration after their cofaces.
    bool faces_precede_cofaces() const {
        for (std::size_t i = 0; i < cells.size(); ++i)
            for (std::size_t f : boundary[i])
                if (cells[f].value > cells[i].value) return false;
        return true;
    }
};

inline CubicalChainComplex build_complex(const ValueGrid& grid) {
    if (grid.height() > kMaxSide || grid.width() > kMaxSide)
        throw InvalidInput("oracle limited to grids of at most 64x64");
    const int rows = 2 * grid.height() - 1;
    const int cols = 2 * grid.width() - 1;
    CubicalChainComplex cx;
    std::vector<std::size_t> id(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            double v = std::numeric_limits<double>::lowest();
            for (int a = i / 2; a <= (i + 1) / 2; ++a)
                for (int b = j / 2; b <= (j + 1) / 2; ++b) v = std::max(v, grid(a, b));
            id[static_cast<std::size_t>(i) * cols + j] = cx.cells.size();
            cx.cells.push_back({(i % 2) + (j % 2), i, j, v});
        }
    auto cell_at = [&](int i, int j) { return id[static_cast<std::size_t>(i) * cols + j]; };
    cx.boundary.resize(cx.cells.size());
    for (const auto& c : cx.cells) {
        auto& bd = cx.boundary[cell_at(c.row, c.col)];
        if (c.row % 2) {
            bd.push_back(cell_at(c.row - 1, c.col));
            bd.push_back(cell_at(c.row + 1, c.col));
        }
        if (c.col % 2) {
            bd.push_back(cell_at(c.row, c.col - 1));
            bd.push_back(cell_at(c.row, c.col + 1));
        }
    }
    return cx;
}

/// Standard persistence by boundary-matrix column reduction. Cells are
/// ordered by (value, dim, row, col).
inline PersistenceDiagram oracle_pd(const ValueGrid& grid) {
    CubicalChainComplex cx = build_complex(grid);
    const std::size_t n = cx.cells.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Cell& x = cx.cells[a];
        const Cell& y = cx.cells[b];
        return std::tie(x.value, x.dim, x.row, x.col) < std::tie(y.value, y.dim, y.row, y.col);
    });
    std::vector<std::size_t> position(n);
    for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;

    // columns[k]: boundary of the k-th cell in filtration order, as sorted
    // filtration positions; reduced in place.
    std::vector<std::vector<std::size_t>> columns(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t f : cx.boundary[order[k]]) columns[k].push_back(position[f]);
        std::sort(columns[k].begin(), columns[k].end());
    }

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> pivot_owner(n, kNone);
    std::vector<bool> paired(n, false);
    PersistenceDiagram pd;
    for (std::size_t k = 0; k < n; ++k) {
        auto& col = columns[k];
        while (!col.empty() && pivot_owner[col.back()] != kNone) {
            const auto& other = columns[pivot_owner[col.back()]];
            std::vector<std::size_t> sum;
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(sum));
            col.swap(sum);
        }
        if (col.empty()) continue;
        const std::size_t low = col.back();
        pivot_owner[low] = k;
        paired[low] = paired[k] = true;
        const Cell& born = cx.cells[order[low]];
        const Cell& dies = cx.cells[order[k]];
        if (born.value == dies.value) continue;
        PersistencePair p;
        p.dim = born.dim;
        p.birth = born.value;
        p.death = dies.value;
        if (born.dim <= 1) pd.pairs(born.dim).push_back(p);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (paired[k]) continue;
        const Cell& c = cx.cells[order[k]];
        if (c.dim > 1) continue;
        PersistencePair p;
        p.dim = c.dim;
        p.birth = c.value;
        pd.pairs(c.dim).push_back(p);
    }
    return pd;
}

namespace detail {

// Rank over GF(2) of a 0/1 matrix given as rows of packed 64-bit words.
inline std::size_t gf2_rank(std::vector<std::vector<std::uint64_t>> rows) {
    std::size_t rank = 0;
    if (rows.empty()) return 0;
    const std::size_t words = rows.front().size();
    for (std::size_t bit = 0; bit < words * 64 && rank < rows.size(); ++bit) {
        const std::size_t w = bit / 64;
        const std::uint64_t m = std::uint64_t{1} << (bit % 64);
        std::size_t piv = rank;
        while (piv < rows.size() && !(rows[piv][w] & m)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && (rows[r][w] & m))
                for (std::size_t k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// Betti numbers (b0, b1) of the subcomplex spanned by the active pixels,
/// from ranks of the boundary maps: b_k = #k-cells - rank d_k - rank d_{k+1}.
inline std::pair<int, int> oracle_betti(const BinaryGrid& mask) {
    std::vector<double> indicator(mask.size());
    for (std::size_t i = 0; i < indicator.size(); ++i) indicator[i] = mask.active()[i] ? 0.0 : 1.0;
    CubicalChainComplex cx = build_complex(ValueGrid(mask.height(), mask.width(), std::move(indicator)));

    std::vector<std::size_t> local(cx.cells.size());
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < cx.cells.size(); ++i)
        if (cx.cells[i].value == 0.0) local[i] = counts[cx.cells[i].dim]++;

    auto boundary_rank = [&](int dim) -> std::size_t {
        const std::size_t words = (counts[dim - 1] + 63) / 64;
        if (words == 0) return 0;
        std::vector<std::vector<std::uint64_t>> rows;
        for (std::size_t i = 0; i < cx.cells.size(); ++i) {
            if (cx.cells[i].dim != dim || cx.cells[i].value != 0.0) continue;
            std::vector<std::uint64_t> row(words, 0);
            for (std::size_t f : cx.boundary[i]) row[local[f] / 64] ^= std::uint64_t{1} << (local[f] % 64);
            rows.push_back(std::move(row));
        }
        return detail::gf2_rank(std::move(rows));
    };
    const std::size_t r1 = boundary_rank(1);
    const std::size_t r2 = boundary_rank(2);
    return {static_cast<int>(counts[0] - r1), static_cast<int>(counts[1] - r1 - r2)};
}

/// Euler characteristic of the sublevel complex at tau by cell counting.
inline long long euler_characteristic(const ValueGrid& grid, double tau) {
    CubicalChainComplex cx = build_complex(grid);
    long long chi = 0;
    for (const auto& c : cx.cells)
        if (c.value <= tau) chi += c.dim == 1 ? -1 : 1;
    return chi;
}

}  // namespace cumper::oracle
