#pragma once

// Exact solvers for square assignment problems.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "cumper/error.hpp"

namespace cumper {

/// Minimum-cost perfect assignment on an n x n row-major cost matrix by the
/// shortest augmenting path method with potentials, O(n^3). Returns the
/// column assigned to each row.
inline std::vector<int> solve_assignment(std::span<const double> cost, int n) {
    if (n < 0 || cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw InvalidInput("assignment: cost matrix must be n x n");
    if (n == 0) return {};
    constexpr double kInf = std::numeric_limits<double>::infinity();
    const auto N = static_cast<std::size_t>(n);
    auto a = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * N + (j - 1)]; };

    // 1-based arrays; column 0 is the virtual start of each augmentation.
    std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0), minv(N + 1);
    std::vector<std::size_t> p(N + 1, 0), way(N + 1, 0);
    std::vector<char> used(N + 1);
    for (std::size_t i = 1; i <= N; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= N; ++j) {
                if (used[j]) continue;
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 == 0) throw InvalidInput("assignment: no finite assignment exists");
            for (std::size_t j = 0; j <= N; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(N);
    for (std::size_t j = 1; j <= N; ++j) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
    return row_to_col;
}

/// Perfect matching using only entries with cost <= threshold, by repeated
/// augmenting paths. Returns the row-to-column map, or empty if none exists.
inline std::vector<int> threshold_matching(std::span<const double> cost, int n, double threshold) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<int> col_owner(N, -1), row_to_col(N, -1);
    std::vector<char> seen(N);
    // Iterative DFS to keep stack depth bounded for large diagrams.
    for (std::size_t root = 0; root < N; ++root) {
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<std::size_t> stack_rows{root};
        std::vector<std::size_t> next_col{0};
        std::vector<std::size_t> via_col;
        bool found = false;
        while (!stack_rows.empty() && !found) {
            const std::size_t r = stack_rows.back();
            std::size_t& j = next_col.back();
            for (; j < N; ++j) {
                if (seen[j] || cost[r * N + j] > threshold) continue;
                seen[j] = 1;
                break;
            }
            if (j == N) {
                stack_rows.pop_back();
                next_col.pop_back();
                if (!via_col.empty()) via_col.pop_back();
                continue;
            }
            const std::size_t c = j++;
            if (col_owner[c] < 0) {
                // Flip the alternating path ending at the free column c.
                via_col.push_back(c);
                for (std::size_t k = 0; k < stack_rows.size(); ++k) {
                    const std::size_t row = stack_rows[k];
                    const std::size_t col = via_col[k];
                    col_owner[col] = static_cast<int>(row);
                    row_to_col[row] = static_cast<int>(col);
                }
                found = true;
            } else {
                via_col.push_back(c);
                stack_rows.push_back(static_cast<std::size_t>(col_owner[c]));
                next_col.push_back(0);
            }
        }
        if (!found) return {};
    }
    return row_to_col;
}

}  // namespace cumper
