#pragma once

// Single- and multi-parameter filtrations built on top of grids: the
// quantized compact stack, bifiltration grids, erosion and color
// multifiltrations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cumper/error.hpp"
#include "cumper/grid.hpp"

namespace cumper {

/// Quantizes one value in [0, 1] onto {0, ..., levels}. z = 1 maps to
/// `levels` instead of overflowing to levels + 1.
inline int staircase(double z, int levels) {
    if (levels <= 0) throw InvalidInput("staircase: level count must be positive");
    if (!(z >= 0.0 && z <= 1.0)) throw InvalidInput("staircase: value outside [0, 1]");
    auto q = static_cast<int>(std::floor(static_cast<double>(levels) * z));
    return std::min(q, levels);
}

inline ValueGrid staircase(const ValueGrid& z, int levels) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = staircase(z.values()[i], levels);
    return ValueGrid(z.height(), z.width(), std::move(out));
}

/// M integer grids Z'_s with entries in {0, ..., N}. A pixel is active in
/// K_{s,t} once t - 1 >= Z'_s.
class CompactMultiFiltration {
public:
    CompactMultiFiltration(int num_levels, std::vector<ValueGrid> slices)
        : num_levels_(num_levels), slices_(std::move(slices)) {
        if (num_levels_ <= 0) throw InvalidInput("compact filtration needs N >= 1");
        if (slices_.empty()) throw InvalidInput("compact filtration needs at least one slice");
        for (const auto& s : slices_) {
            if (s.height() != slices_.front().height() || s.width() != slices_.front().width())
                throw InvalidInput("compact filtration slices differ in shape");
            for (double v : s.values())
                if (v != std::floor(v) || v < 0 || v > num_levels_)
                    throw InvalidInput("compact filtration entry outside {0..N}: " +
                                       std::to_string(v));
        }
    }

    int num_slices() const noexcept { return static_cast<int>(slices_.size()); }
    int num_levels() const noexcept { return num_levels_; }
    int height() const noexcept { return slices_.front().height(); }
    int width() const noexcept { return slices_.front().width(); }
    const ValueGrid& slice(int s) const { return slices_.at(static_cast<std::size_t>(s)); }
    const std::vector<ValueGrid>& slices() const noexcept { return slices_; }

    /// Sets and returns the valid_bifiltration flag (Z'_s >= Z'_{s+1} everywhere).
    bool validate() {
        valid_ = violation_count() == 0;
        return valid_;
    }
    bool valid_bifiltration() const noexcept { return valid_; }

    /// Number of (slice, pixel) positions with Z'_{s+1} > Z'_s.
    long long violation_count() const {
        long long n = 0;
        for (std::size_t s = 0; s + 1 < slices_.size(); ++s) {
            auto a = slices_[s].values();
            auto b = slices_[s + 1].values();
            for (std::size_t i = 0; i < a.size(); ++i) n += b[i] > a[i] ? 1 : 0;
        }
        return n;
    }

private:
    int num_levels_;
    std::vector<ValueGrid> slices_;
    bool valid_ = false;
};

/// Monotonicity penalty: sum over s and pixels of max(0, Z'_{s+1} - Z'_s).
inline double reg_penalty(const CompactMultiFiltration& cmf) {
    double total = 0.0;
    for (int s = 0; s + 1 < cmf.num_slices(); ++s) {
        auto a = cmf.slice(s).values();
        auto b = cmf.slice(s + 1).values();
        for (std::size_t i = 0; i < a.size(); ++i) total += std::max(0.0, b[i] - a[i]);
    }
    return total;
}

/// M x N grid of masks K_{s,t}, nested along both axes. Indices are 0-based
/// here: at(s, t) is K_{s+1, t+1}.
class BiFiltration {
public:
    BiFiltration(int rows, int cols, std::vector<BinaryGrid> cells)
        : rows_(rows), cols_(cols), cells_(std::move(cells)) {
        if (rows_ <= 0 || cols_ <= 0) throw InvalidInput("bifiltration grid must be non-empty");
        if (cells_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_))
            throw InvalidInput("bifiltration cell count does not match grid shape");
        for (const auto& c : cells_)
            if (c.height() != cells_.front().height() || c.width() != cells_.front().width())
                throw InvalidInput("bifiltration masks differ in shape");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int height() const noexcept { return cells_.front().height(); }
    int width() const noexcept { return cells_.front().width(); }

    const BinaryGrid& at(int s, int t) const {
        return cells_.at(static_cast<std::size_t>(s) * static_cast<std::size_t>(cols_) +
                         static_cast<std::size_t>(t));
    }

    /// Count of adjacent pairs along either axis that fail the subset relation.
    long long monotonicity_violations() const {
        long long n = 0;
        for (int s = 0; s < rows_; ++s)
            for (int t = 0; t < cols_; ++t) {
                if (t + 1 < cols_ && !at(s, t).subset_of(at(s, t + 1))) ++n;
                if (s + 1 < rows_ && !at(s, t).subset_of(at(s + 1, t))) ++n;
            }
        return n;
    }
    bool is_monotone() const { return monotonicity_violations() == 0; }

    /// Per row, the 1-based column index at which each pixel first activates;
    /// pixels never active get cols() + 1.
    ValueGrid first_activation(int s) const {
        std::vector<double> out(at(s, 0).size(), static_cast<double>(cols_ + 1));
        for (int t = cols_ - 1; t >= 0; --t) {
            auto m = at(s, t).active();
            for (std::size_t i = 0; i < out.size(); ++i)
                if (m[i]) out[i] = t + 1;
        }
        return ValueGrid(height(), width(), std::move(out));
    }

    /// Column-slicing counterpart: first 1-based row index per pixel at column t.
    ValueGrid first_activation_column(int t) const {
        std::vector<double> out(at(0, t).size(), static_cast<double>(rows_ + 1));
        for (int s = rows_ - 1; s >= 0; --s) {
            auto m = at(s, t).active();
            for (std::size_t i = 0; i < out.size(); ++i)
                if (m[i]) out[i] = s + 1;
        }
        return ValueGrid(height(), width(), std::move(out));
    }

    /// Exchanges the two parameter axes.
    BiFiltration transposed() const {
        std::vector<BinaryGrid> cells;
        cells.reserve(cells_.size());
        for (int t = 0; t < cols_; ++t)
            for (int s = 0; s < rows_; ++s) cells.push_back(at(s, t));
        return BiFiltration(cols_, rows_, std::move(cells));
    }

private:
    int rows_;
    int cols_;
    std::vector<BinaryGrid> cells_;
};

/// Builds {K_{s,t}} from a compact stack; pixel active iff Z'_s <= t - 1.
inline BiFiltration expand_bifiltration(const CompactMultiFiltration& cmf) {
    if (auto v = cmf.violation_count(); v != 0)
        throw NonMonotoneFiltration(
            "compact filtration violates Z'_s >= Z'_{s+1} at " + std::to_string(v) + " positions", v);
    const int m = cmf.num_slices();
    const int n = cmf.num_levels();
    std::vector<BinaryGrid> cells;
    cells.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    for (int s = 0; s < m; ++s)
        for (int t = 1; t <= n; ++t) cells.push_back(sublevel_set(cmf.slice(s), t - 1));
    return BiFiltration(m, n, std::move(cells));
}

/// Manhattan distance of each pixel to the nearest active pixel.
struct ErosionField {
    int height = 0;
    int width = 0;
    std::vector<int> distances;

    int operator()(int row, int col) const {
        return distances[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(col)];
    }
};

/// Exact L1 distance transform by one forward and one backward raster sweep.
inline ErosionField erosion_field(const BinaryGrid& mask) {
    if (mask.count() == 0) throw InvalidInput("erosion_field: mask has no active pixel");
    const int h = mask.height();
    const int w = mask.width();
    const int far = h + w;  // exceeds any in-grid L1 distance
    ErosionField f{h, w, std::vector<int>(mask.size(), far)};
    auto at = [&](int r, int c) -> int& {
        return f.distances[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) +
                           static_cast<std::size_t>(c)];
    };
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (mask(r, c)) {
                at(r, c) = 0;
                continue;
            }
            int d = at(r, c);
            if (r > 0) d = std::min(d, at(r - 1, c) + 1);
            if (c > 0) d = std::min(d, at(r, c - 1) + 1);
            at(r, c) = d;
        }
    for (int r = h - 1; r >= 0; --r)
        for (int c = w - 1; c >= 0; --c) {
            int d = at(r, c);
            if (r + 1 < h) d = std::min(d, at(r + 1, c) + 1);
            if (c + 1 < w) d = std::min(d, at(r, c + 1) + 1);
            at(r, c) = d;
        }
    return f;
}

enum class ErosionComparison {
    strict,     // xi < level: level 0 gives the empty mask
    inclusive,  // xi <= level: level 0 gives Omega itself
};

/// Erosion x grayscale bifiltration. Rows follow `erosion_levels` and columns
/// follow `gray_thresholds`: cell (n, m) holds the pixels whose L1 distance
/// to the sublevel region {gray <= gray_thresholds[m]} is below
/// erosion_levels[n]. Rows whose region is empty for a threshold get empty
/// cells; such thresholds are recorded in `empty_thresholds`.
struct ErosionBiFiltration {
    BiFiltration grid;
    std::vector<int> empty_thresholds;
};

inline ErosionBiFiltration erosion_bifiltration(const ValueGrid& gray,
                                                const std::vector<double>& gray_thresholds,
                                                const std::vector<int>& erosion_levels,
                                                ErosionComparison cmp = ErosionComparison::strict) {
    if (gray_thresholds.empty() || erosion_levels.empty())
        throw InvalidInput("erosion_bifiltration: empty threshold or level list");
    for (std::size_t i = 1; i < gray_thresholds.size(); ++i)
        if (!(gray_thresholds[i] > gray_thresholds[i - 1]))
            throw InvalidInput("erosion_bifiltration: thresholds must be strictly increasing");
    for (std::size_t i = 0; i < erosion_levels.size(); ++i) {
        if (erosion_levels[i] < 0) throw InvalidInput("erosion_bifiltration: negative level");
        if (i > 0 && erosion_levels[i] <= erosion_levels[i - 1])
            throw InvalidInput("erosion_bifiltration: levels must be strictly increasing");
    }

    const int rows = static_cast<int>(erosion_levels.size());
    const int cols = static_cast<int>(gray_thresholds.size());
    std::vector<BinaryGrid> cells(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    std::vector<int> empty;
    for (int m = 0; m < cols; ++m) {
        BinaryGrid omega = sublevel_set(gray, gray_thresholds[static_cast<std::size_t>(m)]);
        if (omega.count() == 0) {
            empty.push_back(m);
            for (int n = 0; n < rows; ++n)
                cells[static_cast<std::size_t>(n) * cols + m] = BinaryGrid(gray.height(), gray.width());
            continue;
        }
        ErosionField xi = erosion_field(omega);
        for (int n = 0; n < rows; ++n) {
            const int level = erosion_levels[static_cast<std::size_t>(n)];
            std::vector<std::uint8_t> act(xi.distances.size());
            for (std::size_t i = 0; i < act.size(); ++i)
                act[i] = cmp == ErosionComparison::strict ? xi.distances[i] < level
                                                          : xi.distances[i] <= level;
            cells[static_cast<std::size_t>(n) * cols + m] =
                BinaryGrid(gray.height(), gray.width(), std::move(act));
        }
    }
    return {BiFiltration(rows, cols, std::move(cells)), std::move(empty)};
}

/// Baseline erosion levels used by the grayscale x erosion recipe.
inline const std::vector<int>& default_erosion_levels() {
    static const std::vector<int> levels{0, 1, 2, 3, 5, 7, 9, 12, 15, 20};
    return levels;
}

/// `count` thresholds equally spaced over [lo, hi], both ends included.
inline std::vector<double> linear_thresholds(double lo, double hi, int count) {
    if (count <= 0) throw InvalidInput("threshold count must be positive");
    if (count == 1) return {hi};
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return out;
}

/// N1 x N2 x N3 masks X_{m,n,r} = {R <= s_m, G <= t_n, B <= v_r}.
class ColorMembership {
public:
    ColorMembership(int n1, int n2, int n3, std::vector<BinaryGrid> cells)
        : n1_(n1), n2_(n2), n3_(n3), cells_(std::move(cells)) {
        if (cells_.size() != static_cast<std::size_t>(n1) * n2 * n3)
            throw InvalidInput("color membership cell count mismatch");
    }

    int extent(int axis) const { return axis == 0 ? n1_ : axis == 1 ? n2_ : n3_; }
    const BinaryGrid& at(int m, int n, int r) const {
        return cells_.at((static_cast<std::size_t>(m) * n2_ + n) * n3_ + r);
    }

    long long monotonicity_violations() const {
        long long bad = 0;
        for (int m = 0; m < n1_; ++m)
            for (int n = 0; n < n2_; ++n)
                for (int r = 0; r < n3_; ++r) {
                    const auto& c = at(m, n, r);
                    if (m + 1 < n1_ && !c.subset_of(at(m + 1, n, r))) ++bad;
                    if (n + 1 < n2_ && !c.subset_of(at(m, n + 1, r))) ++bad;
                    if (r + 1 < n3_ && !c.subset_of(at(m, n, r + 1))) ++bad;
                }
        return bad;
    }

private:
    int n1_, n2_, n3_;
    std::vector<BinaryGrid> cells_;
};

inline ColorMembership color_multifiltration(const MultiChannelImage& img,
                                             const std::vector<std::vector<double>>& thresholds) {
    if (img.channel_count() != 3)
        throw InvalidInput("color_multifiltration needs exactly 3 channels, got " +
                           std::to_string(img.channel_count()));
    if (thresholds.size() != 3) throw InvalidInput("color_multifiltration needs 3 threshold lists");
    for (const auto& t : thresholds) {
        if (t.empty()) throw InvalidInput("empty channel threshold list");
        if (!std::is_sorted(t.begin(), t.end()))
            throw InvalidInput("channel thresholds must be sorted increasing");
    }

    std::vector<std::vector<BinaryGrid>> per_channel(3);
    for (std::size_t c = 0; c < 3; ++c)
        for (double tau : thresholds[c]) per_channel[c].push_back(sublevel_set(img.channel(c), tau));

    const int n1 = static_cast<int>(thresholds[0].size());
    const int n2 = static_cast<int>(thresholds[1].size());
    const int n3 = static_cast<int>(thresholds[2].size());
    std::vector<BinaryGrid> cells;
    cells.reserve(static_cast<std::size_t>(n1) * n2 * n3);
    for (int m = 0; m < n1; ++m)
        for (int n = 0; n < n2; ++n)
            for (int r = 0; r < n3; ++r) {
                auto a = per_channel[0][m].active();
                auto b = per_channel[1][n].active();
                auto d = per_channel[2][r].active();
                std::vector<std::uint8_t> act(a.size());
                for (std::size_t i = 0; i < act.size(); ++i) act[i] = a[i] & b[i] & d[i];
                cells.emplace_back(img.height(), img.width(), std::move(act));
            }
    return ColorMembership(n1, n2, n3, std::move(cells));
}

}  // namespace cumper
