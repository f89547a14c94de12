#pragma once

// Grid containers shared by every module. Storage is row-major with the
// origin at the top-left pixel; (row, col) addressing throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cumper/error.hpp"

namespace cumper {

struct PixelCoord {
    int row = 0;
    int col = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

namespace detail {

inline void check_shape(int height, int width, std::size_t size) {
    if (height <= 0 || width <= 0)
        throw InvalidInput("grid dimensions must be positive, got " + std::to_string(height) + "x" +
                           std::to_string(width));
    if (static_cast<std::size_t>(height) * static_cast<std::size_t>(width) != size)
        throw InvalidInput("grid storage size " + std::to_string(size) + " does not match " +
                           std::to_string(height) + "x" + std::to_string(width));
}

}  // namespace detail

/// Rectangular grid of finite real filtration values.
class ValueGrid {
public:
    ValueGrid() = default;

    ValueGrid(int height, int width, double fill = 0.0)
        : ValueGrid(height, width,
                    std::vector<double>(static_cast<std::size_t>(std::max(height, 0)) *
                                            static_cast<std::size_t>(std::max(width, 0)),
                                        fill)) {}

    ValueGrid(int height, int width, std::vector<double> values)
        : height_(height), width_(width), values_(std::move(values)) {
        detail::check_shape(height_, width_, values_.size());
        for (double v : values_)
            if (!std::isfinite(v)) throw InvalidInput("grid values must be finite");
    }

    /// Builds a grid from nested rows; all rows must have equal length.
    static ValueGrid from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty() || rows.front().empty()) throw InvalidInput("empty grid");
        std::vector<double> flat;
        for (const auto& r : rows) {
            if (r.size() != rows.front().size()) throw InvalidInput("ragged grid rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return ValueGrid(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()),
                         std::move(flat));
    }

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator()(int row, int col) const { return values_[index(row, col)]; }
    double at(PixelCoord p) const { return values_[index(p.row, p.col)]; }
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }
    bool contains(PixelCoord p) const noexcept {
        return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_;
    }

    std::span<const double> values() const noexcept { return values_; }

    double min_value() const;
    double max_value() const;

    friend bool operator==(const ValueGrid&, const ValueGrid&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> values_;
};

inline double ValueGrid::min_value() const {
    if (values_.empty()) throw InvalidInput("min of empty grid");
    double m = values_.front();
    for (double v : values_) m = v < m ? v : m;
    return m;
}

inline double ValueGrid::max_value() const {
    if (values_.empty()) throw InvalidInput("max of empty grid");
    double m = values_.front();
    for (double v : values_) m = v > m ? v : m;
    return m;
}

/// Pixel membership mask; one byte per pixel (0 inactive, 1 active).
class BinaryGrid {
public:
    BinaryGrid() = default;

    BinaryGrid(int height, int width, bool fill = false)
        : height_(height),
          width_(width),
          active_(static_cast<std::size_t>(std::max(height, 0)) *
                      static_cast<std::size_t>(std::max(width, 0)),
                  fill ? 1 : 0) {
        detail::check_shape(height_, width_, active_.size());
    }

    BinaryGrid(int height, int width, std::vector<std::uint8_t> active)
        : height_(height), width_(width), active_(std::move(active)) {
        detail::check_shape(height_, width_, active_.size());
        for (auto& a : active_) a = a ? 1 : 0;
    }

    static BinaryGrid from_rows(const std::vector<std::vector<int>>& rows) {
        if (rows.empty() || rows.front().empty()) throw InvalidInput("empty mask");
        std::vector<std::uint8_t> flat;
        for (const auto& r : rows) {
            if (r.size() != rows.front().size()) throw InvalidInput("ragged mask rows");
            for (int v : r) flat.push_back(v ? 1 : 0);
        }
        return BinaryGrid(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()),
                          std::move(flat));
    }

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return active_.size(); }

    bool operator()(int row, int col) const { return active_[index(row, col)] != 0; }
    void set(int row, int col, bool on) { active_[index(row, col)] = on ? 1 : 0; }
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    std::span<const std::uint8_t> active() const noexcept { return active_; }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto a : active_) n += a;
        return n;
    }

    /// True when every active pixel of this mask is also active in `other`.
    bool subset_of(const BinaryGrid& other) const {
        if (other.height_ != height_ || other.width_ != width_) return false;
        for (std::size_t i = 0; i < active_.size(); ++i)
            if (active_[i] && !other.active_[i]) return false;
        return true;
    }

    friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> active_;
};

/// Ordered channels (e.g. R, G, B) of identical shape.
class MultiChannelImage {
public:
    explicit MultiChannelImage(std::vector<ValueGrid> channels) : channels_(std::move(channels)) {
        if (channels_.empty()) throw InvalidInput("image needs at least one channel");
        for (const auto& c : channels_)
            if (c.height() != channels_.front().height() || c.width() != channels_.front().width())
                throw InvalidInput("channel shapes differ");
    }

    std::size_t channel_count() const noexcept { return channels_.size(); }
    const ValueGrid& channel(std::size_t i) const { return channels_.at(i); }
    int height() const noexcept { return channels_.front().height(); }
    int width() const noexcept { return channels_.front().width(); }

    /// Luma-free grayscale: arithmetic mean of channels.
    ValueGrid mean_channel() const {
        std::vector<double> out(channels_.front().size(), 0.0);
        for (const auto& c : channels_)
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += c.values()[i];
        for (auto& v : out) v /= static_cast<double>(channels_.size());
        return ValueGrid(height(), width(), std::move(out));
    }

private:
    std::vector<ValueGrid> channels_;
};

inline BinaryGrid sublevel_set(const ValueGrid& grid, double tau) {
    std::vector<std::uint8_t> mask(grid.size());
    auto v = grid.values();
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = v[i] <= tau ? 1 : 0;
    return BinaryGrid(grid.height(), grid.width(), std::move(mask));
}

inline BinaryGrid superlevel_set(const ValueGrid& grid, double tau) {
    std::vector<std::uint8_t> mask(grid.size());
    auto v = grid.values();
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = v[i] >= tau ? 1 : 0;
    return BinaryGrid(grid.height(), grid.width(), std::move(mask));
}

inline ValueGrid negate(const ValueGrid& grid) {
    std::vector<double> out(grid.values().begin(), grid.values().end());
    for (auto& v : out) v = -v;
    return ValueGrid(grid.height(), grid.width(), std::move(out));
}

/// Pixelwise sup-norm distance between equally shaped grids.
inline double sup_distance(const ValueGrid& a, const ValueGrid& b) {
    if (a.height() != b.height() || a.width() != b.width())
        throw InvalidInput("sup_distance: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

}  // namespace cumper
