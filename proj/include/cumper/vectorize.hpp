#pragma once

// Diagram vectorizations: Betti curves, landscapes, silhouettes and the
// power-weighted tent sum evaluated at learnable sample times, plus its
// multiparameter assembly over slices and analytic parameter gradients.
//
// Sums over pairs always run over a canonical (birth, death) order so the
// outputs are bit-identical under any permutation of the input diagram.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cumper/error.hpp"
#include "cumper/multipers.hpp"
#include "cumper/persistence.hpp"

namespace cumper {

enum class Aggregator { flatten, mean_over_slices };

struct VectorizationParams {
    std::vector<double> sample_times;
    /// One entry applies to every slice; otherwise one entry per slice.
    std::vector<double> weight_exponents{1.0};
    Aggregator aggregator = Aggregator::flatten;
    /// Death assigned to essential pairs. Unset: the last sample time.
    /// psi_mp and the induced vectorizations use the sliced clip value.
    std::optional<double> essential_clip;
    /// Landscape level k (1-based) for the landscape base.
    int landscape_level = 1;

    int q() const noexcept { return static_cast<int>(sample_times.size()); }

    double weight_for(int slice) const {
        if (weight_exponents.size() == 1) return weight_exponents.front();
        return weight_exponents.at(static_cast<std::size_t>(slice));
    }

    void validate() const {
        if (sample_times.empty()) throw InvalidInput("vectorization needs at least one sample time");
        for (std::size_t i = 1; i < sample_times.size(); ++i)
            if (!(sample_times[i] > sample_times[i - 1]))
                throw InvalidInput("sample times must be strictly increasing");
        if (weight_exponents.empty()) throw InvalidInput("missing weight exponent");
        for (double w : weight_exponents)
            if (!(w >= 0.0)) throw InvalidInput("weight exponents must be >= 0");
        if (landscape_level < 1) throw InvalidInput("landscape level must be >= 1");
    }

    double clip() const { return essential_clip.value_or(sample_times.back()); }
};

/// q sample times equally spaced over [0, levels].
inline std::vector<double> default_sample_times(int q, double levels) {
    if (q <= 0) throw InvalidInput("sample count must be positive");
    if (q == 1) return {levels / 2.0};
    std::vector<double> t(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) t[static_cast<std::size_t>(j)] = levels * j / (q - 1);
    return t;
}

/// Finite (birth, death) bar; essential deaths already clipped.
struct Bar {
    double birth = 0.0;
    double death = 0.0;

    double length() const noexcept { return std::abs(death - birth); }
    friend bool operator<(const Bar& a, const Bar& b) {
        return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
    }
};

inline std::vector<Bar> clipped_bars(std::span<const PersistencePair> pairs, double clip) {
    std::vector<Bar> bars;
    bars.reserve(pairs.size());
    for (const auto& p : pairs) bars.push_back({p.birth, p.essential() ? clip : p.death});
    std::sort(bars.begin(), bars.end());
    return bars;
}

/// Pairs of dimension `dim` from plain (birth, death) values.
inline std::vector<PersistencePair> make_pairs(const std::vector<std::pair<double, double>>& bd,
                                               int dim = 0) {
    std::vector<PersistencePair> out;
    for (auto [b, d] : bd) {
        PersistencePair p;
        p.dim = dim;
        p.birth = b;
        p.death = d;
        out.push_back(p);
    }
    return out;
}

/// Tent over [b, d] peaking at the midpoint with height (d - b) / 2.
inline double triangle(double birth, double death, double t) {
    return std::max(0.0, 0.5 * (death - birth) - std::abs(t - 0.5 * (birth + death)));
}

inline double power_weight(const Bar& bar, double exponent) {
    return std::pow(bar.length(), exponent);
}

/// Component j = sum over pairs of |d - b|^w * triangle(pair, t_j).
inline std::vector<double> perslay_vector(std::span<const PersistencePair> pairs,
                                          const VectorizationParams& params, int slice = 0) {
    params.validate();
    const double w = params.weight_for(slice);
    std::vector<double> out(params.sample_times.size(), 0.0);
    for (const Bar& bar : clipped_bars(pairs, params.clip())) {
        const double weight = power_weight(bar, w);
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += weight * triangle(bar.birth, bar.death, params.sample_times[j]);
    }
    return out;
}

/// Entry j counts pairs alive at thresholds[j] under half-open [b, d) bars.
inline std::vector<int> betti_curve(std::span<const PersistencePair> pairs,
                                    std::span<const double> thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw InvalidInput("betti_curve thresholds must be sorted");
    std::vector<int> out(thresholds.size(), 0);
    for (const auto& p : pairs)
        for (std::size_t j = 0; j < thresholds.size(); ++j)
            out[j] += p.birth <= thresholds[j] && thresholds[j] < p.death;
    return out;
}

/// Betti curve sampled at `bins` equally spaced thresholds over [lo, hi].
inline std::vector<int> betti_curve_bins(std::span<const PersistencePair> pairs, double lo, double hi,
                                         int bins = 100) {
    if (bins <= 0) throw InvalidInput("bin count must be positive");
    std::vector<double> thresholds(static_cast<std::size_t>(bins));
    for (int j = 0; j < bins; ++j)
        thresholds[static_cast<std::size_t>(j)] = bins == 1 ? lo : lo + (hi - lo) * j / (bins - 1);
    return betti_curve(pairs, thresholds);
}

/// k-th largest tent value at t (k >= 1); 0 when fewer than k pairs.
inline double landscape(std::span<const PersistencePair> pairs, int k, double t, double clip) {
    if (k < 1) throw InvalidInput("landscape level must be >= 1");
    std::vector<double> tents;
    tents.reserve(pairs.size());
    for (const Bar& bar : clipped_bars(pairs, clip)) tents.push_back(triangle(bar.birth, bar.death, t));
    if (tents.size() < static_cast<std::size_t>(k)) return 0.0;
    std::nth_element(tents.begin(), tents.begin() + (k - 1), tents.end(), std::greater<>());
    return tents[static_cast<std::size_t>(k - 1)];
}

inline std::vector<double> landscape_vector(std::span<const PersistencePair> pairs, int k,
                                            std::span<const double> samples, double clip) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (double t : samples) out.push_back(landscape(pairs, k, t, clip));
    return out;
}

/// Power-weighted average of tents; zero for an empty diagram. With
/// `normalized` false this is the plain weighted sum (perslay_vector).
inline std::vector<double> silhouette(std::span<const PersistencePair> pairs, double weight_exponent,
                                      std::span<const double> samples, double clip,
                                      bool normalized = true) {
    std::vector<double> out(samples.size(), 0.0);
    double total = 0.0;
    for (const Bar& bar : clipped_bars(pairs, clip)) {
        const double weight = power_weight(bar, weight_exponent);
        total += weight;
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += weight * triangle(bar.birth, bar.death, samples[j]);
    }
    if (normalized) {
        if (total == 0.0) return std::vector<double>(samples.size(), 0.0);
        for (auto& v : out) v /= total;
    }
    return out;
}

/// M x 2 x q array (slices x {dim 0, dim 1} x samples) plus the aggregate.
struct MPVectorization {
    int slices = 0;
    int q = 0;
    std::vector<double> values;
    std::vector<double> aggregate;

    double at(int s, int dim, int j) const {
        return values[(static_cast<std::size_t>(s) * 2 + static_cast<std::size_t>(dim)) * q +
                      static_cast<std::size_t>(j)];
    }
    std::span<const double> row(int s) const {
        return std::span<const double>(values).subspan(static_cast<std::size_t>(s) * 2 * q,
                                                       static_cast<std::size_t>(2 * q));
    }
};

inline MPVectorization psi_mp(const SlicedDiagrams& sliced, const VectorizationParams& params) {
    params.validate();
    VectorizationParams p = params;
    p.essential_clip = sliced.clip_value;
    MPVectorization v{sliced.size(), params.q(), {}, {}};
    v.values.reserve(static_cast<std::size_t>(v.slices) * 2 * v.q);
    for (int s = 0; s < v.slices; ++s)
        for (int dim = 0; dim < 2; ++dim) {
            auto row = perslay_vector(sliced.slices[static_cast<std::size_t>(s)].pairs(dim), p, s);
            v.values.insert(v.values.end(), row.begin(), row.end());
        }
    if (params.aggregator == Aggregator::flatten) {
        v.aggregate = v.values;
    } else {
        v.aggregate.assign(static_cast<std::size_t>(2 * v.q), 0.0);
        for (int s = 0; s < v.slices; ++s)
            for (std::size_t k = 0; k < v.aggregate.size(); ++k) v.aggregate[k] += v.row(s)[k];
        if (v.slices > 0)
            for (auto& x : v.aggregate) x /= v.slices;
    }
    return v;
}

/// Dense row-major matrix; rows are slices.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    double operator()(int r, int c) const {
        return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                      static_cast<std::size_t>(c)];
    }
    std::span<const double> row(int r) const {
        return std::span<const double>(values).subspan(static_cast<std::size_t>(r) * cols,
                                                       static_cast<std::size_t>(cols));
    }
};

enum class BaseVectorization { betti, silhouette, landscape, perslay };

/// Vectorization of one diagram dimension by the chosen base. Betti curves
/// are evaluated at `levels`; the other bases at the sample times.
inline std::vector<double> base_vector(std::span<const PersistencePair> pairs, BaseVectorization base,
                                       const VectorizationParams& params, std::span<const double> levels,
                                       double clip, int slice) {
    switch (base) {
        case BaseVectorization::betti: {
            auto curve = betti_curve(pairs, levels);
            return {curve.begin(), curve.end()};
        }
        case BaseVectorization::silhouette:
            return silhouette(pairs, params.weight_for(slice), params.sample_times, clip);
        case BaseVectorization::landscape:
            return landscape_vector(pairs, params.landscape_level, params.sample_times, clip);
        case BaseVectorization::perslay: {
            VectorizationParams p = params;
            p.essential_clip = clip;
            return perslay_vector(pairs, p, slice);
        }
    }
    throw InvalidInput("unknown base vectorization");
}

/// Rows i = base vectorization of slice i's diagram in dimension `dim`.
inline Matrix induced_mp_vectorization(const SlicedDiagrams& sliced, BaseVectorization base, int dim,
                                       const VectorizationParams& params) {
    if (base != BaseVectorization::betti) params.validate();
    Matrix m{sliced.size(), 0, {}};
    for (int s = 0; s < sliced.size(); ++s) {
        auto row = base_vector(sliced.slices[static_cast<std::size_t>(s)].pairs(dim), base, params,
                               sliced.levels, sliced.clip_value, s);
        m.cols = static_cast<int>(row.size());
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
}

/// Rows i = [base(PD_0 of slice i); base(PD_1 of slice i)].
inline Matrix stacked_mp_vectorization(const SlicedDiagrams& sliced, BaseVectorization base,
                                       const VectorizationParams& params) {
    Matrix m{sliced.size(), 0, {}};
    for (int s = 0; s < sliced.size(); ++s) {
        std::vector<double> row;
        for (int dim = 0; dim < 2; ++dim) {
            auto part = base_vector(sliced.slices[static_cast<std::size_t>(s)].pairs(dim), base, params,
                                    sliced.levels, sliced.clip_value, s);
            row.insert(row.end(), part.begin(), part.end());
        }
        m.cols = static_cast<int>(row.size());
        m.values.insert(m.values.end(), row.begin(), row.end());
    }
    return m;
}

/// Partials of perslay_vector. d_birth / d_death are pairs x q, in the
/// caller's pair order; d_times and d_weight have length q. At tent kinks
/// the average of the one-sided slopes is reported.
struct Gradients {
    int pairs = 0;
    int q = 0;
    std::vector<double> d_birth;
    std::vector<double> d_death;
    std::vector<double> d_times;
    std::vector<double> d_weight;

    double birth(int i, int j) const { return d_birth[static_cast<std::size_t>(i) * q + j]; }
    double death(int i, int j) const { return d_death[static_cast<std::size_t>(i) * q + j]; }
};

namespace detail {

inline double symmetric_sign(double x) { return x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0; }
inline double symmetric_step(double x) { return x > 0 ? 1.0 : x < 0 ? 0.0 : 0.5; }

}  // namespace detail

inline Gradients perslay_gradients(std::span<const PersistencePair> pairs, const VectorizationParams& params,
                                   int slice = 0) {
    params.validate();
    const double w = params.weight_for(slice);
    const double clip = params.clip();
    const std::size_t q = params.sample_times.size();
    Gradients g{static_cast<int>(pairs.size()), static_cast<int>(q), {}, {}, {}, {}};
    g.d_birth.assign(pairs.size() * q, 0.0);
    g.d_death.assign(pairs.size() * q, 0.0);
    g.d_times.assign(q, 0.0);
    g.d_weight.assign(q, 0.0);

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto bar_of = [&](std::size_t i) { return Bar{pairs[i].birth, pairs[i].essential() ? clip : pairs[i].death}; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bar_of(a) < bar_of(b); });

    for (std::size_t i : order) {
        const Bar bar = bar_of(i);
        const bool essential = pairs[i].essential();
        const double len = bar.length();
        if (len == 0.0) continue;
        const double sgn_len = detail::symmetric_sign(bar.death - bar.birth);
        const double weight = std::pow(len, w);
        const double dweight_dlen = w == 0.0 ? 0.0 : w * std::pow(len, w - 1.0);
        const double mid = 0.5 * (bar.birth + bar.death);
        for (std::size_t j = 0; j < q; ++j) {
            const double t = params.sample_times[j];
            const double u = 0.5 * (bar.death - bar.birth) - std::abs(t - mid);
            const double tent = std::max(0.0, u);
            const double step = detail::symmetric_step(u);
            const double s = detail::symmetric_sign(t - mid);
            const double dtent_db = step * (-0.5 + 0.5 * s);
            const double dtent_dd = step * (0.5 + 0.5 * s);
            const double dtent_dt = step * (-s);
            g.d_birth[i * q + j] = -sgn_len * dweight_dlen * tent + weight * dtent_db;
            g.d_death[i * q + j] = essential ? 0.0 : sgn_len * dweight_dlen * tent + weight * dtent_dd;
            g.d_times[j] += weight * dtent_dt;
            g.d_weight[j] += weight * std::log(len) * tent;
        }
    }
    return g;
}

}  // namespace cumper
