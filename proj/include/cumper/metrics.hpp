#pragma once

// Distances between diagrams and between vectorizations, and the empirical
// stability report for induced multiparameter vectorizations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cumper/assignment.hpp"
#include "cumper/error.hpp"
#include "cumper/filtrations.hpp"
#include "cumper/multipers.hpp"
#include "cumper/parallel.hpp"
#include "cumper/persistence.hpp"
#include "cumper/vectorize.hpp"

namespace cumper {

inline constexpr int kDiagonal = -1;

enum class EssentialMode { exclude, clip };

struct MatchOptions {
    EssentialMode essentials = EssentialMode::exclude;
    double clip_value = 0.0;  // used when essentials == clip
};

/// Optimal matching between two diagrams. Entries are (index in A or
/// kDiagonal, index in B or kDiagonal); indices refer to the finite point
/// lists produced by `matchable_points`.
struct MatchingResult {
    double cost = 0.0;
    std::vector<std::pair<int, int>> matching;
};

using Point = std::pair<double, double>;

inline std::vector<Point> matchable_points(std::span<const PersistencePair> pairs, const MatchOptions& opt = {}) {
    std::vector<Point> pts;
    for (const auto& p : pairs) {
        if (!p.essential()) {
            pts.emplace_back(p.birth, p.death);
        } else if (opt.essentials == EssentialMode::clip) {
            pts.emplace_back(p.birth, opt.clip_value);
        }
    }
    return pts;
}

inline double linf_distance(const Point& a, const Point& b) {
    return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second));
}

/// L-infinity distance to the closest diagonal point ((b+d)/2, (b+d)/2).
inline double diagonal_distance(const Point& a) { return std::abs(a.second - a.first) / 2.0; }

/// Cost of a given matching: (sum of d^p)^(1/p), or the max for p = inf.
/// Terms are summed in ascending order so the result does not depend on
/// the order of the matching or on which diagram comes first.
inline double matching_cost(std::span<const Point> a, std::span<const Point> b,
                            std::span<const std::pair<int, int>> matching, double p) {
    const bool bottleneck = std::isinf(p);
    std::vector<double> terms;
    terms.reserve(matching.size());
    for (auto [i, j] : matching) {
        double d = 0.0;
        if (i != kDiagonal && j != kDiagonal)
            d = linf_distance(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
        else if (i != kDiagonal)
            d = diagonal_distance(a[static_cast<std::size_t>(i)]);
        else if (j != kDiagonal)
            d = diagonal_distance(b[static_cast<std::size_t>(j)]);
        terms.push_back(bottleneck ? d : std::pow(d, p));
    }
    std::sort(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc = bottleneck ? std::max(acc, t) : acc + t;
    return bottleneck ? acc : std::pow(acc, 1.0 / p);
}

/// Exact p-Wasserstein distance (p = infinity gives the bottleneck distance)
/// with L-infinity ground metric. Each side is augmented with one diagonal
/// slot per point of the other side; diagonal-to-diagonal costs nothing.
inline MatchingResult wasserstein_points(std::span<const Point> a, std::span<const Point> b, double p) {
    if (!(p >= 1.0)) throw InvalidInput("Wasserstein order p must be >= 1");
    // Solve in a canonical argument order so that W(a, b) == W(b, a) bit for bit.
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) {
        MatchingResult r = wasserstein_points(b, a, p);
        for (auto& [i, j] : r.matching) std::swap(i, j);
        std::sort(r.matching.begin(), r.matching.end());
        return r;
    }
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    const int n = na + nb;
    MatchingResult result;
    if (n == 0) return result;

    const bool bottleneck = std::isinf(p);
    auto ground = [&](double d) { return bottleneck ? d : std::pow(d, p); };
    std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double d = 0.0;
            if (r < na && c < nb) d = linf_distance(a[r], b[c]);
            else if (r < na) d = diagonal_distance(a[r]);
            else if (c < nb) d = diagonal_distance(b[c]);
            cost[static_cast<std::size_t>(r) * n + c] = ground(d);
        }

    std::vector<int> row_to_col;
    if (!bottleneck) {
        row_to_col = solve_assignment(cost, n);
    } else {
        std::vector<double> candidates(cost);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        std::size_t lo = 0, hi = candidates.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (!threshold_matching(cost, n, candidates[mid]).empty()) hi = mid;
            else lo = mid + 1;
        }
        row_to_col = threshold_matching(cost, n, candidates[lo]);
    }

    for (int r = 0; r < n; ++r) {
        const int c = row_to_col[static_cast<std::size_t>(r)];
        const int i = r < na ? r : kDiagonal;
        const int j = c < nb ? c : kDiagonal;
        if (i == kDiagonal && j == kDiagonal) continue;
        result.matching.emplace_back(i, j);
    }
    std::sort(result.matching.begin(), result.matching.end());
    result.cost = matching_cost(a, b, result.matching, p);
    return result;
}

inline MatchingResult wasserstein(std::span<const PersistencePair> a, std::span<const PersistencePair> b,
                                  double p, const MatchOptions& opt = {}) {
    auto pa = matchable_points(a, opt);
    auto pb = matchable_points(b, opt);
    return wasserstein_points(pa, pb, p);
}

inline double bottleneck(std::span<const PersistencePair> a, std::span<const PersistencePair> b,
                         const MatchOptions& opt = {}) {
    return wasserstein(a, b, std::numeric_limits<double>::infinity(), opt).cost;
}

/// Sum over slices (and the requested dimensions) of per-slice W_p.
inline double mp_diagram_distance(const SlicedDiagrams& a, const SlicedDiagrams& b, double p,
                                  HomologyDims dims = HomologyDims::both, const MatchOptions& opt = {},
                                  unsigned workers = 1) {
    if (a.size() != b.size()) throw InvalidInput("mp_diagram_distance: slice counts differ");
    std::vector<double> per(static_cast<std::size_t>(a.size()) * 2, 0.0);
    parallel_for(per.size(), workers, [&](std::size_t k) {
        const int dim = static_cast<int>(k % 2);
        if (!includes(dims, dim)) return;
        const auto s = k / 2;
        per[k] = wasserstein(a.slices[s].pairs(dim), b.slices[s].pairs(dim), p, opt).cost;
    });
    double total = 0.0;
    for (double d : per) total += d;
    return total;
}

inline double l2_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInput("l2_distance: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Sum over rows of the row-wise l2 distance.
inline double mp_vectorization_distance(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw InvalidInput("mp_vectorization_distance: shape mismatch");
    double total = 0.0;
    for (int r = 0; r < a.rows; ++r) total += l2_distance(a.row(r), b.row(r));
    return total;
}

inline double mp_vectorization_distance(const MPVectorization& a, const MPVectorization& b) {
    if (a.slices != b.slices || a.q != b.q) throw InvalidInput("mp_vectorization_distance: shape mismatch");
    double total = 0.0;
    for (int s = 0; s < a.slices; ++s) total += l2_distance(a.row(s), b.row(s));
    return total;
}

/// Lipschitz constant of the tent-sum vectorization against W_1 (L-infinity
/// ground metric) summed over both dimensions, for bars with length at most
/// `range`: each point moves its weighted tent by at most (w + 1) range^w in
/// sup norm, hence sqrt(q) (w + 1) range^w in l2.
inline double perslay_lipschitz_constant(const VectorizationParams& params, double range) {
    double c = 0.0;
    for (double w : params.weight_exponents) c = std::max(c, (w + 1.0) * std::pow(range, w));
    return std::sqrt(static_cast<double>(params.q())) * c;
}

/// Bound for the normalized silhouette of one slice and dimension. The
/// normalization makes it depend on the larger total weight of the two
/// diagrams; it needs w >= 1 for the total weight to be Lipschitz.
inline double silhouette_lipschitz_bound(double w, int q, double range, double total_weight_a,
                                         double total_weight_b) {
    if (w < 1.0) throw InvalidInput("silhouette stability bound needs weight exponent >= 1");
    const double denom = std::max(total_weight_a, total_weight_b);
    if (denom == 0.0) return 0.0;
    return std::sqrt(static_cast<double>(q)) * (2.0 * w + 1.0) * std::pow(range, w) / denom;
}

inline double total_weight(std::span<const PersistencePair> pairs, double w, double clip) {
    double total = 0.0;
    for (const Bar& bar : clipped_bars(pairs, clip)) total += power_weight(bar, w);
    return total;
}

struct StabilityConfig {
    BaseVectorization base = BaseVectorization::perslay;
    VectorizationParams params;
    double p = 1.0;
    /// Overrides the computed Lipschitz constant when set.
    std::optional<double> lipschitz_constant;
    /// Flag threshold for vectorization distance / sup distance.
    double sup_constant = std::numeric_limits<double>::infinity();
};

struct StabilityReport {
    double vectorization_distance = 0.0;  // sum over slices of l2 row distances
    double diagram_distance = 0.0;        // D_p over slices and both dimensions
    double sup_distance = 0.0;            // pixelwise sup of the bifiltration functions
    double ratio_diagram = 0.0;
    double ratio_sup = 0.0;
    double lipschitz_constant = 0.0;
    bool diagram_violation = false;
    bool sup_violation = false;
};

namespace detail {

inline double safe_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

}  // namespace detail

/// Stability check on already sliced diagrams plus the sup distance of the
/// underlying bifiltration functions.
inline StabilityReport stability_report(const SlicedDiagrams& a, const SlicedDiagrams& b, double sup_distance,
                                        const StabilityConfig& cfg) {
    if (a.size() != b.size()) throw InvalidInput("stability_report: slice counts differ");
    if (cfg.base != BaseVectorization::perslay && cfg.base != BaseVectorization::silhouette)
        throw InvalidInput("stability_report supports the perslay and silhouette bases");
    if (a.clip_value != b.clip_value || a.levels != b.levels)
        throw InvalidInput("stability_report: sliced diagrams use different level ranges");
    cfg.params.validate();

    const MatchOptions match{EssentialMode::clip, a.clip_value};
    const double range = a.clip_value - (a.levels.empty() ? 0.0 : a.levels.front());

    StabilityReport r;
    r.vectorization_distance = mp_vectorization_distance(stacked_mp_vectorization(a, cfg.base, cfg.params),
                                                         stacked_mp_vectorization(b, cfg.base, cfg.params));
    r.diagram_distance = mp_diagram_distance(a, b, cfg.p, HomologyDims::both, match);
    r.sup_distance = sup_distance;

    if (cfg.lipschitz_constant) {
        r.lipschitz_constant = *cfg.lipschitz_constant;
    } else if (cfg.base == BaseVectorization::perslay) {
        r.lipschitz_constant = perslay_lipschitz_constant(cfg.params, range);
    } else {
        double c = 0.0;
        for (int s = 0; s < a.size(); ++s)
            for (int dim = 0; dim < 2; ++dim) {
                const double w = cfg.params.weight_for(s);
                const auto& pa = a.slices[static_cast<std::size_t>(s)].pairs(dim);
                const auto& pb = b.slices[static_cast<std::size_t>(s)].pairs(dim);
                c = std::max(c, silhouette_lipschitz_bound(w, cfg.params.q(), range,
                                                           total_weight(pa, w, a.clip_value),
                                                           total_weight(pb, w, b.clip_value)));
            }
        r.lipschitz_constant = c;
    }

    r.ratio_diagram = detail::safe_ratio(r.vectorization_distance, r.diagram_distance);
    r.ratio_sup = detail::safe_ratio(r.vectorization_distance, r.sup_distance);
    r.diagram_violation = r.vectorization_distance > r.lipschitz_constant * r.diagram_distance;
    r.sup_violation = r.ratio_sup > cfg.sup_constant;
    return r;
}

/// Pixelwise sup distance between the row first-activation functions of two
/// bifiltrations of equal shape.
inline double bifiltration_sup_distance(const BiFiltration& a, const BiFiltration& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("bifiltration shapes differ");
    double d = 0.0;
    for (int s = 0; s < a.rows(); ++s) d = std::max(d, sup_distance(a.first_activation(s), b.first_activation(s)));
    return d;
}

inline StabilityReport stability_report(const BiFiltration& a, const BiFiltration& b, const StabilityConfig& cfg) {
    return stability_report(slice_rows(a), slice_rows(b), bifiltration_sup_distance(a, b), cfg);
}

}  // namespace cumper
