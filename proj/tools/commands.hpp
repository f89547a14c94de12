#pragma once

// Implementation of the `cumper` subcommands. Each command returns the
// process exit code; main() only parses arguments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cumper/filtrations.hpp"
#include "cumper/io.hpp"
#include "cumper/metrics.hpp"
#include "cumper/multipers.hpp"
#include "cumper/oracle.hpp"
#include "cumper/persistence.hpp"
#include "cumper/vectorize.hpp"

namespace cumper::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIoError = 2, kVerificationFailure = 3 };

/// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Worker count: CUMPER_THREADS wins over the flag; 0 means all cores.
inline unsigned resolve_threads(unsigned flag) {
    if (const char* env = std::getenv("CUMPER_THREADS"); env && *env) {
        try {
            flag = static_cast<unsigned>(std::stoul(env));
        } catch (...) {
            throw UsageError(std::string("CUMPER_THREADS is not a number: ") + env);
        }
    }
    if (flag == 0) flag = std::max(1u, std::thread::hardware_concurrency());
    return flag;
}

inline HomologyDims parse_dims(const std::string& s) {
    if (s == "0") return HomologyDims::h0;
    if (s == "1") return HomologyDims::h1;
    if (s == "both") return HomologyDims::both;
    throw UsageError("--dim must be 0, 1 or both");
}

inline void emit(const io::json& doc, const std::string& out) {
    const std::string text = doc.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        io::write_text(out, text);
}

/// Picks one channel of an image; color images need an explicit choice.
inline ValueGrid select_channel(const MultiChannelImage& img, const std::string& channel) {
    if (img.channel_count() == 1) {
        if (!channel.empty() && channel != "gray")
            throw InvalidInput("image is grayscale; --channel " + channel + " is not available");
        return img.channel(0);
    }
    if (channel == "r") return img.channel(0);
    if (channel == "g") return img.channel(1);
    if (channel == "b") return img.channel(2);
    if (channel == "gray") return img.mean_channel();
    throw InvalidInput("input is not grayscale; pass --channel r|g|b|gray");
}

// ---------------------------------------------------------------------------
// pd

struct PdOptions {
    std::string image;
    std::string dim = "both";
    bool superlevel = false;
    std::vector<double> thresholds;
    int threshold_count = 0;
    std::string channel;
    std::string out;
    bool coordinates = true;
};

/// Replaces each value by the 1-based index of the first threshold at or
/// above it; values above every threshold get count + 1.
inline ValueGrid quantize(const ValueGrid& grid, const std::vector<double>& thresholds) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto it = std::lower_bound(thresholds.begin(), thresholds.end(), grid.values()[i]);
        out[i] = static_cast<double>(it - thresholds.begin()) + 1.0;
    }
    return ValueGrid(grid.height(), grid.width(), std::move(out));
}

inline io::DiagramDocument pd_document(const PdOptions& o) {
    MultiChannelImage img = io::read_image(o.image);
    ValueGrid grid = select_channel(img, o.channel);
    const HomologyDims dims = parse_dims(o.dim);
    if (o.superlevel) grid = negate(grid);

    std::vector<double> thresholds = o.thresholds;
    if (thresholds.empty() && o.threshold_count > 0)
        thresholds = linear_thresholds(grid.min_value(), grid.max_value(), o.threshold_count);
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1])) throw UsageError("--thresholds must be strictly increasing");

    io::DiagramDocument doc;
    doc.include_coordinates = o.coordinates;
    PersistenceDiagram pd;
    if (thresholds.empty()) {
        pd = compute_pd(grid, dims);
    } else {
        const int n = static_cast<int>(thresholds.size());
        pd = compute_pd(quantize(grid, thresholds), dims, n + 2.0);
        restrict_to_levels(pd, n);
        for (auto* v : {&pd.dim0, &pd.dim1})
            for (auto& p : *v) {
                p.birth = thresholds[static_cast<std::size_t>(p.birth) - 1];
                if (!std::isinf(p.death)) p.death = thresholds[static_cast<std::size_t>(p.death) - 1];
            }
        doc.num_levels = n;
        doc.thresholds = thresholds;
    }
    if (o.superlevel) {
        for (auto* v : {&pd.dim0, &pd.dim1})
            for (auto& p : *v) {
                p.birth = -p.birth;
                p.death = -p.death;
            }
        for (auto& t : doc.thresholds) t = -t;
    }
    doc.slices.push_back(std::move(pd));
    return doc;
}

inline int cmd_pd(const PdOptions& o) {
    emit(io::to_json(pd_document(o)), o.out);
    return kOk;
}

// ---------------------------------------------------------------------------
// mp

struct MpOptions {
    std::string image;
    std::string rows = "erosion";
    std::string cols = "sublevel";
    std::string row_levels;  // comma list; erosion levels or a channel threshold count
    int col_thresholds = 50;
    std::string vectorize = "perslay";
    int samples = 100;
    double weight = 1.0;
    std::string aggregator = "flatten";
    std::string channel = "gray";
    bool diagrams = false;
    std::string out;
    unsigned threads = 1;
};

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (...) {
            throw UsageError("invalid number in list: '" + tok + "'");
        }
    }
    return out;
}

inline BaseVectorization parse_base(const std::string& s) {
    if (s == "betti") return BaseVectorization::betti;
    if (s == "silhouette") return BaseVectorization::silhouette;
    if (s == "landscape") return BaseVectorization::landscape;
    if (s == "perslay") return BaseVectorization::perslay;
    throw UsageError("--vectorize must be betti, silhouette, landscape or perslay");
}

/// Cells {channel <= r_s} and {gray <= g_t}, rows by channel threshold.
inline BiFiltration channel_bifiltration(const ValueGrid& channel, const std::vector<double>& row_thresholds,
                                         const ValueGrid& gray, const std::vector<double>& col_thresholds) {
    std::vector<BinaryGrid> cells;
    for (double r : row_thresholds) {
        BinaryGrid rm = sublevel_set(channel, r);
        for (double g : col_thresholds) {
            BinaryGrid gm = sublevel_set(gray, g);
            std::vector<std::uint8_t> act(rm.size());
            for (std::size_t i = 0; i < act.size(); ++i) act[i] = rm.active()[i] & gm.active()[i];
            cells.emplace_back(channel.height(), channel.width(), std::move(act));
        }
    }
    return BiFiltration(static_cast<int>(row_thresholds.size()), static_cast<int>(col_thresholds.size()),
                        std::move(cells));
}

inline io::json mp_document(const MpOptions& o) {
    if (o.cols != "sublevel") throw UsageError("--cols supports only 'sublevel'");
    if (o.col_thresholds <= 0) throw UsageError("--col-thresholds must be positive");
    if (o.samples <= 0) throw UsageError("--samples must be positive");
    if (o.aggregator != "flatten" && o.aggregator != "mean") throw UsageError("--aggregator must be flatten or mean");
    const unsigned workers = resolve_threads(o.threads);
    MultiChannelImage img = io::read_image(o.image);
    const std::vector<double> row_list = parse_list(o.row_levels);

    if (o.rows == "channel") {
        if (img.channel_count() != 3) throw InvalidInput("--rows channel needs an RGB image");
        int count = 10;
        if (row_list.size() == 1) count = static_cast<int>(row_list.front());
        else if (!row_list.empty()) throw UsageError("--rows channel takes a single threshold count");
        if (count <= 0) throw UsageError("threshold count must be positive");
        std::vector<std::vector<double>> thresholds;
        for (std::size_t c = 0; c < 3; ++c)
            thresholds.push_back(linear_thresholds(img.channel(c).min_value(), img.channel(c).max_value(), count));
        ColorMembership membership = color_multifiltration(img, thresholds);
        io::json doc;
        doc["schema_version"] = io::kSchemaVersion;
        doc["kind"] = "betti_tensor";
        doc["shape"] = io::json::array({count, count, count});
        for (int dim = 0; dim < 2; ++dim)
            doc["dim" + std::to_string(dim)] = color_betti_tensor(membership, dim, workers).values;
        return doc;
    }

    const ValueGrid gray = select_channel(img, o.channel);
    const std::vector<double> cols = linear_thresholds(gray.min_value(), gray.max_value(), o.col_thresholds);
    std::optional<BiFiltration> bif;
    if (o.rows == "erosion") {
        std::vector<int> levels;
        for (double v : row_list) {
            if (v != std::floor(v)) throw UsageError("erosion levels must be integers");
            levels.push_back(static_cast<int>(v));
        }
        if (levels.empty()) levels = default_erosion_levels();
        bif = erosion_bifiltration(gray, cols, levels).grid;
    } else if (o.rows.rfind("channel:", 0) == 0) {
        if (img.channel_count() != 3) throw InvalidInput("--rows " + o.rows + " needs an RGB image");
        const std::string which = o.rows.substr(8);
        const ValueGrid channel = select_channel(img, which);
        std::vector<double> rows = row_list;
        if (rows.size() <= 1) {
            const int count = rows.empty() ? 10 : static_cast<int>(rows.front());
            if (count <= 0) throw UsageError("threshold count must be positive");
            rows = linear_thresholds(channel.min_value(), channel.max_value(), count);
        }
        bif = channel_bifiltration(channel, rows, gray, cols);
    } else {
        throw UsageError("--rows must be erosion, channel or channel:r|g|b");
    }

    const SlicedDiagrams sliced = slice_rows(*bif, SliceAxis::rows, HomologyDims::both, workers);
    const BaseVectorization base = parse_base(o.vectorize);
    VectorizationParams params;
    params.sample_times = default_sample_times(o.samples, static_cast<double>(bif->cols()));
    params.weight_exponents = {o.weight};
    params.aggregator = o.aggregator == "mean" ? Aggregator::mean_over_slices : Aggregator::flatten;

    io::VectorizationDocument vdoc;
    vdoc.base = o.vectorize;
    vdoc.aggregator = o.aggregator;
    vdoc.slices = sliced.size();
    if (base == BaseVectorization::perslay) {
        MPVectorization v = psi_mp(sliced, params);
        vdoc.length = v.q;
        vdoc.values = v.values;
        vdoc.aggregate = v.aggregate;
        vdoc.sample_times = params.sample_times;
    } else {
        Matrix m = stacked_mp_vectorization(sliced, base, params);
        vdoc.length = m.cols / 2;
        vdoc.values = m.values;
        if (o.aggregator == "flatten") {
            vdoc.aggregate = m.values;
        } else {
            vdoc.aggregate.assign(static_cast<std::size_t>(m.cols), 0.0);
            for (int r = 0; r < m.rows; ++r)
                for (int c = 0; c < m.cols; ++c) vdoc.aggregate[static_cast<std::size_t>(c)] += m(r, c);
            for (auto& x : vdoc.aggregate) x /= m.rows;
        }
        vdoc.sample_times = base == BaseVectorization::betti ? sliced.levels : params.sample_times;
    }

    io::json doc = io::to_json(vdoc);
    doc["grid"] = io::json::array({bif->rows(), bif->cols()});
    if (o.diagrams) {
        io::DiagramDocument dd;
        dd.slices = sliced.slices;
        dd.num_slices = sliced.size();
        dd.num_levels = bif->cols();
        dd.thresholds = cols;
        doc["diagrams"] = io::to_json(dd);
    }
    return doc;
}

inline int cmd_mp(const MpOptions& o) {
    emit(mp_document(o), o.out);
    return kOk;
}

// ---------------------------------------------------------------------------
// distance

struct DistanceOptions {
    std::string a;
    std::string b;
    std::string metric = "wasserstein";
    double p = 1.0;
    std::string dim = "0";
    std::string essentials = "exclude";
};

inline SlicedDiagrams as_sliced(const io::DiagramDocument& doc) {
    SlicedDiagrams s;
    s.slices = doc.slices;
    s.levels = level_indices(doc.num_levels);
    s.clip_value = doc.num_levels + 1.0;
    return s;
}

inline double distance_value(const DistanceOptions& o) {
    const io::json ja = io::read_json(o.a);
    const io::json jb = io::read_json(o.b);
    if (o.metric == "vec") {
        auto va = io::vectorization_document_from_json(ja);
        auto vb = io::vectorization_document_from_json(jb);
        if (va.slices != vb.slices || va.length != vb.length)
            throw FormatError("vectorization documents have different shapes");
        return mp_vectorization_distance(io::as_matrix(va), io::as_matrix(vb));
    }
    const auto da = io::diagram_document_from_json(ja);
    const auto db = io::diagram_document_from_json(jb);
    if (da.slices.size() != db.slices.size()) throw FormatError("diagram documents have different slice counts");
    const HomologyDims dims = parse_dims(o.dim);
    MatchOptions match;
    if (o.essentials == "clip") {
        if (da.num_levels != db.num_levels) throw FormatError("clip mode needs documents with the same level count");
        match = {EssentialMode::clip, da.num_levels + 1.0};
    } else if (o.essentials != "exclude") {
        throw UsageError("--essentials must be exclude or clip");
    }
    if (o.metric == "mp-sum") return mp_diagram_distance(as_sliced(da), as_sliced(db), o.p, dims, match);
    if (o.metric == "wasserstein" || o.metric == "bottleneck") {
        if (da.slices.size() != 1) throw FormatError("wasserstein/bottleneck need single-slice documents; use mp-sum");
        const double p = o.metric == "bottleneck" ? std::numeric_limits<double>::infinity() : o.p;
        double total = 0.0;
        for (int dim = 0; dim < 2; ++dim)
            if (includes(dims, dim))
                total += wasserstein(da.slices[0].pairs(dim), db.slices[0].pairs(dim), p, match).cost;
        return total;
    }
    throw UsageError("--metric must be wasserstein, bottleneck, mp-sum or vec");
}

inline std::string format_distance(double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    return buf;
}

inline int cmd_distance(const DistanceOptions& o) {
    std::cout << format_distance(distance_value(o)) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// oracle-check

struct OracleCheckOptions {
    int trials = 1000;
    int max_size = 8;
    int max_value = 9;
    unsigned seed = 0;
    bool inject_fault = false;  // perturbs engine output to exercise the harness
};

struct OracleCheckResult {
    int exhaustive_total = 0;
    int exhaustive_passed = 0;
    int random_total = 0;
    int random_passed = 0;

    bool all_passed() const {
        return exhaustive_passed == exhaustive_total && random_passed == random_total;
    }
};

inline bool engine_matches_oracle(const ValueGrid& grid, bool inject_fault) {
    PersistenceDiagram engine = compute_pd(grid, HomologyDims::both);
    if (inject_fault) {
        for (auto& p : engine.dim0) p.birth -= 0.5;
    }
    PersistenceDiagram reference = oracle::oracle_pd(grid);
    return engine.values(0) == reference.values(0) && engine.values(1) == reference.values(1);
}

inline OracleCheckResult run_oracle_check(const OracleCheckOptions& o) {
    if (o.max_size < 1 || o.max_size > oracle::kMaxSide) throw UsageError("--max-size must be in 1..64");
    if (o.trials < 0 || o.max_value < 0) throw UsageError("--trials and --max-value must be non-negative");
    OracleCheckResult r;
    for (auto [h, w] : {std::pair{2, 2}, std::pair{2, 3}}) {
        const int cells = h * w;
        int combos = 1;
        for (int i = 0; i < cells; ++i) combos *= 3;
        for (int code = 0; code < combos; ++code) {
            std::vector<double> v(static_cast<std::size_t>(cells));
            int c = code;
            for (auto& x : v) {
                x = c % 3;
                c /= 3;
            }
            ++r.exhaustive_total;
            r.exhaustive_passed += engine_matches_oracle(ValueGrid(h, w, std::move(v)), o.inject_fault);
        }
    }
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> side(1, o.max_size);
    std::uniform_int_distribution<int> value(0, o.max_value);
    for (int t = 0; t < o.trials; ++t) {
        const int h = side(rng);
        const int w = side(rng);
        std::vector<double> v(static_cast<std::size_t>(h) * w);
        for (auto& x : v) x = value(rng);
        ++r.random_total;
        r.random_passed += engine_matches_oracle(ValueGrid(h, w, std::move(v)), o.inject_fault);
    }
    return r;
}

inline int cmd_oracle_check(const OracleCheckOptions& o) {
    const OracleCheckResult r = run_oracle_check(o);
    std::cout << "exhaustive: " << r.exhaustive_passed << "/" << r.exhaustive_total << " passed\n";
    std::cout << "random: " << r.random_passed << "/" << r.random_total << " passed (seed " << o.seed
              << ", max size " << o.max_size << ")\n";
    std::cout << (r.all_passed() ? "PASS" : "FAIL") << "\n";
    return r.all_passed() ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    int height = 224;
    int width = 224;
    int slices = 16;
    int levels = 32;
    int batch = 8;
    unsigned threads = 8;
    int repeat = 3;
    unsigned seed = 0;
    std::string csv;
};

struct BenchStats {
    unsigned workers = 1;
    std::vector<double> seconds;

    double mean() const { return std::accumulate(seconds.begin(), seconds.end(), 0.0) / seconds.size(); }
    double stddev() const {
        if (seconds.size() < 2) return 0.0;
        const double m = mean();
        double s = 0.0;
        for (double x : seconds) s += (x - m) * (x - m);
        return std::sqrt(s / (seconds.size() - 1));
    }
};

struct BenchResult {
    BenchStats single;
    BenchStats multi;
    std::size_t pairs_per_batch = 0;

    double speedup() const { return single.mean() / multi.mean(); }
};

/// Random monotone compact stacks: one smooth-free uniform field per image,
/// lowered slice by slice so that Z'_s >= Z'_{s+1}.
inline std::vector<ValueGrid> bench_batch(const BenchOptions& o, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ValueGrid> grids;
    grids.reserve(static_cast<std::size_t>(o.batch) * o.slices);
    for (int b = 0; b < o.batch; ++b) {
        std::vector<double> z(static_cast<std::size_t>(o.height) * o.width);
        for (auto& x : z) x = u(rng);
        for (int s = 0; s < o.slices; ++s) {
            const double shift = o.slices > 1 ? 0.5 * s / (o.slices - 1) : 0.0;
            std::vector<double> q(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) q[i] = staircase(std::max(0.0, z[i] - shift), o.levels);
            grids.emplace_back(o.height, o.width, std::move(q));
        }
    }
    return grids;
}

inline BenchResult run_bench(const BenchOptions& o) {
    if (o.height <= 0 || o.width <= 0 || o.slices <= 0 || o.levels <= 0 || o.batch <= 0 || o.repeat <= 0)
        throw UsageError("bench sizes must be positive");
    BenchResult r;
    r.single.workers = 1;
    r.multi.workers = resolve_threads(o.threads);
    std::mt19937_64 rng(o.seed);
    using clock = std::chrono::steady_clock;
    for (int rep = 0; rep < o.repeat; ++rep) {
        const auto grids = bench_batch(o, rng);
        for (BenchStats* stats : {&r.single, &r.multi}) {
            const auto start = clock::now();
            auto pds = compute_pd_many(grids, HomologyDims::both, o.levels + 1.0, stats->workers);
            stats->seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
            if (rep == 0 && stats == &r.single)
                for (const auto& pd : pds) r.pairs_per_batch += pd.dim0.size() + pd.dim1.size();
        }
    }
    return r;
}

inline int cmd_bench(const BenchOptions& o) {
    const BenchResult r = run_bench(o);
    std::printf("config: %dx%d image, %dx%d grid, batch %d, %d repeats\n", o.height, o.width, o.slices,
                o.levels, o.batch, o.repeat);
    std::printf("pairs per batch: %zu\n", r.pairs_per_batch);
    std::printf("workers=1: %.4f +- %.4f s/batch\n", r.single.mean(), r.single.stddev());
    std::printf("workers=%u: %.4f +- %.4f s/batch\n", r.multi.workers, r.multi.mean(), r.multi.stddev());
    std::printf("speedup: %.3f (hardware threads: %u)\n", r.speedup(), std::thread::hardware_concurrency());
    if (!o.csv.empty()) {
        std::ostringstream csv;
        csv << "height,width,slices,levels,batch,workers,repeat,seconds\n";
        for (const BenchStats* s : {&r.single, &r.multi})
            for (std::size_t i = 0; i < s->seconds.size(); ++i)
                csv << o.height << ',' << o.width << ',' << o.slices << ',' << o.levels << ',' << o.batch << ','
                    << s->workers << ',' << i << ',' << s->seconds[i] << '\n';
        io::write_text(o.csv, csv.str());
    }
    return kOk;
}

}  // namespace cumper::cli
