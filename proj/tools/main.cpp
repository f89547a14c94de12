#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

// Accepts "HxW" (e.g. 224x224) or a single number for square images.
void parse_size(const std::string& s, int& h, int& w) {
    const auto x = s.find_first_of("xX");
    try {
        if (x == std::string::npos) {
            h = w = std::stoi(s);
        } else {
            h = std::stoi(s.substr(0, x));
            w = std::stoi(s.substr(x + 1));
        }
    } catch (...) {
        throw cumper::cli::UsageError("--size must look like HxW");
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cumper::cli;
    CLI::App app{"cumper: cubical persistence and multiparameter vectorizations for images"};
    app.require_subcommand(1);

    PdOptions pd;
    std::string pd_thresholds;
    auto* pd_cmd = app.add_subcommand("pd", "persistence diagram of a single image filtration");
    pd_cmd->add_option("image", pd.image, "input image (.pgm, .png, .csv)")->required();
    pd_cmd->add_option("--dim", pd.dim, "0, 1 or both")->capture_default_str();
    pd_cmd->add_flag("--superlevel", pd.superlevel, "use superlevel sets");
    pd_cmd->add_option("--thresholds", pd_thresholds,
                       "comma-separated threshold values, or a single integer count");
    pd_cmd->add_option("--channel", pd.channel, "r, g, b or gray (required for color input)");
    pd_cmd->add_option("-o,--out", pd.out, "output JSON path (default stdout)");

    MpOptions mp;
    auto* mp_cmd = app.add_subcommand("mp", "multiparameter diagrams and vectorization");
    mp_cmd->add_option("image", mp.image, "input image")->required();
    mp_cmd->add_option("--rows", mp.rows, "erosion, channel or channel:r|g|b")->capture_default_str();
    mp_cmd->add_option("--cols", mp.cols, "column filtration")->capture_default_str();
    mp_cmd->add_option("--row-levels", mp.row_levels, "comma list of erosion levels, or a threshold count");
    mp_cmd->add_option("--col-thresholds", mp.col_thresholds, "number of grayscale thresholds")
        ->capture_default_str();
    mp_cmd->add_option("--vectorize", mp.vectorize, "betti, silhouette, landscape or perslay")
        ->capture_default_str();
    mp_cmd->add_option("--samples", mp.samples, "sample count per slice and dimension")->capture_default_str();
    mp_cmd->add_option("--weight", mp.weight, "weight exponent")->capture_default_str();
    mp_cmd->add_option("--aggregator", mp.aggregator, "flatten or mean")->capture_default_str();
    mp_cmd->add_option("--channel", mp.channel, "channel used for the grayscale axis")->capture_default_str();
    mp_cmd->add_flag("--diagrams", mp.diagrams, "embed the per-slice diagrams");
    mp_cmd->add_option("--threads", mp.threads, "worker count (0 = all cores)")->capture_default_str();
    mp_cmd->add_option("-o,--out", mp.out, "output JSON path (default stdout)");

    DistanceOptions dist;
    auto* dist_cmd = app.add_subcommand("distance", "distance between two JSON documents");
    dist_cmd->add_option("a", dist.a, "first document")->required();
    dist_cmd->add_option("b", dist.b, "second document")->required();
    dist_cmd->add_option("--metric", dist.metric, "wasserstein, bottleneck, mp-sum or vec")
        ->capture_default_str();
    dist_cmd->add_option("--p", dist.p, "Wasserstein order")->capture_default_str();
    dist_cmd->add_option("--dim", dist.dim, "0, 1 or both")->capture_default_str();
    dist_cmd->add_option("--essentials", dist.essentials, "exclude or clip")->capture_default_str();

    OracleCheckOptions oc;
    auto* oc_cmd = app.add_subcommand("oracle-check", "compare the fast engine with the reference reduction");
    oc_cmd->add_option("--trials", oc.trials, "random grids")->capture_default_str();
    oc_cmd->add_option("--max-size", oc.max_size, "largest side length")->capture_default_str();
    oc_cmd->add_option("--max-value", oc.max_value, "values drawn from 0..max")->capture_default_str();
    oc_cmd->add_option("--seed", oc.seed, "random seed")->capture_default_str();
    oc_cmd->add_flag("--inject-fault", oc.inject_fault, "corrupt engine output (harness self-test)");

    BenchOptions bench;
    std::string bench_size = "224x224";
    auto* bench_cmd = app.add_subcommand("bench", "time batched diagram computation");
    bench_cmd->add_option("--size", bench_size, "image size HxW")->capture_default_str();
    bench_cmd->add_option("--slices", bench.slices, "slices per image")->capture_default_str();
    bench_cmd->add_option("--levels", bench.levels, "levels per slice")->capture_default_str();
    bench_cmd->add_option("--batch", bench.batch, "images per batch")->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads, "workers for the parallel run (0 = all cores)")
        ->capture_default_str();
    bench_cmd->add_option("--repeat", bench.repeat, "timed repetitions")->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "random seed")->capture_default_str();
    bench_cmd->add_option("--csv", bench.csv, "write raw timings to this CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*pd_cmd) {
            const auto list = parse_list(pd_thresholds);
            if (list.size() == 1 && list.front() == std::floor(list.front()) && list.front() >= 1 &&
                pd_thresholds.find('.') == std::string::npos)
                pd.threshold_count = static_cast<int>(list.front());
            else
                pd.thresholds = list;
            return cmd_pd(pd);
        }
        if (*mp_cmd) return cmd_mp(mp);
        if (*dist_cmd) return cmd_distance(dist);
        if (*oc_cmd) return cmd_oracle_check(oc);
        if (*bench_cmd) {
            parse_size(bench_size, bench.height, bench.width);
            return cmd_bench(bench);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const cumper::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kUsage;
    } catch (const cumper::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
    return kUsage;
}
