#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "helpers.hpp"

using namespace cumper;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cumper_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        std::mt19937_64 rng(42);
        io::write_pgm(path("gray.pgm"), testutil::random_grid(rng, 24, 20, 255));
        io::write_pgm(path("toy.pgm"), testutil::toy_grid());
        io::write_pgm(path("const.pgm"), ValueGrid(5, 5, 7.0));
        io::write_png(path("color.png"),
                      MultiChannelImage({testutil::random_grid(rng, 16, 16, 255), testutil::random_grid(rng, 16, 16, 255),
                                         testutil::random_grid(rng, 16, 16, 255)}));
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    /// Runs the built binary; returns its exit status.
    int run(const std::string& args, const std::string& stdout_file = "") const {
        std::string cmd = std::string(CUMPER_CLI_PATH) + " " + args;
        cmd += stdout_file.empty() ? " > /dev/null 2>&1" : " > " + stdout_file + " 2>/dev/null";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, PdOfToyFixtureHasOneEssentialComponent) {
    cli::PdOptions o;
    o.image = path("toy.pgm");
    auto doc = cli::pd_document(o);
    ASSERT_EQ(doc.slices.size(), 1u);
    EXPECT_EQ(doc.slices[0].essential_count(0), 1u);
    EXPECT_EQ(doc.slices[0].values(0), compute_pd(testutil::toy_grid()).values(0));
}

TEST_F(Cli, PdOfConstantImage) {
    cli::PdOptions o;
    o.image = path("const.pgm");
    auto doc = cli::pd_document(o);
    EXPECT_EQ(doc.slices[0].values(0), (std::vector<std::pair<double, double>>{{7, kInfinity}}));
    EXPECT_TRUE(doc.slices[0].dim1.empty());
}

TEST_F(Cli, PdRedChannelAndColorWithoutChannel) {
    cli::PdOptions o;
    o.image = path("color.png");
    EXPECT_THROW(cli::pd_document(o), InvalidInput);
    o.channel = "r";
    auto doc = cli::pd_document(o);
    auto red = io::read_image(path("color.png")).channel(0);
    EXPECT_EQ(doc.slices[0].values(1), compute_pd(red).values(1));
    EXPECT_EQ(run("pd " + path("color.png")), cli::kUsage);
    cli::PdOptions g;
    g.image = path("gray.pgm");
    g.channel = "g";
    EXPECT_THROW(cli::pd_document(g), InvalidInput);
}

TEST_F(Cli, PdSuperlevelAndThresholds) {
    cli::PdOptions o;
    o.image = path("gray.pgm");
    o.superlevel = true;
    auto doc = cli::pd_document(o);
    auto neg = compute_pd(negate(io::read_pgm(path("gray.pgm"))));
    ASSERT_EQ(doc.slices[0].dim0.size(), neg.dim0.size());
    for (const auto& p : doc.slices[0].dim0) EXPECT_GE(p.birth, p.death == -kInfinity ? -1e300 : p.death);

    cli::PdOptions t;
    t.image = path("gray.pgm");
    t.threshold_count = 8;
    auto leveled = cli::pd_document(t);
    EXPECT_EQ(leveled.num_levels, 8);
    EXPECT_EQ(leveled.thresholds.size(), 8u);
    for (const auto* pairs : {&leveled.slices[0].dim0, &leveled.slices[0].dim1})
        for (const auto& p : *pairs) {
            EXPECT_NE(std::find(leveled.thresholds.begin(), leveled.thresholds.end(), p.birth),
                      leveled.thresholds.end());
        }
}

TEST_F(Cli, MpDefaultsReproduceRecipeShapes) {
    cli::MpOptions o;
    o.image = path("gray.pgm");
    auto doc = cli::mp_document(o);
    EXPECT_EQ(doc["grid"], io::json::array({10, 50}));
    EXPECT_EQ(doc["shape"], io::json::array({10, 2, 100}));
    EXPECT_EQ(doc["aggregate"].size(), 2000u);

    o.row_levels = "0,1,2,3,5,7,9,12";
    o.col_thresholds = 16;
    auto small = cli::mp_document(o);
    EXPECT_EQ(small["aggregate"].size(), 1600u);

    o.vectorize = "betti";
    auto betti = cli::mp_document(o);
    EXPECT_EQ(betti["shape"], io::json::array({8, 2, 16}));
}

TEST_F(Cli, MpColorTensorAndChannelRows) {
    cli::MpOptions o;
    o.image = path("color.png");
    o.rows = "channel";
    auto doc = cli::mp_document(o);
    EXPECT_EQ(doc["kind"], "betti_tensor");
    EXPECT_EQ(doc["dim0"].size(), 1000u);
    EXPECT_EQ(doc["dim1"].size(), 1000u);

    o.rows = "channel:r";
    o.row_levels = "6";
    o.col_thresholds = 12;
    auto rows = cli::mp_document(o);
    EXPECT_EQ(rows["grid"], io::json::array({6, 12}));

    o.rows = "bogus";
    EXPECT_THROW(cli::mp_document(o), cli::UsageError);
}

TEST_F(Cli, MpRejectsInvalidLevelLists) {
    cli::MpOptions o;
    o.image = path("gray.pgm");
    o.row_levels = "3,1";
    EXPECT_THROW(cli::mp_document(o), InvalidInput);
    o.row_levels = "1,x";
    EXPECT_THROW(cli::mp_document(o), cli::UsageError);
    EXPECT_EQ(run("mp " + path("gray.pgm") + " --row-levels 1.5"), cli::kUsage);
}

TEST_F(Cli, DistanceCommand) {
    ASSERT_EQ(run("pd " + path("gray.pgm") + " -o " + path("a.json")), 0);
    ASSERT_EQ(run("pd " + path("toy.pgm") + " -o " + path("b.json")), 0);
    cli::DistanceOptions d;
    d.a = d.b = path("a.json");
    EXPECT_EQ(cli::distance_value(d), 0.0);

    d.b = path("b.json");
    d.dim = "both";
    auto a = io::diagram_document_from_json(io::read_json(d.a));
    auto b = io::diagram_document_from_json(io::read_json(d.b));
    const double expected =
        wasserstein(a.slices[0].dim0, b.slices[0].dim0, 1.0).cost + wasserstein(a.slices[0].dim1, b.slices[0].dim1, 1.0).cost;
    EXPECT_EQ(cli::distance_value(d), expected);

    io::DiagramDocument one, empty;
    one.slices.push_back({make_pairs({{0, 2}}), {}});
    empty.slices.push_back({});
    io::write_text(path("one.json"), io::to_json(one).dump());
    io::write_text(path("empty.json"), io::to_json(empty).dump());
    ASSERT_EQ(run("distance " + path("one.json") + " " + path("empty.json") + " --metric bottleneck", path("out.txt")), 0);
    EXPECT_EQ(slurp(path("out.txt")), "1\n");

    io::write_text(path("bad.json"), "{\"schema_version\": \"9\"}");
    EXPECT_EQ(run("distance " + path("one.json") + " " + path("bad.json")), cli::kIoError);
}

TEST_F(Cli, VecDistanceMatchesLibrary) {
    cli::MpOptions o;
    o.image = path("gray.pgm");
    o.col_thresholds = 10;
    o.samples = 20;
    o.out = path("va.json");
    cli::cmd_mp(o);
    o.weight = 2.0;
    o.out = path("vb.json");
    cli::cmd_mp(o);
    cli::DistanceOptions d{path("va.json"), path("vb.json"), "vec"};
    auto va = io::vectorization_document_from_json(io::read_json(d.a));
    auto vb = io::vectorization_document_from_json(io::read_json(d.b));
    EXPECT_EQ(cli::distance_value(d), mp_vectorization_distance(io::as_matrix(va), io::as_matrix(vb)));
}

TEST_F(Cli, OracleCheckPassesAndDetectsInjectedFault) {
    cli::OracleCheckOptions o;
    o.trials = 200;
    auto r = cli::run_oracle_check(o);
    EXPECT_TRUE(r.all_passed());
    EXPECT_EQ(r.exhaustive_total, 81 + 729);
    o.inject_fault = true;
    EXPECT_FALSE(cli::run_oracle_check(o).all_passed());
    EXPECT_EQ(run("oracle-check --trials 20 --inject-fault"), cli::kVerificationFailure);
    EXPECT_EQ(run("oracle-check --trials 20"), cli::kOk);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run(""), cli::kUsage);
    EXPECT_EQ(run("frobnicate"), cli::kUsage);
    EXPECT_EQ(run("pd " + path("gray.pgm") + " --dim 2"), cli::kUsage);
    EXPECT_EQ(run("pd " + path("nope.pgm")), cli::kIoError);
    EXPECT_EQ(run("--help"), cli::kOk);
}

TEST_F(Cli, SeededOutputsAreByteIdenticalAcrossWorkerCounts) {
    ASSERT_EQ(run("oracle-check --trials 50 --seed 7", path("o1.txt")), 0);
    ASSERT_EQ(run("oracle-check --trials 50 --seed 7", path("o2.txt")), 0);
    EXPECT_EQ(slurp(path("o1.txt")), slurp(path("o2.txt")));

    ASSERT_EQ(run("mp " + path("gray.pgm") + " --diagrams --threads 1 -o " + path("m1.json")), 0);
    ASSERT_EQ(run("mp " + path("gray.pgm") + " --diagrams --threads 4 -o " + path("m4.json")), 0);
    EXPECT_EQ(slurp(path("m1.json")), slurp(path("m4.json")));
    ASSERT_EQ(run("mp " + path("color.png") + " --rows channel --threads 3 -o " + path("t3.json")), 0);
    ASSERT_EQ(run("mp " + path("color.png") + " --rows channel --threads 1 -o " + path("t1.json")), 0);
    EXPECT_EQ(slurp(path("t1.json")), slurp(path("t3.json")));
}

TEST_F(Cli, ThreadsEnvironmentOverride) {
    setenv("CUMPER_THREADS", "3", 1);
    EXPECT_EQ(cli::resolve_threads(8), 3u);
    setenv("CUMPER_THREADS", "x", 1);
    EXPECT_THROW(cli::resolve_threads(8), cli::UsageError);
    unsetenv("CUMPER_THREADS");
    EXPECT_EQ(cli::resolve_threads(5), 5u);
}

TEST_F(Cli, BenchSmallConfiguration) {
    cli::BenchOptions o;
    o.height = o.width = 16;
    o.slices = 2;
    o.levels = 4;
    o.batch = 2;
    o.repeat = 2;
    o.threads = 2;
    auto r = cli::run_bench(o);
    EXPECT_EQ(r.single.seconds.size(), 2u);
    EXPECT_EQ(r.multi.workers, 2u);
    EXPECT_GT(r.pairs_per_batch, 0u);
    ASSERT_EQ(run("bench --size 8x8 --slices 2 --levels 4 --batch 1 --repeat 1 --csv " + path("b.csv")), 0);
    EXPECT_EQ(slurp(path("b.csv")).rfind("height,width,slices,levels,batch,workers,repeat,seconds\n", 0), 0u);
}
