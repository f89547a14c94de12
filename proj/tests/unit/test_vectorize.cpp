#include <gtest/gtest.h>

#include <random>

#include "cumper/vectorize.hpp"
#include "gradient_check.hpp"
#include "helpers.hpp"

using namespace cumper;

namespace {

VectorizationParams params_with(std::vector<double> times, double w = 1.0) {
    VectorizationParams p;
    p.sample_times = std::move(times);
    p.weight_exponents = {w};
    return p;
}

}  // namespace

TEST(Triangle, Examples) {
    EXPECT_EQ(triangle(0, 2, 1), 1.0);
    EXPECT_EQ(triangle(0, 2, 3), 0.0);
    EXPECT_EQ(triangle(1, 3, 1.5), 0.5);
}

TEST(Perslay, Examples) {
    EXPECT_EQ(perslay_vector(make_pairs({{0, 2}}), params_with({1})), std::vector<double>{2.0});
    EXPECT_EQ(perslay_vector({}, params_with({0, 1, 2})), (std::vector<double>{0, 0, 0}));
    auto pairs = make_pairs({{0, 2}, {1, 3}});
    auto v = perslay_vector(pairs, params_with({1, 2}));
    for (int j = 0; j < 2; ++j) {
        double expected = 0.0;
        for (const auto& p : pairs) expected += (p.death - p.birth) * triangle(p.birth, p.death, 1.0 + j);
        EXPECT_DOUBLE_EQ(v[j], expected);
    }
}

TEST(Perslay, EssentialPairsAreClipped) {
    auto p = params_with({1, 2, 3});
    p.essential_clip = 4.0;
    EXPECT_EQ(perslay_vector(make_pairs({{0, kInfinity}}), p), perslay_vector(make_pairs({{0, 4}}), p));
    // Without an explicit clip the last sample time is used.
    auto q = params_with({1, 2, 3});
    EXPECT_EQ(perslay_vector(make_pairs({{0, kInfinity}}), q), perslay_vector(make_pairs({{0, 3}}), q));
}

TEST(Perslay, PermutationGivesBitIdenticalOutput) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t) {
        auto pairs = testutil::random_pairs(rng, 40, 100.0);
        auto p = params_with(default_sample_times(30, 100.0), 1.7);
        auto a = perslay_vector(pairs, p);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        EXPECT_EQ(a, perslay_vector(pairs, p));
    }
}

TEST(Perslay, RejectsBadParameters) {
    EXPECT_THROW(perslay_vector({}, params_with({})), InvalidInput);
    EXPECT_THROW(perslay_vector({}, params_with({2, 1})), InvalidInput);
    EXPECT_THROW(perslay_vector({}, params_with({1}, -1.0)), InvalidInput);
}

TEST(BettiCurve, Examples) {
    std::vector<double> th{0, 1, 2, 3};
    EXPECT_EQ(betti_curve(make_pairs({{0, 2}, {1, 3}}), th), (std::vector<int>{1, 2, 1, 0}));
    EXPECT_EQ(betti_curve({}, th), (std::vector<int>{0, 0, 0, 0}));
    EXPECT_EQ(betti_curve_bins(make_pairs({{0, 2}}), 0, 4).size(), 100u);
}

TEST(Landscape, Examples) {
    auto one = make_pairs({{0, 4}});
    std::vector<double> t{0.5, 1, 2, 3, 5};
    auto l1 = landscape_vector(one, 1, t, 10);
    for (std::size_t j = 0; j < t.size(); ++j) EXPECT_EQ(l1[j], triangle(0, 4, t[j]));
    for (double x : landscape_vector(one, 2, t, 10)) EXPECT_EQ(x, 0.0);
    auto two = make_pairs({{0, 4}, {1, 3}});
    std::vector<double> tents{triangle(0, 4, 2), triangle(1, 3, 2)};
    std::sort(tents.begin(), tents.end());
    EXPECT_EQ(landscape(two, 2, 2.0, 10), tents[0]);
    EXPECT_THROW(landscape(two, 0, 1.0, 10), InvalidInput);
}

TEST(Silhouette, SingleBarEqualsFirstLandscape) {
    auto one = make_pairs({{1, 5}});
    std::vector<double> t{0, 1.5, 3, 4.5, 6};
    for (double w : {0.0, 1.0, 2.5}) {
        auto s = silhouette(one, w, t, 10);
        auto l = landscape_vector(one, 1, t, 10);
        for (std::size_t j = 0; j < t.size(); ++j) EXPECT_DOUBLE_EQ(s[j], l[j]);
    }
    for (double x : silhouette({}, 1.0, t, 10)) EXPECT_EQ(x, 0.0);
}

TEST(PsiMp, SingleSliceReducesToTwoPerslayCalls) {
    SlicedDiagrams sd;
    PersistenceDiagram pd;
    pd.dim0 = make_pairs({{1, 3}}, 0);
    pd.dim1 = make_pairs({{2, 5}}, 1);
    sd.slices = {pd};
    sd.levels = level_indices(5);
    sd.clip_value = 6;
    auto p = params_with(default_sample_times(7, 5));
    auto v = psi_mp(sd, p);
    p.essential_clip = 6;
    auto a = perslay_vector(pd.dim0, p), b = perslay_vector(pd.dim1, p);
    for (int j = 0; j < 7; ++j) {
        EXPECT_EQ(v.at(0, 0, j), a[j]);
        EXPECT_EQ(v.at(0, 1, j), b[j]);
    }
}

TEST(PsiMp, RecipeShapeAndSliceValues) {
    std::mt19937_64 rng(3);
    auto bif = testutil::random_bifiltration(rng, 20, 20, 8, 16);
    auto sd = slice_rows(bif);
    auto p = params_with(default_sample_times(100, 16));
    auto v = psi_mp(sd, p);
    EXPECT_EQ(v.aggregate.size(), 1600u);
    p.essential_clip = sd.clip_value;
    for (int s = 0; s < 8; ++s)
        for (int dim = 0; dim < 2; ++dim) {
            auto scalar = perslay_vector(sd.slices[s].pairs(dim), p, s);
            for (int j = 0; j < 100; ++j) EXPECT_EQ(v.at(s, dim, j), scalar[j]);
        }
    p.aggregator = Aggregator::mean_over_slices;
    EXPECT_EQ(psi_mp(sd, p).aggregate.size(), 200u);
}

TEST(PsiMp, EmptyDiagramsGiveZeros) {
    SlicedDiagrams sd;
    sd.slices.resize(3);
    sd.levels = level_indices(4);
    sd.clip_value = 5;
    for (double x : psi_mp(sd, params_with({1, 2, 3})).values) EXPECT_EQ(x, 0.0);
}

TEST(InducedVectorization, IdenticalSlicesAndSingleRow) {
    SlicedDiagrams sd;
    PersistenceDiagram pd;
    pd.dim0 = make_pairs({{1, 3}, {2, kInfinity}});
    sd.slices = {pd, pd};
    sd.levels = level_indices(4);
    sd.clip_value = 5;
    auto p = params_with({1, 2, 3, 4});
    for (auto base : {BaseVectorization::betti, BaseVectorization::silhouette, BaseVectorization::landscape,
                      BaseVectorization::perslay}) {
        auto m = induced_mp_vectorization(sd, base, 0, p);
        ASSERT_EQ(m.rows, 2);
        for (int c = 0; c < m.cols; ++c) EXPECT_EQ(m(0, c), m(1, c));
        auto direct = base_vector(pd.dim0, base, p, sd.levels, sd.clip_value, 0);
        for (int c = 0; c < m.cols; ++c) EXPECT_EQ(m(0, c), direct[c]);
    }
    auto stacked = stacked_mp_vectorization(sd, BaseVectorization::landscape, p);
    EXPECT_EQ(stacked.cols, 8);
}

TEST(Gradients, KinkConventionAtMidpoint) {
    auto p = params_with({1}, 0.0);
    auto g = perslay_gradients(make_pairs({{0, 2}}), p);
    EXPECT_DOUBLE_EQ(g.death(0, 0), 0.5);
    const double h = 1e-5;
    const double fd = (perslay_vector(make_pairs({{0, 2 + h}}), p)[0] - perslay_vector(make_pairs({{0, 2 - h}}), p)[0]) /
                      (2 * h);
    EXPECT_NEAR(fd, 0.5, 1e-9);
}

TEST(Gradients, EssentialDeathHasNoGradient) {
    auto p = params_with({1, 2}, 1.0);
    p.essential_clip = 3;
    auto g = perslay_gradients(make_pairs({{0, kInfinity}}), p);
    EXPECT_EQ(g.death(0, 0), 0.0);
    EXPECT_NE(g.birth(0, 0), 0.0);
}

TEST(Gradients, MatchCentralDifferences) {
    std::mt19937_64 rng(4);
    testutil::GradientCheck check;
    for (int t = 0; t < 200; ++t) testutil::check_gradients_once(rng, check);
    EXPECT_GT(check.compared, 1000);
    EXPECT_LT(check.max_relative_error, 1e-5);
}
