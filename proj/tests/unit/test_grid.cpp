#include <gtest/gtest.h>

#include <limits>

#include "cumper/grid.hpp"
#include "helpers.hpp"

using namespace cumper;

using testutil::toy_grid;

TEST(ValueGrid, RejectsNonFiniteAndBadShape) {
    EXPECT_THROW(ValueGrid(2, 2, std::vector<double>{0, 1, 2}), InvalidInput);
    EXPECT_THROW(ValueGrid(1, 1, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), InvalidInput);
    EXPECT_THROW(ValueGrid(0, 3, 0.0), InvalidInput);
}

TEST(ValueGrid, IndexingAndExtrema) {
    auto g = toy_grid();
    EXPECT_EQ(g.height(), 5);
    EXPECT_EQ(g.width(), 5);
    EXPECT_EQ(g(2, 2), 0);
    EXPECT_EQ(g.at({4, 4}), 2);
    EXPECT_EQ(g.min_value(), 0);
    EXPECT_EQ(g.max_value(), 5);
    EXPECT_TRUE(g.contains({4, 4}));
    EXPECT_FALSE(g.contains({5, 0}));
}

TEST(SublevelSet, ThresholdLadderIsNested) {
    auto g = toy_grid();
    BinaryGrid prev(5, 5);
    for (double tau : {0, 1, 2, 3, 4, 5}) {
        auto x = sublevel_set(g, tau);
        EXPECT_TRUE(prev.subset_of(x)) << "tau " << tau;
        prev = x;
    }
    EXPECT_EQ(sublevel_set(g, 0).count(), 1u);
    EXPECT_EQ(sublevel_set(g, 1).count(), 9u);
}

TEST(SublevelSet, BelowMinimumIsEmptyAndAtMaximumIsFull) {
    auto g = toy_grid();
    EXPECT_EQ(sublevel_set(g, -1e300).count(), 0u);
    EXPECT_EQ(sublevel_set(g, 5).count(), 25u);
    EXPECT_EQ(sublevel_set(g, 1e300).count(), 25u);
}

TEST(SublevelSet, ConstantGridAtItsValueIsFull) {
    ValueGrid c(3, 4, 7.5);
    EXPECT_EQ(sublevel_set(c, 7.5).count(), 12u);
}

TEST(SuperlevelSet, MaximumThresholdKeepsOnlyMaximalPixels) {
    auto g = toy_grid();
    auto x = superlevel_set(g, 5);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) EXPECT_EQ(x(r, c), g(r, c) == 5);
}

TEST(SuperlevelSet, EqualsSublevelOfNegation) {
    auto g = toy_grid();
    for (double tau : {0, 2, 4})
        EXPECT_EQ(superlevel_set(g, tau), sublevel_set(negate(g), -tau));
}

TEST(MultiChannelImage, MeanChannel) {
    MultiChannelImage img({ValueGrid(1, 2, std::vector<double>{0, 3}), ValueGrid(1, 2, std::vector<double>{3, 3}),
                           ValueGrid(1, 2, std::vector<double>{6, 3})});
    EXPECT_EQ(img.channel_count(), 3u);
    EXPECT_EQ(img.mean_channel()(0, 0), 3);
    EXPECT_EQ(img.mean_channel()(0, 1), 3);
}

TEST(SupDistance, MaxAbsoluteDifference) {
    ValueGrid a(1, 3, std::vector<double>{0, 1, 2});
    ValueGrid b(1, 3, std::vector<double>{0, 3, 1});
    EXPECT_EQ(sup_distance(a, b), 2);
    EXPECT_THROW(sup_distance(a, ValueGrid(3, 1, 0.0)), InvalidInput);
}
