#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "cumper/io.hpp"
#include "helpers.hpp"

using namespace cumper;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cumper_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

using ImageIo = TempDir;
using DocumentIo = TempDir;

TEST_F(ImageIo, PgmRoundTrip) {
    std::mt19937_64 rng(1);
    auto g = testutil::random_grid(rng, 7, 9, 255);
    io::write_pgm(path("a.pgm"), g);
    auto back = io::read_pgm(path("a.pgm"));
    EXPECT_EQ(back.height(), 7);
    EXPECT_EQ(back.width(), 9);
    EXPECT_EQ(std::vector<double>(back.values().begin(), back.values().end()),
              std::vector<double>(g.values().begin(), g.values().end()));
}

TEST_F(ImageIo, BinaryPgmWithComments) {
    std::string data = "P5\n# comment\n3 2\n255\n";
    for (unsigned char c : {0, 10, 20, 30, 40, 250}) data.push_back(static_cast<char>(c));
    io::write_text(path("b.pgm"), data);
    auto g = io::read_pgm(path("b.pgm"));
    EXPECT_EQ(g(1, 2), 250);
    EXPECT_EQ(g(0, 1), 10);
}

TEST_F(ImageIo, MalformedInputsAreRejected) {
    io::write_text(path("bad.pgm"), "P2\n3 2\n255\n1 2 3\n");
    EXPECT_THROW(io::read_pgm(path("bad.pgm")), FormatError);
    io::write_text(path("bad.csv"), "1,2\n3\n");
    EXPECT_THROW(io::read_csv(path("bad.csv")), FormatError);
    EXPECT_THROW(io::read_image(path("missing.pgm")), FormatError);
    io::write_text(path("x.bmp"), "BM");
    EXPECT_THROW(io::read_image(path("x.bmp")), FormatError);
}

TEST_F(ImageIo, CsvRoundTripIsExact) {
    std::mt19937_64 rng(2);
    auto g = testutil::random_real_grid(rng, 5, 4);
    io::write_csv(path("g.csv"), g);
    auto back = io::read_csv(path("g.csv"));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(back.values()[i], g.values()[i]);
}

TEST_F(ImageIo, PngGrayAndColor) {
    std::mt19937_64 rng(3);
    MultiChannelImage color({testutil::random_grid(rng, 6, 5, 255), testutil::random_grid(rng, 6, 5, 255),
                             testutil::random_grid(rng, 6, 5, 255)});
    io::write_png(path("c.png"), color);
    auto back = io::read_image(path("c.png"));
    ASSERT_EQ(back.channel_count(), 3u);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(back.channel(c).values()[i], color.channel(c).values()[i]);

    MultiChannelImage gray({testutil::random_grid(rng, 4, 4, 255)});
    io::write_png(path("g.png"), gray);
    auto gback = io::read_image(path("g.png"));
    ASSERT_EQ(gback.channel_count(), 1u);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(gback.channel(0).values()[i], gray.channel(0).values()[i]);
}

TEST(NumberEncoding, IntegersInfinityAndReals) {
    EXPECT_TRUE(io::encode_number(3.0).is_number_integer());
    EXPECT_EQ(io::encode_number(kInfinity), "inf");
    EXPECT_EQ(io::decode_number(io::json("inf")), kInfinity);
    EXPECT_EQ(io::decode_number(io::json("-inf")), -kInfinity);
    const double x = 0.1 + 0.2;
    EXPECT_EQ(io::decode_number(io::json::parse(io::encode_number(x).dump())), x);
    EXPECT_THROW(io::decode_number(io::json("abc")), FormatError);
}

TEST_F(DocumentIo, DiagramDocumentRoundTrip) {
    std::mt19937_64 rng(4);
    io::DiagramDocument doc;
    for (int s = 0; s < 3; ++s) {
        auto pd = compute_pd(testutil::random_real_grid(rng, 6, 6));
        for (auto* v : {&pd.dim0, &pd.dim1})
            for (auto& p : *v) p.slice_index = s;
        doc.slices.push_back(pd);
    }
    doc.num_slices = 3;
    doc.num_levels = 7;
    doc.thresholds = {0.5, 1.0 / 3.0, 2};
    const std::string text = io::to_json(doc).dump(2);
    io::write_text(path("d.json"), text);
    auto back = io::diagram_document_from_json(io::read_json(path("d.json")));
    EXPECT_TRUE(back == doc);
    EXPECT_EQ(io::to_json(back).dump(2), text);
}

TEST_F(DocumentIo, VectorizationDocumentRoundTrip) {
    io::VectorizationDocument doc{"perslay", "flatten", 2, 3, {1, 2.5, 3, 4, 5, 6, 7, 8, 9, 10, 11, 0.1},
                                  {}, {0, 1, 2}};
    doc.aggregate = doc.values;
    auto back = io::vectorization_document_from_json(io::to_json(doc));
    EXPECT_EQ(back.values, doc.values);
    EXPECT_EQ(back.slices, 2);
    EXPECT_EQ(io::as_matrix(back).cols, 6);
}

TEST(DocumentErrors, SchemaAndShapeMismatch) {
    io::json j = io::to_json(io::DiagramDocument{});
    j["schema_version"] = "0";
    EXPECT_THROW(io::diagram_document_from_json(j), FormatError);
    EXPECT_THROW(io::vectorization_document_from_json(io::to_json(io::DiagramDocument{})), FormatError);
    io::VectorizationDocument v{"perslay", "flatten", 2, 3, {1, 2}, {}, {}};
    EXPECT_THROW(io::vectorization_document_from_json(io::to_json(v)), FormatError);
}
