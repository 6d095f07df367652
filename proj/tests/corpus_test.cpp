#include <filesystem>

#include <gtest/gtest.h>

#include "newsfmt/corpus.hpp"
#include "newsfmt/evaluation.hpp"
#include "support.hpp"

using namespace newsfmt;
namespace fs = std::filesystem;

TEST(Corpus, SameSeedSameFrames) {
  const auto a = generateSyntheticCorpus(5, 11);
  const auto b = generateSyntheticCorpus(5, 11);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_TRUE(std::ranges::equal(a[i].image.pixels(), b[i].image.pixels()));
    EXPECT_EQ(a[i].truth, b[i].truth);
  }
  const auto c = generateSyntheticCorpus(5, 12);
  EXPECT_FALSE(std::ranges::equal(a[0].image.pixels(), c[0].image.pixels()));
}

TEST(Corpus, TruthIsALabeledPartition) {
  for (const auto& f : generateSyntheticCorpus(40, 3)) {
    const FormatProfile p{f.image.width(), f.image.height(), f.truth};
    EXPECT_EQ(partitionViolation(p), "") << f.name;
    EXPECT_TRUE(fixtures::pixelPartition(p)) << f.name;
    EXPECT_TRUE(std::ranges::is_sorted(f.truth, rowMajorLess));
    for (const Band& b : f.truth) EXPECT_NE(b.label, BandLabel::unlabeled);
    EXPECT_TRUE(std::ranges::any_of(f.truth, [](const Band& b) { return b.label == BandLabel::text; }));
    EXPECT_TRUE(std::ranges::any_of(f.truth, [](const Band& b) { return b.label == BandLabel::natural; }));
    EXPECT_EQ(netJaccard(f.truth, f.truth), 1.0);
  }
}

TEST(Corpus, OptionsAndErrors) {
  const auto f = generateSyntheticCorpus(1, 1, CorpusOptions{640, 360});
  EXPECT_EQ(f[0].image.width(), 640);
  EXPECT_EQ(f[0].image.height(), 360);
  EXPECT_EQ(f[0].name, "frame_0000");
  EXPECT_THROW(generateSyntheticCorpus(0, 1), Error);
  EXPECT_THROW(generateSyntheticCorpus(1, 1, CorpusOptions{100, 100}), Error);
}

TEST(Corpus, WrittenFilesParseBack) {
  const auto dir = fs::temp_directory_path() / ("newsfmt_corpus_" + std::to_string(::getpid()));
  const auto frames = generateSyntheticCorpus(1, 21);
  writeCorpus(frames, dir);
  const auto img = readImage(dir / "frame_0000.png");
  EXPECT_TRUE(std::ranges::equal(img.pixels(), frames[0].image.pixels()));
  EXPECT_EQ(readGroundTruth(dir / "frame_0000.txt", img.width(), img.height()), frames[0].truth);
  fs::remove_all(dir);
}
