#include <gtest/gtest.h>

#include <array>
#include <set>

#include "cordet/montecarlo.hpp"
#include "cordet/rng.hpp"

namespace cordet {
namespace {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const Block out = Philox4x32::encrypt(Block{0, 0, 0, 0}, Key{0, 0});
  EXPECT_EQ(out, (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const Block out = Philox4x32::encrypt(Block{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                        Key{0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const Block out = Philox4x32::encrypt(Block{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                        Key{0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, SameSeedAndStreamReplays) {
  Philox4x32 a(42, 0);
  Philox4x32 b(42, 0);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a(), b());
  }
}

TEST(Philox, DistinctStreamsDiffer) {
  Philox4x32 a(42, 0);
  Philox4x32 b(42, 1);
  Philox4x32 c(43, 0);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_ab += x == b() ? 1 : 0;
    same_ac += x == c() ? 1 : 0;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Philox, DiscardSkipsWholeBlocks) {
  Philox4x32 a(7, 3);
  Philox4x32 b(7, 3);
  for (int i = 0; i < 2 * 5; ++i) {  // two outputs per block
    a();
  }
  b.discard_blocks(5);
  for (int i = 0; i < 16; ++i) {
    ASSERT_EQ(a(), b());
  }
}

TEST(RngStream, ChildrenAreDistinctAndStable) {
  const RngStream root{99, 0};
  std::set<std::uint64_t> ids;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    ids.insert(root.child(i).stream_id);
  }
  EXPECT_EQ(ids.size(), 10000u);
  EXPECT_EQ(root.child(5), root.child(5));
  EXPECT_EQ(root.child(5).master_seed, 99u);
  EXPECT_NE(root.child(1).child(0), root.child(0).child(1));
}

TEST(MonteCarlo, ResultIndependentOfThreadCount) {
  const RngStream rng{5, 11};
  auto draw = [](Philox4x32& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; };
  const auto one = monte_carlo_mean(100000, rng, 1, draw);
  const auto four = monte_carlo_mean(100000, rng, 4, draw);
  EXPECT_EQ(one.estimate, four.estimate);
  EXPECT_EQ(one.std_error, four.std_error);
  EXPECT_NEAR(one.estimate, 0.5, 4.0 * one.std_error);
}

TEST(MonteCarlo, RejectsZeroTrials) {
  EXPECT_THROW(monte_carlo_mean(0, RngStream{}, 1, [](Philox4x32&) { return 0.0; }),
               std::invalid_argument);
}

}  // namespace
}  // namespace cordet
