#include <gtest/gtest.h>

#include <sstream>

#include "selmallows/estimators.hpp"
#include "selmallows/io.hpp"
#include "selmallows/sampling.hpp"

using namespace selmallows;

TEST(RankingLine, RoundTrip) {
  const Ranking pi({4, 2, 0, 3, 1});
  EXPECT_EQ(format_ranking(pi), "4,2,0,3,1");
  EXPECT_EQ(parse_ranking("4,2,0,3,1"), pi);
  EXPECT_EQ(parse_ranking(" 4, 2 ,0,3,1\r"), pi);
  EXPECT_THROW(parse_ranking("4,x,0"), std::invalid_argument);
  EXPECT_THROW(parse_ranking(""), std::invalid_argument);
  EXPECT_THROW(parse_ranking("1,1"), std::invalid_argument);
  EXPECT_THROW(parse_ranking("-1,2"), std::invalid_argument);
}

TEST(ProfileFile, WriteFormat) {
  const SampleProfile prof(SelectionSequence(5, {{0, 2, 4}, {1, 3}}), {Ranking({4, 0, 2}), Ranking({3, 1})});
  std::ostringstream os;
  write_profile(os, prof, 2.0);
  EXPECT_EQ(os.str(), "5,2,2\nS:0,2,4|R:4,0,2\nS:1,3|R:3,1\n");
  std::ostringstream sel;
  write_selection(sel, prof.selection());
  EXPECT_EQ(sel.str(), "5,2\nS:0,2,4\nS:1,3\n");
}

TEST(ProfileFile, RoundTripIsByteIdentical) {
  Rng rng(7);
  const Ranking pi0 = random_ranking(20, rng);
  const auto sel = generate_selection({SelectionKind::bernoulli_random, 20, 0.5}, 50, rng.split(1));
  const auto prof = sample_profile(MallowsParams(pi0, 2.0), sel, rng.split(2));
  std::ostringstream os;
  write_profile(os, prof, 2.0);
  const auto parsed = parse_file_text(os.str());
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(parsed.beta, 2.0);
  const auto back = to_profile(parsed);
  EXPECT_EQ(back, prof);
  std::ostringstream again;
  write_profile(again, back, parsed.beta);
  EXPECT_EQ(again.str(), os.str());

  Rng a(3), b(3);
  EXPECT_EQ(positional_estimator(back, a).ranking, positional_estimator(prof, b).ranking);
}

TEST(ProfileFile, SelectionFileParses) {
  const auto f = parse_file_text("4,2\nS:0,1,2,3\nS:1,3\n");
  ASSERT_TRUE(f.ok());
  EXPECT_FALSE(f.has_rankings);
  EXPECT_EQ(to_selection(f), SelectionSequence(4, {{0, 1, 2, 3}, {1, 3}}));
  EXPECT_THROW(to_profile(f), FormatError);
}

TEST(ProfileFile, DuplicateInRankingIsOneIssue) {
  const auto f = parse_file_text("5,2\nS:0,2,4|R:4,0,2\nS:1,2,3|R:3,3,1\n");
  ASSERT_EQ(f.issues.size(), 1U);
  EXPECT_EQ(f.issues[0].line, 3U);
  EXPECT_NE(f.issues[0].message.find("duplicate item 3"), std::string::npos);
  EXPECT_THROW(to_profile(f), FormatError);
}

TEST(ProfileFile, ItemizedIssues) {
  const auto f = parse_file_text(
      "4,5\n"
      "S:0,1|R:1,0\n"
      "S:0,9|R:9,0\n"   // out of range
      "S:2|R:2\n"       // too small
      "S:0,1|R:0,2\n"   // foreign item
      "S:0,1,2|R:2,0\n" // missing item
  );
  ASSERT_EQ(f.issues.size(), 4U);
  EXPECT_EQ(f.issues[0].line, 3U);
  EXPECT_NE(f.issues[0].message.find("item 9"), std::string::npos);
  EXPECT_EQ(f.issues[1].line, 4U);
  EXPECT_EQ(f.issues[2].line, 5U);
  EXPECT_NE(f.issues[2].message.find("ranking item 2"), std::string::npos);
  EXPECT_EQ(f.issues[3].line, 6U);
  EXPECT_NE(f.issues[3].message.find("set item 1"), std::string::npos);
}

TEST(ProfileFile, HeaderAndStructureErrors) {
  EXPECT_FALSE(parse_file_text("").ok());
  EXPECT_FALSE(parse_file_text("abc\nS:0,1\n").ok());
  EXPECT_FALSE(parse_file_text("3,1,-2\nS:0,1\n").ok());
  const auto count = parse_file_text("3,3\nS:0,1\n");
  ASSERT_EQ(count.issues.size(), 1U);
  EXPECT_NE(count.issues[0].message.find("r = 3"), std::string::npos);
  const auto mixed = parse_file_text("3,2\nS:0,1|R:0,1\nS:1,2\n");
  ASSERT_EQ(mixed.issues.size(), 1U);
  const auto prefix = parse_file_text("3,1\nT:0,1\n");
  ASSERT_EQ(prefix.issues.size(), 1U);
  EXPECT_EQ(prefix.issues[0].line, 2U);
  try {
    read_profile(*std::make_unique<std::istringstream>("3,1\nS:0,0|R:0,0\n"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
