// Copyright 2026 The clusterdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include <gtest/gtest.h>

#include <clusterdiff/core.hpp>
#include <oracle.hpp>

namespace cd = clusterdiff;

namespace {

TEST(Parse, DefaultsWeightToOneAndSortsIds) {
  auto lc = cd::parse_clustering("b\tc1\na\tc1\t2.5\n# comment\n\nc\tc2\n");
  ASSERT_EQ(lc.population.size(), 3u);
  EXPECT_EQ(lc.population.id(0), "a");
  EXPECT_EQ(lc.population.id(2), "c");
  EXPECT_DOUBLE_EQ(lc.population.weight(0), 2.5);
  EXPECT_DOUBLE_EQ(lc.population.weight(1), 1.0);
  EXPECT_DOUBLE_EQ(lc.population.total_weight(), 4.5);
  EXPECT_TRUE(lc.clustering.same_cluster(0, 1));
  EXPECT_FALSE(lc.clustering.same_cluster(0, 2));
}

TEST(Parse, AcceptsCrlf) {
  auto lc = cd::parse_clustering("a\tx\r\nb\tx\r\n");
  EXPECT_EQ(lc.population.size(), 2u);
  EXPECT_EQ(lc.clustering.cluster_count(), 1u);
}

TEST(Parse, MalformedLineReportsLineNumber) {
  try {
    (void)cd::parse_clustering("a\tx\nbroken\n");
    FAIL();
  } catch (const cd::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW((void)cd::parse_clustering("a\tx\tnotanumber\n"), cd::ParseError);
  EXPECT_THROW((void)cd::parse_clustering("a\tx\t1\textra\n"), cd::ParseError);
}

TEST(Parse, RejectsDomainViolations) {
  EXPECT_THROW((void)cd::parse_clustering("a\tx\t-1\n"), cd::ValidationError);
  EXPECT_THROW((void)cd::parse_clustering("a\tx\na\ty\n"), cd::ValidationError);
  EXPECT_THROW((void)cd::parse_clustering("# nothing\n"), cd::ValidationError);
  EXPECT_THROW((void)cd::parse_clustering("a\tx\t0\n"), cd::ValidationError);
}

TEST(Parse, MissingFileIsValidationError) {
  EXPECT_THROW((void)cd::load_clustering("/nonexistent/file.tsv"), cd::ValidationError);
}

TEST(Parse, WriteRoundTrips) {
  auto lc = cd::parse_clustering("b\tq\na\tq\t0.5\nc\tr\t3\n");
  std::ostringstream out;
  cd::write_clustering(out, lc.population, lc.clustering);
  auto back = cd::parse_clustering(out.str());
  EXPECT_EQ(back.population, lc.population);
  EXPECT_EQ(back.clustering, lc.clustering);
}

TEST(Clustering, CanonicalLabelsMakeEqualityStructural) {
  auto a = cd::Clustering::from_labels(std::vector<int>{5, 5, 2, 9});
  auto b = cd::Clustering::from_labels(std::vector<int>{0, 0, 7, 1});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.cluster_count(), 3u);
  auto c = cd::Clustering::from_groups(4, {{0, 1}, {2}, {3}});
  EXPECT_EQ(a, c);
  EXPECT_EQ(cd::Clustering::singletons(3).cluster_count(), 3u);
  EXPECT_EQ(cd::Clustering::single_cluster(3).cluster_count(), 1u);
}

TEST(Population, LookupUnknownIdThrows) {
  auto pop = cd::Population::unit({"a", "b"});
  EXPECT_EQ(pop.index_of("b"), 1u);
  EXPECT_THROW((void)pop.index_of("zz"), cd::LookupError);
}

TEST(Restrict, DropsUncommonItemsAndBaseWeightWins) {
  auto base = cd::parse_clustering("a\tx\t2\nb\tx\nc\ty\n");
  auto exp = cd::parse_clustering("a\tp\t3\nb\tq\nd\tq\n");
  auto pair = cd::restrict_to_common(base, exp);
  EXPECT_EQ(pair.size(), 2u);
  EXPECT_EQ(pair.dropped(), 2u);
  EXPECT_DOUBLE_EQ(pair.population().weight_of(std::vector<cd::ItemIndex>{0}), 2.0);
  ASSERT_EQ(pair.warnings().size(), 1u);
  EXPECT_NE(pair.warnings()[0].find("a"), std::string::npos);
}

TEST(Restrict, NoCommonItemsIsAnError) {
  auto base = cd::parse_clustering("a\tx\n");
  auto exp = cd::parse_clustering("b\tx\n");
  EXPECT_THROW((void)cd::restrict_to_common(base, exp), cd::ValidationError);
}

TEST(Venn, MatchesBruteForceOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto x = oracle::random_instance(seed);
    auto pair = x.pair();
    auto ideal = oracle::Instance::clustering(x.ideal);
    auto table = cd::venn_table(pair, ideal);
    for (cd::ItemIndex i = 0; i < x.size(); ++i) {
      auto want = oracle::venn(x, i);
      auto got = cd::venn_weights(pair, ideal, i);
      EXPECT_NEAR(got.good_stable, want.gs, 1e-12) << seed;
      EXPECT_NEAR(got.bad_stable, want.bs, 1e-12);
      EXPECT_NEAR(got.good_split, want.gsplit, 1e-12);
      EXPECT_NEAR(got.bad_split, want.bsplit, 1e-12);
      EXPECT_NEAR(got.good_merge, want.gm, 1e-12);
      EXPECT_NEAR(got.bad_merge, want.bm, 1e-12);
      EXPECT_NEAR(got.missing, want.missing, 1e-12);
      EXPECT_NEAR(table[i].good_stable, want.gs, 1e-9);
      EXPECT_NEAR(table[i].bad_split, want.bsplit, 1e-9);
      EXPECT_NEAR(table[i].good_merge, want.gm, 1e-9);
      EXPECT_NEAR(table[i].missing, want.missing, 1e-9);
      // Region identities against the cluster weights.
      EXPECT_NEAR(got.base_weight(), pair.base_weight(i), 1e-12);
      EXPECT_NEAR(got.exp_weight(), pair.exp_weight(i), 1e-12);
      EXPECT_NEAR(got.stable_weight(), pair.stable_weight(i), 1e-12);
    }
  }
}

TEST(Venn, ByIdMatchesByIndex) {
  auto x = oracle::random_instance(7);
  auto pair = x.pair();
  auto ideal = oracle::Instance::clustering(x.ideal);
  auto by_id = cd::venn_weights(pair, ideal, pair.population().id(1));
  auto by_index = cd::venn_weights(pair, ideal, 1);
  EXPECT_EQ(by_id.good_stable, by_index.good_stable);
  EXPECT_EQ(by_id.missing, by_index.missing);
}

TEST(Affected, MemberSetInequality) {
  // Relabeling clusters does not affect anything.
  std::vector<double> w{1, 1, 1};
  oracle::Instance x{w, {0, 0, 1}, {4, 4, 2}, {0, 0, 0}};
  auto pair = x.pair();
  for (cd::ItemIndex i = 0; i < 3; ++i) {
    EXPECT_FALSE(pair.affected(i));
  }
  oracle::Instance y{w, {0, 0, 1}, {0, 1, 1}, {0, 0, 0}};
  auto p2 = y.pair();
  EXPECT_TRUE(p2.affected(0));
  EXPECT_TRUE(p2.affected(1));
  EXPECT_TRUE(p2.affected(2));
}

}  // namespace
