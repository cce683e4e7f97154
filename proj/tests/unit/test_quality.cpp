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

#include <clusterdiff/quality.hpp>
#include <oracle.hpp>

namespace cd = clusterdiff;

namespace {

struct OracleRates {
  double gsr, bsr, gmr, bmr, dp, dr;
};

// Lifted rates straight from the brute-force Venn diagrams and pairwise precision/recall.
OracleRates oracle_rates(const oracle::Instance& x, bool affected_only) {
  auto scope = [&](std::size_t i) { return !affected_only || oracle::affected(x, i); };
  auto v = [&](std::size_t i) { return oracle::venn(x, i); };
  OracleRates r;
  r.gsr = oracle::lifted(x, [&](std::size_t i) { return v(i).gsplit / v(i).wb(); }, scope);
  r.bsr = oracle::lifted(x, [&](std::size_t i) { return v(i).bsplit / v(i).wb(); }, scope);
  r.gmr = oracle::lifted(x, [&](std::size_t i) { return v(i).gm / v(i).we(); }, scope);
  r.bmr = oracle::lifted(x, [&](std::size_t i) { return v(i).bm / v(i).we(); }, scope);
  r.dp = oracle::lifted(
      x, [&](std::size_t i) { return oracle::precision(x, x.exp, i) - oracle::precision(x, x.base, i); }, scope);
  r.dr = oracle::lifted(x, [&](std::size_t i) { return oracle::recall(x, x.exp, i) - oracle::recall(x, x.base, i); },
                        scope);
  return r;
}

TEST(ExactQuality, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto x = oracle::random_changed_instance(seed);
    auto pair = x.pair();
    auto ideal = oracle::Instance::clustering(x.ideal);
    for (bool affected : {false, true}) {
      auto got = cd::exact_quality(pair, ideal, affected ? cd::Scope::affected : cd::Scope::population);
      auto want = oracle_rates(x, affected);
      EXPECT_NEAR(got.good_split_rate, want.gsr, 1e-9) << seed;
      EXPECT_NEAR(got.bad_split_rate, want.bsr, 1e-9);
      EXPECT_NEAR(got.good_merge_rate, want.gmr, 1e-9);
      EXPECT_NEAR(got.bad_merge_rate, want.bmr, 1e-9);
      EXPECT_NEAR(*got.delta_precision, want.dp, 1e-9);
      EXPECT_NEAR(*got.delta_recall, want.dr, 1e-9);
    }
  }
}

TEST(ExactQuality, RatesAddUpToImpactRates) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto x = oracle::random_changed_instance(seed);
    auto pair = x.pair();
    auto q = cd::exact_quality(pair, oracle::Instance::clustering(x.ideal));
    double sr = oracle::lifted(x, [&](std::size_t i) { return oracle::venn(x, i).gsplit / oracle::venn(x, i).wb() +
                                                               oracle::venn(x, i).bsplit / oracle::venn(x, i).wb(); });
    EXPECT_NEAR(q.split_rate(), sr, 1e-12);
  }
}

TEST(ExactQuality, IdealAsExpAndIdealAsBase) {
  auto x = oracle::random_changed_instance(11);
  x.exp = x.ideal;
  auto q = cd::exact_quality(x.pair(), oracle::Instance::clustering(x.ideal));
  EXPECT_EQ(q.bad_split_rate, 0.0);
  EXPECT_EQ(q.bad_merge_rate, 0.0);
  EXPECT_GE(*q.delta_precision, -1e-12);
  EXPECT_GE(*q.delta_recall, -1e-12);
}

TEST(Judge, FileJudgeReadsVerdicts) {
  auto pop = cd::Population::unit({"a", "b", "c"});
  std::istringstream in("# judgements\na\tb\t1\nb\tc\t0\nzz\ta\t1\nb\ta\t1\n");
  cd::FileJudge judge(in, pop);
  EXPECT_EQ(judge.size(), 2u);
  EXPECT_EQ(judge.skipped(), 1u);
  EXPECT_EQ(judge.verdict(0, 1), std::optional<bool>(true));
  EXPECT_EQ(judge.verdict(1, 0), std::optional<bool>(true));
  EXPECT_EQ(judge.verdict(2, 1), std::optional<bool>(false));
  EXPECT_EQ(judge.verdict(2, 2), std::optional<bool>(true));
  EXPECT_FALSE(judge.verdict(0, 2));
}

TEST(Judge, FileJudgeRejectsConflictsAndBadRows) {
  auto pop = cd::Population::unit({"a", "b"});
  std::istringstream conflict("a\tb\t1\nb\ta\t0\n");
  EXPECT_THROW(cd::FileJudge(conflict, pop), cd::ValidationError);
  std::istringstream bad("a\tb\tyes\n");
  EXPECT_THROW(cd::FileJudge(bad, pop), cd::ParseError);
  std::istringstream self("a\ta\t0\n");
  EXPECT_THROW(cd::FileJudge(self, pop), cd::ValidationError);
}

// Analytic ΔRecall(T) summed pair by pair, without the library's universes.
double oracle_delta_recall(const oracle::Instance& x) {
  double total = oracle::weight_where(x, [](std::size_t) { return true; });
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double wi = oracle::weight_where(x, [&](std::size_t j) { return x.ideal[j] == x.ideal[i]; });
    for (std::size_t j = 0; j < x.size(); ++j) {
      bool b = x.base[j] == x.base[i];
      bool e = x.exp[j] == x.exp[i];
      if (b != e && x.ideal[j] == x.ideal[i]) {
        s += (e ? 1.0 : -1.0) * x.w[i] / total * x.w[j] / wi;
      }
    }
  }
  return s;
}

TEST(DeltaRecallEstimator, ExhaustiveEqualsAnalytic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto x = oracle::random_instance(seed);
    auto pair = x.pair();
    auto ideal = oracle::Instance::clustering(x.ideal);
    auto iw = cd::ideal_weights(pair.population(), ideal);
    auto sample = cd::enumerate_delta_recall_pairs(pair, iw);
    cd::IdealJudge judge(ideal);
    auto est = cd::estimate_delta_recall(sample, judge, pair.population());
    EXPECT_TRUE(est.exact);
    EXPECT_NEAR(est.value, oracle_delta_recall(x), 1e-9) << seed;
    EXPECT_NEAR(est.value, oracle_rates(x, false).dr, 1e-9);
  }
}

TEST(DeltaRecallEstimator, SampledIsDeterministicAndCoversTruth) {
  auto x = oracle::random_changed_instance(5, 12, 20);
  auto pair = x.pair();
  auto ideal = oracle::Instance::clustering(x.ideal);
  auto iw = cd::ideal_weights(pair.population(), ideal);
  cd::IdealJudge judge(ideal);
  double truth = oracle_delta_recall(x);
  auto a = cd::sample_delta_recall_pairs(pair, iw, 2000, 42);
  auto b = cd::sample_delta_recall_pairs(pair, iw, 2000, 42);
  EXPECT_EQ(a.pairs, b.pairs);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto est = cd::estimate_delta_recall(cd::sample_delta_recall_pairs(pair, iw, 4000, seed), judge, pair.population());
    covered += est.covers(truth) ? 1 : 0;
  }
  // 95% intervals: 40 reruns should almost never miss more than 6 times.
  EXPECT_GE(covered, 34);
}

TEST(DeltaRecallEstimator, ZeroSampleSizeIsConfigError) {
  auto x = oracle::random_changed_instance(1);
  auto pair = x.pair();
  auto iw = cd::ideal_weights(pair.population(), oracle::Instance::clustering(x.ideal));
  EXPECT_THROW((void)cd::sample_delta_recall_pairs(pair, iw, 0, 1), cd::ConfigError);
  EXPECT_THROW((void)cd::draw_quality_sample(pair, 0, 1), cd::ConfigError);
}

TEST(DeltaRecallEstimator, UnjudgedPairIsReported) {
  auto x = oracle::random_changed_instance(2);
  auto pair = x.pair();
  auto iw = cd::ideal_weights(pair.population(), oracle::Instance::clustering(x.ideal));
  cd::FailingJudge judge;
  auto sample = cd::sample_delta_recall_pairs(pair, iw, 10, 1);
  EXPECT_THROW((void)cd::estimate_delta_recall(sample, judge, pair.population()), cd::UnjudgedPairError);
}

TEST(QualityEstimator, ExhaustiveSampleReproducesExactRates) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto x = oracle::random_changed_instance(seed);
    auto pair = x.pair();
    auto ideal = oracle::Instance::clustering(x.ideal);
    cd::IdealJudge judge(ideal);
    auto got = cd::estimate_quality_rates(cd::enumerate_quality_pairs(pair), judge, pair.population());
    auto want = oracle_rates(x, false);
    EXPECT_NEAR(got.rates.good_split_rate, want.gsr, 1e-9) << seed;
    EXPECT_NEAR(got.rates.bad_split_rate, want.bsr, 1e-9);
    EXPECT_NEAR(got.rates.good_merge_rate, want.gmr, 1e-9);
    EXPECT_NEAR(got.rates.bad_merge_rate, want.bmr, 1e-9);
    ASSERT_TRUE(got.delta_precision);
    EXPECT_NEAR(got.delta_precision->value, want.dp, 1e-9);
  }
}

TEST(QualityEstimator, SampledRatesAreCloseAndSplitTotalIsExact) {
  auto x = oracle::random_changed_instance(9, 15, 20);
  auto pair = x.pair();
  auto ideal = oracle::Instance::clustering(x.ideal);
  cd::IdealJudge judge(ideal);
  auto got = cd::estimate_quality_rates(pair, judge, 20000, 3);
  auto want = oracle_rates(x, false);
  EXPECT_NEAR(got.rates.split_rate(), want.gsr + want.bsr, 1e-12);
  EXPECT_NEAR(got.rates.merge_rate(), want.gmr + want.bmr, 1e-12);
  EXPECT_NEAR(got.rates.bad_split_rate, want.bsr, 5 * got.bad_split.std_error + 1e-12);
  EXPECT_NEAR(got.rates.good_merge_rate, want.gmr, 5 * got.good_merge.std_error + 1e-12);
}

TEST(Manifest, RoundTrips) {
  auto x = oracle::random_changed_instance(4);
  auto pair = x.pair();
  auto sample = cd::draw_quality_sample(pair, 25, 8);
  std::stringstream s;
  cd::write_manifest(s, pair.population(), sample);
  auto back = cd::read_manifest(s, pair.population());
  ASSERT_EQ(back.size(), sample.split.pairs.size() + sample.merge.pairs.size() + sample.stable.pairs.size());
  EXPECT_EQ(back.front().i, sample.split.pairs.front().i);
  EXPECT_EQ(back.front().j, sample.split.pairs.front().j);
  EXPECT_EQ(back.front().u, sample.split.pairs.front().u);
  EXPECT_EQ(back.front().l, sample.split.pairs.front().l);
}

}  // namespace
