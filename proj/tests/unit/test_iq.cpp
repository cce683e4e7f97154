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

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include <clusterdiff/iq.hpp>
#include <oracle.hpp>

namespace cd = clusterdiff;

namespace {

std::string fixture(const std::string& name) { return std::string(CLUSTERDIFF_DATA_DIR) + "/six_items/" + name + ".tsv"; }

struct SixItems {
  cd::ClusteringPair pair;
  cd::Clustering ideal;
};

SixItems six_items(const std::string& exp) {
  auto pair = cd::restrict_to_common(cd::load_clustering(fixture("base")), cd::load_clustering(fixture("exp_" + exp)));
  auto ideal = cd::align_to(cd::load_clustering(fixture("ideal")), pair.population());
  return {pair, ideal};
}

// IQ of each Exp of the six-item example, in percent.
TEST(IqExact, SixItemExamples) {
  const std::pair<const char*, double> cases[] = {{"c", 31.25},   {"d", 37.50}, {"e", 64.7059},
                                                  {"f", 60.00},   {"g", 80.7692}, {"h", 100.00}};
  for (const auto& [name, pct] : cases) {
    auto f = six_items(name);
    auto r = cd::iq_exact(f.pair, f.ideal);
    EXPECT_NEAR(100.0 * r.iq, pct, 1e-4) << name;
    EXPECT_FALSE(r.clipped);
  }
}

TEST(IqExact, SixItemImprovementByHand) {
  // Base JD to Ideal: every item 1 - 1/3 ... lifted 0.75. Exp (c): i1, j1 at 1/2, k1 at 0, others 2/3.
  auto f = six_items("c");
  EXPECT_NEAR(cd::jd_to_ideal_improvement(f.pair, f.ideal), 0.75 - 49.0 / 72.0, 1e-12);
}

double oracle_iq(const oracle::Instance& x) {
  double num = oracle::lifted(x, [&](std::size_t i) {
    return oracle::jd(x, x.base, x.ideal, i) - oracle::jd(x, x.exp, x.ideal, i);
  });
  double den = oracle::lifted(x, [&](std::size_t i) { return oracle::jd(x, x.base, x.exp, i); });
  return num / den;
}

TEST(IqExact, MatchesBruteForceAndStaysInRange) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    auto x = oracle::random_changed_instance(seed);
    auto ideal = oracle::Instance::clustering(x.ideal);
    auto r = cd::iq_exact(x.pair(), ideal);
    EXPECT_NEAR(r.iq, oracle_iq(x), 1e-9) << seed;
    EXPECT_GE(r.iq, -1.0 - 1e-12);
    EXPECT_LE(r.iq, 1.0 + 1e-12);
    auto back = cd::iq_exact(x.swapped(), ideal);
    EXPECT_NEAR(back.iq, -r.iq, 1e-9);
  }
}

TEST(IqExact, ExpEqualToIdealScoresOne) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto x = oracle::random_changed_instance(seed);
    x.ideal = x.exp;
    EXPECT_NEAR(cd::iq_exact(x.pair(), oracle::Instance::clustering(x.ideal)).iq, 1.0, 1e-12);
  }
}

TEST(IqExact, ZeroDiffIsRejected) {
  auto x = oracle::random_instance(4);
  x.exp = x.base;
  EXPECT_THROW((void)cd::iq_exact(x.pair(), oracle::Instance::clustering(x.ideal)), cd::ValidationError);
}

TEST(IqExact, AffectedScopeRescales) {
  auto x = oracle::random_changed_instance(8, 10, 20);
  auto pair = x.pair();
  auto ideal = oracle::Instance::clustering(x.ideal);
  double awf = cd::compute_impact(pair).affected_weight_fraction;
  EXPECT_NEAR(cd::jd_to_ideal_improvement(pair, ideal),
              cd::jd_to_ideal_improvement(pair, ideal, cd::Scope::affected) * awf, 1e-12);
}

cd::AffectedDiagram true_diagram(const oracle::Instance& x, cd::Variant v) {
  auto pair = x.pair();
  auto in = cd::DiagramInputs::from(cd::compute_impact(pair),
                                    cd::exact_quality(pair, oracle::Instance::clustering(x.ideal)));
  auto aff = [&](std::size_t i) { return oracle::affected(x, i); };
  double r = oracle::lifted(x, [&](std::size_t i) { return oracle::recall(x, x.base, i); }, aff);
  double p = oracle::lifted(x, [&](std::size_t i) { return oracle::precision(x, x.base, i); }, aff);
  return cd::build_affected_diagram(in, v, {r, p}, cd::ClipPolicy::abort);
}

TEST(IqApprox, AgreesWithExactOnHomogeneousInstances) {
  for (auto shape : {oracle::Shape::split, oracle::Shape::merge, oracle::Shape::swap}) {
    for (int m : {2, 4}) {
      for (int t : {0, 2}) {
        auto x = oracle::homogeneous_instance(shape, m, 2, t, 4, 1.0);
        auto pair = x.pair();
        auto exact = cd::iq_exact(pair, oracle::Instance::clustering(x.ideal));
        auto d = true_diagram(x, cd::Variant::v2);
        auto approx = cd::iq_approx(d, cd::compute_impact(pair).affected_weight_fraction, exact.jaccard_base_exp);
        EXPECT_NEAR(approx.iq, exact.iq, 1e-9) << int(shape) << m << t;
        EXPECT_EQ(approx.mode, cd::IqMode::approx);
      }
    }
  }
}

TEST(IqApprox, ClipsAndFlags) {
  cd::AffectedDiagram d;
  d.w_b = 1.0;
  d.w_e = 1.0;
  d.good_stable = 0.0;
  d.bad_split = 1.0;
  // Base is the Ideal cluster, Exp drops all of it.
  auto r = cd::iq_approx(d, 1.0, 0.01);
  EXPECT_TRUE(r.clipped);
  EXPECT_EQ(r.iq, -1.0);
  EXPECT_NEAR(r.iq_unclipped, -100.0, 1e-9);
  EXPECT_THROW((void)cd::iq_approx(d, 1.0, 0.0), cd::ValidationError);
}

TEST(Geometry, HandPoints) {
  EXPECT_DOUBLE_EQ(*cd::iq_geometry_value(0.0, 0.5, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(*cd::iq_geometry_value(1.0, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(*cd::iq_geometry_value(0.0, 2.0, 1.0), -1.0);
  EXPECT_DOUBLE_EQ(*cd::iq_geometry_value(0.0, -1.0, 1.0), 0.0);
  EXPECT_FALSE(cd::iq_geometry_value(0.0, 1.0, 1.0));
}

TEST(Geometry, TriangleInequalityBoundsEveryPoint) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5000; ++k) {
    double x = 4.0 * oracle::u01(rng) - 2.0, y = 4.0 * oracle::u01(rng) - 2.0, d = 0.1 + oracle::u01(rng);
    auto f = cd::iq_geometry_value(x, y, d);
    ASSERT_TRUE(f);
    EXPECT_LE(std::abs(*f), 1.0 + 1e-12);
  }
}

TEST(Geometry, DefaultGridHasOneSingularCell) {
  auto grid = cd::iq_geometry();
  ASSERT_EQ(grid.size(), 401u * 401u);
  EXPECT_EQ(grid.front().x, -2.0);
  EXPECT_EQ(grid.front().y, -2.0);
  EXPECT_EQ(grid.back().x, 2.0);
  EXPECT_EQ(grid[1].y, -2.0);
  std::size_t undefined = 0;
  for (const auto& c : grid) {
    if (!c.f) {
      ++undefined;
      EXPECT_EQ(c.x, 0.0);
      EXPECT_EQ(c.y, 1.0);
    }
  }
  EXPECT_EQ(undefined, 1u);
  cd::GeometrySpec flat;
  flat.d = 0.0;
  EXPECT_THROW((void)cd::iq_geometry(flat), cd::ConfigError);
  cd::GeometrySpec one;
  one.resolution = 1;
  EXPECT_THROW((void)cd::iq_geometry(one), cd::ConfigError);
}

}  // namespace
