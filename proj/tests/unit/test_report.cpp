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

#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include <clusterdiff/report.hpp>
#include <oracle.hpp>

namespace cd = clusterdiff;

namespace {

cd::DiagramInputs inputs(std::uint64_t seed) {
  auto x = oracle::random_changed_instance(seed, 10, 20);
  auto pair = x.pair();
  return cd::DiagramInputs::from(cd::compute_impact(pair),
                                 cd::exact_quality(pair, oracle::Instance::clustering(x.ideal)));
}

TEST(FormatNumber, ShortestRoundTrip) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    double x = (oracle::u01(rng) - 0.5) * std::pow(10.0, static_cast<int>(oracle::below(rng, 20)) - 10);
    EXPECT_EQ(std::stod(cd::format_number(x)), x);
  }
  EXPECT_EQ(cd::format_number(0.1), "0.1");
  EXPECT_EQ(cd::format_number(1.0), "1");
}

TEST(Csv, CurveRoundTrips) {
  auto curve = cd::emit_recall_curve(inputs(3), cd::Variant::v2, 0.5);
  std::stringstream s;
  cd::write_curve_csv(s, curve);
  auto back = cd::read_curve_csv(s);
  ASSERT_EQ(back.size(), curve.points.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].recall_base, curve.points[k].recall_base);
    EXPECT_EQ(back[k].delta_recall_T, curve.points[k].delta_recall_T);
  }
}

TEST(Csv, HeatmapRoundTripsWithInfeasibleCells) {
  cd::HeatmapSpec spec;
  spec.precision = cd::GridAxis{0.0, 1.0, 11};
  auto map = cd::emit_recall_heatmap(inputs(4), spec);
  std::stringstream s;
  cd::write_heatmap_csv(s, map);
  auto back = cd::read_heatmap_csv(s);
  ASSERT_EQ(back.size(), map.cells.size());
  std::size_t infeasible = 0;
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].feasible, map.cells[k].feasible);
    EXPECT_EQ(back[k].precision_base, map.cells[k].precision_base);
    EXPECT_EQ(back[k].delta_recall_T, map.cells[k].delta_recall_T);
    EXPECT_EQ(back[k].delta_precision_T, map.cells[k].delta_precision_T);
    infeasible += !back[k].feasible;
  }
  EXPECT_GT(infeasible, 0u);
}

TEST(Csv, GeometryRoundTripsWithSingularPoint) {
  cd::GeometrySpec spec;
  spec.resolution = 21;
  auto grid = cd::iq_geometry(spec);
  std::stringstream s;
  cd::write_geometry_csv(s, grid);
  auto back = cd::read_geometry_csv(s);
  ASSERT_EQ(back.size(), grid.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].x, grid[k].x);
    EXPECT_EQ(back[k].f, grid[k].f);
  }
}

TEST(Csv, StudyRoundTrips) {
  cd::StudyReport report;
  cd::StudyRow row;
  row.index = 2;
  row.world_seed = 123456789012345ULL;
  row.change_seed = 7;
  row.ops = 4;
  row.affected_weight_fraction = 0.25;
  row.exact_delta_recall = -0.1;
  row.approx_delta_recall = -1.0 / 3.0;
  row.exact_iq = 0.5;
  row.clipped = true;
  report.rows = {row, row};
  std::stringstream s;
  cd::write_study_csv(s, report);
  auto back = cd::read_study_csv(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].world_seed, row.world_seed);
  EXPECT_EQ(back[0].approx_delta_recall, row.approx_delta_recall);
  EXPECT_TRUE(back[1].clipped);
}

TEST(Csv, WrongHeaderIsParseError) {
  std::stringstream s("a,b\n1,2\n");
  EXPECT_THROW((void)cd::read_curve_csv(s), cd::ParseError);
}

TEST(Json, ReportCarriesSchemaAndIsStable) {
  auto in = inputs(5);
  auto point = cd::delta_recall_point(in, cd::Variant::v1, cd::RecallPolicy::dampened());
  auto a = cd::make_report("delta-recall");
  a["result"] = cd::to_json(point);
  auto b = cd::make_report("delta-recall");
  b["result"] = cd::to_json(cd::delta_recall_point(in, cd::Variant::v1, cd::RecallPolicy::dampened()));
  EXPECT_EQ(a["schema"], 1);
  EXPECT_EQ(a.dump(2), b.dump(2));
  EXPECT_EQ(a.begin().key(), "schema");
}

TEST(Json, NonFiniteValuesAreRefused) {
  cd::LinearFit f;
  f.r = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW((void)cd::to_json(f), cd::ValidationError);
}

TEST(Json, FlatCsvListsLeaves) {
  cd::Json j = {{"a", 0.5}, {"b", {{"c", nullptr}, {"d", "x"}}}};
  std::ostringstream out;
  cd::write_flat_csv(out, j);
  EXPECT_EQ(out.str(), "metric,value\na,0.5\nb.c,\nb.d,x\n");
}

TEST(Config, DefaultsAndOverrides) {
  auto def = cd::parse_study_config(cd::Json::object());
  EXPECT_EQ(def.family.size(), 30u);
  EXPECT_EQ(def.world.n_items, 600u);

  auto j = cd::Json::parse(R"({
    "world": {"n_items": 50, "seed": 9, "sizes": {"kind": "uniform", "k": 5}, "weights": {"kind": "unit"}},
    "base_noise": {"ops": [{"op": "bad_split", "p": 0.2}]},
    "family": [{"ops": [{"op": "good_merge", "p": 0.3}], "seed": 4}],
    "policy": {"kind": "fixed", "recall": 0.7}
  })");
  auto cfg = cd::parse_study_config(j);
  EXPECT_EQ(cfg.world.n_items, 50u);
  EXPECT_EQ(cfg.world.sizes.kind, cd::SizeDistribution::Kind::uniform);
  EXPECT_EQ(cfg.world.weights.kind, cd::WeightDistribution::Kind::unit);
  ASSERT_EQ(cfg.family.size(), 1u);
  EXPECT_EQ(cfg.family[0].seed, 4u);
  EXPECT_EQ(cfg.family[0].ops[0].kind, cd::OpKind::good_merge);
  EXPECT_EQ(cfg.options.base_noise.ops.size(), 1u);
  EXPECT_EQ(cfg.options.policy.name(), "fixed");
}

TEST(Config, BadValuesAreConfigErrors) {
  EXPECT_THROW((void)cd::parse_study_config(cd::Json::parse(R"({"family": [{"ops": [{"op": "x", "p": 0.1}]}]})")),
               cd::ConfigError);
  EXPECT_THROW((void)cd::parse_study_config(cd::Json::parse(R"({"world": {"n_items": "many"}})")), cd::ConfigError);
  EXPECT_THROW((void)cd::parse_study_config(cd::Json::parse(R"({"policy": {"kind": "fixed", "recall": 2}})")),
               cd::ConfigError);
}

}  // namespace
