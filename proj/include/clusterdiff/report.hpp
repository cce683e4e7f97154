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

#ifndef CLUSTERDIFF_REPORT_HPP
#define CLUSTERDIFF_REPORT_HPP

#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <clusterdiff/delta_recall.hpp>
#include <clusterdiff/impact.hpp>
#include <clusterdiff/iq.hpp>
#include <clusterdiff/quality.hpp>
#include <clusterdiff/simulation.hpp>
#include <clusterdiff/snapshot.hpp>

/**
 * \file
 * \brief JSON report fragments, CSV tables and the simulation config format.
 *
 * Reports use insertion-ordered JSON and shortest round-trip number formatting,
 * so identical inputs give byte-identical output.
 */

namespace clusterdiff {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;
inline constexpr const char* kToolName = "clusterdiff";
inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline Json finite(double x) {
  if (!std::isfinite(x)) {
    throw ValidationError("non-finite value in report");
  }
  return x;
}

template <class T>
Json maybe(const std::optional<T>& x) {
  return x ? Json(*x) : Json(nullptr);
}

inline Json maybe(const std::optional<double>& x) { return x ? finite(*x) : Json(nullptr); }

}  // namespace detail

// ---------------------------------------------------------------------------
// JSON fragments

[[nodiscard]] inline Json to_json(const ImpactMetrics& m) {
  Json j;
  j["split_rate"] = detail::finite(m.split_rate);
  j["merge_rate"] = detail::finite(m.merge_rate);
  j["jaccard_distance"] = detail::finite(m.jaccard_distance);
  j["affected_weight_fraction"] = detail::finite(m.affected_weight_fraction);
  j["affected_count"] = m.affected_count;
  j["item_count"] = m.item_count;
  if (m.affected_weight_fraction > 0.0) {
    Json a;
    a["split_rate"] = detail::finite(m.split_rate_affected());
    a["merge_rate"] = detail::finite(m.merge_rate_affected());
    a["jaccard_distance"] = detail::finite(m.jaccard_distance_affected());
    a["weight_fraction_of_base_cluster"] = detail::maybe(m.weight_fraction_of_base_cluster);
    j["affected"] = a;
  } else {
    j["affected"] = nullptr;
  }
  return j;
}

[[nodiscard]] inline Json to_json(const QualityRates& r) {
  Json j;
  j["scope"] = to_string(r.scope);
  j["good_split_rate"] = detail::finite(r.good_split_rate);
  j["bad_split_rate"] = detail::finite(r.bad_split_rate);
  j["good_merge_rate"] = detail::finite(r.good_merge_rate);
  j["bad_merge_rate"] = detail::finite(r.bad_merge_rate);
  j["delta_precision"] = detail::maybe(r.delta_precision);
  j["delta_recall"] = detail::maybe(r.delta_recall);
  return j;
}

[[nodiscard]] inline Json to_json(const Estimate& e) {
  Json j;
  j["value"] = detail::finite(e.value);
  j["std_error"] = detail::finite(e.std_error);
  j["ci95"] = Json::array({detail::finite(e.ci_low), detail::finite(e.ci_high)});
  j["n"] = e.n;
  j["exact"] = e.exact;
  return j;
}

[[nodiscard]] inline Json to_json(const AffectedDiagram& d) {
  Json j;
  j["variant"] = to_int(d.variant);
  j["assumed_recall_base"] = detail::finite(d.assumed_recall_base);
  j["assumed_precision_base"] = detail::maybe(d.assumed_precision_base);
  j["w_b"] = detail::finite(d.w_b);
  j["w_e"] = detail::finite(d.w_e);
  j["stable_weight"] = detail::finite(d.stable_weight);
  j["good_stable"] = detail::finite(d.good_stable);
  j["bad_stable"] = detail::finite(d.bad_stable);
  j["good_split"] = detail::finite(d.good_split);
  j["bad_split"] = detail::finite(d.bad_split);
  j["good_merge"] = detail::finite(d.good_merge);
  j["bad_merge"] = detail::finite(d.bad_merge);
  j["missing"] = detail::finite(d.missing);
  j["min_good_stable"] = detail::finite(d.min_good_stable);
  j["good_stable_unclipped"] = detail::finite(d.good_stable_unclipped);
  j["recall_bound"] = detail::finite(d.recall_bound());
  j["clipped"] = d.clipped;
  j["missing_clipped"] = d.missing_clipped;
  return j;
}

[[nodiscard]] inline Json to_json(const OverallEstimate& o) {
  Json j;
  j["delta_recall_T"] = detail::finite(o.delta_recall_T);
  j["delta_precision_T"] = detail::finite(o.delta_precision_T);
  j["delta_recall_affected"] = detail::finite(o.delta_recall_affected);
  j["delta_precision_affected"] = detail::finite(o.delta_precision_affected);
  j["recall_exp_affected"] = detail::finite(o.recall_exp_affected);
  j["precision_exp_affected"] = detail::finite(o.precision_exp_affected);
  j["precision_base_affected"] = detail::finite(o.precision_base_affected);
  return j;
}

[[nodiscard]] inline Json to_json(const DeltaRecallPoint& p) {
  Json j;
  j["variant"] = to_int(p.diagram.variant);
  j["policy"] = p.policy;
  j["assumed_recall_base"] = detail::finite(p.diagram.assumed_recall_base);
  j["clipped"] = p.diagram.any_clipping();
  j["delta_recall_T"] = detail::finite(p.overall.delta_recall_T);
  j["delta_precision_T"] = detail::finite(p.overall.delta_precision_T);
  j["jd_back_of_envelope"] = detail::finite(p.jd_back_of_envelope);
  j["overall"] = to_json(p.overall);
  j["diagram"] = to_json(p.diagram);
  return j;
}

[[nodiscard]] inline Json to_json(const IqResult& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["iq"] = detail::finite(r.iq);
  j["iq_unclipped"] = detail::finite(r.iq_unclipped);
  j["jd_improvement"] = detail::finite(r.jd_improvement);
  j["jaccard_base_exp"] = detail::finite(r.jaccard_base_exp);
  j["clipped"] = r.clipped;
  return j;
}

[[nodiscard]] inline Json to_json(const SnapshotQuality& s) {
  Json j;
  j["reference"] = to_string(s.reference);
  j["judge_mode"] = to_string(s.judge_mode);
  j["delta_precision_raw"] = detail::finite(s.delta_precision_raw);
  j["delta_recall_raw"] = detail::maybe(s.delta_recall_raw);
  if (s.reference == Reference::perfect_precision) {
    j["precision_absolute"] = detail::maybe(s.precision_absolute);
    j["recall_above_minimum"] = detail::maybe(s.recall_above_minimum);
  } else {
    j["recall_absolute"] = detail::maybe(s.recall_absolute);
    j["precision_above_minimum"] = detail::maybe(s.precision_above_minimum);
  }
  if (s.delta_precision_estimate) {
    j["delta_precision_estimate"] = to_json(*s.delta_precision_estimate);
  }
  if (s.delta_recall_estimate) {
    j["delta_recall_estimate"] = to_json(*s.delta_recall_estimate);
  }
  return j;
}

[[nodiscard]] inline Json to_json(const LinearFit& f) {
  Json j;
  j["pearson_r"] = detail::finite(f.r);
  j["slope"] = detail::finite(f.slope);
  j["intercept"] = detail::finite(f.intercept);
  j["n"] = f.n;
  return j;
}

[[nodiscard]] inline Json to_json(const StudyReport& r) {
  Json j;
  j["variant"] = to_int(r.variant);
  j["policy"] = r.policy;
  j["changes"] = r.rows.size();
  j["delta_recall"] = to_json(r.delta_recall);
  j["jaccard_distance"] = to_json(r.jaccard_distance);
  j["iq"] = to_json(r.iq);
  j["iq_sign_agreement"] = detail::finite(r.iq_sign_agreement);
  return j;
}

/// A report skeleton carrying the schema version and tool identity.
[[nodiscard]] inline Json make_report(const std::string& command) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  return j;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest representation that reads back to the same double.
[[nodiscard]] inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

// Reads a CSV with the given header; returns the data rows split on commas.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in, std::string_view header) {
  std::string raw;
  if (!std::getline(in, raw) || strip_cr(raw) != header) {
    throw ParseError("expected CSV header '" + std::string(header) + "'", 1);
  }
  auto columns = split_commas(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = strip_cr(raw);
    if (line.empty()) {
      continue;
    }
    auto fields = split_commas(line);
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " columns", line_no);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

inline double number(const std::string& field) {
  auto v = parse_double(field);
  if (!v) {
    throw ParseError("invalid number '" + field + "'", 0);
  }
  return *v;
}

inline std::optional<double> maybe_number(const std::string& field) {
  if (field.empty()) {
    return std::nullopt;
  }
  return number(field);
}

inline std::string maybe_field(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

}  // namespace detail

inline constexpr std::string_view kCurveHeader = "recall_base,delta_recall_T";
inline constexpr std::string_view kHeatmapHeader = "precision_base,recall_base,delta_recall_T,delta_precision_T,feasible";
inline constexpr std::string_view kGeometryHeader = "x,y,f";
inline constexpr std::string_view kStudyHeader =
    "index,world_seed,change_seed,ops,affected_weight_fraction,assumed_recall,clipped,exact_delta_recall,"
    "approx_delta_recall,exact_delta_precision,approx_delta_precision,exact_jd,approx_jd,exact_iq,approx_iq";

inline void write_curve_csv(std::ostream& out, const RecallCurve& curve) {
  out << kCurveHeader << '\n';
  for (const auto& p : curve.points) {
    out << format_number(p.recall_base) << ',' << format_number(p.delta_recall_T) << '\n';
  }
}

[[nodiscard]] inline std::vector<RecallCurvePoint> read_curve_csv(std::istream& in) {
  std::vector<RecallCurvePoint> out;
  for (const auto& row : detail::read_csv(in, kCurveHeader)) {
    out.push_back({detail::number(row[0]), detail::number(row[1])});
  }
  return out;
}

/// Infeasible cells have empty value fields and feasible = 0.
inline void write_heatmap_csv(std::ostream& out, const RecallHeatmap& map) {
  out << kHeatmapHeader << '\n';
  for (const auto& c : map.cells) {
    out << format_number(c.precision_base) << ',' << format_number(c.recall_base) << ','
        << detail::maybe_field(c.delta_recall_T) << ',' << detail::maybe_field(c.delta_precision_T) << ','
        << (c.feasible ? 1 : 0) << '\n';
  }
}

[[nodiscard]] inline std::vector<HeatmapCell> read_heatmap_csv(std::istream& in) {
  std::vector<HeatmapCell> out;
  for (const auto& row : detail::read_csv(in, kHeatmapHeader)) {
    if (row[4] != "0" && row[4] != "1") {
      throw ParseError("feasible must be 0 or 1", 0);
    }
    out.push_back({detail::number(row[0]), detail::number(row[1]), row[4] == "1", detail::maybe_number(row[2]),
                   detail::maybe_number(row[3])});
  }
  return out;
}

/// The undefined point (0, d) has an empty f field.
inline void write_geometry_csv(std::ostream& out, const std::vector<GeometryCell>& grid) {
  out << kGeometryHeader << '\n';
  for (const auto& c : grid) {
    out << format_number(c.x) << ',' << format_number(c.y) << ',' << detail::maybe_field(c.f) << '\n';
  }
}

[[nodiscard]] inline std::vector<GeometryCell> read_geometry_csv(std::istream& in) {
  std::vector<GeometryCell> out;
  for (const auto& row : detail::read_csv(in, kGeometryHeader)) {
    out.push_back({detail::number(row[0]), detail::number(row[1]), detail::maybe_number(row[2])});
  }
  return out;
}

inline void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << kStudyHeader << '\n';
  for (const auto& r : report.rows) {
    out << r.index << ',' << r.world_seed << ',' << r.change_seed << ',' << r.ops << ','
        << format_number(r.affected_weight_fraction) << ',' << format_number(r.assumed_recall) << ','
        << (r.clipped ? 1 : 0) << ',' << format_number(r.exact_delta_recall) << ','
        << format_number(r.approx_delta_recall) << ',' << format_number(r.exact_delta_precision) << ','
        << format_number(r.approx_delta_precision) << ',' << format_number(r.exact_jd) << ','
        << format_number(r.approx_jd) << ',' << format_number(r.exact_iq) << ',' << format_number(r.approx_iq)
        << '\n';
  }
}

[[nodiscard]] inline std::vector<StudyRow> read_study_csv(std::istream& in) {
  std::vector<StudyRow> out;
  for (const auto& row : detail::read_csv(in, kStudyHeader)) {
    StudyRow r;
    r.index = std::stoull(row[0]);
    r.world_seed = std::stoull(row[1]);
    r.change_seed = std::stoull(row[2]);
    r.ops = std::stoull(row[3]);
    r.affected_weight_fraction = detail::number(row[4]);
    r.assumed_recall = detail::number(row[5]);
    r.clipped = row[6] == "1";
    r.exact_delta_recall = detail::number(row[7]);
    r.approx_delta_recall = detail::number(row[8]);
    r.exact_delta_precision = detail::number(row[9]);
    r.approx_delta_precision = detail::number(row[10]);
    r.exact_jd = detail::number(row[11]);
    r.approx_jd = detail::number(row[12]);
    r.exact_iq = detail::number(row[13]);
    r.approx_iq = detail::number(row[14]);
    out.push_back(r);
  }
  return out;
}

/// `metric,value` rows for the scalar leaves of a JSON fragment, keys joined with '.'.
inline void write_flat_csv(std::ostream& out, const Json& j) {
  out << "metric,value\n";
  std::function<void(const std::string&, const Json&)> walk = [&](const std::string& prefix, const Json& v) {
    if (v.is_object()) {
      for (const auto& [k, child] : v.items()) {
        walk(prefix.empty() ? k : prefix + "." + k, child);
      }
    } else if (v.is_array()) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        walk(prefix + "." + std::to_string(k), v[k]);
      }
    } else if (v.is_number_float()) {
      out << prefix << ',' << format_number(v.get<double>()) << '\n';
    } else if (v.is_null()) {
      out << prefix << ",\n";
    } else if (v.is_string()) {
      out << prefix << ',' << v.get<std::string>() << '\n';
    } else {
      out << prefix << ',' << v.dump() << '\n';
    }
  };
  walk("", j);
}

// ---------------------------------------------------------------------------
// Simulation config

struct StudyConfig {
  WorldSpec world;
  std::vector<PerturbationSpec> family = default_study_family();
  StudyOptions options;
};

namespace detail {

inline PerturbationSpec perturbation_from_json(const Json& j) {
  PerturbationSpec spec;
  spec.seed = j.value("seed", std::uint64_t{0});
  for (const auto& op : j.at("ops")) {
    spec.ops.push_back({parse_op_kind(op.at("op").get<std::string>()), op.at("p").get<double>()});
  }
  spec.validate();
  return spec;
}

inline RecallPolicy policy_from_json(const Json& j) {
  auto kind = j.value("kind", std::string("dampened"));
  if (kind == "fixed") {
    return RecallPolicy::fixed(j.value("recall", 0.70));
  }
  if (kind == "dampened") {
    return RecallPolicy::dampened(j.value("positive", 0.60), j.value("negative", 0.80));
  }
  throw ConfigError("unknown recall policy: " + kind);
}

}  // namespace detail

/// Parses a study config. Every key is optional:
/// {"world": {"n_items", "seed", "sizes": {"kind": "uniform", "k"} | {"kind": "zipf", "s", "max"},
///            "weights": {"kind": "unit"} | {"kind": "lognormal", "mu", "sigma"}},
///  "base_noise": {"ops": [{"op", "p"}, ...]},
///  "family": [{"ops": [...], "seed"}, ...],
///  "policy": {"kind": "dampened", "positive", "negative"} | {"kind": "fixed", "recall"}}
[[nodiscard]] inline StudyConfig parse_study_config(const Json& j) {
  StudyConfig cfg;
  try {
    if (j.contains("world")) {
      const auto& w = j.at("world");
      cfg.world.n_items = w.value("n_items", cfg.world.n_items);
      cfg.world.seed = w.value("seed", cfg.world.seed);
      if (w.contains("sizes")) {
        const auto& s = w.at("sizes");
        auto kind = s.at("kind").get<std::string>();
        if (kind == "uniform") {
          cfg.world.sizes = SizeDistribution::uniform(s.at("k").get<std::size_t>());
        } else if (kind == "zipf") {
          cfg.world.sizes = SizeDistribution::zipf(s.at("s").get<double>(), s.at("max").get<std::size_t>());
        } else {
          throw ConfigError("unknown size distribution: " + kind);
        }
      }
      if (w.contains("weights")) {
        const auto& s = w.at("weights");
        auto kind = s.at("kind").get<std::string>();
        if (kind == "unit") {
          cfg.world.weights = WeightDistribution::unit();
        } else if (kind == "lognormal") {
          cfg.world.weights = WeightDistribution::lognormal(s.at("mu").get<double>(), s.at("sigma").get<double>());
        } else {
          throw ConfigError("unknown weight distribution: " + kind);
        }
      }
      cfg.world.validate();
    }
    if (j.contains("base_noise")) {
      cfg.options.base_noise = detail::perturbation_from_json(j.at("base_noise"));
    }
    if (j.contains("family")) {
      cfg.family.clear();
      for (const auto& spec : j.at("family")) {
        cfg.family.push_back(detail::perturbation_from_json(spec));
      }
    }
    if (j.contains("policy")) {
      cfg.options.policy = detail::policy_from_json(j.at("policy"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid study config: ") + e.what());
  }
  return cfg;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_REPORT_HPP
