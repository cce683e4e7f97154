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

#ifndef CLUSTERDIFF_DELTA_RECALL_HPP
#define CLUSTERDIFF_DELTA_RECALL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <clusterdiff/impact.hpp>
#include <clusterdiff/quality.hpp>

/**
 * \file
 * \brief ΔRecall reasoning parametric in the baseline recall (and precision) of
 * the changed items.
 *
 * For a single item the reasoning is exact: given Recall_Base(i) and either
 * ΔPrecision(i) (variant 1) or Precision_Base(i) (variant 2), the item's Venn
 * diagram is fully determined. For a whole population the same reasoning is
 * applied to one diagram describing a "typical" affected item, built from the
 * affected-scope quality rates, and then scaled back by the affected weight
 * fraction. That second step is an approximation.
 */

namespace clusterdiff {

enum class Variant { v1 = 1, v2 = 2 };
enum class ClipPolicy { clip, abort };

[[nodiscard]] inline int to_int(Variant v) { return static_cast<int>(v); }
[[nodiscard]] inline const char* to_string(ClipPolicy p) { return p == ClipPolicy::clip ? "clip" : "abort"; }

namespace detail {

// Relative slack for comparisons against closed-form bounds.
inline constexpr double kBoundSlack = 1e-12;

inline bool within_upper(double x, double bound) { return x <= bound + kBoundSlack * std::max(1.0, std::abs(bound)); }
inline bool within_lower(double x, double bound) { return x >= bound - kBoundSlack * std::max(1.0, std::abs(bound)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-item operations

/// Largest baseline recall compatible with MissingWeight >= 0.
[[nodiscard]] inline double recall_bound(double bad_split, double good_stable, double good_merge) {
  double kept = bad_split + good_stable;
  return kept / (kept + good_merge);
}

struct IdealWeight {
  double ideal_weight = 0.0;
  double missing = 0.0;
};

/// weight(Ideal(i)) and MissingWeight implied by an assumed baseline recall.
/// Throws InfeasibleParameterError when recall_base is outside (0, bound].
[[nodiscard]] inline IdealWeight ideal_weight_from_recall(double bad_split, double good_stable, double good_merge,
                                                          double recall_base) {
  if (!(good_stable > 0.0)) {
    throw ValidationError("good stable weight must be positive");
  }
  double bound = recall_bound(bad_split, good_stable, good_merge);
  if (!(recall_base > 0.0) || !detail::within_upper(recall_base, bound)) {
    throw InfeasibleParameterError("baseline recall is implausible", 0.0, bound);
  }
  IdealWeight out;
  out.ideal_weight = (bad_split + good_stable) / recall_base;
  out.missing = std::max(0.0, out.ideal_weight - bad_split - good_stable - good_merge);
  return out;
}

/// Variant 1: GoodStableWeight from ΔPrecision. Needs split_rate != merge_rate.
/// The result is not clipped.
[[nodiscard]] inline double good_stable_weight_v1(double delta_precision, double good_merge_rate, double bad_split_rate,
                                                  double split_rate, double merge_rate, double w_base) {
  double denom = split_rate - merge_rate;
  if (denom == 0.0) {
    throw VariantInapplicableError("variant 1 needs SplitRate != MergeRate");
  }
  return (delta_precision - good_merge_rate + bad_split_rate) * (1.0 - split_rate) * w_base / denom;
}

struct PrecisionBounds {
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] bool contains(double p) const { return detail::within_lower(p, lower) && detail::within_upper(p, upper); }
};

/// Range of baseline precision values for which the variant-2 diagram has
/// GoodStableWeight >= min_fraction * w_base and non-negative regions.
[[nodiscard]] inline PrecisionBounds precision_bounds_v2(double min_fraction, double bad_split_rate,
                                                         double good_split_rate) {
  return {min_fraction + bad_split_rate, 1.0 - good_split_rate};
}

/// Variant 2: GoodStableWeight from an assumed baseline precision.
/// `min_fraction` is weight(i)/weight(Base(i)) for one item, or its lifted
/// counterpart for the aggregate diagram.
[[nodiscard]] inline double good_stable_weight_v2(double precision_base, double bad_split_rate, double good_split_rate,
                                                  double w_base, double min_fraction) {
  auto bounds = precision_bounds_v2(min_fraction, bad_split_rate, good_split_rate);
  if (!bounds.contains(precision_base)) {
    throw InfeasibleParameterError("baseline precision is implausible", bounds.lower, bounds.upper);
  }
  return w_base * (precision_base - bad_split_rate);
}

/// Quantities the per-item reasoning may use: the quality rates of one item and
/// cluster weights that need no judgement.
struct ItemReasoningInputs {
  double item_weight = 0.0;
  double base_weight = 0.0;
  double exp_weight = 0.0;
  double good_split_rate = 0.0;
  double bad_split_rate = 0.0;
  double good_merge_rate = 0.0;
  double bad_merge_rate = 0.0;
  std::optional<double> delta_precision;

  [[nodiscard]] double split_rate() const { return good_split_rate + bad_split_rate; }
  [[nodiscard]] double merge_rate() const { return good_merge_rate + bad_merge_rate; }

  /// Inputs of one item, read off its exact quality.
  static ItemReasoningInputs from(const ItemQuality& q) {
    ItemReasoningInputs in;
    in.item_weight = q.item_weight;
    in.base_weight = q.base_weight();
    in.exp_weight = q.exp_weight();
    in.good_split_rate = q.good_split_rate();
    in.bad_split_rate = q.bad_split_rate();
    in.good_merge_rate = q.good_merge_rate();
    in.bad_merge_rate = q.bad_merge_rate();
    in.delta_precision = q.delta_precision();
    return in;
  }
};

struct ItemReasoning {
  Variant variant = Variant::v2;
  double good_stable = 0.0;
  double ideal_weight = 0.0;
  double missing = 0.0;
  double recall_base = 0.0;
  double recall_exp = 0.0;
  double delta_recall = 0.0;
  double precision_base = 0.0;
  double precision_exp = 0.0;
};

/// Exact per-item ΔRecall as a function of Recall_Base(i), with GoodStableWeight
/// from variant 1 (ΔPrecision) or variant 2 (`precision_base`).
[[nodiscard]] inline ItemReasoning per_item_delta_recall(const ItemReasoningInputs& in, Variant variant,
                                                         double recall_base,
                                                         std::optional<double> precision_base = std::nullopt) {
  ItemReasoning out;
  out.variant = variant;
  if (variant == Variant::v1) {
    if (!in.delta_precision) {
      throw VariantInapplicableError("variant 1 needs ΔPrecision");
    }
    out.good_stable = good_stable_weight_v1(*in.delta_precision, in.good_merge_rate, in.bad_split_rate, in.split_rate(),
                                            in.merge_rate(), in.base_weight);
  } else {
    if (!precision_base) {
      throw ConfigError("variant 2 needs a baseline precision");
    }
    out.good_stable = good_stable_weight_v2(*precision_base, in.bad_split_rate, in.good_split_rate, in.base_weight,
                                            in.item_weight / in.base_weight);
  }
  double bad_split = in.bad_split_rate * in.base_weight;
  double good_merge = in.good_merge_rate * in.exp_weight;
  auto iw = ideal_weight_from_recall(bad_split, out.good_stable, good_merge, recall_base);
  out.ideal_weight = iw.ideal_weight;
  out.missing = iw.missing;
  out.recall_base = recall_base;
  out.recall_exp = (out.good_stable + good_merge) / (out.good_stable + good_merge + bad_split + out.missing);
  out.delta_recall = out.recall_exp - recall_base;
  out.precision_base = (out.good_stable + bad_split) / in.base_weight;
  out.precision_exp = (out.good_stable + good_merge) / in.exp_weight;
  return out;
}

// ---------------------------------------------------------------------------
// Aggregate reasoning

/// Affected-scope inputs of the aggregate diagram.
struct DiagramInputs {
  double split_rate = 0.0;
  double merge_rate = 0.0;
  QualityRates rates;  // affected scope
  double weight_fraction_of_base_cluster = 0.0;
  double affected_weight_fraction = 0.0;

  /// Collects the affected-scope inputs from exact impact metrics and quality
  /// rates of either scope. Throws NoopChangeError for a noop change.
  static DiagramInputs from(const ImpactMetrics& impact, const QualityRates& rates) {
    if (!(impact.affected_weight_fraction > 0.0) || !impact.weight_fraction_of_base_cluster) {
      throw NoopChangeError();
    }
    DiagramInputs in;
    in.affected_weight_fraction = impact.affected_weight_fraction;
    in.split_rate = impact.split_rate_affected();
    in.merge_rate = impact.merge_rate_affected();
    in.rates = rates.to_affected(impact.affected_weight_fraction);
    in.weight_fraction_of_base_cluster = *impact.weight_fraction_of_base_cluster;
    return in;
  }
};

struct AssumedQuality {
  double recall_base = 0.7;
  std::optional<double> precision_base;
};

/// The Venn diagram of a typical affected item, scaled so that weight(B) = 1.
struct AffectedDiagram {
  double w_b = 1.0;
  double w_e = 0.0;
  double stable_weight = 0.0;
  double good_stable = 0.0;
  double bad_stable = 0.0;
  double good_split = 0.0;
  double bad_split = 0.0;
  double good_merge = 0.0;
  double bad_merge = 0.0;
  double missing = 0.0;
  double min_good_stable = 0.0;
  /// GoodStableWeight before clipping.
  double good_stable_unclipped = 0.0;
  /// GoodStableWeight was clipped into [min_good_stable, stable_weight].
  bool clipped = false;
  /// The assumed recall implied negative MissingWeight, which was set to 0.
  bool missing_clipped = false;
  Variant variant = Variant::v2;
  double assumed_recall_base = 0.0;
  std::optional<double> assumed_precision_base;

  [[nodiscard]] double recall_bound() const { return clusterdiff::recall_bound(bad_split, good_stable, good_merge); }
  [[nodiscard]] bool any_clipping() const { return clipped || missing_clipped; }
};

namespace detail {

inline void check_recall(double r) {
  if (!(r > 0.0) || r > 1.0) {
    throw ConfigError("baseline recall must lie in (0, 1]");
  }
}

struct DiagramFrame {
  double w_b = 1.0;
  double w_e = 0.0;
  double stable = 0.0;
  double good_split = 0.0;
  double bad_split = 0.0;
  double good_merge = 0.0;
  double bad_merge = 0.0;
  double min_good_stable = 0.0;
};

// The parts of the diagram that do not depend on any assumption.
inline DiagramFrame frame(const DiagramInputs& in) {
  if (!(in.merge_rate < 1.0)) {
    throw ValidationError("affected merge rate must be below 1");
  }
  DiagramFrame f;
  f.stable = f.w_b * (1.0 - in.split_rate);
  double merged_in = in.merge_rate * f.stable / (1.0 - in.merge_rate);
  f.w_e = f.stable + merged_in;
  f.good_split = in.rates.good_split_rate * f.w_b;
  f.bad_split = in.rates.bad_split_rate * f.w_b;
  f.good_merge = in.rates.good_merge_rate * f.w_e;
  f.bad_merge = in.rates.bad_merge_rate * f.w_e;
  f.min_good_stable = in.weight_fraction_of_base_cluster * f.w_b;
  return f;
}

}  // namespace detail

/// Builds the typical-affected-item diagram.
///
/// Variant 1 derives GoodStableWeight from ΔPrecision(affected); variant 2 from
/// the assumed baseline precision. The value is clipped to
/// [MinGoodStableWeight, StableWeight] (ClipPolicy::clip, flagged) or rejected
/// with InfeasibleParameterError (ClipPolicy::abort). Likewise a recall above the
/// plausibility bound yields MissingWeight 0 with a flag, or an error.
[[nodiscard]] inline AffectedDiagram build_affected_diagram(const DiagramInputs& in, Variant variant,
                                                            const AssumedQuality& assumed,
                                                            ClipPolicy policy = ClipPolicy::clip) {
  detail::check_recall(assumed.recall_base);
  auto f = detail::frame(in);
  AffectedDiagram d;
  d.w_b = f.w_b;
  d.w_e = f.w_e;
  d.stable_weight = f.stable;
  d.good_split = f.good_split;
  d.bad_split = f.bad_split;
  d.good_merge = f.good_merge;
  d.bad_merge = f.bad_merge;
  d.min_good_stable = f.min_good_stable;
  d.variant = variant;
  d.assumed_recall_base = assumed.recall_base;
  d.assumed_precision_base = assumed.precision_base;

  double gsw = 0.0;
  if (variant == Variant::v1) {
    if (!in.rates.delta_precision) {
      throw VariantInapplicableError("variant 1 needs ΔPrecision of the affected items");
    }
    gsw = good_stable_weight_v1(*in.rates.delta_precision, in.rates.good_merge_rate, in.rates.bad_split_rate,
                                in.split_rate, in.merge_rate, d.w_b);
  } else {
    if (!assumed.precision_base) {
      throw ConfigError("variant 2 needs an assumed baseline precision");
    }
    auto bounds = precision_bounds_v2(in.weight_fraction_of_base_cluster, in.rates.bad_split_rate,
                                      in.rates.good_split_rate);
    if (policy == ClipPolicy::abort && !bounds.contains(*assumed.precision_base)) {
      throw InfeasibleParameterError("baseline precision is implausible", bounds.lower, bounds.upper);
    }
    gsw = d.w_b * (*assumed.precision_base - in.rates.bad_split_rate);
  }
  d.good_stable_unclipped = gsw;

  double lo = d.min_good_stable;
  double hi = d.stable_weight;
  bool out_of_range = !detail::within_lower(gsw, lo) || !detail::within_upper(gsw, hi) || lo > hi;
  if (out_of_range) {
    if (policy == ClipPolicy::abort) {
      throw InfeasibleParameterError("good stable weight out of range", lo, hi);
    }
    d.clipped = true;
  }
  d.good_stable = std::min(std::max(gsw, lo), hi);
  d.bad_stable = std::max(0.0, d.stable_weight - d.good_stable);

  double kept = d.bad_split + d.good_stable;
  double raw_missing = kept / assumed.recall_base - kept - d.good_merge;
  if (raw_missing < 0.0 && !detail::within_upper(assumed.recall_base, d.recall_bound())) {
    if (policy == ClipPolicy::abort) {
      throw InfeasibleParameterError("baseline recall is implausible", 0.0, d.recall_bound());
    }
    d.missing_clipped = true;
  }
  d.missing = std::max(raw_missing, 0.0);
  return d;
}

/// Approximate overall effect of the change read off an affected diagram.
struct OverallEstimate {
  double delta_recall_T = 0.0;
  double delta_precision_T = 0.0;
  double delta_recall_affected = 0.0;
  double delta_precision_affected = 0.0;
  double recall_exp_affected = 0.0;
  double precision_exp_affected = 0.0;
  double precision_base_affected = 0.0;
};

[[nodiscard]] inline OverallEstimate overall_delta_recall(const AffectedDiagram& d, double affected_weight_fraction) {
  OverallEstimate out;
  double gained = d.good_stable + d.good_merge;
  out.recall_exp_affected = gained / (gained + d.bad_split + d.missing);
  out.precision_exp_affected = gained / d.w_e;
  out.precision_base_affected = (d.good_stable + d.bad_split) / d.w_b;
  out.delta_recall_affected = out.recall_exp_affected - d.assumed_recall_base;
  out.delta_precision_affected = out.precision_exp_affected - out.precision_base_affected;
  out.delta_recall_T = out.delta_recall_affected * affected_weight_fraction;
  out.delta_precision_T = out.delta_precision_affected * affected_weight_fraction;
  return out;
}

/// Back-of-the-envelope JaccardDistance(Base, Exp) from the diagram's cluster weights.
[[nodiscard]] inline double jd_back_of_envelope(const AffectedDiagram& d, double affected_weight_fraction) {
  return (1.0 - d.stable_weight / (d.w_b + d.w_e - d.stable_weight)) * affected_weight_fraction;
}

/// How to pick Recall_Base(AffectedItems) when no better information exists.
struct RecallPolicy {
  enum class Kind { fixed, dampened };
  Kind kind = Kind::dampened;
  double fixed_value = 0.70;
  double positive = 0.60;  // assumed for recall-positive changes
  double negative = 0.80;  // assumed otherwise

  static RecallPolicy fixed(double p = 0.70) {
    RecallPolicy r;
    r.kind = Kind::fixed;
    r.fixed_value = p;
    r.validate();
    return r;
  }
  static RecallPolicy dampened(double positive = 0.60, double negative = 0.80) {
    RecallPolicy r;
    r.kind = Kind::dampened;
    r.positive = positive;
    r.negative = negative;
    r.validate();
    return r;
  }

  void validate() const {
    auto ok = [](double p) { return p > 0.0 && p <= 1.0; };
    if (kind == Kind::fixed ? !ok(fixed_value) : (!ok(positive) || !ok(negative))) {
      throw ConfigError("assumed recall must lie in (0, 1]");
    }
  }

  [[nodiscard]] std::string name() const { return kind == Kind::fixed ? "fixed" : "dampened"; }
};

/// A change is recall-positive when the diagram gains more good-merge weight than it loses bad-split weight.
[[nodiscard]] inline bool recall_positive(double bad_split_weight, double good_merge_weight) {
  return bad_split_weight < good_merge_weight;
}

[[nodiscard]] inline double assumed_recall(const RecallPolicy& policy, double bad_split_weight, double good_merge_weight) {
  policy.validate();
  if (policy.kind == RecallPolicy::Kind::fixed) {
    return policy.fixed_value;
  }
  return recall_positive(bad_split_weight, good_merge_weight) ? policy.positive : policy.negative;
}

/// Applies the policy to the diagram weights implied by `in`.
[[nodiscard]] inline double assumed_recall(const RecallPolicy& policy, const DiagramInputs& in) {
  auto f = detail::frame(in);
  return assumed_recall(policy, f.bad_split, f.good_merge);
}

/// One complete point estimate: diagram, overall values and the assumptions behind them.
struct DeltaRecallPoint {
  AffectedDiagram diagram;
  OverallEstimate overall;
  std::string policy;
  double jd_back_of_envelope = 0.0;
};

[[nodiscard]] inline DeltaRecallPoint delta_recall_point(const DiagramInputs& in, Variant variant,
                                                         const RecallPolicy& policy,
                                                         std::optional<double> precision_base = std::nullopt,
                                                         ClipPolicy clip = ClipPolicy::clip) {
  AssumedQuality assumed{assumed_recall(policy, in), precision_base};
  DeltaRecallPoint p;
  p.diagram = build_affected_diagram(in, variant, assumed, clip);
  p.overall = overall_delta_recall(p.diagram, in.affected_weight_fraction);
  p.policy = policy.name();
  p.jd_back_of_envelope = jd_back_of_envelope(p.diagram, in.affected_weight_fraction);
  return p;
}

// ---------------------------------------------------------------------------
// Curves and heatmaps

struct RecallCurvePoint {
  double recall_base = 0.0;
  double delta_recall_T = 0.0;
};

struct RecallCurve {
  std::vector<RecallCurvePoint> points;
  Variant variant = Variant::v1;
  std::optional<double> precision_base;
  /// Plausibility bound on the baseline recall.
  double domain_max = 0.0;
  /// GoodStableWeight had to be clipped.
  bool clipped = false;
};

struct CurveSpec {
  std::size_t points = 99;
  /// Exclusive lower end of the recall axis.
  double recall_min = 0.01;
};

/// ΔRecall(T) over baseline recall values in (recall_min, bound].
[[nodiscard]] inline RecallCurve emit_recall_curve(const DiagramInputs& in, Variant variant = Variant::v1,
                                                   std::optional<double> precision_base = std::nullopt,
                                                   const CurveSpec& spec = {}) {
  if (spec.points < 2) {
    throw ConfigError("curve needs at least 2 points");
  }
  // The bound does not depend on the recall; probe with a feasible value.
  auto probe = build_affected_diagram(in, variant, {1e-9, precision_base}, ClipPolicy::clip);
  RecallCurve curve;
  curve.variant = variant;
  curve.precision_base = precision_base;
  curve.domain_max = probe.recall_bound();
  curve.clipped = probe.clipped;
  double lo = spec.recall_min < curve.domain_max ? spec.recall_min : 0.0;
  auto n = static_cast<double>(spec.points);
  for (std::size_t k = 1; k <= spec.points; ++k) {
    double r = k == spec.points ? curve.domain_max : lo + (curve.domain_max - lo) * static_cast<double>(k) / n;
    auto d = build_affected_diagram(in, variant, {r, precision_base}, ClipPolicy::clip);
    curve.points.push_back({r, overall_delta_recall(d, in.affected_weight_fraction).delta_recall_T});
  }
  return curve;
}

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 50;
};

struct HeatmapSpec {
  /// Defaults to the variant-2 precision bounds, inclusive.
  std::optional<GridAxis> precision;
  /// Defaults to (0.01, largest recall bound], lower end exclusive.
  std::optional<GridAxis> recall;
  std::size_t n = 50;
};

struct HeatmapCell {
  double precision_base = 0.0;
  double recall_base = 0.0;
  bool feasible = false;
  std::optional<double> delta_recall_T;
  std::optional<double> delta_precision_T;
};

/// Variant-2 ΔRecall(T) and ΔPrecision(T) over a (precision, recall) grid.
/// Row-major: precision outer, recall inner.
struct RecallHeatmap {
  std::vector<HeatmapCell> cells;
  std::size_t precision_points = 0;
  std::size_t recall_points = 0;
  PrecisionBounds precision_bounds;

  [[nodiscard]] const HeatmapCell& at(std::size_t p, std::size_t r) const { return cells.at(p * recall_points + r); }
};

[[nodiscard]] inline RecallHeatmap emit_recall_heatmap(const DiagramInputs& in, const HeatmapSpec& spec = {}) {
  auto bounds = precision_bounds_v2(in.weight_fraction_of_base_cluster, in.rates.bad_split_rate,
                                    in.rates.good_split_rate);
  GridAxis p_axis = spec.precision.value_or(GridAxis{bounds.lower, bounds.upper, spec.n});
  GridAxis r_axis;
  if (spec.recall) {
    r_axis = *spec.recall;
  } else {
    // The recall bound grows with GoodStableWeight, so it peaks at the top precision.
    auto top = build_affected_diagram(in, Variant::v2, {1e-9, std::max(bounds.lower, bounds.upper)}, ClipPolicy::clip);
    double hi = top.recall_bound();
    r_axis = {0.01 < hi ? 0.01 : 0.0, hi, spec.n};
  }
  if (p_axis.n < 2 || r_axis.n < 2) {
    throw ConfigError("heatmap needs at least 2 points per axis");
  }
  RecallHeatmap map;
  map.precision_points = p_axis.n;
  map.recall_points = r_axis.n;
  map.precision_bounds = bounds;
  map.cells.reserve(p_axis.n * r_axis.n);
  for (std::size_t a = 0; a < p_axis.n; ++a) {
    double p = a + 1 == p_axis.n ? p_axis.hi
                                 : p_axis.lo + (p_axis.hi - p_axis.lo) * static_cast<double>(a) /
                                                   static_cast<double>(p_axis.n - 1);
    for (std::size_t b = 1; b <= r_axis.n; ++b) {
      double r = b == r_axis.n ? r_axis.hi
                               : r_axis.lo + (r_axis.hi - r_axis.lo) * static_cast<double>(b) /
                                                 static_cast<double>(r_axis.n);
      HeatmapCell cell{p, r, false, std::nullopt, std::nullopt};
      if (r > 0.0 && r <= 1.0 && bounds.contains(p)) {
        try {
          auto d = build_affected_diagram(in, Variant::v2, {r, p}, ClipPolicy::abort);
          auto o = overall_delta_recall(d, in.affected_weight_fraction);
          cell.feasible = true;
          cell.delta_recall_T = o.delta_recall_T;
          cell.delta_precision_T = o.delta_precision_T;
        } catch (const InfeasibleParameterError&) {
        }
      }
      map.cells.push_back(cell);
    }
  }
  return map;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_DELTA_RECALL_HPP
