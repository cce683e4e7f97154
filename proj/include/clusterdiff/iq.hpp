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

#ifndef CLUSTERDIFF_IQ_HPP
#define CLUSTERDIFF_IQ_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <clusterdiff/delta_recall.hpp>
#include <clusterdiff/impact.hpp>
#include <clusterdiff/quality.hpp>

/**
 * \file
 * \brief IQ: how much closer Exp is to Ideal than Base, per unit of distance
 * between Base and Exp.
 */

namespace clusterdiff {

enum class IqMode { exact, approx };

[[nodiscard]] inline const char* to_string(IqMode m) { return m == IqMode::exact ? "exact" : "approx"; }

struct IqResult {
  double jaccard_base_exp = 0.0;
  double jd_improvement = 0.0;
  /// jd_improvement / jaccard_base_exp, clipped to [-1, 1] in approx mode.
  double iq = 0.0;
  /// Value before clipping.
  double iq_unclipped = 0.0;
  IqMode mode = IqMode::exact;
  bool clipped = false;
};

/// Pointwise JD(Base, Ideal) - JD(Exp, Ideal). Zero for unaffected items.
[[nodiscard]] inline std::vector<double> jd_to_ideal_improvements(const ClusteringPair& pair, const Clustering& ideal) {
  const auto& pop = pair.population();
  auto base = jaccard_distances(pop, pair.base(), ideal);
  auto exp = jaccard_distances(pop, pair.exp(), ideal);
  std::vector<double> out(pop.size());
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    out[i] = pair.affected(i) ? base[i] - exp[i] : 0.0;
  }
  return out;
}

/// Lifted JaccardDistance-to-Ideal improvement over the population or the affected items.
[[nodiscard]] inline double jd_to_ideal_improvement(const ClusteringPair& pair, const Clustering& ideal,
                                                    Scope scope = Scope::population) {
  auto values = jd_to_ideal_improvements(pair, ideal);
  if (scope == Scope::population) {
    return lift(pair.population(), values);
  }
  auto affected = affected_items(pair);
  if (affected.items.empty() || !(affected.weight_fraction > 0.0)) {
    throw NoopChangeError();
  }
  return lift(pair.population(), values, affected.items);
}

/// Exact IQ against a known Ideal. Never clipped: the triangle inequality keeps it in [-1, 1].
[[nodiscard]] inline IqResult iq_exact(const ClusteringPair& pair, const Clustering& ideal) {
  if (ideal.size() != pair.size()) {
    throw ValidationError("ideal clustering covers a different population");
  }
  IqResult r;
  r.mode = IqMode::exact;
  r.jaccard_base_exp = jaccard_distance(pair.population(), pair.base(), pair.exp());
  if (!(r.jaccard_base_exp > 0.0)) {
    throw ValidationError("zero diff: Base and Exp are identical");
  }
  r.jd_improvement = jd_to_ideal_improvement(pair, ideal);
  r.iq = r.iq_unclipped = r.jd_improvement / r.jaccard_base_exp;
  return r;
}

/// Approximate JaccardDistance(Base, Ideal) of the typical affected item.
[[nodiscard]] inline double approx_jd_base_ideal(const AffectedDiagram& d) {
  return 1.0 - (d.bad_split + d.good_stable) / (d.w_b + d.good_merge + d.missing);
}

/// Approximate JaccardDistance(Exp, Ideal) of the typical affected item.
[[nodiscard]] inline double approx_jd_exp_ideal(const AffectedDiagram& d) {
  return 1.0 - (d.good_stable + d.good_merge) / (d.w_e + d.bad_split + d.missing);
}

/// IQ from an affected diagram. The denominator is the exact Base/Exp
/// JaccardDistance over the whole population.
[[nodiscard]] inline IqResult iq_approx(const AffectedDiagram& d, double affected_weight_fraction,
                                        double jaccard_base_exp_exact) {
  if (!(jaccard_base_exp_exact > 0.0)) {
    throw ValidationError("zero diff: Base and Exp are identical");
  }
  IqResult r;
  r.mode = IqMode::approx;
  r.jaccard_base_exp = jaccard_base_exp_exact;
  r.jd_improvement = (approx_jd_base_ideal(d) - approx_jd_exp_ideal(d)) * affected_weight_fraction;
  r.iq_unclipped = r.jd_improvement / jaccard_base_exp_exact;
  r.iq = std::clamp(r.iq_unclipped, -1.0, 1.0);
  r.clipped = r.iq != r.iq_unclipped;
  return r;
}

/// IQ of an Exp at (x, y) when Base is at the origin and Ideal at (0, d).
[[nodiscard]] inline std::optional<double> iq_geometry_value(double x, double y, double d) {
  double den = std::sqrt(x * x + (d - y) * (d - y));
  if (den == 0.0) {
    return std::nullopt;
  }
  return (d - std::sqrt(x * x + y * y)) / den;
}

struct GeometrySpec {
  double d = 1.0;
  /// Axis ranges default to [-2d, 2d].
  std::optional<double> x_min, x_max, y_min, y_max;
  std::size_t resolution = 401;
};

struct GeometryCell {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> f;  // undefined at (0, d)
};

/// Row-major grid (y outer, x inner) of f(x, y, d) values.
[[nodiscard]] inline std::vector<GeometryCell> iq_geometry(const GeometrySpec& spec = {}) {
  if (!(spec.d > 0.0) || !std::isfinite(spec.d)) {
    throw ConfigError("d must be positive");
  }
  if (spec.resolution < 2) {
    throw ConfigError("grid resolution must be at least 2");
  }
  double x0 = spec.x_min.value_or(-2.0 * spec.d);
  double x1 = spec.x_max.value_or(2.0 * spec.d);
  double y0 = spec.y_min.value_or(-2.0 * spec.d);
  double y1 = spec.y_max.value_or(2.0 * spec.d);
  if (!(x0 < x1) || !(y0 < y1)) {
    throw ConfigError("grid range is empty");
  }
  auto n = spec.resolution;
  auto at = [n](double lo, double hi, std::size_t k) {
    return k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  };
  std::vector<GeometryCell> grid;
  grid.reserve(n * n);
  for (std::size_t b = 0; b < n; ++b) {
    double y = at(y0, y1, b);
    for (std::size_t a = 0; a < n; ++a) {
      double x = at(x0, x1, a);
      grid.push_back({x, y, iq_geometry_value(x, y, spec.d)});
    }
  }
  return grid;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_IQ_HPP
