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

#ifndef CLUSTERDIFF_IMPACT_HPP
#define CLUSTERDIFF_IMPACT_HPP

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <clusterdiff/core.hpp>

namespace clusterdiff {

/// Weighted mean of a pointwise metric over a subset of items.
[[nodiscard]] inline double lift(const Population& pop, std::span<const double> values, std::span<const ItemIndex> items) {
  double num = 0.0;
  double den = 0.0;
  for (ItemIndex i : items) {
    num += pop.weight(i) * values[i];
    den += pop.weight(i);
  }
  if (!(den > 0.0)) {
    throw ValidationError("cannot lift a metric over a subset of zero weight");
  }
  return num / den;
}

/// Weighted mean of a pointwise metric over the whole population.
[[nodiscard]] inline double lift(const Population& pop, std::span<const double> values) {
  double num = 0.0;
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    num += pop.weight(i) * values[i];
  }
  return num / pop.total_weight();
}

template <class Metric>
[[nodiscard]] double lift_metric(const Population& pop, Metric&& metric, std::span<const ItemIndex> items) {
  double num = 0.0;
  double den = 0.0;
  for (ItemIndex i : items) {
    num += pop.weight(i) * metric(i);
    den += pop.weight(i);
  }
  if (!(den > 0.0)) {
    throw ValidationError("cannot lift a metric over a subset of zero weight");
  }
  return num / den;
}

namespace detail {

// 1 - part/whole, with clusters of zero total weight treated as unchanged.
inline double complement_ratio(double part, double whole) { return whole > 0.0 ? 1.0 - part / whole : 0.0; }

}  // namespace detail

/// Fraction of Base(i)'s weight that no longer shares a cluster with i in Exp.
[[nodiscard]] inline double split_rate(const ClusteringPair& pair, ItemIndex i) {
  return detail::complement_ratio(pair.stable_weight(i), pair.base_weight(i));
}

/// Fraction of Exp(i)'s weight that was not in Base(i).
[[nodiscard]] inline double merge_rate(const ClusteringPair& pair, ItemIndex i) {
  return detail::complement_ratio(pair.stable_weight(i), pair.exp_weight(i));
}

[[nodiscard]] inline double jaccard_distance(const ClusteringPair& pair, ItemIndex i) {
  double inter = pair.stable_weight(i);
  return detail::complement_ratio(inter, pair.base_weight(i) + pair.exp_weight(i) - inter);
}

[[nodiscard]] inline double split_rate(const ClusteringPair& pair, std::string_view id) {
  return split_rate(pair, pair.population().index_of(id));
}
[[nodiscard]] inline double merge_rate(const ClusteringPair& pair, std::string_view id) {
  return merge_rate(pair, pair.population().index_of(id));
}
[[nodiscard]] inline double jaccard_distance(const ClusteringPair& pair, std::string_view id) {
  return jaccard_distance(pair, pair.population().index_of(id));
}

/// Pointwise JaccardDistance between two arbitrary clusterings of `pop`.
[[nodiscard]] inline std::vector<double> jaccard_distances(const Population& pop, const Clustering& c, const Clustering& d) {
  auto wc = cluster_weights(pop, c);
  auto wd = cluster_weights(pop, d);
  std::unordered_map<std::size_t, double> cell;
  auto key = [&](ItemIndex i) { return c.cluster_of(i) * d.cluster_count() + d.cluster_of(i); };
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    cell[key(i)] += pop.weight(i);
  }
  std::vector<double> out(pop.size());
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    double inter = cell[key(i)];
    out[i] = detail::complement_ratio(inter, wc[c.cluster_of(i)] + wd[d.cluster_of(i)] - inter);
  }
  return out;
}

/// Lifted JaccardDistance between two clusterings over the whole population.
[[nodiscard]] inline double jaccard_distance(const Population& pop, const Clustering& c, const Clustering& d) {
  auto jd = jaccard_distances(pop, c, d);
  return lift(pop, jd);
}

struct AffectedItems {
  std::vector<ItemIndex> items;
  double weight_fraction = 0.0;
};

/// Items whose Base and Exp clusters differ as member sets.
[[nodiscard]] inline AffectedItems affected_items(const ClusteringPair& pair) {
  AffectedItems out;
  double w = 0.0;
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    if (pair.affected(i)) {
      out.items.push_back(i);
      w += pair.population().weight(i);
    }
  }
  out.weight_fraction = w / pair.population().total_weight();
  return out;
}

[[nodiscard]] inline double weight_fraction_of_base_cluster(const ClusteringPair& pair, ItemIndex i) {
  double wb = pair.base_weight(i);
  return wb > 0.0 ? pair.population().weight(i) / wb : 1.0;
}

/// weight(i) / weight(Base(i)) lifted over `items`.
[[nodiscard]] inline double weight_fraction_of_base_cluster(const ClusteringPair& pair, std::span<const ItemIndex> items) {
  return lift_metric(
      pair.population(), [&](ItemIndex i) { return weight_fraction_of_base_cluster(pair, i); }, items);
}

/// The exact impact metrics of a clustering change, lifted over the whole population.
struct ImpactMetrics {
  double split_rate = 0.0;
  double merge_rate = 0.0;
  double jaccard_distance = 0.0;
  double affected_weight_fraction = 0.0;
  /// Over the affected items; absent for a noop change.
  std::optional<double> weight_fraction_of_base_cluster;
  std::size_t affected_count = 0;
  std::size_t item_count = 0;

  /// Affected-scope value of a population-scope metric. Throws NoopChangeError for a noop change.
  [[nodiscard]] double affected_scope(double population_value) const {
    if (!(affected_weight_fraction > 0.0)) {
      throw NoopChangeError();
    }
    return population_value / affected_weight_fraction;
  }
  [[nodiscard]] double split_rate_affected() const { return affected_scope(split_rate); }
  [[nodiscard]] double merge_rate_affected() const { return affected_scope(merge_rate); }
  [[nodiscard]] double jaccard_distance_affected() const { return affected_scope(jaccard_distance); }
};

[[nodiscard]] inline ImpactMetrics compute_impact(const ClusteringPair& pair) {
  const auto& pop = pair.population();
  ImpactMetrics m;
  double sr = 0.0;
  double mr = 0.0;
  double jd = 0.0;
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    double w = pop.weight(i);
    sr += w * split_rate(pair, i);
    mr += w * merge_rate(pair, i);
    jd += w * jaccard_distance(pair, i);
  }
  m.split_rate = sr / pop.total_weight();
  m.merge_rate = mr / pop.total_weight();
  m.jaccard_distance = jd / pop.total_weight();
  auto affected = affected_items(pair);
  m.affected_weight_fraction = affected.weight_fraction;
  m.affected_count = affected.items.size();
  m.item_count = pair.size();
  if (!affected.items.empty() && affected.weight_fraction > 0.0) {
    m.weight_fraction_of_base_cluster = weight_fraction_of_base_cluster(pair, affected.items);
  }
  return m;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_IMPACT_HPP
