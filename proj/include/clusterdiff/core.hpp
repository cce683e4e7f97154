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

#ifndef CLUSTERDIFF_CORE_HPP
#define CLUSTERDIFF_CORE_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <clusterdiff/errors.hpp>

/**
 * \file
 * \brief Items, weights, clusterings and the diff view between two clusterings.
 *
 * Items are identified by opaque string ids. A Population keeps them sorted by
 * id, and an item's position in that order is its ItemIndex. Every weight sum in
 * the library iterates items in index order, so results are bit-stable.
 */

namespace clusterdiff {

using ItemIndex = std::size_t;
using ClusterIndex = std::size_t;

/// A finite set of weighted items, sorted by id.
class Population {
 public:
  Population() = default;

  /// Builds a population from (id, weight) entries in any order.
  /// Throws ValidationError on duplicate ids, negative or non-finite weights,
  /// an empty entry list or a non-positive total weight.
  static Population from_entries(std::vector<std::pair<std::string, double>> entries) {
    if (entries.empty()) {
      throw ValidationError("empty population");
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Population pop;
    pop.ids_.reserve(entries.size());
    pop.weights_.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (k > 0 && entries[k].first == entries[k - 1].first) {
        throw ValidationError("duplicate item: " + entries[k].first);
      }
      if (!std::isfinite(entries[k].second) || entries[k].second < 0.0) {
        throw ValidationError("invalid weight for item " + entries[k].first);
      }
      pop.ids_.push_back(std::move(entries[k].first));
      pop.weights_.push_back(entries[k].second);
    }
    for (double w : pop.weights_) {
      pop.total_ += w;
    }
    if (!(pop.total_ > 0.0)) {
      throw ValidationError("population has zero total weight");
    }
    return pop;
  }

  /// Unit-weight population over the given ids.
  static Population unit(const std::vector<std::string>& ids) {
    std::vector<std::pair<std::string, double>> entries;
    entries.reserve(ids.size());
    for (const auto& id : ids) {
      entries.emplace_back(id, 1.0);
    }
    return from_entries(std::move(entries));
  }

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] const std::string& id(ItemIndex i) const { return ids_.at(i); }
  [[nodiscard]] double weight(ItemIndex i) const { return weights_.at(i); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::span<const std::string> ids() const noexcept { return ids_; }
  [[nodiscard]] double total_weight() const noexcept { return total_; }

  [[nodiscard]] std::optional<ItemIndex> find(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == ids_.end() || *it != id) {
      return std::nullopt;
    }
    return static_cast<ItemIndex>(it - ids_.begin());
  }

  [[nodiscard]] ItemIndex index_of(std::string_view id) const {
    if (auto idx = find(id)) {
      return *idx;
    }
    throw LookupError("unknown item: " + std::string(id));
  }

  /// Weight of a set of items, summed in the order given.
  [[nodiscard]] double weight_of(std::span<const ItemIndex> items) const {
    double sum = 0.0;
    for (ItemIndex i : items) {
      sum += weights_[i];
    }
    return sum;
  }

  friend bool operator==(const Population&, const Population&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// A partition of the items 0..n-1 of some population.
///
/// Cluster indices are canonical: clusters are numbered in order of their
/// smallest member. Two Clustering objects therefore compare equal iff they
/// describe the same partition, regardless of the labels they were built from.
class Clustering {
 public:
  Clustering() = default;

  /// Builds a clustering from one arbitrary label per item.
  template <class Label>
  static Clustering from_labels(std::span<const Label> labels) {
    Clustering c;
    c.cluster_of_.resize(labels.size());
    std::unordered_map<Label, ClusterIndex> canonical;
    for (ItemIndex i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = canonical.try_emplace(labels[i], c.members_.size());
      if (inserted) {
        c.members_.emplace_back();
      }
      c.cluster_of_[i] = it->second;
      c.members_[it->second].push_back(i);
    }
    return c;
  }

  template <class Label>
  static Clustering from_labels(const std::vector<Label>& labels) {
    return from_labels(std::span<const Label>(labels));
  }

  /// Builds a clustering from explicit member lists; every item 0..n-1 must appear exactly once.
  static Clustering from_groups(std::size_t n, const std::vector<std::vector<ItemIndex>>& groups) {
    std::vector<std::size_t> labels(n, n);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (ItemIndex i : groups[g]) {
        if (i >= n || labels[i] != n) {
          throw ValidationError("groups do not form a partition");
        }
        labels[i] = g;
      }
    }
    if (std::find(labels.begin(), labels.end(), n) != labels.end()) {
      throw ValidationError("groups do not cover every item");
    }
    return from_labels(labels);
  }

  /// Every item in a cluster of its own.
  static Clustering singletons(std::size_t n) {
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = i;
    }
    return from_labels(labels);
  }

  /// All items in one cluster.
  static Clustering single_cluster(std::size_t n) { return from_labels(std::vector<std::size_t>(n, 0)); }

  [[nodiscard]] std::size_t size() const noexcept { return cluster_of_.size(); }
  [[nodiscard]] std::size_t cluster_count() const noexcept { return members_.size(); }
  [[nodiscard]] ClusterIndex cluster_of(ItemIndex i) const { return cluster_of_.at(i); }
  [[nodiscard]] std::span<const ClusterIndex> assignment() const noexcept { return cluster_of_; }

  /// Members of a cluster, in increasing item order.
  [[nodiscard]] std::span<const ItemIndex> members(ClusterIndex c) const { return members_.at(c); }

  /// Members of the cluster containing item i.
  [[nodiscard]] std::span<const ItemIndex> cluster_members(ItemIndex i) const { return members(cluster_of(i)); }

  [[nodiscard]] bool same_cluster(ItemIndex a, ItemIndex b) const { return cluster_of(a) == cluster_of(b); }

  friend bool operator==(const Clustering& a, const Clustering& b) { return a.cluster_of_ == b.cluster_of_; }

 private:
  std::vector<ClusterIndex> cluster_of_;
  std::vector<std::vector<ItemIndex>> members_;
};

/// Weight of every cluster, summed in item order.
[[nodiscard]] inline std::vector<double> cluster_weights(const Population& pop, const Clustering& c) {
  std::vector<double> w(c.cluster_count(), 0.0);
  for (ItemIndex i = 0; i < c.size(); ++i) {
    w[c.cluster_of(i)] += pop.weight(i);
  }
  return w;
}

/// A clustering together with the weighted population it partitions, as loaded from a file.
struct LabeledClustering {
  Population population;
  Clustering clustering;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view text) {
  // from_chars for double needs the whole token; leading '+' is not accepted by it.
  if (text.empty()) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  return line;
}

inline bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

}  // namespace detail

/// Parses the clustering TSV format: `item_id<TAB>cluster_id[<TAB>weight]`,
/// '#' comment lines and blank lines ignored, weight defaulting to 1.0.
[[nodiscard]] inline LabeledClustering parse_clustering(std::istream& in) {
  std::vector<std::pair<std::string, double>> entries;
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::strip_cr(raw);
    if (detail::skippable(line)) {
      continue;
    }
    auto fields = detail::split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected item_id<TAB>cluster_id[<TAB>weight]", line_no);
    }
    double weight = 1.0;
    if (fields.size() == 3) {
      auto parsed = detail::parse_double(fields[2]);
      if (!parsed || !std::isfinite(*parsed)) {
        throw ParseError("invalid weight '" + std::string(fields[2]) + "'", line_no);
      }
      weight = *parsed;
    }
    if (weight < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative weight");
    }
    std::string id(fields[0]);
    if (!seen.emplace(id, line_no).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate item " + id);
    }
    entries.emplace_back(std::move(id), weight);
    labels.emplace_back(fields[1]);
  }
  if (entries.empty()) {
    throw ValidationError("empty population");
  }

  // Reorder labels into the population's sorted item order.
  std::vector<std::size_t> order(entries.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return entries[a].first < entries[b].first; });
  std::vector<std::string> sorted_labels;
  sorted_labels.reserve(order.size());
  for (std::size_t k : order) {
    sorted_labels.push_back(labels[k]);
  }
  auto pop = Population::from_entries(std::move(entries));
  return {std::move(pop), Clustering::from_labels(sorted_labels)};
}

[[nodiscard]] inline LabeledClustering parse_clustering(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_clustering(in);
}

[[nodiscard]] inline LabeledClustering load_clustering(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open clustering file: " + path);
  }
  return parse_clustering(in);
}

/// Writes a clustering in the TSV format, one row per item in id order. Cluster ids are `c<index>`.
inline void write_clustering(std::ostream& out, const Population& pop, const Clustering& c) {
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    out << pop.id(i) << '\t' << 'c' << c.cluster_of(i) << '\t' << pop.weight(i) << '\n';
  }
}

/// Two clusterings of the same weighted population, with the per-item data
/// every diff metric needs precomputed: cluster weights on both sides and the
/// weight of Base(i) ∩ Exp(i).
class ClusteringPair {
 public:
  ClusteringPair(Population population, Clustering base, Clustering exp, std::size_t dropped = 0,
                 std::vector<std::string> warnings = {})
      : population_(std::move(population)),
        base_(std::move(base)),
        exp_(std::move(exp)),
        dropped_(dropped),
        warnings_(std::move(warnings)) {
    if (base_.size() != population_.size() || exp_.size() != population_.size()) {
      throw ValidationError("clusterings and population differ in size");
    }
    base_weight_ = cluster_weights(population_, base_);
    exp_weight_ = cluster_weights(population_, exp_);

    // weight(Base(i) ∩ Exp(i)) depends only on the (base, exp) cluster pair.
    std::unordered_map<std::size_t, double> cell;
    auto key = [this](ItemIndex i) { return base_.cluster_of(i) * exp_.cluster_count() + exp_.cluster_of(i); };
    for (ItemIndex i = 0; i < population_.size(); ++i) {
      cell[key(i)] += population_.weight(i);
    }
    overlap_.resize(population_.size());
    for (ItemIndex i = 0; i < population_.size(); ++i) {
      overlap_[i] = cell[key(i)];
    }
  }

  [[nodiscard]] const Population& population() const noexcept { return population_; }
  [[nodiscard]] const Clustering& base() const noexcept { return base_; }
  [[nodiscard]] const Clustering& exp() const noexcept { return exp_; }
  [[nodiscard]] std::size_t size() const noexcept { return population_.size(); }

  /// Number of items present in only one of the input clusterings.
  [[nodiscard]] std::size_t dropped() const noexcept { return dropped_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  [[nodiscard]] double base_weight(ItemIndex i) const { return base_weight_[base_.cluster_of(i)]; }
  [[nodiscard]] double exp_weight(ItemIndex i) const { return exp_weight_[exp_.cluster_of(i)]; }
  [[nodiscard]] double stable_weight(ItemIndex i) const { return overlap_.at(i); }

  /// Base(i) and Exp(i) differ as member sets.
  [[nodiscard]] bool affected(ItemIndex i) const {
    // i is in both clusters, so the sets are equal iff both have the overlap's size.
    auto ob = base_.cluster_members(i).size();
    auto oe = exp_.cluster_members(i).size();
    if (ob != oe) {
      return true;
    }
    auto b = base_.cluster_members(i);
    auto e = exp_.cluster_members(i);
    return !std::equal(b.begin(), b.end(), e.begin());
  }

 private:
  Population population_;
  Clustering base_;
  Clustering exp_;
  std::size_t dropped_;
  std::vector<std::string> warnings_;
  std::vector<double> base_weight_;
  std::vector<double> exp_weight_;
  std::vector<double> overlap_;
};

/// Re-expresses a labeled clustering over `pop`, dropping items outside it.
/// Throws ValidationError if an item of `pop` is missing from the clustering.
[[nodiscard]] inline Clustering align_to(const LabeledClustering& lc, const Population& pop) {
  std::vector<ClusterIndex> labels(pop.size());
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    auto src = lc.population.find(pop.id(i));
    if (!src) {
      throw ValidationError("item " + pop.id(i) + " missing from clustering");
    }
    labels[i] = lc.clustering.cluster_of(*src);
  }
  return Clustering::from_labels(labels);
}

/// Restricts two clusterings to the items they have in common. Weights come from
/// the Base side; disagreements are recorded as warnings.
[[nodiscard]] inline ClusteringPair restrict_to_common(const LabeledClustering& base, const LabeledClustering& exp) {
  std::vector<std::pair<std::string, double>> common;
  std::vector<std::string> warnings;
  std::size_t dropped = 0;
  const auto& bp = base.population;
  const auto& ep = exp.population;
  std::size_t b = 0;
  std::size_t e = 0;
  while (b < bp.size() || e < ep.size()) {
    if (e == ep.size() || (b < bp.size() && bp.id(b) < ep.id(e))) {
      ++dropped;
      ++b;
    } else if (b == bp.size() || ep.id(e) < bp.id(b)) {
      ++dropped;
      ++e;
    } else {
      if (bp.weight(b) != ep.weight(e)) {
        std::ostringstream msg;
        msg << "weight mismatch for item " << bp.id(b) << ": base " << bp.weight(b) << ", exp " << ep.weight(e)
            << "; using base";
        warnings.push_back(msg.str());
      }
      common.emplace_back(bp.id(b), bp.weight(b));
      ++b;
      ++e;
    }
  }
  if (common.empty()) {
    throw ValidationError("no common items");
  }
  auto pop = Population::from_entries(std::move(common));
  auto base_c = align_to(base, pop);
  auto exp_c = align_to(exp, pop);
  return ClusteringPair(std::move(pop), std::move(base_c), std::move(exp_c), dropped, std::move(warnings));
}

/// The seven region weights of the Base(i) / Exp(i) / Ideal(i) Venn diagram of one item.
struct VennWeights {
  double good_stable = 0.0;
  double bad_stable = 0.0;
  double good_split = 0.0;
  double bad_split = 0.0;
  double good_merge = 0.0;
  double bad_merge = 0.0;
  double missing = 0.0;

  [[nodiscard]] double base_weight() const noexcept { return good_stable + bad_stable + good_split + bad_split; }
  [[nodiscard]] double exp_weight() const noexcept { return good_stable + bad_stable + good_merge + bad_merge; }
  [[nodiscard]] double ideal_weight() const noexcept { return good_stable + bad_split + good_merge + missing; }
  [[nodiscard]] double stable_weight() const noexcept { return good_stable + bad_stable; }
};

/// Exact Venn region weights for item i, by enumerating Base(i) ∪ Exp(i) ∪ Ideal(i).
/// `ideal` must partition the pair's population.
[[nodiscard]] inline VennWeights venn_weights(const ClusteringPair& pair, const Clustering& ideal, ItemIndex i) {
  if (i >= pair.size()) {
    throw LookupError("item index out of range");
  }
  if (ideal.size() != pair.size()) {
    throw ValidationError("ideal clustering is over a different population");
  }
  const auto& pop = pair.population();
  auto b = pair.base().cluster_members(i);
  auto e = pair.exp().cluster_members(i);
  auto d = ideal.cluster_members(i);

  // Walk the union of three sorted member lists in item order.
  VennWeights v;
  std::size_t ib = 0;
  std::size_t ie = 0;
  std::size_t id = 0;
  constexpr ItemIndex kEnd = static_cast<ItemIndex>(-1);
  while (ib < b.size() || ie < e.size() || id < d.size()) {
    ItemIndex next = std::min({ib < b.size() ? b[ib] : kEnd, ie < e.size() ? e[ie] : kEnd, id < d.size() ? d[id] : kEnd});
    bool in_b = ib < b.size() && b[ib] == next;
    bool in_e = ie < e.size() && e[ie] == next;
    bool in_d = id < d.size() && d[id] == next;
    double w = pop.weight(next);
    if (in_b && in_e) {
      (in_d ? v.good_stable : v.bad_stable) += w;
    } else if (in_b) {
      (in_d ? v.bad_split : v.good_split) += w;
    } else if (in_e) {
      (in_d ? v.good_merge : v.bad_merge) += w;
    } else {
      v.missing += w;
    }
    ib += in_b;
    ie += in_e;
    id += in_d;
  }
  return v;
}

[[nodiscard]] inline VennWeights venn_weights(const ClusteringPair& pair, const Clustering& ideal, std::string_view id) {
  return venn_weights(pair, ideal, pair.population().index_of(id));
}

/// Venn weights of every item in linear time, from the weights of the pairwise
/// and three-way cluster intersections. Roundoff can leave a region a few ulps
/// below zero; such values are clamped to 0.
[[nodiscard]] inline std::vector<VennWeights> venn_table(const ClusteringPair& pair, const Clustering& ideal) {
  if (ideal.size() != pair.size()) {
    throw ValidationError("ideal clustering is over a different population");
  }
  const auto& pop = pair.population();
  const auto& base = pair.base();
  const auto& exp = pair.exp();
  const std::size_t ne = exp.cluster_count();
  const std::size_t nd = ideal.cluster_count();

  auto ideal_w = cluster_weights(pop, ideal);
  std::unordered_map<std::size_t, double> bd;
  std::unordered_map<std::size_t, double> ed;
  std::unordered_map<std::size_t, double> bed;
  auto key2 = [](std::size_t x, std::size_t y, std::size_t ny) { return x * ny + y; };
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    double w = pop.weight(i);
    auto cb = base.cluster_of(i);
    auto ce = exp.cluster_of(i);
    auto cd = ideal.cluster_of(i);
    bd[key2(cb, cd, nd)] += w;
    ed[key2(ce, cd, nd)] += w;
    // (cb, ce) already identifies a stable cell; pair it with cd.
    bed[key2(key2(cb, ce, ne), cd, nd)] += w;
  }

  std::vector<VennWeights> table(pop.size());
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    auto cb = base.cluster_of(i);
    auto ce = exp.cluster_of(i);
    auto cd = ideal.cluster_of(i);
    double w_b = pair.base_weight(i);
    double w_e = pair.exp_weight(i);
    double w_d = ideal_w[cd];
    double w_be = pair.stable_weight(i);
    double w_bd = bd[key2(cb, cd, nd)];
    double w_ed = ed[key2(ce, cd, nd)];
    double w_bed = bed[key2(key2(cb, ce, ne), cd, nd)];
    auto nonneg = [](double x) { return x < 0.0 ? 0.0 : x; };
    VennWeights v;
    v.good_stable = w_bed;
    v.bad_stable = nonneg(w_be - w_bed);
    v.bad_split = nonneg(w_bd - w_bed);
    v.good_split = nonneg(w_b - w_be - v.bad_split);
    v.good_merge = nonneg(w_ed - w_bed);
    v.bad_merge = nonneg(w_e - w_be - v.good_merge);
    v.missing = nonneg(w_d - w_bd - w_ed + w_bed);
    table[i] = v;
  }
  return table;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_CORE_HPP
