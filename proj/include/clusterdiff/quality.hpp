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

#ifndef CLUSTERDIFF_QUALITY_HPP
#define CLUSTERDIFF_QUALITY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <clusterdiff/core.hpp>
#include <clusterdiff/impact.hpp>

/**
 * \file
 * \brief Quality metrics of a clustering change: exact against a known ideal
 * clustering, or estimated from weighted samples of item pairs and a judge.
 *
 * Every sampled quantity here is a sum of the form
 *
 *     S = sum over pairs (i, j) of u_ij * l_ij * 1(i ≡ j)
 *
 * with known non-negative weights u_ij and signs l_ij. A PairSample either
 * enumerates all pairs (exhaustive mode, S is computed exactly) or draws pairs
 * with replacement proportionally to u_ij, in which case
 * S ≈ total_u * mean(l_ij * 1(i ≡ j)).
 */

namespace clusterdiff {

// ---------------------------------------------------------------------------
// Judges

/// Answers whether two items are truly equivalent.
class Judge {
 public:
  virtual ~Judge() = default;

  /// Verdict for a pair of distinct items, or nullopt when the judge has none.
  [[nodiscard]] virtual std::optional<bool> lookup(ItemIndex a, ItemIndex b) const = 0;

  /// The ideal clustering behind the verdicts, when the judge is an oracle.
  [[nodiscard]] virtual const Clustering* ideal() const noexcept { return nullptr; }

  /// Whether lookup() may be called from several threads at once.
  [[nodiscard]] virtual bool concurrency_safe() const noexcept { return false; }

  /// Reflexive and symmetric wrapper around lookup().
  [[nodiscard]] std::optional<bool> verdict(ItemIndex a, ItemIndex b) const {
    if (a == b) {
      return true;
    }
    return a < b ? lookup(a, b) : lookup(b, a);
  }
};

/// Verdicts from a known ideal clustering. Transitive by construction.
class IdealJudge final : public Judge {
 public:
  explicit IdealJudge(Clustering ideal) : ideal_(std::move(ideal)) {}

  [[nodiscard]] std::optional<bool> lookup(ItemIndex a, ItemIndex b) const override {
    return ideal_.same_cluster(a, b);
  }
  [[nodiscard]] const Clustering* ideal() const noexcept override { return &ideal_; }
  [[nodiscard]] bool concurrency_safe() const noexcept override { return true; }

 private:
  Clustering ideal_;
};

/// A judge with no verdicts at all: every non-trivial question is unjudged.
class FailingJudge final : public Judge {
 public:
  [[nodiscard]] std::optional<bool> lookup(ItemIndex, ItemIndex) const override { return std::nullopt; }
  [[nodiscard]] bool concurrency_safe() const noexcept override { return true; }
};

/// Verdicts read from a TSV file: `item_a<TAB>item_b<TAB>0|1`.
///
/// Rows naming items outside the population are skipped and counted.
class FileJudge final : public Judge {
 public:
  FileJudge(std::istream& in, const Population& pop) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto line = detail::strip_cr(raw);
      if (detail::skippable(line)) {
        continue;
      }
      auto fields = detail::split_tabs(line);
      if (fields.size() != 3 || (fields[2] != "0" && fields[2] != "1")) {
        throw ParseError("expected item_a<TAB>item_b<TAB>0|1", line_no);
      }
      auto a = pop.find(fields[0]);
      auto b = pop.find(fields[1]);
      if (!a || !b) {
        ++skipped_;
        continue;
      }
      bool equivalent = fields[2] == "1";
      if (*a == *b) {
        if (!equivalent) {
          throw ValidationError("line " + std::to_string(line_no) + ": item judged not equivalent to itself");
        }
        continue;
      }
      auto key = std::minmax(*a, *b);
      auto [it, inserted] = verdicts_.emplace(std::pair(key.first, key.second), equivalent);
      if (!inserted && it->second != equivalent) {
        throw ValidationError("line " + std::to_string(line_no) + ": conflicting verdicts for " +
                              std::string(fields[0]) + " / " + std::string(fields[1]));
      }
    }
  }

  static FileJudge load(const std::string& path, const Population& pop) {
    std::ifstream in(path);
    if (!in) {
      throw ValidationError("cannot open judgement file: " + path);
    }
    return FileJudge(in, pop);
  }

  [[nodiscard]] std::optional<bool> lookup(ItemIndex a, ItemIndex b) const override {
    auto it = verdicts_.find({a, b});
    if (it == verdicts_.end()) {
      return std::nullopt;
    }
    return it->second;
  }
  [[nodiscard]] bool concurrency_safe() const noexcept override { return true; }

  [[nodiscard]] std::size_t size() const noexcept { return verdicts_.size(); }
  [[nodiscard]] std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::map<std::pair<ItemIndex, ItemIndex>, bool> verdicts_;
  std::size_t skipped_ = 0;
};

// ---------------------------------------------------------------------------
// Exact quality against a known ideal clustering

namespace detail {

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace detail

/// Per-item quality derived from the item's Venn diagram.
struct ItemQuality {
  VennWeights venn;
  double item_weight = 0.0;

  [[nodiscard]] double base_weight() const { return venn.base_weight(); }
  [[nodiscard]] double exp_weight() const { return venn.exp_weight(); }
  [[nodiscard]] double ideal_weight() const { return venn.ideal_weight(); }

  [[nodiscard]] double split_rate() const { return detail::safe_ratio(venn.good_split + venn.bad_split, base_weight()); }
  [[nodiscard]] double merge_rate() const { return detail::safe_ratio(venn.good_merge + venn.bad_merge, exp_weight()); }
  [[nodiscard]] double good_split_rate() const { return detail::safe_ratio(venn.good_split, base_weight()); }
  [[nodiscard]] double bad_split_rate() const { return detail::safe_ratio(venn.bad_split, base_weight()); }
  [[nodiscard]] double good_merge_rate() const { return detail::safe_ratio(venn.good_merge, exp_weight()); }
  [[nodiscard]] double bad_merge_rate() const { return detail::safe_ratio(venn.bad_merge, exp_weight()); }

  [[nodiscard]] double precision_base() const {
    return detail::safe_ratio(venn.good_stable + venn.bad_split, base_weight());
  }
  [[nodiscard]] double precision_exp() const {
    return detail::safe_ratio(venn.good_stable + venn.good_merge, exp_weight());
  }
  [[nodiscard]] double recall_base() const {
    return detail::safe_ratio(venn.good_stable + venn.bad_split, ideal_weight());
  }
  [[nodiscard]] double recall_exp() const {
    return detail::safe_ratio(venn.good_stable + venn.good_merge, ideal_weight());
  }
  [[nodiscard]] double delta_precision() const { return precision_exp() - precision_base(); }
  [[nodiscard]] double delta_recall() const {
    return detail::safe_ratio(venn.good_merge - venn.bad_split, ideal_weight());
  }
};

[[nodiscard]] inline ItemQuality item_quality(const ClusteringPair& pair, const Clustering& ideal, ItemIndex i) {
  return {venn_weights(pair, ideal, i), pair.population().weight(i)};
}

enum class Scope { population, affected };

[[nodiscard]] inline const char* to_string(Scope s) { return s == Scope::population ? "population" : "affected"; }

struct QualityRates {
  double good_split_rate = 0.0;
  double bad_split_rate = 0.0;
  double good_merge_rate = 0.0;
  double bad_merge_rate = 0.0;
  std::optional<double> delta_precision;
  /// Only known in exact mode.
  std::optional<double> delta_recall;
  Scope scope = Scope::population;

  [[nodiscard]] double split_rate() const { return good_split_rate + bad_split_rate; }
  [[nodiscard]] double merge_rate() const { return good_merge_rate + bad_merge_rate; }

  /// Rescales population-scope rates to the affected sub-population.
  /// All rates are zero for unaffected items, so the rescaling is exact.
  [[nodiscard]] QualityRates to_affected(double affected_weight_fraction) const {
    if (scope == Scope::affected) {
      return *this;
    }
    if (!(affected_weight_fraction > 0.0)) {
      throw NoopChangeError();
    }
    auto scale = [&](double x) { return x / affected_weight_fraction; };
    QualityRates out;
    out.good_split_rate = scale(good_split_rate);
    out.bad_split_rate = scale(bad_split_rate);
    out.good_merge_rate = scale(good_merge_rate);
    out.bad_merge_rate = scale(bad_merge_rate);
    if (delta_precision) {
      out.delta_precision = scale(*delta_precision);
    }
    if (delta_recall) {
      out.delta_recall = scale(*delta_recall);
    }
    out.scope = Scope::affected;
    return out;
  }
};

/// Exact quality rates against `ideal`, lifted over the population or the affected items.
/// Throws NoopChangeError for the affected scope of a noop change.
[[nodiscard]] inline QualityRates exact_quality(const ClusteringPair& pair, const Clustering& ideal,
                                                Scope scope = Scope::population) {
  auto table = venn_table(pair, ideal);
  const auto& pop = pair.population();
  double gsr = 0.0;
  double bsr = 0.0;
  double gmr = 0.0;
  double bmr = 0.0;
  double dp = 0.0;
  double dr = 0.0;
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    double w = pop.weight(i);
    if (w == 0.0) {
      continue;
    }
    ItemQuality q{table[i], w};
    gsr += w * q.good_split_rate();
    bsr += w * q.bad_split_rate();
    gmr += w * q.good_merge_rate();
    bmr += w * q.bad_merge_rate();
    dp += w * q.delta_precision();
    dr += w * q.delta_recall();
  }
  double total = pop.total_weight();
  QualityRates rates;
  rates.good_split_rate = gsr / total;
  rates.bad_split_rate = bsr / total;
  rates.good_merge_rate = gmr / total;
  rates.bad_merge_rate = bmr / total;
  rates.delta_precision = dp / total;
  rates.delta_recall = dr / total;
  if (scope == Scope::affected) {
    return rates.to_affected(affected_items(pair).weight_fraction);
  }
  return rates;
}

/// weight(Ideal(i)) for every item.
[[nodiscard]] inline std::vector<double> ideal_weights(const Population& pop, const Clustering& ideal) {
  auto cw = cluster_weights(pop, ideal);
  std::vector<double> out(pop.size());
  for (ItemIndex i = 0; i < pop.size(); ++i) {
    out[i] = cw[ideal.cluster_of(i)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair samples

struct SampledPair {
  ItemIndex i = 0;
  ItemIndex j = 0;
  double u = 0.0;
  int l = 1;

  friend bool operator==(const SampledPair&, const SampledPair&) = default;
};

struct PairSample {
  std::vector<SampledPair> pairs;
  /// Sum of u over the full pair universe.
  double total_u = 0.0;
  std::uint64_t rng_seed = 0;
  /// Every pair of the universe is listed exactly once.
  bool exhaustive = false;
};

/// Point estimate with a normal-approximation 95% confidence interval.
/// Exact (exhaustive) values have a zero-width interval.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  bool exact = false;

  [[nodiscard]] bool covers(double x) const { return ci_low <= x && x <= ci_high; }
};

inline constexpr double kZ95 = 1.959963984540054;

namespace detail {

enum class Region { split, merge, symmetric_difference, stable };

inline double region_weight(const ClusteringPair& pair, ItemIndex i, Region region) {
  double wb = pair.base_weight(i);
  double we = pair.exp_weight(i);
  double ws = pair.stable_weight(i);
  switch (region) {
    case Region::split:
      return std::max(0.0, wb - ws);
    case Region::merge:
      return std::max(0.0, we - ws);
    case Region::symmetric_difference:
      return std::max(0.0, wb - ws) + std::max(0.0, we - ws);
    case Region::stable:
      return ws;
  }
  return 0.0;
}

// Calls f(j, l) for each member j of the region around anchor i, in item order
// within Base(i) then Exp(i).
template <class F>
void for_each_in_region(const ClusteringPair& pair, ItemIndex i, Region region, int stable_sign, F&& f) {
  const auto& base = pair.base();
  const auto& exp = pair.exp();
  auto cb = base.cluster_of(i);
  auto ce = exp.cluster_of(i);
  if (region == Region::split || region == Region::symmetric_difference || region == Region::stable) {
    for (ItemIndex j : base.members(cb)) {
      bool stable = exp.cluster_of(j) == ce;
      if (region == Region::stable ? stable : !stable) {
        f(j, region == Region::stable ? stable_sign : -1);
      }
    }
  }
  if (region == Region::merge || region == Region::symmetric_difference) {
    for (ItemIndex j : exp.members(ce)) {
      if (base.cluster_of(j) != cb) {
        f(j, +1);
      }
    }
  }
}

// Pair universe: anchors i with factor a(i) >= 0, partners j in a region around
// i, pair weight u_ij = a(i) * weight(j).
struct Universe {
  Region region = Region::split;
  std::vector<double> anchor_factor;
  std::vector<int> stable_sign;
};

inline PairSample enumerate(const ClusteringPair& pair, const Universe& universe) {
  const auto& pop = pair.population();
  PairSample out;
  out.exhaustive = true;
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    double a = universe.anchor_factor[i];
    if (a == 0.0) {
      continue;
    }
    int sign = universe.stable_sign.empty() ? 1 : universe.stable_sign[i];
    for_each_in_region(pair, i, universe.region, sign, [&](ItemIndex j, int l) {
      double u = a * pop.weight(j);
      if (u > 0.0) {
        out.pairs.push_back({i, j, u, l});
        out.total_u += u;
      }
    });
  }
  return out;
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Two-stage draw with replacement: anchor i proportional to a(i) * weight(region(i)),
// then partner j within the region proportional to weight(j).
inline PairSample draw(const ClusteringPair& pair, const Universe& universe, std::size_t n, std::mt19937_64& rng,
                       std::uint64_t seed) {
  const auto& pop = pair.population();
  PairSample out;
  out.rng_seed = seed;
  std::vector<double> cumulative(pair.size());
  double total = 0.0;
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    total += universe.anchor_factor[i] * region_weight(pair, i, universe.region);
    cumulative[i] = total;
  }
  out.total_u = total;
  if (!(total > 0.0)) {
    return out;
  }
  out.pairs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double target = uniform01(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    ItemIndex i = static_cast<ItemIndex>(it - cumulative.begin());
    if (it == cumulative.end()) {
      // target rounded up to total: take the last anchor with positive mass.
      i = cumulative.size() - 1;
      while (i > 0 && universe.anchor_factor[i] * region_weight(pair, i, universe.region) == 0.0) {
        --i;
      }
    }
    int sign = universe.stable_sign.empty() ? 1 : universe.stable_sign[i];
    double partner_target = uniform01(rng) * region_weight(pair, i, universe.region);
    double acc = 0.0;
    std::optional<SampledPair> chosen;
    std::optional<SampledPair> last_positive;
    for_each_in_region(pair, i, universe.region, sign, [&](ItemIndex j, int l) {
      double w = pop.weight(j);
      if (chosen || w <= 0.0) {
        return;
      }
      acc += w;
      SampledPair p{i, j, universe.anchor_factor[i] * w, l};
      last_positive = p;
      if (partner_target < acc) {
        chosen = p;
      }
    });
    out.pairs.push_back(chosen ? *chosen : *last_positive);
  }
  return out;
}

inline Universe delta_recall_universe(const ClusteringPair& pair, std::span<const double> ideal_w) {
  if (ideal_w.size() != pair.size()) {
    throw ValidationError("ideal weight table has the wrong size");
  }
  const auto& pop = pair.population();
  Universe u;
  u.region = Region::symmetric_difference;
  u.anchor_factor.resize(pair.size());
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    double wi = pop.weight(i);
    if (wi == 0.0 || !pair.affected(i)) {
      continue;
    }
    if (!(ideal_w[i] > 0.0)) {
      throw ValidationError("weight(Ideal(i)) must be positive for affected item " + pop.id(i));
    }
    u.anchor_factor[i] = wi / (pop.total_weight() * ideal_w[i]);
  }
  return u;
}

inline Universe split_universe(const ClusteringPair& pair) {
  const auto& pop = pair.population();
  Universe u;
  u.region = Region::split;
  u.anchor_factor.resize(pair.size());
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    if (pair.base_weight(i) > 0.0) {
      u.anchor_factor[i] = pop.weight(i) / (pop.total_weight() * pair.base_weight(i));
    }
  }
  return u;
}

inline Universe merge_universe(const ClusteringPair& pair) {
  const auto& pop = pair.population();
  Universe u;
  u.region = Region::merge;
  u.anchor_factor.resize(pair.size());
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    if (pair.exp_weight(i) > 0.0) {
      u.anchor_factor[i] = pop.weight(i) / (pop.total_weight() * pair.exp_weight(i));
    }
  }
  return u;
}

// Stable pairs carry the DeltaPrecision term
// sum_{j in Base(i) ∩ Exp(i)} weight(j) 1(i ≡ j) (1/weight(Exp(i)) - 1/weight(Base(i))).
inline Universe stable_universe(const ClusteringPair& pair) {
  const auto& pop = pair.population();
  Universe u;
  u.region = Region::stable;
  u.anchor_factor.resize(pair.size());
  u.stable_sign.assign(pair.size(), 1);
  for (ItemIndex i = 0; i < pair.size(); ++i) {
    double wb = pair.base_weight(i);
    double we = pair.exp_weight(i);
    if (!(wb > 0.0) || !(we > 0.0)) {
      continue;
    }
    double diff = 1.0 / we - 1.0 / wb;
    u.anchor_factor[i] = pop.weight(i) / pop.total_weight() * std::abs(diff);
    u.stable_sign[i] = diff < 0.0 ? -1 : 1;
  }
  return u;
}

inline std::optional<bool> ask(const Judge& judge, ItemIndex i, ItemIndex j) { return judge.verdict(i, j); }

inline bool ask_or_throw(const Judge& judge, const Population& pop, ItemIndex i, ItemIndex j) {
  auto v = judge.verdict(i, j);
  if (!v) {
    throw UnjudgedPairError(pop.id(i), pop.id(j));
  }
  return *v;
}

// Evaluates sum u * l * 1(i ≡ j). Returns nullopt when a verdict is missing and
// `require` is false.
inline std::optional<Estimate> evaluate(const PairSample& sample, const Judge& judge, const Population& pop,
                                        bool require) {
  Estimate est;
  est.n = sample.pairs.size();
  if (sample.exhaustive) {
    double sum = 0.0;
    for (const auto& p : sample.pairs) {
      auto v = require ? std::optional<bool>(ask_or_throw(judge, pop, p.i, p.j)) : ask(judge, p.i, p.j);
      if (!v) {
        return std::nullopt;
      }
      if (*v) {
        sum += p.u * p.l;
      }
    }
    est.value = est.ci_low = est.ci_high = sum;
    est.exact = true;
    return est;
  }
  if (sample.pairs.empty()) {
    if (sample.total_u == 0.0) {
      est.exact = true;
      return est;
    }
    throw ConfigError("empty sample");
  }
  // Welford accumulation of x = l * 1(i ≡ j).
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const auto& p : sample.pairs) {
    auto v = require ? std::optional<bool>(ask_or_throw(judge, pop, p.i, p.j)) : ask(judge, p.i, p.j);
    if (!v) {
      return std::nullopt;
    }
    double x = *v ? static_cast<double>(p.l) : 0.0;
    ++k;
    double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  double var = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  est.value = sample.total_u * mean;
  est.std_error = sample.total_u * std::sqrt(var / static_cast<double>(k));
  est.ci_low = est.value - kZ95 * est.std_error;
  est.ci_high = est.value + kZ95 * est.std_error;
  return est;
}

}  // namespace detail

/// Draws `n` pairs (i, j), j in Base(i) ⊖ Exp(i), with replacement and with
/// probability proportional to u_ij = weight(i)/weight(T) * weight(j)/weight(Ideal(i)).
/// l_ij is +1 for merged-in partners and -1 for split-off partners.
///
/// Validation only: weight(Ideal(i)) is not knowable at production scale, so this
/// sampler needs the ideal weight table of an oracle.
[[nodiscard]] inline PairSample sample_delta_recall_pairs(const ClusteringPair& pair, std::span<const double> ideal_w,
                                                          std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw ConfigError("sample size must be positive");
  }
  auto universe = detail::delta_recall_universe(pair, ideal_w);
  std::mt19937_64 rng(seed);
  return detail::draw(pair, universe, n, rng, seed);
}

/// The full ΔRecall pair universe, each pair listed once with its u_ij.
[[nodiscard]] inline PairSample enumerate_delta_recall_pairs(const ClusteringPair& pair,
                                                             std::span<const double> ideal_w) {
  return detail::enumerate(pair, detail::delta_recall_universe(pair, ideal_w));
}

/// Estimates ΔRecall(T): total_u times the sample mean of l_ij * 1(i ≡ j).
/// An exhaustive sample yields the exact value. Throws UnjudgedPairError when the
/// judge lacks a verdict and ConfigError for an empty sample.
[[nodiscard]] inline Estimate estimate_delta_recall(const PairSample& sample, const Judge& judge, const Population& pop) {
  if (sample.pairs.empty() && !sample.exhaustive) {
    throw ConfigError("empty sample");
  }
  return *detail::evaluate(sample, judge, pop, true);
}

/// Split, merge and stable pair samples for estimating the basic quality rates.
struct QualitySample {
  PairSample split;
  PairSample merge;
  PairSample stable;
};

/// Draws `n` pairs from each universe, consuming one RNG stream: split pairs
/// first, then merge pairs, then stable pairs.
///
/// Split pairs (j in Base(i) \ Exp(i)) have u_ij = weight(i) weight(j) / (weight(T) weight(Base(i))),
/// so total_u is SplitRate(T); merge pairs are the mirror image over Exp(i).
/// Stable pairs (j in Base(i) ∩ Exp(i)) weigh the DeltaPrecision correction term.
[[nodiscard]] inline QualitySample draw_quality_sample(const ClusteringPair& pair, std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw ConfigError("sample size must be positive");
  }
  std::mt19937_64 rng(seed);
  QualitySample s;
  s.split = detail::draw(pair, detail::split_universe(pair), n, rng, seed);
  s.merge = detail::draw(pair, detail::merge_universe(pair), n, rng, seed);
  s.stable = detail::draw(pair, detail::stable_universe(pair), n, rng, seed);
  return s;
}

[[nodiscard]] inline QualitySample enumerate_quality_pairs(const ClusteringPair& pair) {
  return {detail::enumerate(pair, detail::split_universe(pair)), detail::enumerate(pair, detail::merge_universe(pair)),
          detail::enumerate(pair, detail::stable_universe(pair))};
}

struct SampledQuality {
  /// Population scope.
  QualityRates rates;
  Estimate bad_split;
  Estimate good_merge;
  /// Absent when the judge does not cover every stable pair.
  std::optional<Estimate> delta_precision;
};

/// Estimates the population-scope quality rates from a quality sample.
/// Split and merge pairs must all be judged (UnjudgedPairError otherwise);
/// ΔPrecision is reported only if every stable pair is judged too.
[[nodiscard]] inline SampledQuality estimate_quality_rates(const QualitySample& sample, const Judge& judge,
                                                           const Population& pop) {
  SampledQuality out;
  auto split = *detail::evaluate(sample.split, judge, pop, true);
  auto merge = *detail::evaluate(sample.merge, judge, pop, true);
  // Split pairs have l = -1.
  out.bad_split = split;
  out.bad_split.value = -split.value;
  out.bad_split.ci_low = -split.ci_high;
  out.bad_split.ci_high = -split.ci_low;
  out.good_merge = merge;

  out.rates.bad_split_rate = out.bad_split.value;
  out.rates.good_split_rate = sample.split.total_u - out.bad_split.value;
  out.rates.good_merge_rate = out.good_merge.value;
  out.rates.bad_merge_rate = sample.merge.total_u - out.good_merge.value;
  out.rates.scope = Scope::population;

  if (auto stable = detail::evaluate(sample.stable, judge, pop, false)) {
    Estimate dp;
    dp.value = merge.value + split.value + stable->value;
    dp.std_error = std::sqrt(merge.std_error * merge.std_error + split.std_error * split.std_error +
                             stable->std_error * stable->std_error);
    dp.ci_low = dp.value - kZ95 * dp.std_error;
    dp.ci_high = dp.value + kZ95 * dp.std_error;
    dp.n = merge.n + split.n + stable->n;
    dp.exact = merge.exact && split.exact && stable->exact;
    if (dp.exact) {
      dp.ci_low = dp.ci_high = dp.value;
    }
    out.delta_precision = dp;
    out.rates.delta_precision = dp.value;
  }
  return out;
}

[[nodiscard]] inline SampledQuality estimate_quality_rates(const ClusteringPair& pair, const Judge& judge,
                                                           std::size_t n, std::uint64_t seed) {
  return estimate_quality_rates(draw_quality_sample(pair, n, seed), judge, pair.population());
}

// ---------------------------------------------------------------------------
// Manifests

/// Writes pairs as TSV `item_a<TAB>item_b<TAB>u<TAB>l` under a '#' header line.
inline void write_manifest(std::ostream& out, const Population& pop, std::span<const PairSample* const> samples) {
  out << "# item_a\titem_b\tu\tl\n";
  auto old = out.precision(17);
  for (const auto* s : samples) {
    for (const auto& p : s->pairs) {
      out << pop.id(p.i) << '\t' << pop.id(p.j) << '\t' << p.u << '\t' << p.l << '\n';
    }
  }
  out.precision(old);
}

inline void write_manifest(std::ostream& out, const Population& pop, const PairSample& sample) {
  const PairSample* one[] = {&sample};
  write_manifest(out, pop, one);
}

inline void write_manifest(std::ostream& out, const Population& pop, const QualitySample& sample) {
  const PairSample* all[] = {&sample.split, &sample.merge, &sample.stable};
  write_manifest(out, pop, all);
}

/// Reads a manifest back. Pairs naming unknown items are a LookupError.
[[nodiscard]] inline std::vector<SampledPair> read_manifest(std::istream& in, const Population& pop) {
  std::vector<SampledPair> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::strip_cr(raw);
    if (detail::skippable(line)) {
      continue;
    }
    auto fields = detail::split_tabs(line);
    if (fields.size() != 4) {
      throw ParseError("expected item_a<TAB>item_b<TAB>u<TAB>l", line_no);
    }
    auto u = detail::parse_double(fields[2]);
    if (!u || (fields[3] != "1" && fields[3] != "-1")) {
      throw ParseError("invalid u or l", line_no);
    }
    pairs.push_back({pop.index_of(fields[0]), pop.index_of(fields[1]), *u, fields[3] == "1" ? 1 : -1});
  }
  return pairs;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_QUALITY_HPP
