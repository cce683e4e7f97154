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

#ifndef CLUSTERDIFF_SIMULATION_HPP
#define CLUSTERDIFF_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <clusterdiff/delta_recall.hpp>
#include <clusterdiff/impact.hpp>
#include <clusterdiff/iq.hpp>
#include <clusterdiff/quality.hpp>

/**
 * \file
 * \brief Synthetic worlds with a known Ideal clustering, perturbations with an
 * exact good/bad log, and a study comparing approximate figures against exact
 * ones computed from the Ideal.
 */

namespace clusterdiff {

// ---------------------------------------------------------------------------
// Worlds

struct SizeDistribution {
  enum class Kind { uniform, zipf };
  Kind kind = Kind::uniform;
  std::size_t k = 2;        // uniform: every cluster has k items (the last one may be smaller)
  double s = 1.0;           // zipf exponent
  std::size_t max = 10;     // zipf: largest cluster size

  static SizeDistribution uniform(std::size_t k) { return {Kind::uniform, k, 1.0, k}; }
  static SizeDistribution zipf(double s, std::size_t max) { return {Kind::zipf, 1, s, max}; }
};

struct WeightDistribution {
  enum class Kind { unit, lognormal };
  Kind kind = Kind::unit;
  double mu = 0.0;
  double sigma = 1.0;

  static WeightDistribution unit() { return {}; }
  static WeightDistribution lognormal(double mu, double sigma) { return {Kind::lognormal, mu, sigma}; }
};

struct WorldSpec {
  std::size_t n_items = 600;
  SizeDistribution sizes = SizeDistribution::zipf(1.0, 12);
  WeightDistribution weights = WeightDistribution::lognormal(0.0, 0.5);
  std::uint64_t seed = 1;

  void validate() const {
    if (n_items < 2) {
      throw ConfigError("a world needs at least 2 items");
    }
    if (sizes.kind == SizeDistribution::Kind::uniform ? sizes.k == 0 : (sizes.max == 0 || !std::isfinite(sizes.s))) {
      throw ConfigError("cluster sizes must be positive");
    }
    if (weights.kind == WeightDistribution::Kind::lognormal &&
        (!std::isfinite(weights.mu) || !(weights.sigma >= 0.0) || !std::isfinite(weights.sigma))) {
      throw ConfigError("invalid lognormal parameters");
    }
  }
};

struct World {
  Population population;
  Clustering ideal;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return std::min(k, n - 1);
}

inline bool coin(std::mt19937_64& rng, double p) { return uniform01(rng) < p; }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t k = v.size(); k > 1; --k) {
    std::swap(v[k - 1], v[pick(rng, k)]);
  }
}

inline std::string item_id(std::size_t k, std::size_t n) {
  auto digits = std::to_string(n - 1).size();
  auto s = std::to_string(k);
  return "t" + std::string(digits - s.size(), '0') + s;
}

}  // namespace detail

/// Derives an independent seed from two seeds.
[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b) {
  return detail::splitmix64(detail::splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

[[nodiscard]] inline World generate_world(const WorldSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  std::vector<std::size_t> sizes;
  std::size_t filled = 0;
  if (spec.sizes.kind == SizeDistribution::Kind::uniform) {
    while (filled < spec.n_items) {
      sizes.push_back(std::min(spec.sizes.k, spec.n_items - filled));
      filled += sizes.back();
    }
  } else {
    std::vector<double> cumulative(spec.sizes.max);
    double acc = 0.0;
    for (std::size_t k = 1; k <= spec.sizes.max; ++k) {
      acc += std::pow(static_cast<double>(k), -spec.sizes.s);
      cumulative[k - 1] = acc;
    }
    while (filled < spec.n_items) {
      double target = detail::uniform01(rng) * acc;
      auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), target) -
                                        cumulative.begin());
      std::size_t size = std::min(std::min(k, spec.sizes.max - 1) + 1, spec.n_items - filled);
      sizes.push_back(size);
      filled += size;
    }
  }

  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(spec.n_items);
  std::lognormal_distribution<double> lognormal(spec.weights.mu, spec.weights.sigma);
  for (std::size_t k = 0; k < spec.n_items; ++k) {
    double w = spec.weights.kind == WeightDistribution::Kind::unit ? 1.0 : lognormal(rng);
    entries.emplace_back(detail::item_id(k, spec.n_items), w);
  }

  // Scatter the clusters over the id order so that neighbours are unrelated.
  std::vector<ItemIndex> order(spec.n_items);
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  detail::shuffle(order, rng);
  std::vector<std::vector<ItemIndex>> groups;
  std::size_t next = 0;
  for (std::size_t size : sizes) {
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(next),
                        order.begin() + static_cast<std::ptrdiff_t>(next + size));
    next += size;
  }
  World world{Population::from_entries(std::move(entries)), Clustering::singletons(spec.n_items)};
  world.ideal = Clustering::from_groups(spec.n_items, groups);
  return world;
}

// ---------------------------------------------------------------------------
// Perturbations

enum class OpKind { good_split, bad_split, good_merge, bad_merge, random_move };

[[nodiscard]] inline const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::good_split: return "good_split";
    case OpKind::bad_split: return "bad_split";
    case OpKind::good_merge: return "good_merge";
    case OpKind::bad_merge: return "bad_merge";
    case OpKind::random_move: return "random_move";
  }
  return "?";
}

[[nodiscard]] inline OpKind parse_op_kind(std::string_view name) {
  for (auto k : {OpKind::good_split, OpKind::bad_split, OpKind::good_merge, OpKind::bad_merge, OpKind::random_move}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ConfigError("unknown perturbation: " + std::string(name));
}

struct PerturbationOp {
  OpKind kind = OpKind::good_split;
  /// Chance that the op is applied to each cluster.
  double p = 0.0;
};

struct PerturbationSpec {
  std::vector<PerturbationOp> ops;
  std::uint64_t seed = 0;

  void validate() const {
    for (const auto& op : ops) {
      if (!(op.p >= 0.0 && op.p <= 1.0)) {
        throw ConfigError("perturbation probabilities must lie in [0, 1]");
      }
    }
  }
};

/// One applied move. Pair counts are unordered item pairs:
/// separated pairs for the split side, newly joined pairs for the merge side.
/// "good" means non-equivalent pairs separated or equivalent pairs joined.
struct OpRecord {
  OpKind kind = OpKind::good_split;
  std::size_t moved = 0;
  std::size_t good_split_pairs = 0;
  std::size_t bad_split_pairs = 0;
  std::size_t good_merge_pairs = 0;
  std::size_t bad_merge_pairs = 0;
};

struct Perturbation {
  Clustering clustering;
  std::vector<OpRecord> log;
};

namespace detail {

class Mutator {
 public:
  Mutator(const Clustering& start, const Clustering& ideal) : ideal_(ideal) {
    for (ClusterIndex c = 0; c < start.cluster_count(); ++c) {
      auto m = start.members(c);
      groups_.emplace_back(m.begin(), m.end());
    }
  }

  std::size_t cluster_count() const { return groups_.size(); }
  bool empty(std::size_t c) const { return groups_[c].empty(); }

  // Members of cluster c grouped by ideal class, classes in first-seen order.
  std::vector<std::vector<ItemIndex>> parts(std::size_t c) const {
    std::vector<std::vector<ItemIndex>> out;
    std::map<ClusterIndex, std::size_t> slot;
    for (ItemIndex i : groups_[c]) {
      auto [it, fresh] = slot.emplace(ideal_.cluster_of(i), out.size());
      if (fresh) {
        out.emplace_back();
      }
      out[it->second].push_back(i);
    }
    return out;
  }

  bool shares_class(std::size_t a, std::size_t b) const {
    for (ItemIndex i : groups_[a]) {
      for (ItemIndex j : groups_[b]) {
        if (ideal_.same_cluster(i, j)) {
          return true;
        }
      }
    }
    return false;
  }

  // Moves `items` (all in cluster `from`) into `to`, or into a new cluster when to == npos.
  OpRecord move(OpKind kind, std::size_t from, const std::vector<ItemIndex>& items, std::size_t to) {
    OpRecord rec;
    rec.kind = kind;
    rec.moved = items.size();
    std::vector<ItemIndex> rest;
    for (ItemIndex i : groups_[from]) {
      if (std::find(items.begin(), items.end(), i) == items.end()) {
        rest.push_back(i);
      }
    }
    count(items, rest, rec.bad_split_pairs, rec.good_split_pairs);
    // `items` may alias groups_[from]; copy before the source is overwritten.
    std::vector<ItemIndex> moving = items;
    groups_[from] = std::move(rest);
    if (to == npos) {
      groups_.push_back(std::move(moving));
    } else {
      count(moving, groups_[to], rec.good_merge_pairs, rec.bad_merge_pairs);
      groups_[to].insert(groups_[to].end(), moving.begin(), moving.end());
    }
    return rec;
  }

  Clustering finish(std::size_t n) const {
    std::vector<std::vector<ItemIndex>> live;
    for (const auto& g : groups_) {
      if (!g.empty()) {
        live.push_back(g);
      }
    }
    return Clustering::from_groups(n, live);
  }

  const std::vector<ItemIndex>& members(std::size_t c) const { return groups_[c]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  void count(const std::vector<ItemIndex>& a, const std::vector<ItemIndex>& b, std::size_t& equivalent,
             std::size_t& other) const {
    for (ItemIndex i : a) {
      for (ItemIndex j : b) {
        (ideal_.same_cluster(i, j) ? equivalent : other) += 1;
      }
    }
  }

  const Clustering& ideal_;
  std::vector<std::vector<ItemIndex>> groups_;
};

}  // namespace detail

/// Applies the ops in order. Each op visits the clusters present when it starts
/// and acts on each with probability p:
///  - good_split moves one ideal class out of a mixed cluster;
///  - bad_split moves a random proper subset of one ideal class into a new cluster;
///  - good_merge merges in a whole cluster that shares an ideal class;
///  - bad_merge merges in a whole cluster that shares no ideal class;
///  - random_move moves a random subset to a random other cluster or a new one.
[[nodiscard]] inline Perturbation perturb(const Clustering& clustering, const Clustering& ideal,
                                          const PerturbationSpec& spec) {
  spec.validate();
  if (clustering.size() != ideal.size()) {
    throw ValidationError("ideal clustering covers a different population");
  }
  std::mt19937_64 rng(spec.seed);
  detail::Mutator m(clustering, ideal);
  Perturbation out{Clustering::singletons(clustering.size()), {}};
  constexpr auto npos = detail::Mutator::npos;

  for (const auto& op : spec.ops) {
    std::size_t visit = m.cluster_count();
    for (std::size_t c = 0; c < visit; ++c) {
      if (m.empty(c) || !detail::coin(rng, op.p)) {
        continue;
      }
      switch (op.kind) {
        case OpKind::good_split: {
          auto parts = m.parts(c);
          if (parts.size() >= 2) {
            out.log.push_back(m.move(op.kind, c, parts[detail::pick(rng, parts.size())], npos));
          }
          break;
        }
        case OpKind::bad_split: {
          std::vector<std::vector<ItemIndex>> splittable;
          for (auto& part : m.parts(c)) {
            if (part.size() >= 2) {
              splittable.push_back(std::move(part));
            }
          }
          if (splittable.empty()) {
            break;
          }
          auto part = splittable[detail::pick(rng, splittable.size())];
          detail::shuffle(part, rng);
          part.resize(1 + detail::pick(rng, part.size() - 1));
          out.log.push_back(m.move(op.kind, c, part, npos));
          break;
        }
        case OpKind::good_merge:
        case OpKind::bad_merge: {
          bool want_shared = op.kind == OpKind::good_merge;
          std::vector<std::size_t> candidates;
          for (std::size_t d = 0; d < m.cluster_count(); ++d) {
            if (d != c && !m.empty(d) && m.shares_class(c, d) == want_shared) {
              candidates.push_back(d);
            }
          }
          if (candidates.empty()) {
            break;
          }
          std::size_t d = candidates[detail::pick(rng, candidates.size())];
          auto items = m.members(d);
          out.log.push_back(m.move(op.kind, d, items, c));
          break;
        }
        case OpKind::random_move: {
          std::vector<ItemIndex> items;
          for (ItemIndex i : m.members(c)) {
            if (detail::coin(rng, 0.5)) {
              items.push_back(i);
            }
          }
          if (items.empty()) {
            items.push_back(m.members(c)[detail::pick(rng, m.members(c).size())]);
          }
          std::vector<std::size_t> targets;
          for (std::size_t d = 0; d < m.cluster_count(); ++d) {
            if (d != c && !m.empty(d)) {
              targets.push_back(d);
            }
          }
          std::size_t k = detail::pick(rng, targets.size() + 1);
          std::size_t to = k == targets.size() ? npos : targets[k];
          if (to == npos && items.size() == m.members(c).size()) {
            break;  // moving a whole cluster into a new one changes nothing
          }
          out.log.push_back(m.move(op.kind, c, items, to));
          break;
        }
      }
    }
  }
  out.clustering = m.finish(clustering.size());
  return out;
}

// ---------------------------------------------------------------------------
// Validation study

struct LinearFit {
  double r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;
};

/// Pearson correlation and least-squares line of y on x.
/// Throws ValidationError when either series is constant.
[[nodiscard]] inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("correlation needs at least two paired values");
  }
  double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw ValidationError("correlation undefined: all changes look identical");
  }
  LinearFit fit;
  fit.n = x.size();
  fit.r = sxy / std::sqrt(sxx * syy);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

struct StudyOptions {
  /// Turns the Ideal into an imperfect Base before each change.
  PerturbationSpec base_noise{{{OpKind::bad_split, 0.35}, {OpKind::bad_merge, 0.15}}, 0};
  RecallPolicy policy = RecallPolicy::dampened();
  Variant variant = Variant::v1;
  /// Reseeding attempts when a change turns out to be a noop.
  std::size_t max_attempts = 16;
};

struct StudyRow {
  std::size_t index = 0;
  std::uint64_t world_seed = 0;
  std::uint64_t change_seed = 0;
  double affected_weight_fraction = 0.0;
  double exact_delta_recall = 0.0;
  double exact_delta_precision = 0.0;
  double approx_delta_recall = 0.0;
  double approx_delta_precision = 0.0;
  double assumed_recall = 0.0;
  bool clipped = false;
  double exact_jd = 0.0;
  double approx_jd = 0.0;
  double exact_iq = 0.0;
  double approx_iq = 0.0;
  std::size_t ops = 0;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  Variant variant = Variant::v1;
  std::string policy;
  LinearFit delta_recall;
  LinearFit jaccard_distance;
  LinearFit iq;
  double iq_sign_agreement = 0.0;
};

/// A simple three-way sign with a tolerance for values that are zero up to rounding.
[[nodiscard]] inline int sign_of(double x, double tol = 1e-12) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

/// Evaluates one (Base, Exp, Ideal) triple: exact figures from the Ideal and
/// approximate ones from the affected diagram built on exact quality rates.
[[nodiscard]] inline StudyRow study_row(const ClusteringPair& pair, const Clustering& ideal, const StudyOptions& options) {
  StudyRow row;
  auto impact = compute_impact(pair);
  auto rates = exact_quality(pair, ideal);
  auto inputs = DiagramInputs::from(impact, rates);
  auto point = delta_recall_point(inputs, options.variant, options.policy, std::nullopt, ClipPolicy::clip);
  row.affected_weight_fraction = impact.affected_weight_fraction;
  row.exact_delta_recall = *rates.delta_recall;
  row.exact_delta_precision = *rates.delta_precision;
  row.approx_delta_recall = point.overall.delta_recall_T;
  row.approx_delta_precision = point.overall.delta_precision_T;
  row.assumed_recall = point.diagram.assumed_recall_base;
  row.clipped = point.diagram.any_clipping();
  row.exact_jd = impact.jaccard_distance;
  row.approx_jd = point.jd_back_of_envelope;
  row.exact_iq = iq_exact(pair, ideal).iq;
  row.approx_iq = iq_approx(point.diagram, impact.affected_weight_fraction, impact.jaccard_distance).iq;
  return row;
}

/// Runs every spec of `family` on its own world (seeded from the world seed and
/// its own seed) and correlates approximate against exact figures.
[[nodiscard]] inline StudyReport validation_study(const std::vector<PerturbationSpec>& family, const WorldSpec& world,
                                                  const StudyOptions& options = {}) {
  if (family.size() < 10) {
    throw ConfigError("a validation study needs at least 10 perturbation specs");
  }
  if (options.variant == Variant::v2) {
    throw ConfigError("the validation study runs variant 1; variant 2 needs an assumed precision");
  }
  StudyReport report;
  report.variant = options.variant;
  report.policy = options.policy.name();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& spec = family[k];
    WorldSpec ws = world;
    ws.seed = derive_seed(world.seed, spec.seed);
    auto w = generate_world(ws);
    PerturbationSpec noise = options.base_noise;
    noise.seed = derive_seed(ws.seed, 1);
    auto base = perturb(w.ideal, w.ideal, noise).clustering;

    bool done = false;
    for (std::size_t attempt = 0; attempt < options.max_attempts && !done; ++attempt) {
      PerturbationSpec change = spec;
      change.seed = attempt == 0 ? spec.seed : derive_seed(spec.seed, attempt);
      auto exp = perturb(base, w.ideal, change);
      if (exp.clustering == base) {
        continue;
      }
      ClusteringPair pair(w.population, base, exp.clustering);
      auto row = study_row(pair, w.ideal, options);
      row.index = k;
      row.world_seed = ws.seed;
      row.change_seed = change.seed;
      row.ops = exp.log.size();
      report.rows.push_back(row);
      done = true;
    }
    if (!done) {
      throw ConfigError("perturbation spec " + std::to_string(k) + " never changes the clustering");
    }
  }

  std::vector<double> er, ar, ej, aj, ei, ai;
  std::size_t agree = 0;
  for (const auto& row : report.rows) {
    er.push_back(row.exact_delta_recall);
    ar.push_back(row.approx_delta_recall);
    ej.push_back(row.exact_jd);
    aj.push_back(row.approx_jd);
    ei.push_back(row.exact_iq);
    ai.push_back(row.approx_iq);
    agree += sign_of(row.exact_iq) == sign_of(row.approx_iq) ? 1 : 0;
  }
  report.delta_recall = linear_fit(er, ar);
  report.jaccard_distance = linear_fit(ej, aj);
  report.iq = linear_fit(ei, ai);
  report.iq_sign_agreement = static_cast<double>(agree) / static_cast<double>(report.rows.size());
  return report;
}

/// 30 specs: split probability s and merge probability m over
/// {0, 0.1, ..., 0.5}, all pairs with s != m. Good and bad splits share the
/// probability s, good and bad merges share m.
[[nodiscard]] inline std::vector<PerturbationSpec> default_study_family() {
  std::vector<PerturbationSpec> family;
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 5; ++b) {
      if (a == b) {
        continue;
      }
      double s = a / 10.0;
      double m = b / 10.0;
      PerturbationSpec spec;
      spec.ops = {{OpKind::good_split, s}, {OpKind::bad_split, s}, {OpKind::good_merge, m}, {OpKind::bad_merge, m}};
      spec.seed = family.size() + 1;
      family.push_back(spec);
    }
  }
  return family;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_SIMULATION_HPP
