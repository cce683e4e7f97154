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

#ifndef CLUSTERDIFF_SNAPSHOT_HPP
#define CLUSTERDIFF_SNAPSHOT_HPP

#include <cstdint>
#include <optional>

#include <clusterdiff/impact.hpp>
#include <clusterdiff/quality.hpp>

/**
 * \file
 * \brief Absolute quality of one clustering, obtained by diffing it against a
 * reference clustering whose quality is known.
 *
 * With Exp = PerfectPrecision (all singletons) the snapshot's precision is
 * 1 - ΔPrecision(T), and its recall exceeds the unknown MinimumRecall by
 * -ΔRecall(T).
 */

namespace clusterdiff {

/// Every item in a cluster by itself.
[[nodiscard]] inline Clustering perfect_precision_clustering(const Population& pop) {
  return Clustering::singletons(pop.size());
}

/// All items in one cluster.
[[nodiscard]] inline Clustering perfect_recall_clustering(const Population& pop) {
  return Clustering::single_cluster(pop.size());
}

enum class JudgeMode { exact, sampled };
enum class Reference { perfect_precision, perfect_recall };

[[nodiscard]] inline const char* to_string(JudgeMode m) { return m == JudgeMode::exact ? "exact" : "sampled"; }
[[nodiscard]] inline const char* to_string(Reference r) {
  return r == Reference::perfect_precision ? "perfect_precision" : "perfect_recall";
}

struct SnapshotOptions {
  JudgeMode mode = JudgeMode::exact;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  Reference reference = Reference::perfect_precision;
  /// The PerfectRecall experiment says little in practice and is refused unless set.
  bool allow_perfect_recall = false;
};

struct SnapshotQuality {
  Reference reference = Reference::perfect_precision;
  JudgeMode judge_mode = JudgeMode::exact;
  double delta_precision_raw = 0.0;
  /// Absent in sampled mode without an oracle for the ideal cluster weights.
  std::optional<double> delta_recall_raw;

  // PerfectPrecision reference.
  std::optional<double> precision_absolute;
  std::optional<double> recall_above_minimum;

  // PerfectRecall reference.
  std::optional<double> recall_absolute;
  std::optional<double> precision_above_minimum;

  std::optional<Estimate> delta_precision_estimate;
  std::optional<Estimate> delta_recall_estimate;
};

/// Evaluates a snapshot against a reference clustering. Weights are the
/// snapshot's own. Exact mode needs a judge backed by an Ideal clustering.
[[nodiscard]] inline SnapshotQuality snapshot_eval(const Population& pop, const Clustering& snapshot, const Judge& judge,
                                                   const SnapshotOptions& options = {}) {
  if (snapshot.size() != pop.size()) {
    throw ValidationError("snapshot covers a different population");
  }
  if (options.reference == Reference::perfect_recall && !options.allow_perfect_recall) {
    throw ConfigError("the PerfectRecall experiment is disabled; pass the override to run it anyway");
  }
  Clustering reference = options.reference == Reference::perfect_precision ? perfect_precision_clustering(pop)
                                                                           : perfect_recall_clustering(pop);
  if (snapshot == reference) {
    throw ValidationError(options.reference == Reference::perfect_precision
                              ? "snapshot equals PerfectPrecision"
                              : "snapshot equals PerfectRecall");
  }
  ClusteringPair pair(pop, snapshot, reference);

  SnapshotQuality out;
  out.reference = options.reference;
  out.judge_mode = options.mode;
  const Clustering* ideal = judge.ideal();
  if (options.mode == JudgeMode::exact) {
    if (ideal == nullptr) {
      throw ConfigError("exact mode needs an ideal clustering");
    }
    auto rates = exact_quality(pair, *ideal);
    out.delta_precision_raw = *rates.delta_precision;
    out.delta_recall_raw = rates.delta_recall;
  } else {
    auto sampled = estimate_quality_rates(pair, judge, options.n, options.seed);
    if (!sampled.delta_precision) {
      throw ConfigError("judge does not cover the stable pairs of the sample");
    }
    out.delta_precision_raw = sampled.delta_precision->value;
    out.delta_precision_estimate = sampled.delta_precision;
    if (ideal != nullptr) {
      auto iw = ideal_weights(pop, *ideal);
      auto est = estimate_delta_recall(sample_delta_recall_pairs(pair, iw, options.n, options.seed), judge, pop);
      out.delta_recall_raw = est.value;
      out.delta_recall_estimate = est;
    }
  }

  if (options.reference == Reference::perfect_precision) {
    out.precision_absolute = 1.0 - out.delta_precision_raw;
    if (out.delta_recall_raw) {
      out.recall_above_minimum = -*out.delta_recall_raw;
    }
  } else {
    out.precision_above_minimum = -out.delta_precision_raw;
    if (out.delta_recall_raw) {
      out.recall_absolute = 1.0 - *out.delta_recall_raw;
    }
  }
  return out;
}

}  // namespace clusterdiff

#endif  // CLUSTERDIFF_SNAPSHOT_HPP
