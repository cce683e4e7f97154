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

// Brute-force reference implementations and seeded instance generators for
// the tests. Nothing here calls into the library's metric code: every value is
// recomputed from raw label vectors by direct enumeration over items.

#ifndef CLUSTERDIFF_TESTS_ORACLE_HPP
#define CLUSTERDIFF_TESTS_ORACLE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <clusterdiff/core.hpp>

namespace oracle {

using Labels = std::vector<int>;

struct Instance {
  std::vector<double> w;
  Labels base;
  Labels exp;
  Labels ideal;

  std::size_t size() const { return w.size(); }

  clusterdiff::Population population() const {
    std::vector<std::pair<std::string, double>> entries;
    for (std::size_t k = 0; k < w.size(); ++k) {
      // Zero-padded so that sorted id order is index order.
      std::string id = std::to_string(k);
      entries.emplace_back("x" + std::string(4 - id.size(), '0') + id, w[k]);
    }
    return clusterdiff::Population::from_entries(std::move(entries));
  }
  static clusterdiff::Clustering clustering(const Labels& l) { return clusterdiff::Clustering::from_labels(l); }
  clusterdiff::ClusteringPair pair() const {
    return clusterdiff::ClusteringPair(population(), clustering(base), clustering(exp));
  }
  clusterdiff::ClusteringPair swapped() const {
    return clusterdiff::ClusteringPair(population(), clustering(exp), clustering(base));
  }
};

// Weight of {j : pred(j)}.
template <class Pred>
double weight_where(const Instance& x, Pred pred) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (pred(j)) {
      s += x.w[j];
    }
  }
  return s;
}

struct Venn {
  double gs = 0, bs = 0, gsplit = 0, bsplit = 0, gm = 0, bm = 0, missing = 0;
  double wb() const { return gs + bs + gsplit + bsplit; }
  double we() const { return gs + bs + gm + bm; }
  double wi() const { return gs + bsplit + gm + missing; }
};

inline Venn venn(const Instance& x, std::size_t i) {
  Venn v;
  for (std::size_t j = 0; j < x.size(); ++j) {
    bool b = x.base[j] == x.base[i];
    bool e = x.exp[j] == x.exp[i];
    bool d = x.ideal[j] == x.ideal[i];
    double w = x.w[j];
    if (b && e && d) v.gs += w;
    else if (b && e) v.bs += w;
    else if (b && d) v.bsplit += w;
    else if (b) v.gsplit += w;
    else if (e && d) v.gm += w;
    else if (e) v.bm += w;
    else if (d) v.missing += w;
  }
  return v;
}

inline double jd(const Instance& x, const Labels& c, const Labels& d, std::size_t i) {
  double inter = weight_where(x, [&](std::size_t j) { return c[j] == c[i] && d[j] == d[i]; });
  double uni = weight_where(x, [&](std::size_t j) { return c[j] == c[i] || d[j] == d[i]; });
  return 1.0 - inter / uni;
}

inline double precision(const Instance& x, const Labels& c, std::size_t i) {
  double inter = weight_where(x, [&](std::size_t j) { return c[j] == c[i] && x.ideal[j] == x.ideal[i]; });
  return inter / weight_where(x, [&](std::size_t j) { return c[j] == c[i]; });
}

inline double recall(const Instance& x, const Labels& c, std::size_t i) {
  double inter = weight_where(x, [&](std::size_t j) { return c[j] == c[i] && x.ideal[j] == x.ideal[i]; });
  return inter / weight_where(x, [&](std::size_t j) { return x.ideal[j] == x.ideal[i]; });
}

inline bool affected(const Instance& x, std::size_t i) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if ((x.base[j] == x.base[i]) != (x.exp[j] == x.exp[i])) {
      return true;
    }
  }
  return false;
}

// Weighted mean of f over items with in_scope(i).
template <class F, class S>
double lifted(const Instance& x, F f, S in_scope) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (in_scope(i)) {
      num += x.w[i] * f(i);
      den += x.w[i];
    }
  }
  return num / den;
}

template <class F>
double lifted(const Instance& x, F f) {
  return lifted(x, f, [](std::size_t) { return true; });
}

// ---------------------------------------------------------------------------
// Generators

inline double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline int below(std::mt19937_64& rng, int n) { return static_cast<int>(u01(rng) * n); }

// A random instance with n items; Exp relabels a random subset of Base items.
// `unit` forces unit weights.
inline Instance random_instance(std::uint64_t seed, int n_min = 3, int n_max = 20, bool unit = false) {
  std::mt19937_64 rng(seed);
  Instance x;
  int n = n_min + below(rng, n_max - n_min + 1);
  int kb = 1 + below(rng, std::max(1, n / 2));
  int ki = 1 + below(rng, std::max(1, n / 2));
  for (int k = 0; k < n; ++k) {
    x.w.push_back(unit ? 1.0 : 0.25 + 2.0 * u01(rng));
    x.base.push_back(below(rng, kb));
    x.ideal.push_back(below(rng, ki));
  }
  x.exp = x.base;
  double p = 0.1 + 0.5 * u01(rng);
  for (int k = 0; k < n; ++k) {
    if (u01(rng) < p) {
      x.exp[k] = below(rng, kb + 2);
    }
  }
  return x;
}

// A random instance with a guaranteed non-empty diff.
inline Instance random_changed_instance(std::uint64_t seed, int n_min = 3, int n_max = 20, bool unit = false) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto x = random_instance(seed * 1000003ULL + attempt, n_min, n_max, unit);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (affected(x, i)) {
        return x;
      }
    }
  }
}

enum class Shape { split, merge, swap };

// Instances whose affected items all share one Venn diagram up to a common
// item weight: blocks of r items are tied together in the Ideal across the
// halves A, B (and C, D) of the changed clusters, and every ideal class also
// has t items outside the changed clusters. `extra` unaffected singletons are
// appended.
//  - split: Base {A ∪ B}, Exp {A}, {B}
//  - merge: Base {A}, {B}, Exp {A ∪ B}
//  - swap:  Base {A ∪ B}, {C ∪ D}, Exp {A ∪ C}, {B ∪ D}
inline Instance homogeneous_instance(Shape shape, int m, int r, int t, int extra, double weight) {
  Instance x;
  int halves = shape == Shape::swap ? 4 : 2;
  int blocks = m / r;
  int next_outside_cluster = 1000;
  auto add = [&](int b, int e, int d) {
    x.w.push_back(weight);
    x.base.push_back(b);
    x.exp.push_back(e);
    x.ideal.push_back(d);
  };
  for (int h = 0; h < halves; ++h) {
    for (int k = 0; k < m; ++k) {
      int block = k / r;
      int b = 0;
      int e = 0;
      switch (shape) {
        case Shape::split: b = 0; e = h; break;
        case Shape::merge: b = h; e = 0; break;
        case Shape::swap: b = h / 2; e = h % 2; break;
      }
      add(b, e, block);
    }
  }
  for (int block = 0; block < blocks; ++block) {
    for (int k = 0; k < t; ++k) {
      add(next_outside_cluster, next_outside_cluster, block);
      ++next_outside_cluster;
    }
  }
  for (int k = 0; k < extra; ++k) {
    add(next_outside_cluster, next_outside_cluster, 500 + k);
    ++next_outside_cluster;
  }
  return x;
}

}  // namespace oracle

#endif  // CLUSTERDIFF_TESTS_ORACLE_HPP
