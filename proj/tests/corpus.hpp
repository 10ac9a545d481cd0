#pragma once

// Seeded generators shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mapper/cosheaf.hpp"
#include "mapper/cover.hpp"
#include "mapper/rspace.hpp"

namespace corpus {

using mapper::ConstructibleCosheaf;
using mapper::Interval;
using mapper::LabelSet;
using mapper::NiceCover;
using mapper::RGraph;

struct CosheafShape {
  std::size_t max_critical = 6;
  std::size_t max_set = 4;
  bool compact = true;      // unbounded strata empty
  double lattice = 0.25;    // critical values are multiples of this
  int lattice_span = 16;    // |value| <= lattice_span * lattice
};

inline LabelSet labels(const std::string& prefix, std::size_t n) {
  LabelSet s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(prefix + std::to_string(i));
  return s;
}

inline ConstructibleCosheaf random_cosheaf(std::mt19937_64& rng, const CosheafShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> kdist(0, shape.max_critical);
  std::uniform_int_distribution<int> vdist(-shape.lattice_span, shape.lattice_span);
  std::size_t k = kdist(rng);
  std::set<int> ticks;
  while (ticks.size() < k) ticks.insert(vdist(rng));
  ConstructibleCosheaf F;
  for (int t : ticks) F.critical.push_back(t * shape.lattice);
  k = F.critical.size();
  std::uniform_int_distribution<std::size_t> sdist(0, shape.max_set);
  std::uniform_int_distribution<std::size_t> pdist(1, shape.max_set);
  for (std::size_t i = 0; i <= k; ++i) {
    const bool unbounded = (i == 0 || i == k);
    const std::size_t n = (shape.compact && unbounded) ? 0 : sdist(rng);
    F.strata.push_back(labels("s" + std::to_string(i) + "_", n));
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t np = pdist(rng);
    F.points.push_back(labels("p" + std::to_string(j) + "_", np));
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::vector<std::size_t> l(F.strata[j].size()), r(F.strata[j + 1].size());
    for (auto& x : l) x = pick(rng);
    for (auto& x : r) x = pick(rng);
    F.left.push_back(l);
    F.right.push_back(r);
  }
  return F;
}

// Same cosheaf with every label replaced by a shuffled fresh name and every
// label set permuted.
inline ConstructibleCosheaf relabel(const ConstructibleCosheaf& F, std::mt19937_64& rng) {
  ConstructibleCosheaf G = F;
  auto permute = [&](LabelSet& set, const std::string& prefix) {
    std::vector<std::size_t> perm(set.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    LabelSet out(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) out[perm[i]] = prefix + std::to_string(rng() % 100000) + "_" + std::to_string(i);
    set = out;
    return perm;  // old index -> new index
  };
  std::vector<std::vector<std::size_t>> sp, pp;
  for (auto& s : G.strata) sp.push_back(permute(s, "u"));
  for (auto& p : G.points) pp.push_back(permute(p, "q"));
  for (std::size_t j = 0; j < F.size(); ++j) {
    G.left[j].assign(F.strata[j].size(), 0);
    G.right[j].assign(F.strata[j + 1].size(), 0);
    for (std::size_t e = 0; e < F.strata[j].size(); ++e) G.left[j][sp[j][e]] = pp[j][F.left[j][e]];
    for (std::size_t e = 0; e < F.strata[j + 1].size(); ++e)
      G.right[j][sp[j + 1][e]] = pp[j][F.right[j][e]];
  }
  return G;
}

// Insert a removable critical value at x (which must not be critical).
inline ConstructibleCosheaf insert_spurious(const ConstructibleCosheaf& F, double x) {
  std::size_t i = 0;
  while (i < F.size() && F.critical[i] < x) ++i;
  ConstructibleCosheaf G;
  G.critical = F.critical;
  G.critical.insert(G.critical.begin() + static_cast<long>(i), x);
  G.strata = F.strata;
  LabelSet copy;
  for (const auto& l : F.strata[i]) copy.push_back(l + "'");
  G.strata.insert(G.strata.begin() + static_cast<long>(i) + 1, copy);
  G.points = F.points;
  G.points.insert(G.points.begin() + static_cast<long>(i), F.strata[i]);
  G.left = F.left;
  G.right = F.right;
  std::vector<std::size_t> id(F.strata[i].size());
  for (std::size_t e = 0; e < id.size(); ++e) id[e] = e;
  G.left.insert(G.left.begin() + static_cast<long>(i), id);
  G.right.insert(G.right.begin() + static_cast<long>(i), id);
  return G;
}

inline Interval random_interval(std::mt19937_64& rng, double lo = -5, double hi = 5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::bernoulli_distribution unbounded(0.15);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  if (b - a < 1e-3) b = a + 1e-3;
  Interval I{a, b};
  if (unbounded(rng)) I.lo = -mapper::kInf;
  if (unbounded(rng)) I.hi = mapper::kInf;
  return I;
}

// Height function on a torus: min, split, merge, max at 0, 1, 2, 3.
inline ConstructibleCosheaf torus_cosheaf() {
  ConstructibleCosheaf F;
  F.critical = {0, 1, 2, 3};
  F.strata = {{}, {"e0"}, {"e1", "e2"}, {"e3"}, {}};
  F.points = {{"v0"}, {"v1"}, {"v2"}, {"v3"}};
  F.left = {{}, {0}, {0, 0}, {0}};
  F.right = {{0}, {0, 0}, {0}, {}};
  return F;
}

// Torus standing on end, height levels given by `c` (min, split, merge, max).
inline RGraph torus_rgraph(std::vector<double> c = {0, 1, 2, 3}) {
  RGraph X;
  X.critical = std::move(c);
  X.vertices = {{"min"}, {"split"}, {"merge"}, {"max"}};
  X.edges = {{"a"}, {"t1", "t2"}, {"b"}};
  X.attach_left = {{{"a", "min"}}, {{"t1", "split"}, {"t2", "split"}}, {{"b", "merge"}}};
  X.attach_right = {{{"a", "split"}}, {{"t1", "merge"}, {"t2", "merge"}}, {{"b", "max"}}};
  return X;
}

// Random well-formed R-graph on a lattice of critical values.
inline RGraph random_rgraph(std::mt19937_64& rng, std::size_t max_critical = 6,
                            std::size_t max_set = 3) {
  std::uniform_int_distribution<std::size_t> kdist(1, max_critical);
  std::uniform_int_distribution<std::size_t> vdist(1, max_set), edist(0, max_set);
  std::set<int> picks;
  const std::size_t k = kdist(rng);
  while (picks.size() < k) picks.insert(static_cast<int>(rng() % 33) - 16);
  RGraph X;
  for (int p : picks) X.critical.push_back(0.25 * p);
  for (std::size_t i = 0; i < k; ++i) X.vertices.push_back(labels("v" + std::to_string(i) + "_", vdist(rng)));
  for (std::size_t i = 0; i + 1 < k; ++i) {
    X.edges.push_back(labels("e" + std::to_string(i) + "_", edist(rng)));
    std::map<std::string, std::string> l, r;
    for (const auto& e : X.edges.back()) {
      l[e] = X.vertices[i][rng() % X.vertices[i].size()];
      r[e] = X.vertices[i + 1][rng() % X.vertices[i + 1].size()];
    }
    X.attach_left.push_back(std::move(l));
    X.attach_right.push_back(std::move(r));
  }
  return X;
}

// Chain of overlapping intervals on the 0.25 lattice spanning [lo, hi] with
// some slack; every element meets its successor.
inline NiceCover random_cover(std::mt19937_64& rng, double lo = -4.5, double hi = 4.5,
                              bool no_triple = false, bool rays = false) {
  std::uniform_int_distribution<int> len(2, 10), overlap(1, 3);
  std::vector<Interval> elems;
  double a = std::floor((lo - 0.25 * len(rng) / 2) * 4) / 4;
  for (;;) {
    double b = a + 0.25 * len(rng);
    if (!elems.empty()) {
      // Start past the previous overlap so that no point lies in three elements.
      if (no_triple && elems.size() >= 2 && a <= elems[elems.size() - 2].hi)
        a = elems[elems.size() - 2].hi + 0.25;
      if (b <= elems.back().hi) b = elems.back().hi + 0.25 * overlap(rng);
      if (no_triple) b = std::max(b, elems.back().hi + 0.5);
    }
    elems.push_back({a, b});
    if (b > hi) break;
    a = b - 0.25 * overlap(rng);
    if (a <= elems.back().lo) a = elems.back().lo + 0.25;
  }
  if (rays) {
    elems.front().lo = -mapper::kInf;
    elems.back().hi = mapper::kInf;
  }
  return NiceCover(std::move(elems), no_triple);
}

}  // namespace corpus
