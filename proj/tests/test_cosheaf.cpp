#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "corpus.hpp"
#include "mapper/cosheaf.hpp"

using namespace mapper;

namespace {

// Breadth-first flood fill over the zigzag, with membership read straight
// off the interval geometry.  Returns the smallest label of each component.
std::set<Label> flood_fill_labels(const ConstructibleCosheaf& F, const Interval& I) {
  struct Node {
    bool point;
    std::size_t layer, elem;
  };
  std::vector<Node> nodes;
  std::map<std::tuple<bool, std::size_t, std::size_t>, std::size_t> id;
  for (std::size_t i = 0; i <= F.size(); ++i) {
    const Interval V = F.stratum_interval(i);
    if (!(I.lo < V.hi && V.lo < I.hi)) continue;
    for (std::size_t e = 0; e < F.strata[i].size(); ++e) {
      id[{false, i, e}] = nodes.size();
      nodes.push_back({false, i, e});
    }
  }
  for (std::size_t j = 0; j < F.size(); ++j) {
    if (!(I.lo < F.critical[j] && F.critical[j] < I.hi)) continue;
    for (std::size_t e = 0; e < F.points[j].size(); ++e) {
      id[{true, j, e}] = nodes.size();
      nodes.push_back({true, j, e});
    }
  }
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (std::size_t j = 0; j < F.size(); ++j) {
    for (std::size_t e = 0; e < F.strata[j].size(); ++e) {
      auto a = id.find({false, j, e}), b = id.find({true, j, F.left[j][e]});
      if (a != id.end() && b != id.end()) {
        adj[a->second].push_back(b->second);
        adj[b->second].push_back(a->second);
      }
    }
    for (std::size_t e = 0; e < F.strata[j + 1].size(); ++e) {
      auto a = id.find({false, j + 1, e}), b = id.find({true, j, F.right[j][e]});
      if (a != id.end() && b != id.end()) {
        adj[a->second].push_back(b->second);
        adj[b->second].push_back(a->second);
      }
    }
  }
  std::vector<bool> seen(nodes.size(), false);
  std::set<Label> out;
  for (std::size_t s = 0; s < nodes.size(); ++s) {
    if (seen[s]) continue;
    Label best;
    bool first = true;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      const Node& n = nodes[v];
      const Label& l = n.point ? F.points[n.layer][n.elem] : F.strata[n.layer][n.elem];
      if (first || l < best) best = l;
      first = false;
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          q.push(w);
        }
    }
    out.insert(best);
  }
  return out;
}

std::size_t image_size(const SetMap& m) {
  return std::set<std::size_t>(m.assignment.begin(), m.assignment.end()).size();
}

}  // namespace

TEST_CASE("point cosheaf values") {
  const auto F = ConstructibleCosheaf::point(0.0);
  CHECK(evaluate(F, {-2, 2}) == LabelSet{"*"});
  CHECK(evaluate(F, {1, kInf}).empty());
  CHECK(costalk(F, 0) == LabelSet{"*"});
  CHECK(costalk(F, 5).empty());
  const SetMap m = extension_map(F, {1, 2}, {-3, 3});
  CHECK(m.domain.empty());
  CHECK(m.assignment.empty());
  CHECK(m.codomain == LabelSet{"*"});
}

TEST_CASE("constant cosheaf returns its stratum verbatim") {
  const auto F = ConstructibleCosheaf::constant({"x", "y"});
  CHECK(evaluate(F, {-1, 1}) == LabelSet{"x", "y"});
  CHECK(evaluate(F, Interval::real_line()) == LabelSet{"x", "y"});
  const auto G = corpus::torus_cosheaf();
  CHECK(evaluate(G, {1.2, 1.8}) == LabelSet{"e1", "e2"});
}

TEST_CASE("torus cosheaf evaluation and extension") {
  const auto F = corpus::torus_cosheaf();
  CHECK(evaluate(F, Interval::real_line()).size() == 1);
  CHECK(costalk(F, 1.5).size() == 2);
  const SetMap m = extension_map(F, {1.1, 1.9}, Interval::real_line());
  REQUIRE(m.domain.size() == 2);
  CHECK(m.codomain.size() == 1);
  CHECK(m.assignment == std::vector<std::size_t>{0, 0});
  CHECK(extension_map(F, {0.5, 2.5}, {0.5, 2.5}).is_bijection());
  CHECK_THROWS_AS(extension_map(F, {0, 2}, {1, 3}), CosheafError);
}

TEST_CASE("evaluate agrees with a flood-fill oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    corpus::CosheafShape shape;
    shape.compact = trial % 2 == 0;
    const auto F = corpus::random_cosheaf(rng, shape);
    F.validate();
    for (int q = 0; q < 10; ++q) {
      const Interval I = corpus::random_interval(rng);
      const LabelSet got = evaluate(F, I);
      const std::set<Label> expect = flood_fill_labels(F, I);
      CHECK(std::set<Label>(got.begin(), got.end()) == expect);
      CHECK(got.size() == expect.size());
    }
  }
}

TEST_CASE("colimit over an intersection-closed interval cover") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    Interval I = corpus::random_interval(rng, -4, 4);
    if (!I.bounded()) I = {-4.3, 4.1};
    // Chain of overlapping pieces; with the pairwise overlaps the family is
    // closed under intersections.
    std::uniform_int_distribution<int> npieces(1, 5);
    const int m = npieces(rng);
    std::vector<Interval> pieces;
    const double w = I.length() / m;
    for (int p = 0; p < m; ++p) {
      const double lo = I.lo + p * w - (p == 0 ? 0 : 0.13 * w);
      const double hi = I.lo + (p + 1) * w + (p + 1 == m ? 0 : 0.11 * w);
      pieces.push_back({std::max(lo, I.lo), std::min(hi, I.hi)});
    }
    std::vector<Interval> family = pieces;
    for (int p = 0; p + 1 < m; ++p) family.push_back(*intersect(pieces[p], pieces[p + 1]));
    // Colimit: disjoint union of values, glued along inclusions.
    std::vector<std::pair<std::size_t, std::size_t>> elems;  // (piece, element)
    std::vector<LabelSet> vals;
    for (std::size_t v = 0; v < family.size(); ++v) vals.push_back(evaluate(F, family[v]));
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    for (std::size_t v = 0; v < family.size(); ++v)
      for (std::size_t e = 0; e < vals[v].size(); ++e) {
        index[{v, e}] = elems.size();
        elems.push_back({v, e});
      }
    std::vector<std::size_t> parent(elems.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = 0; b < family.size(); ++b) {
        if (a == b || !family[b].contains(family[a])) continue;
        const SetMap m2 = extension_map(F, family[a], family[b]);
        for (std::size_t e = 0; e < m2.domain.size(); ++e)
          parent[find(index[{a, e}])] = find(index[{b, m2.assignment[e]}]);
      }
    std::set<std::size_t> classes;
    for (std::size_t i = 0; i < elems.size(); ++i) classes.insert(find(i));
    const LabelSet whole = evaluate(F, I);
    CHECK(classes.size() == whole.size());
    // The induced map from the colimit is a bijection.
    std::map<std::size_t, std::set<std::size_t>> image;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const auto [v, e] = elems[i];
      const SetMap m2 = extension_map(F, family[v], I);
      image[find(i)].insert(m2.assignment[e]);
    }
    std::set<std::size_t> hit;
    for (const auto& [c, im] : image) {
      CHECK(im.size() == 1);
      hit.insert(*im.begin());
    }
    CHECK(hit.size() == whole.size());
  }
}

TEST_CASE("extension maps compose") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const Interval I = corpus::random_interval(rng, -3, 3);
    const Interval J = I.thickened(0.37);
    const Interval K = J.thickened(1.1);
    const SetMap ij = extension_map(F, I, J), jk = extension_map(F, J, K), ik = extension_map(F, I, K);
    for (std::size_t e = 0; e < ij.domain.size(); ++e)
      CHECK(jk.assignment[ij.assignment[e]] == ik.assignment[e]);
    CHECK(extension_map(F, I, I).is_bijection());
  }
}

TEST_CASE("normalize removes spurious values and preserves evaluation") {
  std::mt19937_64 rng(14);
  const auto T = corpus::torus_cosheaf();
  const auto T2 = corpus::insert_spurious(T, 1.37);
  CHECK(T2.size() == 5);
  T2.validate();
  const auto N = normalize(T2);
  CHECK(N.critical == T.critical);
  CHECK(is_isomorphic(N, T));
  CHECK(normalize(T) == T);
  for (int trial = 0; trial < 200; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const auto G = normalize(F);
    G.validate();
    CHECK(normalize(G) == G);
    for (int q = 0; q < 20; ++q) {
      const Interval I = corpus::random_interval(rng);
      const Interval J = I.thickened(0.5);
      CHECK(evaluate(F, I).size() == evaluate(G, I).size());
      CHECK(image_size(extension_map(F, I, J)) == image_size(extension_map(G, I, J)));
    }
  }
}

TEST_CASE("smooth matches direct thickened evaluation") {
  std::mt19937_64 rng(15);
  const auto P = ConstructibleCosheaf::point(0.0);
  const auto S = smooth(P, 1.0);
  CHECK(costalk(S, -1.0).size() == 1);
  CHECK(costalk(S, 1.0).size() == 1);
  CHECK(costalk(S, 0.3).size() == 1);
  CHECK(costalk(S, -1.001).empty());
  CHECK(costalk(S, 1.001).empty());

  const auto T = corpus::torus_cosheaf();
  CHECK(costalk(T, 1.5).size() == 2);
  CHECK(costalk(smooth(T, 0.6), 1.5).size() == 1);
  CHECK(costalk(smooth(T, 0.4), 1.5).size() == 2);

  for (int trial = 0; trial < 200; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const double eps = 0.125 * static_cast<double>(rng() % 12);
    const auto G = smooth(F, eps);
    G.validate();
    for (int q = 0; q < 20; ++q) {
      const Interval U = corpus::random_interval(rng);
      const Interval V = U.thickened(0.3);
      CHECK(evaluate(G, U).size() == evaluate(F, U.thickened(eps)).size());
      CHECK(image_size(extension_map(G, U, V)) ==
            image_size(extension_map(F, U.thickened(eps), V.thickened(eps))));
    }
    CHECK(is_isomorphic(smooth(F, 0.0), normalize(F)));
  }
}

TEST_CASE("smoothing is additive") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 150; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const double e1 = 0.1 * static_cast<double>(rng() % 9);
    const double e2 = 0.1 * static_cast<double>(rng() % 9);
    CHECK(is_isomorphic(smooth(F, e1 + e2), smooth(smooth(F, e1), e2)));
  }
}

TEST_CASE("isomorphism search") {
  std::mt19937_64 rng(17);
  const auto T = corpus::torus_cosheaf();
  CHECK_FALSE(is_isomorphic(ConstructibleCosheaf::point(0), ConstructibleCosheaf::point(1)));
  // Both overlap components still glue to the same points, but one stratum
  // set is enlarged.
  auto U = T;
  U.strata[2].push_back("e9");
  U.left[2].push_back(0);
  U.right[1].push_back(0);
  U.validate();
  CHECK_FALSE(is_isomorphic(T, U));
  for (int trial = 0; trial < 300; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const auto G = corpus::relabel(F, rng);
    const auto r = is_isomorphic(F, G);
    REQUIRE(r.isomorphic);
    CHECK(is_morphism(r.source, r.target, *r.witness));
    CHECK(is_isomorphic(G, F));
    CHECK(is_isomorphic(F, F));
    // Rewiring one map usually breaks isomorphism; when it does not, the
    // witness must still be a genuine morphism.
    auto H = G;
    for (std::size_t j = 0; j < H.size(); ++j) {
      if (H.left[j].size() > 0 && H.points[j].size() > 1) {
        H.left[j][0] = (H.left[j][0] + 1) % H.points[j].size();
        break;
      }
    }
    const auto h = is_isomorphic(F, H);
    if (h) CHECK(is_morphism(h.source, h.target, *h.witness));
  }
}

TEST_CASE("image on a natural inclusion") {
  const auto T = corpus::torus_cosheaf();
  CosheafFunctor g(T);
  auto identity = [&](const Interval& I) {
    SetMap m{evaluate(T, I), evaluate(T, I), {}};
    for (std::size_t e = 0; e < m.domain.size(); ++e) m.assignment.push_back(e);
    return m;
  };
  CHECK(image_on(g, g, identity, {0.5, 2.5}).image == evaluate(T, {0.5, 2.5}));
  const auto E = ConstructibleCosheaf::constant({});
  CosheafFunctor e(E);
  auto from_empty = [&](const Interval& I) { return SetMap{{}, evaluate(T, I), {}}; };
  CHECK(image_on(e, g, from_empty, {0.5, 2.5}).image.empty());
  ImagePrecosheaf im(e, g, from_empty);
  CHECK_NOTHROW(im.check_natural({1.2, 1.4}, {0.5, 2.5}));
  CHECK(im.extend({1.2, 1.4}, {0.5, 2.5}).domain.empty());

  // Swapping the two overlap sheets on wide intervals breaks naturality.
  const auto C = ConstructibleCosheaf::constant({"a", "b"});
  CosheafFunctor c(C);
  auto bad = [&](const Interval& I) {
    SetMap m{{"a", "b"}, evaluate(T, I), {}};
    const bool swap = I.length() > 0.5;
    for (std::size_t e = 0; e < 2; ++e) m.assignment.push_back((e + (swap ? 1 : 0)) % m.codomain.size());
    return m;
  };
  ImagePrecosheaf wrong(c, g, bad);
  CHECK_NOTHROW(wrong.check_natural({1.2, 1.4}, {0.5, 2.5}));
  CHECK_THROWS_AS(wrong.check_natural({1.2, 1.4}, {1.1, 1.9}), CosheafError);
}

TEST_CASE("JSON round trip") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    const auto F = corpus::random_cosheaf(rng);
    const auto G = cosheaf_from_json(nlohmann::json::parse(to_json(F).dump()));
    CHECK(G == F);
  }
  auto j = to_json(corpus::torus_cosheaf());
  j["left"][1] = nlohmann::json::object();
  CHECK_THROWS_AS(cosheaf_from_json(j), CosheafError);
  auto k = to_json(corpus::torus_cosheaf());
  k["critical"] = {0, 2, 1, 3};
  CHECK_THROWS_AS(cosheaf_from_json(k), CosheafError);
}
