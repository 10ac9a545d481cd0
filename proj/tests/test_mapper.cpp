#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "corpus.hpp"
#include "mapper/mapper.hpp"

using namespace mapper;

namespace {

const NiceCover torus_cover{{{-0.5, 1.6}, {1.4, 3.5}}};

// Ranks over GF(2) of the vertex-edge incidence matrix.
std::size_t incidence_rank(const RGraph& X) {
  std::map<std::pair<std::size_t, Label>, std::size_t> vid;
  for (std::size_t i = 0; i < X.vertices.size(); ++i)
    for (const auto& v : X.vertices[i]) vid.emplace(std::make_pair(i, v), vid.size());
  std::vector<std::vector<bool>> rows;
  for (std::size_t i = 0; i < X.edges.size(); ++i)
    for (const auto& e : X.edges[i]) {
      std::vector<bool> r(vid.size(), false);
      r[vid.at({i, X.attach_left[i].at(e)})] = true;
      r[vid.at({i + 1, X.attach_right[i].at(e)})] = true;
      rows.push_back(r);
    }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < vid.size() && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && !rows[p][c]) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t q = 0; q < rows.size(); ++q)
      if (q != rank && rows[q][c])
        for (std::size_t k = 0; k < vid.size(); ++k) rows[q][k] = rows[q][k] != rows[rank][k];
    ++rank;
  }
  return rank;
}

std::multiset<std::pair<std::string, std::string>> key_pairs(std::vector<std::pair<std::string, std::string>> v) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (auto& [a, b] : v) out.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
  return out;
}

}  // namespace

TEST_CASE("mapper functor on the worked cover") {
  const NiceCover U{{{-kInf, -1}, {-2, 2}, {1, kInf}}};
  const auto M = mapper_functor(ConstructibleCosheaf::point(0.0), U);
  for (double x : {-3.0, -1.5, 1.5, 3.0}) CHECK(costalk(M, x).empty());
  for (double x : {-1.0, -0.5, 0.0, 1.0}) CHECK(costalk(M, x).size() == 1);
}

TEST_CASE("mapper functor reads values through the inflation") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 150; ++t) {
    const auto F = corpus::random_cosheaf(rng);
    const auto U = corpus::random_cover(rng, -4.5, 4.5, false, t % 2 == 0);
    const auto M = mapper_functor(F, U);
    const auto R = mapper_raw(CosheafFunctor(F), U).cosheaf;
    const auto S = stratify(U);
    CHECK(std::includes(S.R0.begin(), S.R0.end(), M.critical.begin(), M.critical.end()));
    for (int q = 0; q < 20; ++q) {
      const Interval I = corpus::random_interval(rng);
      const auto w = inflate_clipped(U, I);
      const std::size_t want = w ? evaluate(F, *w).size() : 0;
      CHECK(evaluate(M, I).size() == want);
      CHECK(evaluate(R, I).size() == want);
    }
  }
}

TEST_CASE("torus mapper cosheaf") {
  const auto F = corpus::torus_cosheaf();
  const auto M = mapper_functor(F, torus_cover);
  CHECK(costalk(M, 0.5).size() == 1);
  CHECK(costalk(M, 1.5).size() == 2);
  CHECK(costalk(M, 2.5).size() == 1);
  const NiceCover giant{{{-1, 4}}};
  const auto G = mapper_functor(F, giant);
  for (double x : {-0.9, 0.0, 1.5, 3.9}) CHECK(costalk(G, x).size() == 1);
  CHECK_THROWS_AS(mapper_functor(F, NiceCover{{{0.5, 4}}}), CoverError);
}

TEST_CASE("display locale") {
  ConstructibleCosheaf F;
  F.critical = {0, 1};
  F.strata = {{}, {"x"}, {}};
  F.points = {{"p"}, {"q"}};
  F.left = {{}, {0}};
  F.right = {{0}, {}};
  const auto G = display_locale(F);
  CHECK(G.graph.vertex_count() == 2);
  CHECK(G.graph.edge_count() == 1);

  const auto E = enhanced_mapper(corpus::torus_cosheaf(), torus_cover);
  CHECK(E.graph.vertex_count() == 4);
  CHECK(E.graph.edge_count() == 4);
  CHECK(betti(E.graph).b1 == 1);
  CHECK(E.graph.critical == std::vector<double>{-0.5, 1.4, 1.6, 3.5});
  CHECK(E.graph.edges[1].size() == 2);
  CHECK(E.provenance[1][0].cover_strata == std::vector<std::size_t>{2});
  CHECK_THROWS_WITH(display_locale(ConstructibleCosheaf::constant({"z"})), "non-compact support");
}

TEST_CASE("display locale ignores spurious critical values") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto F = corpus::random_cosheaf(rng);
    if (F.size() == 0) continue;
    const double x = F.critical.front() + (F.critical.back() - F.critical.front() + 1) * 0.37 - 0.11;
    const auto G = corpus::insert_spurious(F, x);
    CHECK(rgraph_isomorphic(display_locale(G).graph, display_locale(F).graph));
  }
}

TEST_CASE("oracle construction on torus data") {
  MapperOracles o;
  o.element = {{"A"}, {"B"}};
  o.overlap = {{"t1", "t2"}};
  o.to_left = {{0, 0}};
  o.to_right = {{0, 0}};
  const auto G = enhanced_mapper_from_oracles(o, torus_cover);
  CHECK(G.graph.vertex_count() == 4);
  CHECK(G.graph.edge_count() == 4);
  CHECK(G.graph.critical == std::vector<double>{-0.5, 1.4, 1.6, 3.5});
  CHECK(G.graph.vertices[0] == LabelSet{"0:A-"});
  CHECK(G.graph.vertices[1] == LabelSet{"0:A+"});
  CHECK(G.graph.vertices[2] == LabelSet{"1:B-"});
  CHECK(G.graph.vertices[3] == LabelSet{"1:B+"});
  CHECK(rgraph_isomorphic(G.graph, enhanced_mapper(corpus::torus_cosheaf(), torus_cover).graph));

  const auto exact = oracles_from_functor(CosheafFunctor(corpus::torus_cosheaf()), torus_cover);
  CHECK(exact.overlap[0].size() == 2);

  MapperOracles one;
  one.element = {{"s"}};
  const auto G1 = enhanced_mapper_from_oracles(one, NiceCover{{{0, 1}}});
  CHECK(G1.graph.vertex_count() == 2);
  CHECK(G1.graph.edge_count() == 1);

  MapperOracles apart = o;
  apart.overlap = {{}};
  apart.to_left = {{}};
  apart.to_right = {{}};
  const auto G2 = enhanced_mapper_from_oracles(apart, torus_cover);
  CHECK(betti(G2.graph).b0 == 2);
  CHECK(G2.graph.edge_count() == 2);

  MapperOracles bad = o;
  bad.to_left = {{0}};
  CHECK_THROWS_AS(enhanced_mapper_from_oracles(bad, torus_cover), CoverError);
  MapperOracles three;
  three.element = {{"a"}, {"b"}, {"c"}};
  three.overlap = {{}, {}};
  three.to_left = three.to_right = {{}, {}};
  CHECK_THROWS_AS(enhanced_mapper_from_oracles(three, NiceCover{{{0, 3}, {1, 4}, {2, 5}}}), CoverError);
}

TEST_CASE("geometric mapper variant") {
  const auto o = oracles_from_functor(CosheafFunctor(corpus::torus_cosheaf()), torus_cover);
  const auto G = geometric_mapper_from_oracles(o, torus_cover);
  REQUIRE(G.graph.critical.size() == 2);
  CHECK(G.graph.critical[0] == doctest::Approx(0.45));
  CHECK(G.graph.critical[1] == doctest::Approx(2.55));
  CHECK(G.graph.vertex_count() == 2);
  CHECK(G.graph.edge_count() == 2);
  CHECK(betti(G.graph).b1 == 1);
  // Same edge count as the multinerve graph when there are no triple overlaps.
  CHECK(G.graph.edge_count() == multinerve_mapper(o, torus_cover).edges.size());
}

TEST_CASE("classic and multinerve mapper") {
  const auto o = oracles_from_functor(CosheafFunctor(corpus::torus_cosheaf()), torus_cover);
  const auto c = classic_mapper(o, torus_cover);
  const auto m = multinerve_mapper(o, torus_cover);
  CHECK(c.nodes.size() == 2);
  CHECK(c.edges.size() == 1);
  CHECK(m.nodes.size() == 2);
  CHECK(m.edges.size() == 2);
  CHECK(c.values == std::vector<double>{0.55, 2.45});

  MapperOracles none;
  none.element = {{"a"}, {"b"}};
  none.overlap = {{}};
  none.to_left = none.to_right = {{}};
  CHECK(classic_mapper(none, torus_cover).edges.empty());

  // Two segments, heights 0..2 and 1..3, three-element cover.
  RGraph X;
  X.critical = {0, 1, 2, 3};
  X.vertices = {{"a0"}, {"b0", "p"}, {"a1", "q"}, {"b1"}};
  X.edges = {{"a"}, {"a", "b"}, {"b"}};
  X.attach_left = {{{"a", "a0"}}, {{"a", "p"}, {"b", "b0"}}, {{"b", "q"}}};
  X.attach_right = {{{"a", "p"}}, {{"a", "a1"}, {"b", "q"}}, {{"b", "b1"}}};
  const NiceCover U3{{{-0.5, 1.25}, {0.75, 2.25}, {1.75, 3.5}}};
  const auto o6 = oracles_from_functor(CosheafFunctor(reeb_cosheaf(X)), U3);
  const auto c6 = classic_mapper(o6, U3), m6 = multinerve_mapper(o6, U3);
  CHECK(c6.edges == m6.edges);
  // Each element meets both segments; the nerve is two disjoint 3-node paths.
  CHECK(c6.nodes.size() == 6);
  CHECK(c6.edges.size() == 4);
  std::map<std::size_t, std::size_t> degree;
  for (const auto& [a, b] : c6.edges) {
    ++degree[a];
    ++degree[b];
  }
  CHECK(std::count_if(degree.begin(), degree.end(), [](const auto& kv) { return kv.second == 2; }) == 2);
}

TEST_CASE("oracle construction agrees with the display locale") {
  std::mt19937_64 rng(43);
  std::size_t checked = 0;
  for (int t = 0; t < 200; ++t) {
    const auto X = corpus::random_rgraph(rng);
    const auto U = corpus::random_cover(rng, -4.5, 4.5, true);
    REQUIRE_FALSE(U.has_triple_intersection());
    const auto F = reeb_cosheaf(X);
    const auto o = oracles_from_functor(CosheafFunctor(F), U);
    const auto A = enhanced_mapper_from_oracles(o, U);
    const auto D = enhanced_mapper(F, U);
    CHECK(rgraph_isomorphic(A.graph, D.graph));

    // Incidence rank gives the Betti numbers independently of union-find.
    const std::size_t rank = incidence_rank(D.graph);
    const Betti b = betti(D.graph);
    CHECK(b.b0 == D.graph.vertex_count() - rank);
    CHECK(b.b1 == D.graph.edge_count() - rank);

    // Contracting each element edge of the oracle graph yields the multinerve.
    const auto N = multinerve_mapper(o, U);
    std::vector<std::pair<std::string, std::string>> glued, nerve;
    for (std::size_t g = 0; g < A.graph.edges.size(); ++g)
      for (const auto& e : A.graph.edges[g]) {
        if (e.find('&') == std::string::npos) continue;
        auto key = [](std::string v) { return v.substr(0, v.size() - 1); };
        glued.push_back({key(A.graph.attach_left[g].at(e)), key(A.graph.attach_right[g].at(e))});
      }
    for (const auto& [a, b2] : N.edges)
      nerve.push_back({std::to_string(N.nodes[a].first) + ":" + N.nodes[a].second,
                       std::to_string(N.nodes[b2].first) + ":" + N.nodes[b2].second});
    CHECK(key_pairs(glued) == key_pairs(nerve));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("enhanced mapper JSON round trip") {
  const auto E = enhanced_mapper(corpus::torus_cosheaf(), torus_cover);
  const auto back = enhanced_from_json(nlohmann::json::parse(to_json(E).dump()));
  CHECK(back.graph == E.graph);
  CHECK(to_json(back) == to_json(E));
  CHECK(to_dot(classic_mapper(oracles_from_functor(CosheafFunctor(corpus::torus_cosheaf()), torus_cover),
                              torus_cover))
            .find("n0 -- n1") != std::string::npos);
}
