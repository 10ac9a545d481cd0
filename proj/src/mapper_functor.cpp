#include "mapper/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace mapper {

namespace {

SetMap empty_into(LabelSet codomain) { return SetMap{{}, std::move(codomain), {}}; }

double midpoint(const Interval& I) {
  if (I.bounded()) return 0.5 * (I.lo + I.hi);
  if (std::isfinite(I.lo)) return I.lo;
  if (std::isfinite(I.hi)) return I.hi;
  return 0;
}

}  // namespace

MapperCosheaf mapper_raw(const IntervalFunctor& F, const NiceCover& U) {
  U.validate();
  const Stratification S = stratify(U);
  const std::size_t k = S.R0.size();
  MapperCosheaf M;
  M.cosheaf.critical = S.R0;
  std::vector<LabelSet> stratum_values;
  for (std::size_t t = 0; t <= k; ++t) {
    M.stratum_inflation.push_back(inflate_clipped(U, S.R1[t]));
    const auto& w = M.stratum_inflation.back();
    M.cosheaf.strata.push_back(w ? F.evaluate(*w) : LabelSet{});
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Interval cell{j == 0 ? -kInf : S.R0[j - 1], j + 1 == k ? kInf : S.R0[j + 1]};
    M.point_inflation.push_back(inflate_clipped(U, cell));
    const auto& w = M.point_inflation.back();
    M.cosheaf.points.push_back(w ? F.evaluate(*w) : LabelSet{});
    for (std::size_t side = 0; side < 2; ++side) {
      const auto& src = M.stratum_inflation[j + side];
      SetMap m = src ? F.extend(*src, *w) : empty_into(M.cosheaf.points.back());
      (side == 0 ? M.cosheaf.left : M.cosheaf.right).push_back(std::move(m.assignment));
    }
  }
  return M;
}

void require_cover_spans(const ConstructibleCosheaf& F, const NiceCover& U) {
  U.validate();
  const Interval s = U.support();
  for (std::size_t i = 0; i <= F.size(); ++i)
    if (!F.strata[i].empty() && !s.contains(F.stratum_interval(i)))
      throw CoverError("cover does not span the cosheaf's support");
  for (std::size_t j = 0; j < F.size(); ++j)
    if (!F.points[j].empty() && !s.contains(F.critical[j]))
      throw CoverError("cover does not span the cosheaf's support");
}

ConstructibleCosheaf mapper_functor(const ConstructibleCosheaf& F, const NiceCover& U) {
  require_cover_spans(F, U);
  return normalize(mapper_raw(CosheafFunctor(F), U).cosheaf);
}

EnhancedMapperGraph display_locale(const ConstructibleCosheaf& F) {
  EnhancedMapperGraph G;
  G.graph = realize(F);
  for (std::size_t i = 0; i < G.graph.edges.size(); ++i) {
    std::vector<EdgeProvenance> p;
    for (const auto& e : G.graph.edges[i])
      p.push_back({{G.graph.critical[i], G.graph.critical[i + 1]}, e, {}});
    G.provenance.push_back(std::move(p));
  }
  return G;
}

EnhancedMapperGraph enhanced_mapper(const ConstructibleCosheaf& F, const NiceCover& U) {
  EnhancedMapperGraph G = display_locale(mapper_functor(F, U));
  const Stratification S = stratify(U);
  for (auto& gap : G.provenance)
    for (auto& p : gap)
      for (std::size_t t = 0; t < S.R1.size(); ++t)
        if (p.span.contains(S.R1[t])) p.cover_strata.push_back(t);
  return G;
}

MapperOracles oracles_from_functor(const IntervalFunctor& F, const NiceCover& U) {
  MapperOracles o;
  for (const auto& e : U.elements) o.element.push_back(F.evaluate(e));
  for (std::size_t i = 0; i + 1 < U.size(); ++i) {
    const auto ov = intersect(U.elements[i], U.elements[i + 1]);
    if (!ov) throw CoverError("consecutive cover elements do not overlap");
    o.overlap.push_back(F.evaluate(*ov));
    o.to_left.push_back(F.extend(*ov, U.elements[i]).assignment);
    o.to_right.push_back(F.extend(*ov, U.elements[i + 1]).assignment);
  }
  return o;
}

namespace {

// With `geometric`, each element component becomes one vertex at the middle
// of the element's private part and overlap edges join those midpoints.
EnhancedMapperGraph layout_from_oracles(const MapperOracles& sigma, const NiceCover& U, bool geometric) {
  U.validate();
  const std::size_t m = U.size();
  if (U.has_triple_intersection()) throw CoverError("cover has a nonempty triple intersection");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 2; j < m; ++j)
      if (intervals_meet(U.elements[i], U.elements[j]))
        throw CoverError("non-consecutive cover elements overlap");
  if (sigma.element.size() != m || sigma.overlap.size() + 1 != m || sigma.to_left.size() + 1 != m ||
      sigma.to_right.size() + 1 != m)
    throw CoverError("oracle data does not match the cover");
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const auto n = sigma.overlap[i].size();
    if (sigma.to_left[i].size() != n || sigma.to_right[i].size() != n)
      throw CoverError("overlap map not total on overlap " + std::to_string(i));
    for (std::size_t t = 0; t < n; ++t)
      if (sigma.to_left[i][t] >= sigma.element[i].size() ||
          sigma.to_right[i][t] >= sigma.element[i + 1].size())
        throw CoverError("overlap map leaves its codomain on overlap " + std::to_string(i));
  }
  for (std::size_t i : {std::size_t{0}, m - 1})
    if (!sigma.element[i].empty() && !U.elements[i].bounded()) throw CoverError("non-compact support");

  // Vertex (s,-) of element i sits at the left end of the part of U_i outside
  // its left overlap, (s,+) at the right end of the part outside its right one.
  auto minus_value = [&](std::size_t i) { return i == 0 ? U.elements[0].lo : U.elements[i - 1].hi; };
  auto plus_value = [&](std::size_t i) { return i + 1 == m ? U.elements[i].hi : U.elements[i + 1].lo; };
  struct Vert {
    double value;
    Label label;
  };
  struct Edge {
    std::size_t a, b;  // vertex ids, value(a) < value(b)
    Label label;
    Interval span;
  };
  std::vector<Vert> verts;
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> vminus(m), vplus(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(minus_value(i) < plus_value(i))) throw CoverError("degenerate cover element " + std::to_string(i));
    for (const auto& s : sigma.element[i]) {
      const std::string tag = std::to_string(i) + ":" + s;
      if (geometric) {
        vminus[i].push_back(verts.size());
        vplus[i].push_back(verts.size());
        verts.push_back({(minus_value(i) + plus_value(i)) / 2, tag});
        continue;
      }
      vminus[i].push_back(verts.size());
      verts.push_back({minus_value(i), tag + "-"});
      vplus[i].push_back(verts.size());
      verts.push_back({plus_value(i), tag + "+"});
      edges.push_back({vminus[i].back(), vplus[i].back(), tag, {minus_value(i), plus_value(i)}});
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i)
    for (std::size_t t = 0; t < sigma.overlap[i].size(); ++t) {
      const std::size_t a = vplus[i][sigma.to_left[i][t]], b = vminus[i + 1][sigma.to_right[i][t]];
      edges.push_back({a, b, std::to_string(i) + "&" + std::to_string(i + 1) + ":" + sigma.overlap[i][t],
                       {verts[a].value, verts[b].value}});
    }

  // Lay the graph over its distinct vertex values, subdividing edges that
  // pass over other values.
  std::vector<double> values;
  for (const auto& v : verts) values.push_back(v.value);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(), [](double a, double b) { return nearly_equal(a, b); }),
               values.end());
  auto level = [&](double x) {
    return static_cast<std::size_t>(
        std::find_if(values.begin(), values.end(), [&](double y) { return nearly_equal(x, y); }) -
        values.begin());
  };
  EnhancedMapperGraph G;
  G.graph.critical = values;
  G.graph.vertices.resize(values.size());
  G.graph.edges.resize(values.size() - (values.empty() ? 0 : 1));
  G.graph.attach_left.resize(G.graph.edges.size());
  G.graph.attach_right.resize(G.graph.edges.size());
  G.provenance.resize(G.graph.edges.size());
  for (const auto& v : verts) G.graph.vertices[level(v.value)].push_back(v.label);
  for (const auto& e : edges) {
    const std::size_t la = level(verts[e.a].value), lb = level(verts[e.b].value);
    Label prev = verts[e.a].label;
    for (std::size_t g = la; g < lb; ++g) {
      Label next = g + 1 == lb ? verts[e.b].label : e.label + "@" + std::to_string(g + 1);
      if (g + 1 != lb) G.graph.vertices[g + 1].push_back(next);
      const Label piece = lb - la == 1 ? e.label : e.label + "#" + std::to_string(g - la);
      G.graph.edges[g].push_back(piece);
      G.graph.attach_left[g][piece] = prev;
      G.graph.attach_right[g][piece] = next;
      G.provenance[g].push_back({{values[g], values[g + 1]}, e.label, {}});
      prev = next;
    }
  }
  return G;
}

}  // namespace

EnhancedMapperGraph enhanced_mapper_from_oracles(const MapperOracles& sigma, const NiceCover& U) {
  return layout_from_oracles(sigma, U, false);
}

EnhancedMapperGraph geometric_mapper_from_oracles(const MapperOracles& sigma, const NiceCover& U) {
  return layout_from_oracles(sigma, U, true);
}

namespace {

AbstractGraph nerve_nodes(const MapperOracles& sigma, const NiceCover& U,
                          std::vector<std::vector<std::size_t>>& id) {
  AbstractGraph G;
  id.resize(sigma.element.size());
  for (std::size_t i = 0; i < sigma.element.size(); ++i)
    for (const auto& s : sigma.element[i]) {
      id[i].push_back(G.nodes.size());
      G.nodes.push_back({i, s});
      G.values.push_back(midpoint(U.elements[i]));
    }
  return G;
}

}  // namespace

AbstractGraph classic_mapper(const MapperOracles& sigma, const NiceCover& U) {
  std::vector<std::vector<std::size_t>> id;
  AbstractGraph G = nerve_nodes(sigma, U, id);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < sigma.overlap.size(); ++i)
    for (std::size_t t = 0; t < sigma.overlap[i].size(); ++t) {
      const std::pair<std::size_t, std::size_t> e{id[i][sigma.to_left[i][t]], id[i + 1][sigma.to_right[i][t]]};
      if (seen.insert(e).second) G.edges.push_back(e);
    }
  return G;
}

AbstractGraph multinerve_mapper(const MapperOracles& sigma, const NiceCover& U) {
  std::vector<std::vector<std::size_t>> id;
  AbstractGraph G = nerve_nodes(sigma, U, id);
  for (std::size_t i = 0; i < sigma.overlap.size(); ++i)
    for (std::size_t t = 0; t < sigma.overlap[i].size(); ++t)
      G.edges.push_back({id[i][sigma.to_left[i][t]], id[i + 1][sigma.to_right[i][t]]});
  return G;
}

nlohmann::json to_json(const EnhancedMapperGraph& G) {
  nlohmann::json j;
  j["graph"] = to_json(G.graph);
  j["provenance"] = nlohmann::json::array();
  for (const auto& gap : G.provenance) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& p : gap)
      g.push_back({{"span", interval_to_json(p.span)}, {"label", p.cosheaf_label}, {"cover_strata", p.cover_strata}});
    j["provenance"].push_back(g);
  }
  return j;
}

EnhancedMapperGraph enhanced_from_json(const nlohmann::json& j) {
  EnhancedMapperGraph G;
  G.graph = rgraph_from_json(j.at("graph"));
  for (const auto& gap : j.at("provenance")) {
    std::vector<EdgeProvenance> v;
    for (const auto& p : gap)
      v.push_back({interval_from_json(p.at("span")), p.at("label").get<Label>(),
                   p.at("cover_strata").get<std::vector<std::size_t>>()});
    G.provenance.push_back(std::move(v));
  }
  return G;
}

std::string to_dot(const EnhancedMapperGraph& G, const std::string& name) { return to_dot(G.graph, name); }

nlohmann::json to_json(const AbstractGraph& G) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t v = 0; v < G.nodes.size(); ++v)
    j["nodes"].push_back({{"element", G.nodes[v].first}, {"component", G.nodes[v].second}, {"value", G.values[v]}});
  j["edges"] = G.edges;
  return j;
}

std::string to_dot(const AbstractGraph& G, const std::string& name) {
  std::ostringstream os;
  os.precision(17);
  os << "graph " << name << " {\n";
  for (std::size_t v = 0; v < G.nodes.size(); ++v)
    os << "  n" << v << " [label=\"U" << G.nodes[v].first << ":" << G.nodes[v].second
       << "\", value=" << G.values[v] << "];\n";
  for (const auto& [a, b] : G.edges) os << "  n" << a << " -- n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace mapper
