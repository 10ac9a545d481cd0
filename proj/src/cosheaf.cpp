#include "mapper/cosheaf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mapper/graph_iso.hpp"
#include "union_find.hpp"

namespace mapper {

bool nearly_equal(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= kTieTolerance * scale;
}

bool strictly_less(double a, double b) { return a < b && !nearly_equal(a, b); }

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool Interval::contains(double x) const { return strictly_less(lo, x) && strictly_less(x, hi); }

bool Interval::contains(const Interval& o) const {
  return !strictly_less(o.lo, lo) && !strictly_less(hi, o.hi);
}

bool intervals_meet(const Interval& a, const Interval& b) {
  return strictly_less(std::max(a.lo, b.lo), std::min(a.hi, b.hi));
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (!strictly_less(r.lo, r.hi)) return std::nullopt;
  return r;
}

const Label& SetMap::operator()(const Label& x) const {
  auto it = std::find(domain.begin(), domain.end(), x);
  if (it == domain.end()) throw CosheafError("label '" + x + "' not in map domain");
  return codomain[assignment[static_cast<std::size_t>(it - domain.begin())]];
}

bool SetMap::is_bijection() const {
  if (domain.size() != codomain.size()) return false;
  std::vector<bool> hit(codomain.size(), false);
  for (std::size_t a : assignment) {
    if (hit[a]) return false;
    hit[a] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------

ConstructibleCosheaf ConstructibleCosheaf::constant(LabelSet values) {
  ConstructibleCosheaf F;
  F.strata.push_back(std::move(values));
  return F;
}

ConstructibleCosheaf ConstructibleCosheaf::point(double x, const Label& label) {
  ConstructibleCosheaf F;
  F.critical = {x};
  F.strata = {{}, {}};
  F.points = {{label}};
  F.left = {{}};
  F.right = {{}};
  return F;
}

Interval ConstructibleCosheaf::stratum_interval(std::size_t i) const {
  return {i == 0 ? -kInf : critical[i - 1], i == critical.size() ? kInf : critical[i]};
}

Interval ConstructibleCosheaf::point_interval(std::size_t j) const {
  return {j == 0 ? -kInf : critical[j - 1], j + 1 == critical.size() ? kInf : critical[j + 1]};
}

bool ConstructibleCosheaf::empty() const {
  for (const auto& s : strata)
    if (!s.empty()) return false;
  for (const auto& p : points)
    if (!p.empty()) return false;
  return true;
}

namespace {

void check_unique(const LabelSet& s, const std::string& what) {
  std::set<Label> seen;
  for (const auto& l : s)
    if (!seen.insert(l).second) throw CosheafError("duplicate label '" + l + "' in " + what);
}

void check_map(const std::vector<std::size_t>& m, std::size_t dom, std::size_t cod,
               const std::string& what) {
  if (m.size() != dom) throw CosheafError(what + " not total");
  for (std::size_t x : m)
    if (x >= cod) throw CosheafError(what + " leaves its codomain");
}

}  // namespace

void ConstructibleCosheaf::validate() const {
  const std::size_t k = critical.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (!std::isfinite(critical[j])) throw CosheafError("critical value not finite");
    if (j > 0 && !(critical[j - 1] < critical[j])) throw CosheafError("critical not increasing");
  }
  if (strata.size() != k + 1) throw CosheafError("expected one stratum set per stratum");
  if (points.size() != k) throw CosheafError("expected one point set per critical value");
  if (left.size() != k || right.size() != k) throw CosheafError("expected one map pair per point");
  for (std::size_t i = 0; i <= k; ++i) check_unique(strata[i], "stratum " + std::to_string(i));
  for (std::size_t j = 0; j < k; ++j) {
    check_unique(points[j], "point " + std::to_string(j));
    check_map(left[j], strata[j].size(), points[j].size(), "left map " + std::to_string(j));
    check_map(right[j], strata[j + 1].size(), points[j].size(), "right map " + std::to_string(j));
  }
}

// ---------------------------------------------------------------------------

std::size_t Components::component_of(const NodeRef& n) const {
  if (n.is_point) return point_component[n.layer - span.first][n.element];
  return stratum_component[n.layer - span.first][n.element];
}

bool Components::covers(const NodeRef& n) const {
  if (n.layer < span.first) return false;
  if (n.is_point) return n.layer < span.last;
  return n.layer <= span.last;
}

Span span_of(const ConstructibleCosheaf& F, const Interval& I) {
  std::size_t lo = 0, hi = 0;
  for (double a : F.critical) {
    if (!strictly_less(I.lo, a)) ++lo;
    if (strictly_less(a, I.hi)) ++hi;
  }
  return {lo, std::max(lo, hi)};
}

Span closed_span_of(const ConstructibleCosheaf& F, double lo, double hi) {
  std::size_t a_lo = 0, a_hi = 0;
  for (double a : F.critical) {
    if (strictly_less(a, lo)) ++a_lo;
    if (!strictly_less(hi, a)) ++a_hi;
  }
  return {a_lo, std::max(a_lo, a_hi)};
}

Components components(const ConstructibleCosheaf& F, Span s) {
  Components C;
  C.span = s;
  // Node order: S_first, P_first, S_first+1, ..., S_last.
  std::vector<NodeRef> nodes;
  std::vector<std::size_t> stratum_base, point_base;
  for (std::size_t i = s.first; i <= s.last; ++i) {
    stratum_base.push_back(nodes.size());
    for (std::size_t e = 0; e < F.strata[i].size(); ++e) nodes.push_back({false, i, e});
    if (i < s.last) {
      point_base.push_back(nodes.size());
      for (std::size_t e = 0; e < F.points[i].size(); ++e) nodes.push_back({true, i, e});
    }
  }
  UnionFind uf(nodes.size());
  for (std::size_t j = s.first; j < s.last; ++j) {
    const std::size_t pb = point_base[j - s.first];
    const std::size_t lb = stratum_base[j - s.first];
    const std::size_t rb = stratum_base[j + 1 - s.first];
    for (std::size_t e = 0; e < F.left[j].size(); ++e) uf.unite(lb + e, pb + F.left[j][e]);
    for (std::size_t e = 0; e < F.right[j].size(); ++e) uf.unite(rb + e, pb + F.right[j][e]);
  }
  std::vector<std::size_t> comp_of_root(nodes.size(), SIZE_MAX);
  std::vector<std::size_t> comp(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const std::size_t r = uf.find(v);
    if (comp_of_root[r] == SIZE_MAX) {
      comp_of_root[r] = C.members.size();
      C.members.emplace_back();
      C.representative.push_back(nodes[v]);
    }
    comp[v] = comp_of_root[r];
    C.members[comp[v]].push_back(nodes[v]);
  }
  auto label_of = [&](const NodeRef& n) -> const Label& {
    return n.is_point ? F.points[n.layer][n.element] : F.strata[n.layer][n.element];
  };
  std::map<Label, int> used;
  for (const auto& mem : C.members) {
    Label best = label_of(mem.front());
    for (const auto& n : mem) best = std::min(best, label_of(n));
    int& count = used[best];
    if (count++ > 0) best += "#" + std::to_string(count);
    C.labels.push_back(best);
  }
  for (std::size_t i = s.first; i <= s.last; ++i) {
    std::vector<std::size_t> row(F.strata[i].size());
    for (std::size_t e = 0; e < row.size(); ++e) row[e] = comp[stratum_base[i - s.first] + e];
    C.stratum_component.push_back(std::move(row));
    if (i < s.last) {
      std::vector<std::size_t> prow(F.points[i].size());
      for (std::size_t e = 0; e < prow.size(); ++e) prow[e] = comp[point_base[i - s.first] + e];
      C.point_component.push_back(std::move(prow));
    }
  }
  return C;
}

std::vector<std::size_t> component_extension(const Components& inner, const Components& outer) {
  std::vector<std::size_t> m(inner.size());
  for (std::size_t c = 0; c < inner.size(); ++c) {
    const NodeRef& rep = inner.representative[c];
    if (!outer.covers(rep)) throw CosheafError("extension between non-nested spans");
    m[c] = outer.component_of(rep);
  }
  return m;
}

LabelSet evaluate(const ConstructibleCosheaf& F, const Interval& I) {
  return components(F, span_of(F, I)).labels;
}

SetMap extension_map(const ConstructibleCosheaf& F, const Interval& I, const Interval& J) {
  if (!J.contains(I)) throw CosheafError("extension_map: intervals are not nested");
  Components ci = components(F, span_of(F, I));
  Components cj = components(F, span_of(F, J));
  return {ci.labels, cj.labels, component_extension(ci, cj)};
}

LabelSet costalk(const ConstructibleCosheaf& F, double x) {
  for (std::size_t j = 0; j < F.size(); ++j)
    if (nearly_equal(F.critical[j], x)) return F.points[j];
  std::size_t i = 0;
  while (i < F.size() && F.critical[i] < x) ++i;
  return F.strata[i];
}

// ---------------------------------------------------------------------------

namespace {

// Cosheaf on a grid from the spans its cells touch in F.
ConstructibleCosheaf assemble(const ConstructibleCosheaf& F, const std::vector<double>& grid,
                              const std::vector<Span>& stratum_spans,
                              const std::vector<Span>& point_spans) {
  ConstructibleCosheaf G;
  G.critical = grid;
  std::vector<Components> sc, pc;
  for (const Span& s : stratum_spans) sc.push_back(components(F, s));
  for (const Span& s : point_spans) pc.push_back(components(F, s));
  for (const auto& c : sc) G.strata.push_back(c.labels);
  for (std::size_t t = 0; t < grid.size(); ++t) {
    G.points.push_back(pc[t].labels);
    G.left.push_back(component_extension(sc[t], pc[t]));
    G.right.push_back(component_extension(sc[t + 1], pc[t]));
  }
  return G;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || !nearly_equal(out.back(), x)) out.push_back(x);
  return out;
}

std::size_t grid_index(const std::vector<double>& grid, double x) {
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  std::size_t best = SIZE_MAX;
  double gap = kInf;
  for (auto c : {it, it == grid.begin() ? it : it - 1}) {
    if (c == grid.end()) continue;
    if (std::fabs(*c - x) < gap) {
      gap = std::fabs(*c - x);
      best = static_cast<std::size_t>(c - grid.begin());
    }
  }
  return best;
}

}  // namespace

ConstructibleCosheaf refine(const ConstructibleCosheaf& F, const std::vector<double>& grid_in) {
  std::vector<double> grid = sorted_unique(grid_in);
  for (double a : F.critical) {
    const std::size_t g = grid_index(grid, a);
    if (g == SIZE_MAX || !nearly_equal(grid[g], a))
      throw CosheafError("refine: grid misses a critical value");
  }
  const std::size_t m = grid.size();
  std::vector<Span> ss, ps;
  auto cell = [&](std::size_t t) {
    return Interval{t == 0 ? -kInf : grid[t - 1], t == m ? kInf : grid[t]};
  };
  for (std::size_t t = 0; t <= m; ++t) ss.push_back(span_of(F, cell(t)));
  for (std::size_t t = 0; t < m; ++t)
    ps.push_back(span_of(F, {t == 0 ? -kInf : grid[t - 1], t + 1 == m ? kInf : grid[t + 1]}));
  return assemble(F, grid, ss, ps);
}

ConstructibleCosheaf normalize(const ConstructibleCosheaf& F) {
  ConstructibleCosheaf G;
  G.strata.push_back(F.strata[0]);
  std::vector<std::size_t> cur(F.strata[0].size());
  std::iota(cur.begin(), cur.end(), 0);
  for (std::size_t j = 0; j < F.size(); ++j) {
    const SetMap l{F.strata[j], F.points[j], F.left[j]};
    const SetMap r{F.strata[j + 1], F.points[j], F.right[j]};
    if (l.is_bijection() && r.is_bijection()) {
      std::vector<std::size_t> inv(F.points[j].size());
      for (std::size_t e = 0; e < F.right[j].size(); ++e) inv[F.right[j][e]] = e;
      for (auto& c : cur) c = inv[F.left[j][c]];
      continue;
    }
    G.critical.push_back(F.critical[j]);
    G.points.push_back(F.points[j]);
    std::vector<std::size_t> lm(cur.size());
    for (std::size_t c = 0; c < cur.size(); ++c) lm[c] = F.left[j][cur[c]];
    G.left.push_back(std::move(lm));
    G.right.push_back(F.right[j]);
    G.strata.push_back(F.strata[j + 1]);
    cur.resize(F.strata[j + 1].size());
    std::iota(cur.begin(), cur.end(), 0);
  }
  return G;
}

ConstructibleCosheaf smooth_raw(const ConstructibleCosheaf& F, double eps) {
  if (!(eps >= 0)) throw CosheafError("smooth: negative thickening");
  const std::size_t k = F.size();
  std::vector<double> events;
  for (double a : F.critical) {
    events.push_back(a - eps);
    events.push_back(a + eps);
  }
  std::vector<double> grid = sorted_unique(events);
  const std::size_t m = grid.size();
  std::vector<std::size_t> enter(k), leave(k);
  for (std::size_t j = 0; j < k; ++j) {
    enter[j] = grid_index(grid, F.critical[j] - eps);
    leave[j] = grid_index(grid, F.critical[j] + eps);
  }
  auto span_for = [&](auto included, std::size_t passed) -> Span {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (included(j)) {
        lo = std::min(lo, j);
        hi = std::max(hi, j);
      }
    }
    if (lo == SIZE_MAX) return {passed, passed};
    return {lo, hi + 1};
  };
  std::vector<Span> ss, ps;
  for (std::size_t t = 0; t <= m; ++t) {
    std::size_t passed = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (t > 0 && leave[j] <= t - 1) ++passed;
    ss.push_back(span_for(
        [&](std::size_t j) { return t > 0 && enter[j] <= t - 1 && leave[j] >= t; }, passed));
  }
  for (std::size_t t = 0; t < m; ++t)
    ps.push_back(span_for([&](std::size_t j) { return enter[j] <= t && t <= leave[j]; }, 0));
  return assemble(F, grid, ss, ps);
}

ConstructibleCosheaf smooth(const ConstructibleCosheaf& F, double eps) {
  return normalize(smooth_raw(F, eps));
}

// ---------------------------------------------------------------------------

bool is_morphism(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                 const CosheafMorphism& m) {
  const std::size_t k = F.size();
  if (G.size() != k || m.strata.size() != k + 1 || m.points.size() != k) return false;
  for (std::size_t j = 0; j < k; ++j)
    if (!nearly_equal(F.critical[j], G.critical[j])) return false;
  for (std::size_t i = 0; i <= k; ++i) {
    if (m.strata[i].size() != F.strata[i].size()) return false;
    for (std::size_t x : m.strata[i])
      if (x >= G.strata[i].size()) return false;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (m.points[j].size() != F.points[j].size()) return false;
    for (std::size_t x : m.points[j])
      if (x >= G.points[j].size()) return false;
    for (std::size_t s = 0; s < F.strata[j].size(); ++s)
      if (m.points[j][F.left[j][s]] != G.left[j][m.strata[j][s]]) return false;
    for (std::size_t s = 0; s < F.strata[j + 1].size(); ++s)
      if (m.points[j][F.right[j][s]] != G.right[j][m.strata[j + 1][s]]) return false;
  }
  return true;
}

namespace {

struct ZigzagGraph {
  LayeredGraph graph;
  std::vector<std::vector<int>> stratum_node, point_node;
};

ZigzagGraph zigzag_graph(const ConstructibleCosheaf& F) {
  ZigzagGraph z;
  for (std::size_t i = 0; i <= F.size(); ++i) {
    z.stratum_node.emplace_back();
    for (std::size_t e = 0; e < F.strata[i].size(); ++e)
      z.stratum_node.back().push_back(z.graph.add_node(static_cast<int>(2 * i)));
  }
  for (std::size_t j = 0; j < F.size(); ++j) {
    z.point_node.emplace_back();
    for (std::size_t e = 0; e < F.points[j].size(); ++e)
      z.point_node.back().push_back(z.graph.add_node(static_cast<int>(2 * j + 1)));
    for (std::size_t e = 0; e < F.left[j].size(); ++e)
      z.graph.add_edge(z.stratum_node[j][e], z.point_node[j][F.left[j][e]]);
  }
  for (std::size_t j = 0; j < F.size(); ++j)
    for (std::size_t e = 0; e < F.right[j].size(); ++e)
      z.graph.add_edge(z.stratum_node[j + 1][e], z.point_node[j][F.right[j][e]]);
  return z;
}

}  // namespace

IsomorphismResult is_isomorphic(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G) {
  IsomorphismResult res;
  res.source = normalize(F);
  res.target = normalize(G);
  const auto& A = res.source;
  const auto& B = res.target;
  if (A.size() != B.size()) return res;
  for (std::size_t j = 0; j < A.size(); ++j) {
    if (!nearly_equal(A.critical[j], B.critical[j])) return res;
    if (A.points[j].size() != B.points[j].size()) return res;
  }
  for (std::size_t i = 0; i <= A.size(); ++i)
    if (A.strata[i].size() != B.strata[i].size()) return res;
  ZigzagGraph za = zigzag_graph(A), zb = zigzag_graph(B);
  LayeredIsoResult iso = find_layered_isomorphism(za.graph, zb.graph);
  res.budget_exceeded = iso.budget_exceeded;
  if (!iso.mapping) return res;
  std::map<int, std::size_t> elem_of;
  for (const auto& row : zb.stratum_node)
    for (std::size_t e = 0; e < row.size(); ++e) elem_of[row[e]] = e;
  for (const auto& row : zb.point_node)
    for (std::size_t e = 0; e < row.size(); ++e) elem_of[row[e]] = e;
  CosheafMorphism w;
  w.critical = A.critical;
  for (const auto& row : za.stratum_node) {
    w.strata.emplace_back();
    for (int v : row) w.strata.back().push_back(elem_of[(*iso.mapping)[v]]);
  }
  for (const auto& row : za.point_node) {
    w.points.emplace_back();
    for (int v : row) w.points.back().push_back(elem_of[(*iso.mapping)[v]]);
  }
  res.isomorphic = true;
  res.witness = std::move(w);
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<bool> hit_set(const SetMap& incl) {
  std::vector<bool> hit(incl.codomain.size(), false);
  for (std::size_t a : incl.assignment) hit[a] = true;
  return hit;
}

}  // namespace

LabelSet ImagePrecosheaf::evaluate(const Interval& I) const {
  const SetMap incl = incl_(I);
  const std::vector<bool> hit = hit_set(incl);
  LabelSet out;
  for (std::size_t o = 0; o < hit.size(); ++o)
    if (hit[o]) out.push_back(incl.codomain[o]);
  return out;
}

SetMap ImagePrecosheaf::extend(const Interval& I, const Interval& J) const {
  const SetMap outer = outer_.extend(I, J);
  const LabelSet dom = evaluate(I);
  const LabelSet cod = evaluate(J);
  SetMap m{dom, cod, {}};
  for (const auto& x : dom) {
    const Label& y = outer(x);
    auto it = std::find(cod.begin(), cod.end(), y);
    if (it == cod.end()) throw CosheafError("inclusion data not natural: image escapes");
    m.assignment.push_back(static_cast<std::size_t>(it - cod.begin()));
  }
  return m;
}

void ImagePrecosheaf::check_natural(const Interval& I, const Interval& J) const {
  const SetMap incl_i = incl_(I), incl_j = incl_(J);
  const SetMap in_ext = inner_.extend(I, J), out_ext = outer_.extend(I, J);
  for (const auto& x : in_ext.domain) {
    if (out_ext(incl_i(x)) != incl_j(in_ext(x)))
      throw CosheafError("inclusion data not natural at '" + x + "'");
  }
}

ImageResult image_on(const IntervalFunctor& Fin, const IntervalFunctor& Gout,
                     const ImagePrecosheaf::InclusionEval& inclusion, const Interval& I) {
  ImagePrecosheaf im(Fin, Gout, inclusion);
  const SetMap incl = inclusion(I);
  const LabelSet fin = Fin.evaluate(I);
  const LabelSet gout = Gout.evaluate(I);
  if (incl.domain != fin || incl.codomain != gout)
    throw CosheafError("inclusion data does not match evaluated sets");
  ImageResult r;
  r.image = im.evaluate(I);
  r.into_outer = {r.image, gout, {}};
  for (const auto& x : r.image)
    r.into_outer.assignment.push_back(
        static_cast<std::size_t>(std::find(gout.begin(), gout.end(), x) - gout.begin()));
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json real_to_json(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    throw CosheafError("expected a number or \"inf\"/\"-inf\", got \"" + s + "\"");
  }
  if (!j.is_number()) throw CosheafError("expected a number");
  return j.get<double>();
}

nlohmann::json interval_to_json(const Interval& I) {
  return nlohmann::json::array({real_to_json(I.lo), real_to_json(I.hi)});
}

Interval interval_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw CosheafError("interval must be [lo, hi]");
  Interval I{real_from_json(j[0]), real_from_json(j[1])};
  if (!(I.lo < I.hi)) throw CosheafError("interval must satisfy lo < hi");
  return I;
}

nlohmann::json to_json(const ConstructibleCosheaf& F) {
  nlohmann::json j;
  j["critical"] = F.critical;
  j["strata"] = F.strata;
  j["points"] = F.points;
  j["left"] = nlohmann::json::array();
  j["right"] = nlohmann::json::array();
  for (std::size_t p = 0; p < F.size(); ++p) {
    nlohmann::json l = nlohmann::json::object(), r = nlohmann::json::object();
    for (std::size_t e = 0; e < F.left[p].size(); ++e) l[F.strata[p][e]] = F.points[p][F.left[p][e]];
    for (std::size_t e = 0; e < F.right[p].size(); ++e)
      r[F.strata[p + 1][e]] = F.points[p][F.right[p][e]];
    j["left"].push_back(l);
    j["right"].push_back(r);
  }
  return j;
}

namespace {

std::vector<std::size_t> map_from_json(const nlohmann::json& j, const LabelSet& dom,
                                       const LabelSet& cod, const std::string& what) {
  if (!j.is_object()) throw CosheafError(what + " must be an object");
  std::vector<std::size_t> m;
  for (const auto& x : dom) {
    if (!j.contains(x)) throw CosheafError(what + " not total: missing '" + x + "'");
    const auto y = j.at(x).get<std::string>();
    auto it = std::find(cod.begin(), cod.end(), y);
    if (it == cod.end()) throw CosheafError(what + " sends '" + x + "' outside its codomain");
    m.push_back(static_cast<std::size_t>(it - cod.begin()));
  }
  if (j.size() != dom.size()) throw CosheafError(what + " mentions labels outside its domain");
  return m;
}

}  // namespace

ConstructibleCosheaf cosheaf_from_json(const nlohmann::json& j) {
  for (const char* key : {"critical", "strata", "points", "left", "right"})
    if (!j.contains(key)) throw CosheafError(std::string("cosheaf JSON lacks \"") + key + "\"");
  ConstructibleCosheaf F;
  F.critical = j.at("critical").get<std::vector<double>>();
  F.strata = j.at("strata").get<std::vector<LabelSet>>();
  F.points = j.at("points").get<std::vector<LabelSet>>();
  const std::size_t k = F.critical.size();
  if (F.strata.size() != k + 1) throw CosheafError("expected one stratum set per stratum");
  if (F.points.size() != k) throw CosheafError("expected one point set per critical value");
  const auto& L = j.at("left");
  const auto& R = j.at("right");
  if (!L.is_array() || !R.is_array() || L.size() != k || R.size() != k)
    throw CosheafError("expected one left and one right map per critical value");
  for (std::size_t p = 0; p < k; ++p) {
    F.left.push_back(map_from_json(L[p], F.strata[p], F.points[p], "left map " + std::to_string(p)));
    F.right.push_back(
        map_from_json(R[p], F.strata[p + 1], F.points[p], "right map " + std::to_string(p)));
  }
  F.validate();
  return F;
}

}  // namespace mapper
