#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include "mapper/distance.hpp"
#include "mapper/mapper.hpp"

namespace mapper {

namespace {

using Mask = std::uint64_t;
constexpr std::size_t kMaxDomain = 64;

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded() : std::runtime_error("search budget exceeded") {}
};

std::vector<double> tolerant_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || !nearly_equal(out.back(), x)) out.push_back(x);
  return out;
}

std::vector<Interval> grid_cells(const std::vector<double>& g) {
  const std::size_t m = g.size();
  std::vector<Interval> cells;
  for (std::size_t t = 0; t <= m; ++t) {
    cells.push_back({t == 0 ? -kInf : g[t - 1], t == m ? kInf : g[t]});
    if (t < m) cells.push_back({t == 0 ? -kInf : g[t - 1], t + 1 == m ? kInf : g[t + 1]});
  }
  return cells;
}

std::vector<double> half_grid(const ConstructibleCosheaf& A, const ConstructibleCosheaf& B, double eps) {
  std::vector<double> g = A.critical;
  for (double b : B.critical) {
    g.push_back(b - eps);
    g.push_back(b + eps);
  }
  return tolerant_unique(g);
}

std::vector<std::size_t> inverse_of(const SetMap& m) {
  if (!m.is_bijection()) throw CosheafError("interleaving: expected an isomorphism between grid cells");
  std::vector<std::size_t> inv(m.assignment.size());
  for (std::size_t i = 0; i < m.assignment.size(); ++i) inv[m.assignment[i]] = i;
  return inv;
}

// One half A -> B^eps with its cell values.
struct Frame {
  const ConstructibleCosheaf* A;
  const ConstructibleCosheaf* B;
  double eps;
  std::vector<double> grid;
  std::vector<Interval> cells;
  std::vector<std::size_t> a_size, b_size, offset;
  std::size_t vars = 0;

  std::size_t var(std::size_t cell, std::size_t x) const { return offset[cell] + x; }
};

Frame make_frame(const ConstructibleCosheaf& A, const ConstructibleCosheaf& B, double eps, std::size_t base) {
  Frame H{&A, &B, eps, half_grid(A, B, eps), {}, {}, {}, {}, 0};
  H.cells = grid_cells(H.grid);
  for (const auto& c : H.cells) {
    H.offset.push_back(base + H.vars);
    H.a_size.push_back(evaluate(A, c).size());
    H.b_size.push_back(evaluate(B, c.thickened(eps)).size());
    H.vars += H.a_size.back();
  }
  return H;
}

// Expresses the half's map on an arbitrary interval c at element x through a
// grid cell d: phi_c(x) = out[phi_d(x'')].
struct Located {
  std::size_t var;
  std::vector<std::size_t> out;
};

Located locate(const Frame& H, const Interval& c, std::size_t x) {
  const Interval c_eps = c.thickened(H.eps);
  for (std::size_t d = 0; d < H.cells.size(); ++d) {
    const Interval& D = H.cells[d];
    if (d % 2 == 1 && !c.contains(H.grid[d / 2])) continue;
    const auto u = intersect(D, c);
    if (!u) continue;
    const SetMap up = extension_map(*H.A, *u, c);
    const auto it = std::find(up.assignment.begin(), up.assignment.end(), x);
    if (it == up.assignment.end()) continue;
    const std::size_t xu = static_cast<std::size_t>(it - up.assignment.begin());
    const std::size_t xd = extension_map(*H.A, *u, D).assignment[xu];
    const Interval u_eps = u->thickened(H.eps);
    const auto inv = inverse_of(extension_map(*H.B, u_eps, D.thickened(H.eps)));
    const SetMap to_c = extension_map(*H.B, u_eps, c_eps);
    Located L{H.var(d, xd), std::vector<std::size_t>(inv.size())};
    for (std::size_t v = 0; v < inv.size(); ++v) L.out[v] = to_c.assignment[inv[v]];
    return L;
  }
  throw CosheafError("interleaving: no grid cell represents an element");
}

// When p takes value v, q must take a value in mask.
struct Entry {
  std::uint32_t q;
  Mask mask;
};
struct Constraint {
  std::uint32_t p;
  std::vector<Entry> entries;
};

struct System {
  Frame phi, psi;
  std::vector<std::size_t> domain_size;
  std::vector<Constraint> constraints;
  std::vector<std::vector<std::uint32_t>> as_p, as_q;

  std::size_t vars() const { return domain_size.size(); }
};

void add_naturality(const Frame& H, System& S) {
  const std::size_t m = H.grid.size();
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t pc = 2 * t + 1;
    for (std::size_t sc : {2 * t, 2 * t + 2}) {
      const auto ea = extension_map(*H.A, H.cells[sc], H.cells[pc]).assignment;
      const auto eb =
          extension_map(*H.B, H.cells[sc].thickened(H.eps), H.cells[pc].thickened(H.eps)).assignment;
      for (std::size_t x = 0; x < ea.size(); ++x) {
        const auto p = static_cast<std::uint32_t>(H.var(sc, x));
        const auto q = static_cast<std::uint32_t>(H.var(pc, ea[x]));
        Constraint fwd{p, {}}, back{q, {}};
        for (std::size_t v = 0; v < eb.size(); ++v) fwd.entries.push_back({q, Mask{1} << eb[v]});
        for (std::size_t w = 0; w < H.b_size[pc]; ++w) {
          Mask mk = 0;
          for (std::size_t v = 0; v < eb.size(); ++v)
            if (eb[v] == w) mk |= Mask{1} << v;
          back.entries.push_back({p, mk});
        }
        S.constraints.push_back(std::move(fwd));
        S.constraints.push_back(std::move(back));
      }
    }
  }
}

// psi^eps o phi = A[U ⊂ U_2eps], checked on the grid crit(A) ∪ {a ± 2eps}.
void add_triangles(const Frame& H, const Frame& K, System& S) {
  const auto& A = *H.A;
  const double eps = H.eps;
  std::vector<double> g3 = A.critical;
  for (double a : A.critical) {
    g3.push_back(a - 2 * eps);
    g3.push_back(a + 2 * eps);
  }
  const auto cells = grid_cells(tolerant_unique(g3));
  for (const auto& c : cells) {
    const LabelSet ac = evaluate(A, c);
    if (ac.empty()) continue;
    const Interval c_eps = c.thickened(eps), c_2eps = c.thickened(2 * eps);
    const auto target = extension_map(A, c, c_2eps).assignment;
    std::map<std::size_t, Located> second;  // per element of B(c_eps)
    for (std::size_t x = 0; x < ac.size(); ++x) {
      const Located first = locate(H, c, x);
      Constraint C{static_cast<std::uint32_t>(first.var), {}};
      for (std::size_t y : first.out) {
        auto it = second.find(y);
        if (it == second.end()) it = second.emplace(y, locate(K, c_eps, y)).first;
        Mask mk = 0;
        for (std::size_t w = 0; w < it->second.out.size(); ++w)
          if (it->second.out[w] == target[x]) mk |= Mask{1} << w;
        C.entries.push_back({static_cast<std::uint32_t>(it->second.var), mk});
      }
      S.constraints.push_back(std::move(C));
    }
  }
}

System build_system(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, double eps) {
  System S{make_frame(F, G, eps, 0), {}, {}, {}, {}, {}};
  S.psi = make_frame(G, F, eps, S.phi.vars);
  for (const Frame* H : {&S.phi, &S.psi})
    for (std::size_t c = 0; c < H->cells.size(); ++c) {
      if (H->b_size[c] > kMaxDomain) throw BudgetExceeded();
      for (std::size_t x = 0; x < H->a_size[c]; ++x) S.domain_size.push_back(H->b_size[c]);
    }
  add_naturality(S.phi, S);
  add_naturality(S.psi, S);
  add_triangles(S.phi, S.psi, S);
  add_triangles(S.psi, S.phi, S);
  S.as_p.resize(S.vars());
  S.as_q.resize(S.vars());
  for (std::uint32_t k = 0; k < S.constraints.size(); ++k) {
    const auto& C = S.constraints[k];
    S.as_p[C.p].push_back(k);
    std::vector<std::uint32_t> qs;
    for (const auto& e : C.entries) qs.push_back(e.q);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    for (auto q : qs) S.as_q[q].push_back(k);
  }
  return S;
}

class Solver {
 public:
  Solver(const System& S, std::size_t budget) : S_(S), budget_(budget), dom_(S.vars()) {
    for (std::size_t v = 0; v < S.vars(); ++v)
      dom_[v] = S.domain_size[v] >= 64 ? ~Mask{0} : (Mask{1} << S.domain_size[v]) - 1;
  }

  bool solve() {
    std::vector<std::uint32_t> all(S_.vars());
    for (std::uint32_t v = 0; v < all.size(); ++v) all[v] = v;
    for (auto v : all)
      if (dom_[v] == 0) return false;
    return propagate(all) && search();
  }

  std::size_t value(std::size_t v) const { return static_cast<std::size_t>(std::countr_zero(dom_[v])); }

 private:
  bool restrict(std::uint32_t v, Mask m, std::vector<std::uint32_t>& queue) {
    const Mask next = dom_[v] & m;
    if (next == dom_[v]) return true;
    dom_[v] = next;
    if (next == 0) return false;
    queue.push_back(v);
    return true;
  }

  bool propagate(std::vector<std::uint32_t> queue) {
    while (!queue.empty()) {
      const auto a = queue.back();
      queue.pop_back();
      if (std::has_single_bit(dom_[a])) {
        const std::size_t v = value(a);
        for (auto k : S_.as_p[a]) {
          const Entry& e = S_.constraints[k].entries[v];
          if (!restrict(e.q, e.mask, queue)) return false;
        }
      }
      for (auto k : S_.as_q[a]) {
        const Constraint& C = S_.constraints[k];
        Mask keep = dom_[C.p];
        for (Mask bits = keep; bits; bits &= bits - 1) {
          const auto v = static_cast<std::size_t>(std::countr_zero(bits));
          const Entry& e = C.entries[v];
          if (e.q == a && (e.mask & dom_[a]) == 0) keep &= ~(Mask{1} << v);
        }
        if (!restrict(C.p, keep, queue)) return false;
      }
    }
    return true;
  }

  bool search() {
    std::size_t best = SIZE_MAX;
    int best_count = 65;
    for (std::size_t v = 0; v < dom_.size(); ++v) {
      const int c = std::popcount(dom_[v]);
      if (c > 1 && c < best_count) {
        best = v;
        best_count = c;
      }
    }
    if (best == SIZE_MAX) return true;
    const Mask options = dom_[best];
    for (Mask bits = options; bits; bits &= bits - 1) {
      if (++nodes_ > budget_) throw BudgetExceeded();
      const auto saved = dom_;
      dom_[best] = bits & (~bits + 1);
      if (propagate({static_cast<std::uint32_t>(best)}) && search()) return true;
      dom_ = saved;
    }
    return false;
  }

  const System& S_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::vector<Mask> dom_;
};

HalfInterleaving frame_record(const Frame& H) { return {H.grid, H.cells, {}}; }

bool within_caps(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, const SearchLimits& lim) {
  if (F.size() + G.size() > lim.max_critical) return false;
  for (const auto* X : {&F, &G}) {
    for (const auto& s : X->strata)
      if (s.size() > lim.max_set) return false;
    for (const auto& s : X->points)
      if (s.size() > lim.max_set) return false;
  }
  return true;
}

}  // namespace

HalfInterleaving interleaving_frame(const ConstructibleCosheaf& A, const ConstructibleCosheaf& B, double eps) {
  const auto g = half_grid(A, B, eps);
  return {g, grid_cells(g), {}};
}

InterleavingResult check_interleaving(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, double eps,
                                      const SearchLimits& limits) {
  if (!(eps >= 0)) throw CosheafError("interleaving: negative epsilon");
  InterleavingResult r;
  r.source = normalize(F);
  r.target = normalize(G);
  if (!within_caps(r.source, r.target, limits)) {
    r.budget_exceeded = true;
    return r;
  }
  try {
    const System S = build_system(r.source, r.target, eps);
    Solver solver(S, limits.budget);
    if (!solver.solve()) return r;
    InterleavingWitness w;
    w.epsilon = eps;
    w.phi = frame_record(S.phi);
    w.psi = frame_record(S.psi);
    for (auto [H, out] : {std::pair{&S.phi, &w.phi}, std::pair{&S.psi, &w.psi}})
      for (std::size_t c = 0; c < H->cells.size(); ++c) {
        std::vector<std::size_t> m;
        for (std::size_t x = 0; x < H->a_size[c]; ++x) m.push_back(solver.value(H->var(c, x)));
        out->maps.push_back(std::move(m));
      }
    w.log.push_back("search found an interleaving at eps=" + std::to_string(eps));
    r.witness = std::move(w);
  } catch (const BudgetExceeded&) {
    r.budget_exceeded = true;
  }
  return r;
}

bool validate_interleaving(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, const InterleavingWitness& w,
                           std::vector<std::string>* why) {
  std::vector<std::string> problems;
  auto report = [&](std::string s) {
    if (problems.size() < 20) problems.push_back(std::move(s));
  };
  System S;
  try {
    S = build_system(F, G, w.epsilon);
  } catch (const BudgetExceeded&) {
    report("a thickened cell has more than 64 components");
  }
  std::vector<std::size_t> value(S.vars(), SIZE_MAX);
  if (problems.empty()) {
    for (auto [H, half, name] : {std::tuple{&S.phi, &w.phi, "phi"}, std::tuple{&S.psi, &w.psi, "psi"}}) {
      if (half->grid.size() != H->grid.size() || half->maps.size() != H->cells.size()) {
        report(std::string(name) + ": grid does not match the frame for this epsilon");
        continue;
      }
      for (std::size_t c = 0; c < H->cells.size(); ++c) {
        if (half->maps[c].size() != H->a_size[c]) {
          report(std::string(name) + ": wrong domain size on cell " + std::to_string(c));
          continue;
        }
        for (std::size_t x = 0; x < H->a_size[c]; ++x) {
          if (half->maps[c][x] >= H->b_size[c])
            report(std::string(name) + ": value outside codomain on cell " + std::to_string(c));
          else
            value[H->var(c, x)] = half->maps[c][x];
        }
      }
    }
  }
  if (problems.empty())
    for (const auto& C : S.constraints) {
      const Entry& e = C.entries[value[C.p]];
      if (!((e.mask >> value[e.q]) & 1)) report("constraint violated at variable " + std::to_string(C.p));
    }
  if (why) why->insert(why->end(), problems.begin(), problems.end());
  return problems.empty();
}

DistanceResult interleaving_distance(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, double tol,
                                     bool exact, const SearchLimits& limits) {
  DistanceResult out;
  const auto Fn = normalize(F), Gn = normalize(G);
  if (Fn.empty() != Gn.empty()) return out;
  std::vector<double> crit = Fn.critical;
  crit.insert(crit.end(), Gn.critical.begin(), Gn.critical.end());
  const double span = crit.empty() ? 0 : *std::max_element(crit.begin(), crit.end()) -
                                             *std::min_element(crit.begin(), crit.end());
  const double huge = 2 * span + 1;
  auto feasible = [&](double e) {
    auto r = check_interleaving(Fn, Gn, e, limits);
    out.budget_exceeded = out.budget_exceeded || r.budget_exceeded;
    return r.witness;
  };
  auto best = feasible(huge);
  if (!best) return out;
  std::vector<double> cand = {0, huge};
  for (double s : crit)
    for (double t : crit)
      for (int k = 1; k <= 4; ++k)
        if (std::fabs(s - t) / k < huge) cand.push_back(std::fabs(s - t) / k);
  cand = tolerant_unique(cand);
  // Feasibility is monotone in epsilon.
  std::size_t lo = 0, hi = cand.size() - 1;
  if (auto w0 = feasible(cand[0])) {
    out.epsilon = cand[0];
    out.witness = std::move(w0);
    return out;
  }
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (auto w = feasible(cand[mid])) {
      hi = mid;
      best = std::move(w);
    } else {
      lo = mid;
    }
  }
  double a = cand[lo], b = cand[hi];
  if (exact)
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (auto w = feasible(mid)) {
        b = mid;
        best = std::move(w);
      } else {
        a = mid;
      }
    }
  out.epsilon = b;
  out.witness = std::move(best);
  return out;
}

Certificate resolution_certificate(const ConstructibleCosheaf& F, const NiceCover& U) {
  require_cover_spans(F, U);
  Certificate cert;
  cert.resolution = resolution(U, F);
  if (!std::isfinite(cert.resolution)) throw CoverError("infinite resolution");
  const double delta = cert.resolution;
  const MapperCosheaf raw = mapper_raw(CosheafFunctor(F), U);
  const ConstructibleCosheaf& M = raw.cosheaf;
  cert.mapper = M;
  const Interval support = U.support();
  const Stratification St = stratify(U);

  // Components of M over d, read as components of F over the inflation of d.
  auto m_to_f = [&](const Interval& d) {
    const Components comps = components(M, span_of(M, d));
    std::vector<std::size_t> out(comps.size());
    if (comps.size() == 0) return out;
    const auto W = inflate_clipped(U, d);
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const NodeRef& rep = comps.representative[k];
      const auto& src = rep.is_point ? raw.point_inflation[rep.layer] : raw.stratum_inflation[rep.layer];
      out[k] = extension_map(F, *src, *W).assignment[rep.element];
    }
    return out;
  };

  InterleavingWitness& w = cert.witness;
  w.epsilon = delta;
  w.phi = interleaving_frame(F, M, delta);
  w.psi = interleaving_frame(M, F, delta);

  // F(d) ≅ F(d ∩ |U|) -> F(I(d_delta)) ≅ M(d_delta).
  for (const auto& d : w.phi.cells) {
    const std::size_t n = evaluate(F, d).size();
    std::vector<std::size_t> m;
    if (n > 0) {
      const Interval J = *intersect(d, support);
      const auto inv = inverse_of(extension_map(F, J, d));
      const Interval dd = d.thickened(delta);
      const auto out = extension_map(F, J, *inflate_clipped(U, dd)).assignment;
      const auto via = m_to_f(dd);
      const auto back = inverse_of({LabelSet(via.size()), LabelSet(via.size()), via});
      for (std::size_t x = 0; x < n; ++x) m.push_back(back[out[inv[x]]]);
    }
    w.phi.maps.push_back(std::move(m));
  }

  // M(d) ≅ F(I(d)) ≅ F(J) -> F(d_delta), J the hull of the W-intervals over d
  // on which F is nonempty.
  for (const auto& d : w.psi.cells) {
    const auto to_f = m_to_f(d);
    std::vector<std::size_t> m;
    if (!to_f.empty()) {
      std::optional<Interval> J;
      auto merge = [&](const std::optional<Interval>& W) {
        if (!W || evaluate(F, *W).empty()) return;
        J = J ? Interval{std::min(J->lo, W->lo), std::max(J->hi, W->hi)} : *W;
      };
      for (std::size_t t = 0; t < St.R1.size(); ++t)
        if (intervals_meet(St.R1[t], d)) merge(w_interval_of_stratum(U, St, t));
      for (double b : St.R0)
        if (d.contains(b)) merge(w_interval_of_boundary(U, b));
      const auto inv = inverse_of(extension_map(F, *J, *inflate_clipped(U, d)));
      const auto out = extension_map(F, *J, d.thickened(delta)).assignment;
      for (std::size_t x : to_f) m.push_back(out[inv[x]]);
    }
    w.psi.maps.push_back(std::move(m));
  }
  w.log.push_back("explicit maps built at eps = resolution = " + std::to_string(delta));
  cert.valid = validate_interleaving(F, M, w, &cert.problems);
  w.log.push_back(cert.valid ? "validated" : "validation failed");
  return cert;
}

StabilityReport stability_check(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, const NiceCover& U,
                                double tol, const SearchLimits& limits) {
  StabilityReport rep;
  const auto Fn = normalize(F), Gn = normalize(G);
  std::vector<double> S = Fn.critical;
  S.insert(S.end(), Gn.critical.begin(), Gn.critical.end());
  const auto B = stratify(U).R0;
  rep.margin = kInf;
  for (double s : S)
    for (double b : B) rep.margin = std::min(rep.margin, std::fabs(s - b));
  const auto d = interleaving_distance(F, G, tol, true, limits);
  const auto dm = interleaving_distance(mapper_functor(F, U), mapper_functor(G, U), tol, true, limits);
  rep.distance = d.epsilon;
  rep.mapper_distance = dm.epsilon;
  rep.budget_exceeded = d.budget_exceeded || dm.budget_exceeded;
  rep.precondition = rep.distance < rep.margin;
  rep.conclusion = rep.mapper_distance <= rep.distance + tol;
  return rep;
}

nlohmann::json to_json(const InterleavingWitness& w) {
  auto half = [](const HalfInterleaving& h) {
    nlohmann::json j;
    j["grid"] = h.grid;
    j["maps"] = h.maps;
    return j;
  };
  return {{"epsilon", w.epsilon}, {"phi", half(w.phi)}, {"psi", half(w.psi)}, {"log", w.log}};
}

}  // namespace mapper
