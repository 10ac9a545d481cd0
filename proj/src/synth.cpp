#include "mapper/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "union_find.hpp"

namespace mapper {

double GeometricComplex::length(std::size_t s) const {
  const double* a = vertex(segments[s].first);
  const double* b = vertex(segments[s].second);
  double d2 = 0;
  for (std::size_t k = 0; k < dim; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(d2);
}

void GeometricComplex::validate() const {
  if (dim == 0) throw SynthError("complex dimension must be positive");
  if (coords.size() % dim != 0) throw SynthError("vertex coordinates do not match dimension");
  if (vertex_count() == 0) throw SynthError("complex has no vertices");
  filter.validate(dim);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto [a, b] = segments[s];
    const std::string tag = "segment " + std::to_string(s);
    if (a >= vertex_count() || b >= vertex_count()) throw SynthError(tag + " references a missing vertex");
    if (a == b) throw SynthError(tag + " has equal endpoints");
    if (nearly_equal(value(a), value(b))) throw SynthError(tag + " has constant filter value");
  }
}

GeometricComplex annulus_polygon(std::size_t sides, double radius, double rotation) {
  if (sides < 3) throw SynthError("polygon needs at least three sides");
  GeometricComplex X;
  X.dim = 2;
  X.filter = {{0, 1}, 0};
  for (std::size_t k = 0; k < sides; ++k) {
    const double t = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sides) + rotation;
    X.coords.push_back(radius * std::cos(t));
    X.coords.push_back(radius * std::sin(t));
    X.segments.push_back({k, (k + 1) % sides});
  }
  X.validate();
  return X;
}

GeometricComplex torus_surrogate() {
  GeometricComplex X;
  X.dim = 2;
  X.filter = {{0, 1}, 0};
  // 0 bottom, 1 split, 2/3 sides of the loop, 4 merge, 5 top
  X.coords = {0, -2, 0, -1, -0.8, 0, 0.8, 0.1, 0, 1, 0, 2};
  X.segments = {{0, 1}, {1, 2}, {2, 4}, {1, 3}, {3, 4}, {4, 5}};
  X.validate();
  return X;
}

nlohmann::json to_json(const GeometricComplex& X) {
  nlohmann::json verts = nlohmann::json::array();
  for (std::size_t i = 0; i < X.vertex_count(); ++i)
    verts.push_back(std::vector<double>(X.vertex(i), X.vertex(i) + X.dim));
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& [a, b] : X.segments) segs.push_back({a, b});
  return {{"vertices", verts}, {"segments", segs}, {"filter", {{"w", X.filter.w}, {"c", X.filter.c}}}};
}

GeometricComplex complex_from_json(const nlohmann::json& j) {
  GeometricComplex X;
  try {
    const auto& verts = j.at("vertices");
    if (!verts.is_array() || verts.empty()) throw SynthError("complex has no vertices");
    X.dim = verts.at(0).size();
    for (const auto& v : verts) {
      if (v.size() != X.dim) throw SynthError("vertices have mixed dimensions");
      for (const auto& x : v) X.coords.push_back(x.get<double>());
    }
    for (const auto& s : j.at("segments")) {
      if (s.size() != 2) throw SynthError("segment must list two vertex indices");
      X.segments.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    if (j.contains("filter")) {
      X.filter.w = j.at("filter").at("w").get<std::vector<double>>();
      X.filter.c = j.at("filter").value("c", 0.0);
    } else {
      X.filter.w.assign(X.dim, 0.0);
      X.filter.w.back() = 1;
    }
  } catch (const nlohmann::json::exception& e) {
    throw SynthError(std::string("malformed complex: ") + e.what());
  }
  try {
    X.validate();
  } catch (const DensityError& e) {
    throw SynthError(e.what());
  }
  return X;
}

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix(s);
  s = h ^ n;
  h = splitmix(s);
  s = h ^ trial;
  return splitmix(s);
}

PointCloud sample(const GeometricComplex& X, std::size_t n, double sigma, std::uint64_t seed) {
  X.validate();
  if (n == 0) throw SynthError("sample size must be positive");
  if (!(sigma >= 0)) throw SynthError("noise radius must be non-negative");
  if (X.segments.empty()) throw SynthError("complex has no segments to sample");
  std::vector<double> lengths(X.segments.size());
  for (std::size_t s = 0; s < lengths.size(); ++s) lengths[s] = X.length(s);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(lengths.begin(), lengths.end());
  std::uniform_real_distribution<double> unit(0, 1);
  std::normal_distribution<double> gauss;
  PointCloud pc;
  pc.dim = X.dim;
  pc.filter = X.filter;
  pc.coords.reserve(n * X.dim);
  std::vector<double> dir(X.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = X.segments[pick(rng)];
    const double t = unit(rng);
    double norm = 0;
    for (auto& v : dir) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double rad = sigma * std::pow(unit(rng), 1.0 / static_cast<double>(X.dim));
    for (std::size_t k = 0; k < X.dim; ++k) {
      const double on = (1 - t) * X.vertex(a)[k] + t * X.vertex(b)[k];
      pc.coords.push_back(on + (norm > 0 ? rad * dir[k] / norm : 0.0));
    }
  }
  return pc;
}

namespace {

std::vector<double> distinct_heights(const GeometricComplex& X) {
  std::vector<double> h;
  for (std::size_t i = 0; i < X.vertex_count(); ++i) h.push_back(X.value(i));
  std::sort(h.begin(), h.end());
  std::vector<double> out;
  for (double v : h)
    if (out.empty() || !nearly_equal(out.back(), v)) out.push_back(v);
  return out;
}

std::size_t height_index(const std::vector<double>& c, double v) {
  for (std::size_t k = 0; k < c.size(); ++k)
    if (nearly_equal(c[k], v)) return k;
  throw SynthError("vertex height missing from critical list");
}

}  // namespace

ConstructibleCosheaf true_reeb_cosheaf(const GeometricComplex& X) {
  X.validate();
  ConstructibleCosheaf F;
  F.critical = distinct_heights(X);
  const std::size_t m = F.critical.size();
  // Segment s spans heights lo_idx[s] < hi_idx[s]; vertex_low/high are its endpoints.
  std::vector<std::size_t> lo_idx, hi_idx, low_vertex, high_vertex;
  for (const auto& [a, b] : X.segments) {
    const bool up = X.value(a) < X.value(b);
    low_vertex.push_back(up ? a : b);
    high_vertex.push_back(up ? b : a);
    lo_idx.push_back(height_index(F.critical, X.value(low_vertex.back())));
    hi_idx.push_back(height_index(F.critical, X.value(high_vertex.back())));
  }
  F.strata.assign(m + 1, {});
  std::vector<std::vector<std::size_t>> crossing(m + 1);
  for (std::size_t s = 0; s < X.segments.size(); ++s)
    for (std::size_t g = lo_idx[s] + 1; g <= hi_idx[s]; ++g) {
      crossing[g].push_back(s);
      F.strata[g].push_back("e" + std::to_string(s));
    }
  F.points.assign(m, {});
  F.left.assign(m, {});
  F.right.assign(m, {});
  for (std::size_t k = 0; k < m; ++k) {
    // Point elements: vertices at this height, then segments passing through it.
    std::vector<std::size_t> verts;
    for (std::size_t v = 0; v < X.vertex_count(); ++v)
      if (height_index(F.critical, X.value(v)) == k) verts.push_back(v);
    std::vector<std::size_t> through;
    for (std::size_t s = 0; s < X.segments.size(); ++s)
      if (lo_idx[s] < k && k < hi_idx[s]) through.push_back(s);
    auto vertex_slot = [&](std::size_t v) {
      return static_cast<std::size_t>(std::find(verts.begin(), verts.end(), v) - verts.begin());
    };
    auto through_slot = [&](std::size_t s) {
      return verts.size() + static_cast<std::size_t>(std::find(through.begin(), through.end(), s) - through.begin());
    };
    for (std::size_t v : verts) F.points[k].push_back("v" + std::to_string(v));
    for (std::size_t s : through) F.points[k].push_back("e" + std::to_string(s) + "@" + std::to_string(k));
    for (std::size_t s : crossing[k]) F.left[k].push_back(hi_idx[s] == k ? vertex_slot(high_vertex[s]) : through_slot(s));
    for (std::size_t s : crossing[k + 1])
      F.right[k].push_back(lo_idx[s] == k ? vertex_slot(low_vertex[s]) : through_slot(s));
  }
  F.validate();
  return F;
}

RGraph complex_rgraph(const GeometricComplex& X) {
  const ConstructibleCosheaf F = true_reeb_cosheaf(X);
  RGraph G;
  G.critical = F.critical;
  G.vertices = F.points;
  for (std::size_t g = 1; g + 1 < F.strata.size(); ++g) {
    G.edges.push_back(F.strata[g]);
    std::map<Label, Label> l, r;
    for (std::size_t e = 0; e < F.strata[g].size(); ++e) {
      l[F.strata[g][e]] = F.points[g - 1][F.right[g - 1][e]];
      r[F.strata[g][e]] = F.points[g][F.left[g][e]];
    }
    G.attach_left.push_back(std::move(l));
    G.attach_right.push_back(std::move(r));
  }
  return G;
}

std::vector<std::vector<std::size_t>> fiber_components(const GeometricComplex& X, const Interval& V) {
  const std::size_t ns = X.segments.size();
  UnionFind uf(ns + X.vertex_count());
  std::vector<char> present(ns + X.vertex_count(), 0);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto [a, b] = X.segments[s];
    const double lo = std::min(X.value(a), X.value(b)), hi = std::max(X.value(a), X.value(b));
    if (!(lo < V.hi && hi > V.lo)) continue;
    present[s] = 1;
    for (std::size_t v : {a, b})
      if (V.lo < X.value(v) && X.value(v) < V.hi) uf.unite(s, ns + v);
  }
  for (std::size_t v = 0; v < X.vertex_count(); ++v)
    if (V.lo < X.value(v) && X.value(v) < V.hi) present[ns + v] = 1;
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t x = 0; x < present.size(); ++x) {
    if (!present[x]) continue;
    auto& g = groups[uf.find(x)];
    if (x < ns) g.push_back(x);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, segs] : groups) out.push_back(std::move(segs));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double point_segment_distance(const double* p, const double* a, const double* b) {
  const double ux = b[0] - a[0], uy = b[1] - a[1];
  const double L2 = ux * ux + uy * uy;
  double t = L2 > 0 ? ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / L2 : 0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * ux, p[1] - a[1] - t * uy);
}

struct Box {
  double xmin, xmax, ymin, ymax;
};

struct PixelGrid {
  double x0, y0, h;
  long nx, ny;
  std::array<double, 2> centre(long ix, long iy) const { return {x0 + ix * h, y0 + iy * h}; }
};

// Whether components of X^V and of its delta-thickening correspond one to one.
bool fiber_survives(const GeometricComplex& X, const Interval& V, double delta, const Box& box, double pitch,
                    const std::vector<std::vector<std::size_t>>& fiber) {
  PixelGrid g{box.xmin - delta - pitch, box.ymin - delta - pitch, pitch, 0, 0};
  g.nx = static_cast<long>((box.xmax - box.xmin + 2 * delta) / pitch) + 3;
  g.ny = static_cast<long>((box.ymax - box.ymin + 2 * delta) / pitch) + 3;
  std::vector<long> comp(static_cast<std::size_t>(g.nx * g.ny), -2);  // -2 outside, -1 unvisited
  for (long ix = 0; ix < g.nx; ++ix)
    for (long iy = 0; iy < g.ny; ++iy) {
      const auto c = g.centre(ix, iy);
      const double f = X.filter(c.data());
      if (!(V.lo < f && f < V.hi)) continue;
      for (const auto& [a, b] : X.segments)
        if (point_segment_distance(c.data(), X.vertex(a), X.vertex(b)) < delta) {
          comp[static_cast<std::size_t>(ix * g.ny + iy)] = -1;
          break;
        }
    }
  long next = 0;
  for (long s = 0; s < g.nx * g.ny; ++s) {
    if (comp[static_cast<std::size_t>(s)] != -1) continue;
    std::vector<long> stack{s};
    comp[static_cast<std::size_t>(s)] = next;
    while (!stack.empty()) {
      const long q = stack.back();
      stack.pop_back();
      const long ix = q / g.ny, iy = q % g.ny;
      const long nb[4][2] = {{ix + 1, iy}, {ix - 1, iy}, {ix, iy + 1}, {ix, iy - 1}};
      for (const auto& c : nb) {
        if (c[0] < 0 || c[0] >= g.nx || c[1] < 0 || c[1] >= g.ny) continue;
        const long t = c[0] * g.ny + c[1];
        if (comp[static_cast<std::size_t>(t)] == -1) {
          comp[static_cast<std::size_t>(t)] = next;
          stack.push_back(t);
        }
      }
    }
    ++next;
  }
  // Walk each fiber component's segments inside V and collect the pixel
  // components they touch.
  std::vector<long> owner(static_cast<std::size_t>(next), -1);
  for (std::size_t k = 0; k < fiber.size(); ++k) {
    if (fiber[k].empty()) continue;  // isolated vertex
    long seen = -1;
    for (std::size_t s : fiber[k]) {
      const double* a = X.vertex(X.segments[s].first);
      const double* b = X.vertex(X.segments[s].second);
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      const long steps = std::max(2L, static_cast<long>(len / (g.h / 2)));
      for (long t = 0; t <= steps; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(steps);
        const double p[2] = {a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])};
        const double f = X.filter(p);
        if (!(V.lo < f && f < V.hi)) continue;
        const long ix = std::lround((p[0] - g.x0) / g.h), iy = std::lround((p[1] - g.y0) / g.h);
        if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny) continue;
        const long c = comp[static_cast<std::size_t>(ix * g.ny + iy)];
        if (c < 0) continue;
        if (seen >= 0 && seen != c) return false;
        seen = c;
      }
    }
    if (seen < 0) return false;
    if (owner[static_cast<std::size_t>(seen)] >= 0) return false;
    owner[static_cast<std::size_t>(seen)] = static_cast<long>(k);
  }
  const auto isolated = static_cast<std::size_t>(
      std::count_if(fiber.begin(), fiber.end(), [](const auto& f) { return f.empty(); }));
  return static_cast<std::size_t>(std::count(owner.begin(), owner.end(), -1L)) <= isolated;
}

}  // namespace

DeltaEstimate estimate_delta_u(const GeometricComplex& X, const NiceCover& U, double pitch) {
  X.validate();
  if (X.dim != 2) throw SynthError("thickening estimate supports planar complexes only");
  if (!(pitch > 0)) throw SynthError("grid pitch must be positive");
  double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf, fmin = kInf, fmax = -kInf;
  for (std::size_t i = 0; i < X.vertex_count(); ++i) {
    xmin = std::min(xmin, X.vertex(i)[0]);
    xmax = std::max(xmax, X.vertex(i)[0]);
    ymin = std::min(ymin, X.vertex(i)[1]);
    ymax = std::max(ymax, X.vertex(i)[1]);
    fmin = std::min(fmin, X.value(i));
    fmax = std::max(fmax, X.value(i));
  }
  const double diameter = std::hypot(xmax - xmin, ymax - ymin);
  const double cap = std::max(diameter, 4 * pitch);
  const Box box{xmin, xmax, ymin, ymax};

  DeltaEstimate est;
  est.warnings.push_back("thickening radius is a grid approximation at pitch " + std::to_string(pitch));
  for (const Interval& V : intersection_closure(U)) {
    if (!(fmin < V.hi && fmax > V.lo)) continue;
    const auto fiber = fiber_components(X, V);
    if (fiber.empty()) continue;
    double lo = 2 * pitch, hi = cap;
    double result;
    if (!fiber_survives(X, V, lo, box, pitch, fiber)) {
      result = 0;
      est.warnings.push_back("fiber over (" + std::to_string(V.lo) + ", " + std::to_string(V.hi) +
                             ") changes under the smallest thickening; a boundary may sit on a critical value");
    } else if (fiber_survives(X, V, hi, box, pitch, fiber)) {
      result = hi;
    } else {
      while (hi - lo > pitch / 2) {
        const double mid = (lo + hi) / 2;
        (fiber_survives(X, V, mid, box, pitch, fiber) ? lo : hi) = mid;
      }
      result = lo;
    }
    est.probes.push_back(V);
    est.per_probe.push_back(result);
    est.delta = std::min(est.delta, result);
  }
  if (est.probes.empty()) est.delta = cap;
  return est;
}

}  // namespace mapper
