#include "mapper/cover.hpp"

#include <algorithm>
#include <cmath>

namespace mapper {

NiceCover::NiceCover(std::vector<Interval> elems, bool require_no_triple)
    : elements(std::move(elems)), no_triple(require_no_triple) {
  std::stable_sort(elements.begin(), elements.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
}

Interval NiceCover::support() const {
  if (elements.empty()) throw CoverError("empty cover");
  double hi = -kInf;
  for (const auto& e : elements) hi = std::max(hi, e.hi);
  return {elements.front().lo, hi};
}

bool NiceCover::has_triple_intersection() const {
  const std::size_t m = elements.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto ij = intersect(elements[i], elements[j]);
      if (!ij) continue;
      for (std::size_t k = j + 1; k < m; ++k)
        if (intersect(*ij, elements[k])) return true;
    }
  return false;
}

bool NiceCover::covers(const Interval& I) const {
  if (elements.empty()) return false;
  return support().contains(I);
}

bool NiceCover::covers_closed(double lo, double hi) const {
  if (elements.empty()) return false;
  const Interval s = support();
  return strictly_less(s.lo, lo) && strictly_less(hi, s.hi);
}

std::vector<std::pair<std::size_t, std::size_t>> NiceCover::coincident_endpoints() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      const auto& a = elements[i];
      const auto& b = elements[j];
      bool shared = false;
      for (double x : {a.lo, a.hi})
        for (double y : {b.lo, b.hi})
          if (std::isfinite(x) && nearly_equal(x, y)) shared = true;
      if (shared) out.push_back({i, j});
    }
  return out;
}

void NiceCover::validate() const {
  if (elements.empty()) throw CoverError("cover has no elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (!strictly_less(e.lo, e.hi))
      throw CoverError("cover element " + std::to_string(i) + " is empty");
    if (i > 0 && elements[i - 1].lo > e.lo)
      throw CoverError("cover elements not sorted by left endpoint");
  }
  double reach = elements.front().hi;
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (!strictly_less(elements[i].lo, reach))
      throw CoverError("cover union is not an interval: gap before element " + std::to_string(i));
    reach = std::max(reach, elements[i].hi);
  }
  if (no_triple && has_triple_intersection())
    throw CoverError("cover has a nonempty triple intersection");
}

std::vector<Interval> intersection_closure(const NiceCover& U) {
  // Intersections of intervals are determined by the tightest pair of
  // endpoints, so closing under pairwise intersection until stable suffices.
  std::vector<Interval> out = U.elements;
  auto known = [&](const Interval& I) {
    return std::any_of(out.begin(), out.end(), [&](const Interval& J) {
      return nearly_equal(I.lo, J.lo) && nearly_equal(I.hi, J.hi);
    });
  };
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = 0; b < a; ++b) {
      const auto I = intersect(out[a], out[b]);
      if (I && !known(*I)) out.push_back(*I);
    }
  std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  return out;
}

Stratification stratify(const NiceCover& U) {
  Stratification S;
  for (const auto& e : U.elements)
    for (double x : {e.lo, e.hi})
      if (std::isfinite(x)) S.R0.push_back(x);
  std::sort(S.R0.begin(), S.R0.end());
  std::vector<double> uniq;
  for (double x : S.R0)
    if (uniq.empty() || !nearly_equal(uniq.back(), x)) uniq.push_back(x);
  S.R0 = std::move(uniq);
  for (std::size_t t = 0; t <= S.R0.size(); ++t)
    S.R1.push_back({t == 0 ? -kInf : S.R0[t - 1], t == S.R0.size() ? kInf : S.R0[t]});
  return S;
}

std::optional<Interval> w_interval_of_stratum(const NiceCover& U, const Stratification& S,
                                              std::size_t t) {
  const Interval& cell = S.R1[t];
  std::optional<Interval> w;
  for (const auto& e : U.elements) {
    if (!e.contains(cell)) continue;
    w = w ? Interval{std::max(w->lo, e.lo), std::min(w->hi, e.hi)} : e;
  }
  return w;
}

std::optional<Interval> w_interval_of_boundary(const NiceCover& U, double b) {
  std::optional<Interval> w;
  for (const auto& e : U.elements) {
    if (!e.contains(b)) continue;
    w = w ? Interval{std::max(w->lo, e.lo), std::min(w->hi, e.hi)} : e;
  }
  return w;
}

std::optional<Interval> inflate_clipped(const NiceCover& U, const Interval& I) {
  const Stratification S = stratify(U);
  std::optional<Interval> out;
  auto merge = [&](const std::optional<Interval>& w) {
    if (!w) return;
    out = out ? Interval{std::min(out->lo, w->lo), std::max(out->hi, w->hi)} : *w;
  };
  for (std::size_t t = 0; t < S.R1.size(); ++t)
    if (intervals_meet(S.R1[t], I)) merge(w_interval_of_stratum(U, S, t));
  for (double b : S.R0)
    if (I.contains(b)) merge(w_interval_of_boundary(U, b));
  return out;
}

Interval i_u(const NiceCover& U, const Interval& I) {
  if (!U.covers(I)) throw CoverError("interval lies outside the cover's union");
  return *inflate_clipped(U, I);
}

double resolution(const NiceCover& U, const std::function<bool(const Interval&)>& qualifies) {
  double res = 0;
  for (const auto& e : U.elements)
    if (qualifies(e)) res = std::max(res, e.length());
  return res;
}

double resolution(const NiceCover& U, const ConstructibleCosheaf& F) {
  return resolution(U, [&](const Interval& V) { return !evaluate(F, V).empty(); });
}

ExtendedCover auto_extend(const NiceCover& U, double range_lo, double range_hi) {
  U.validate();
  ExtendedCover out;
  std::vector<Interval> elems = U.elements;
  const Interval& first = U.elements.front();
  if (std::isfinite(first.lo)) {
    double room = first.length();
    for (std::size_t i = 1; i < U.size(); ++i)
      if (strictly_less(first.lo, U.elements[i].lo)) room = std::min(room, U.elements[i].lo - first.lo);
    if (strictly_less(first.lo, range_lo)) room = std::min(room, range_lo - first.lo);
    else out.misses_range = false;
    elems.push_back({-kInf, first.lo + 0.5 * room});
    out.added_left = true;
  }
  double hi = -kInf;
  std::size_t last = 0;
  for (std::size_t i = 0; i < U.size(); ++i)
    if (U.elements[i].hi > hi) {
      hi = U.elements[i].hi;
      last = i;
    }
  if (std::isfinite(hi)) {
    double room = U.elements[last].length();
    for (std::size_t i = 0; i < U.size(); ++i)
      if (strictly_less(U.elements[i].hi, hi)) room = std::min(room, hi - U.elements[i].hi);
    if (strictly_less(range_hi, hi)) room = std::min(room, hi - range_hi);
    else out.misses_range = false;
    elems.push_back({hi - 0.5 * room, kInf});
    out.added_right = true;
  }
  out.cover = NiceCover(std::move(elems), U.no_triple);
  return out;
}

nlohmann::json to_json(const NiceCover& U) {
  nlohmann::json j;
  j["cover"] = nlohmann::json::array();
  for (const auto& e : U.elements) j["cover"].push_back(interval_to_json(e));
  if (U.no_triple) j["no_triple"] = true;
  return j;
}

NiceCover cover_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cover") || !j.at("cover").is_array())
    throw CoverError("cover JSON must be {\"cover\": [[lo, hi], ...]}");
  std::vector<Interval> elems;
  for (const auto& e : j.at("cover")) elems.push_back(interval_from_json(e));
  NiceCover U(std::move(elems), j.value("no_triple", false));
  U.validate();
  return U;
}

}  // namespace mapper
