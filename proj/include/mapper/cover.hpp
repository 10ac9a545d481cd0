#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mapper/cosheaf.hpp"

namespace mapper {

class CoverError : public CosheafError {
 public:
  using CosheafError::CosheafError;
};

// Finite family of open intervals, kept sorted by left endpoint.
struct NiceCover {
  std::vector<Interval> elements;
  bool no_triple = false;  // demand empty triple intersections

  NiceCover() = default;
  explicit NiceCover(std::vector<Interval> elems, bool require_no_triple = false);

  std::size_t size() const { return elements.size(); }
  // Union of the elements; valid covers have an interval union.
  Interval support() const;
  bool has_triple_intersection() const;
  bool covers(const Interval& I) const;
  bool covers_closed(double lo, double hi) const;
  // Pairs of distinct elements sharing an endpoint.
  std::vector<std::pair<std::size_t, std::size_t>> coincident_endpoints() const;
  // Throws CoverError with the first problem found.
  void validate() const;
};

std::vector<Interval> intersection_closure(const NiceCover& U);

struct Stratification {
  std::vector<double> R0;    // boundary points, increasing
  std::vector<Interval> R1;  // complementary open intervals, R0.size() + 1 of them
};
Stratification stratify(const NiceCover& U);

// Intersection of all elements containing the stratum, or nothing when the
// stratum lies outside the cover.
std::optional<Interval> w_interval_of_stratum(const NiceCover& U, const Stratification& S,
                                              std::size_t t);
std::optional<Interval> w_interval_of_boundary(const NiceCover& U, double b);

// Union of W_x over x in I ∩ |U|; nothing when I misses the cover.
std::optional<Interval> inflate_clipped(const NiceCover& U, const Interval& I);
// Same, but I must lie inside the cover's union.
Interval i_u(const NiceCover& U, const Interval& I);

// Largest diameter among elements V with qualifies(V); 0 when none qualify.
double resolution(const NiceCover& U, const std::function<bool(const Interval&)>& qualifies);
double resolution(const NiceCover& U, const ConstructibleCosheaf& F);

struct ExtendedCover {
  NiceCover cover;
  bool added_left = false;
  bool added_right = false;
  bool misses_range = true;  // rays avoid [range_lo, range_hi]
};
// Adds rays (-inf, a) and (b, +inf) overlapping only the outermost elements.
ExtendedCover auto_extend(const NiceCover& U, double range_lo, double range_hi);

nlohmann::json to_json(const NiceCover& U);
NiceCover cover_from_json(const nlohmann::json& j);

}  // namespace mapper
