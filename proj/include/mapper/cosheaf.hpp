#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mapper {

using Label = std::string;
using LabelSet = std::vector<Label>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Values closer than this (relative to magnitude) are treated as equal when
// locating interval endpoints against critical values.
inline constexpr double kTieTolerance = 1e-11;

bool nearly_equal(double a, double b);
bool strictly_less(double a, double b);  // a < b and not nearly equal

class CosheafError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Open interval (lo, hi); infinite endpoints allowed.
struct Interval {
  double lo = -kInf;
  double hi = kInf;

  static Interval real_line() { return {}; }
  bool bounded() const;
  double length() const { return hi - lo; }
  bool contains(double x) const;            // tolerant strict containment
  bool contains(const Interval& o) const;   // tolerant o ⊆ *this
  Interval thickened(double eps) const { return {lo - eps, hi + eps}; }
  bool operator==(const Interval&) const = default;
};

bool intervals_meet(const Interval& a, const Interval& b);
std::optional<Interval> intersect(const Interval& a, const Interval& b);

struct SetMap {
  LabelSet domain;
  LabelSet codomain;
  std::vector<std::size_t> assignment;  // assignment[i] indexes codomain

  const Label& operator()(const Label& x) const;
  bool is_bijection() const;
  bool operator==(const SetMap&) const = default;
};

// Finite zigzag S_0 -> P_0 <- S_1 -> P_1 <- ... <- S_k.  Stratum i is the
// open interval between critical[i-1] and critical[i]; point j sits at
// critical[j] with left[j]: strata[j] -> points[j] and
// right[j]: strata[j+1] -> points[j].
struct ConstructibleCosheaf {
  std::vector<double> critical;
  std::vector<LabelSet> strata;
  std::vector<LabelSet> points;
  std::vector<std::vector<std::size_t>> left;
  std::vector<std::vector<std::size_t>> right;

  static ConstructibleCosheaf constant(LabelSet values);
  // Skyscraper with one element at x.
  static ConstructibleCosheaf point(double x, const Label& label = "*");

  std::size_t size() const { return critical.size(); }
  Interval stratum_interval(std::size_t i) const;
  Interval point_interval(std::size_t j) const;
  bool empty() const;  // every set empty

  // Throws CosheafError describing the first violated invariant.
  void validate() const;
  bool operator==(const ConstructibleCosheaf&) const = default;
};

// Contiguous piece of the zigzag: strata first..last, points first..last-1.
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const Span&) const = default;
};

struct NodeRef {
  bool is_point = false;
  std::size_t layer = 0;
  std::size_t element = 0;
};

// Connected components of the zigzag restricted to a span.
struct Components {
  Span span;
  LabelSet labels;
  std::vector<NodeRef> representative;
  std::vector<std::vector<NodeRef>> members;
  std::vector<std::vector<std::size_t>> stratum_component;  // indexed by layer - span.first
  std::vector<std::vector<std::size_t>> point_component;

  std::size_t size() const { return labels.size(); }
  std::size_t component_of(const NodeRef& n) const;
  bool covers(const NodeRef& n) const;
};

Span span_of(const ConstructibleCosheaf& F, const Interval& I);
// Span touched by every small neighbourhood of the closed window [lo, hi].
Span closed_span_of(const ConstructibleCosheaf& F, double lo, double hi);
Components components(const ConstructibleCosheaf& F, Span s);
// Component of `outer` containing each component of `inner` (inner ⊆ outer).
std::vector<std::size_t> component_extension(const Components& inner, const Components& outer);

LabelSet evaluate(const ConstructibleCosheaf& F, const Interval& I);
SetMap extension_map(const ConstructibleCosheaf& F, const Interval& I, const Interval& J);
LabelSet costalk(const ConstructibleCosheaf& F, double x);

// Cosheaf with the same values on the given (finer) critical grid.
ConstructibleCosheaf refine(const ConstructibleCosheaf& F, const std::vector<double>& grid);
ConstructibleCosheaf normalize(const ConstructibleCosheaf& F);
// U -> F(U_eps) before normalization; critical set {a ± eps}.
ConstructibleCosheaf smooth_raw(const ConstructibleCosheaf& F, double eps);
ConstructibleCosheaf smooth(const ConstructibleCosheaf& F, double eps);

struct CosheafMorphism {
  std::vector<double> critical;
  std::vector<std::vector<std::size_t>> strata;  // per stratum: source element -> target element
  std::vector<std::vector<std::size_t>> points;
};

// Checks the commuting squares of m as a map F -> G (same critical grid).
bool is_morphism(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                 const CosheafMorphism& m);

struct IsomorphismResult {
  bool isomorphic = false;
  bool budget_exceeded = false;
  ConstructibleCosheaf source;  // normalize(F)
  ConstructibleCosheaf target;  // normalize(G)
  std::optional<CosheafMorphism> witness;
  explicit operator bool() const { return isomorphic; }
};

IsomorphismResult is_isomorphic(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G);

// Lazy interval functor: anything that can be evaluated on open intervals
// with extension maps for nested pairs.
class IntervalFunctor {
 public:
  virtual ~IntervalFunctor() = default;
  virtual LabelSet evaluate(const Interval& I) const = 0;
  virtual SetMap extend(const Interval& I, const Interval& J) const = 0;
};

class CosheafFunctor final : public IntervalFunctor {
 public:
  explicit CosheafFunctor(const ConstructibleCosheaf& F) : F_(F) {}
  LabelSet evaluate(const Interval& I) const override { return mapper::evaluate(F_, I); }
  SetMap extend(const Interval& I, const Interval& J) const override {
    return extension_map(F_, I, J);
  }

 private:
  const ConstructibleCosheaf& F_;
};

// Image of Fin in Gout under a natural inclusion, evaluated lazily.
class ImagePrecosheaf final : public IntervalFunctor {
 public:
  using InclusionEval = std::function<SetMap(const Interval&)>;
  ImagePrecosheaf(const IntervalFunctor& inner, const IntervalFunctor& outer, InclusionEval incl)
      : inner_(inner), outer_(outer), incl_(std::move(incl)) {}

  LabelSet evaluate(const Interval& I) const override;
  SetMap extend(const Interval& I, const Interval& J) const override;
  // Throws CosheafError when the inclusion square for I ⊆ J does not commute.
  void check_natural(const Interval& I, const Interval& J) const;

 private:
  const IntervalFunctor& inner_;
  const IntervalFunctor& outer_;
  InclusionEval incl_;
};

struct ImageResult {
  LabelSet image;
  SetMap into_outer;  // image -> evaluate(Gout, I)
};

ImageResult image_on(const IntervalFunctor& Fin, const IntervalFunctor& Gout,
                     const ImagePrecosheaf::InclusionEval& inclusion, const Interval& I);

nlohmann::json to_json(const ConstructibleCosheaf& F);
ConstructibleCosheaf cosheaf_from_json(const nlohmann::json& j);
nlohmann::json interval_to_json(const Interval& I);
Interval interval_from_json(const nlohmann::json& j);
nlohmann::json real_to_json(double x);
double real_from_json(const nlohmann::json& j);

}  // namespace mapper
