#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mapper/cosheaf.hpp"
#include "mapper/cover.hpp"
#include "mapper/density.hpp"
#include "mapper/rspace.hpp"

namespace mapper {

class SynthError : public CosheafError {
 public:
  using CosheafError::CosheafError;
};

// Embedded 1-complex with an affine height.
struct GeometricComplex {
  std::size_t dim = 0;
  std::vector<double> coords;  // row-major vertex positions
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  AffineFilter filter;

  std::size_t vertex_count() const { return dim ? coords.size() / dim : 0; }
  const double* vertex(std::size_t i) const { return coords.data() + i * dim; }
  double value(std::size_t i) const { return filter(vertex(i)); }
  double length(std::size_t s) const;
  void validate() const;
};

// Regular polygon of radius `radius` in the plane with height filter; the
// rotation keeps every edge non-horizontal.
GeometricComplex annulus_polygon(std::size_t sides = 24, double radius = 1, double rotation = 0);
// Stem, two-arc loop, stem: a planar complex with the torus height profile.
GeometricComplex torus_surrogate();

nlohmann::json to_json(const GeometricComplex& X);
GeometricComplex complex_from_json(const nlohmann::json& j);

// Per-trial stream: splitmix64 applied to (master, n, trial).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial);

// n draws: segment chosen by length, uniform on it, plus noise uniform in the
// closed ball of radius sigma.
PointCloud sample(const GeometricComplex& X, std::size_t n, double sigma, std::uint64_t seed);

// Exact Reeb cosheaf over the distinct vertex heights.
ConstructibleCosheaf true_reeb_cosheaf(const GeometricComplex& X);
// Same combinatorics as an R-graph, segments subdivided at every height.
RGraph complex_rgraph(const GeometricComplex& X);
// Components of X restricted to f^{-1}(V), as sets of segment indices.
std::vector<std::vector<std::size_t>> fiber_components(const GeometricComplex& X, const Interval& V);

struct DeltaEstimate {
  double delta = kInf;                // min over the probed intervals
  std::vector<Interval> probes;       // intersection closure members meeting f(X)
  std::vector<double> per_probe;
  std::vector<std::string> warnings;  // estimates are grid approximations
};

// Largest thickening keeping components of each fiber in bijection with the
// thickened fiber, by pixel flood fill (planar complexes only).
DeltaEstimate estimate_delta_u(const GeometricComplex& X, const NiceCover& U, double pitch);

}  // namespace mapper
