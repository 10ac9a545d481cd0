#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mapper/cosheaf.hpp"
#include "mapper/cover.hpp"
#include "mapper/rspace.hpp"

namespace mapper {

// Mapper cosheaf on the cover's boundary grid, before normalization.  Each
// cell remembers the inflated interval its value was read from (nothing when
// the cell lies outside the cover).
struct MapperCosheaf {
  ConstructibleCosheaf cosheaf;
  std::vector<std::optional<Interval>> stratum_inflation;
  std::vector<std::optional<Interval>> point_inflation;
};

// Cell intervals and their inflations; the functor only sees those intervals.
MapperCosheaf mapper_raw(const IntervalFunctor& F, const NiceCover& U);
// Checks that U spans F's support, then normalizes the raw mapper cosheaf.
ConstructibleCosheaf mapper_functor(const ConstructibleCosheaf& F, const NiceCover& U);
// Throws CoverError unless every nonempty costalk of F lies inside |U|.
void require_cover_spans(const ConstructibleCosheaf& F, const NiceCover& U);

struct EdgeProvenance {
  Interval span;
  Label cosheaf_label;
  std::vector<std::size_t> cover_strata;  // indices into stratify(U).R1
};

struct EnhancedMapperGraph {
  RGraph graph;
  std::vector<std::vector<EdgeProvenance>> provenance;  // parallel to graph.edges
};

// Display locale of a compactly supported cosheaf, on its own grid.
EnhancedMapperGraph display_locale(const ConstructibleCosheaf& F);
// Display locale of the mapper cosheaf, with cover strata recorded per edge.
EnhancedMapperGraph enhanced_mapper(const ConstructibleCosheaf& F, const NiceCover& U);

// Component data per cover element and per consecutive overlap.
struct MapperOracles {
  std::vector<LabelSet> element;                  // Sigma_i
  std::vector<LabelSet> overlap;                  // Sigma_{i,i+1}
  std::vector<std::vector<std::size_t>> to_left;  // overlap component -> Sigma_i
  std::vector<std::vector<std::size_t>> to_right; // overlap component -> Sigma_{i+1}
};

MapperOracles oracles_from_functor(const IntervalFunctor& F, const NiceCover& U);
EnhancedMapperGraph enhanced_mapper_from_oracles(const MapperOracles& sigma, const NiceCover& U);
// Geometric mapper graph: same oracles, element strata collapsed to
// vertices at the midpoints of their private parts.
EnhancedMapperGraph geometric_mapper_from_oracles(const MapperOracles& sigma, const NiceCover& U);

struct AbstractGraph {
  std::vector<std::pair<std::size_t, Label>> nodes;  // (cover element, component)
  std::vector<double> values;                        // element midpoints, display only
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

AbstractGraph classic_mapper(const MapperOracles& sigma, const NiceCover& U);
AbstractGraph multinerve_mapper(const MapperOracles& sigma, const NiceCover& U);

nlohmann::json to_json(const EnhancedMapperGraph& G);
EnhancedMapperGraph enhanced_from_json(const nlohmann::json& j);
std::string to_dot(const EnhancedMapperGraph& G, const std::string& name = "mapper");
nlohmann::json to_json(const AbstractGraph& G);
std::string to_dot(const AbstractGraph& G, const std::string& name = "nerve");

}  // namespace mapper
