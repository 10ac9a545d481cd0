#pragma once

#include <map>
#include <string>
#include <vector>

#include "mapper/cosheaf.hpp"

namespace mapper {

// Combinatorial R-graph: vertices[i] sit over critical[i]; edges[i] span the
// gap (critical[i], critical[i+1]).  Attachments are kept as label maps so
// that malformed input can be reported rather than rejected on load.
struct RGraph {
  std::vector<double> critical;
  std::vector<LabelSet> vertices;
  std::vector<LabelSet> edges;
  std::vector<std::map<Label, Label>> attach_left;   // edges[i] -> vertices[i]
  std::vector<std::map<Label, Label>> attach_right;  // edges[i] -> vertices[i+1]

  std::size_t vertex_count() const;
  std::size_t edge_count() const;
  bool operator==(const RGraph&) const = default;
};

class RGraphError : public CosheafError {
 public:
  using CosheafError::CosheafError;
};

// Empty iff the graph is well formed.
std::vector<std::string> validate(const RGraph& X);

struct Betti {
  std::size_t b0 = 0;
  std::size_t b1 = 0;
};
Betti betti(const RGraph& X);

ConstructibleCosheaf reeb_cosheaf(const RGraph& X);
// Geometric realization of a compactly supported cosheaf with the given
// critical grid (no normalization).  Throws "non-compact support".
RGraph realize(const ConstructibleCosheaf& F);
RGraph reeb_graph(const RGraph& X);
// Isomorphism of R-graphs, decided through their Reeb cosheaves.
bool rgraph_isomorphic(const RGraph& a, const RGraph& b);

nlohmann::json to_json(const RGraph& X);
RGraph rgraph_from_json(const nlohmann::json& j);
std::string to_dot(const RGraph& X, const std::string& name = "rgraph");

}  // namespace mapper
