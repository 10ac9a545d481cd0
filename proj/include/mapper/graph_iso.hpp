#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace mapper {

// Multigraph whose nodes carry a layer id; parallel edges appear as repeated
// adjacency entries.  Isomorphisms must preserve layers.
struct LayeredGraph {
  std::vector<int> layer;
  std::vector<std::vector<int>> adjacency;

  int add_node(int layer_id);
  void add_edge(int u, int v);
  std::size_t size() const { return layer.size(); }
};

struct LayeredIsoResult {
  std::optional<std::vector<int>> mapping;  // node of a -> node of b
  bool budget_exceeded = false;
};

// Colour refinement with individualisation and backtracking.
LayeredIsoResult find_layered_isomorphism(const LayeredGraph& a, const LayeredGraph& b,
                                          std::size_t budget = 200000);

}  // namespace mapper
