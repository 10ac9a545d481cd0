#include "mapper/graph_iso.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace mapper {

int LayeredGraph::add_node(int layer_id) {
  layer.push_back(layer_id);
  adjacency.emplace_back();
  return static_cast<int>(layer.size()) - 1;
}

void LayeredGraph::add_edge(int u, int v) {
  adjacency[u].push_back(v);
  adjacency[v].push_back(u);
}

namespace {

struct Search {
  const LayeredGraph& a;
  const LayeredGraph& b;
  std::size_t n;
  std::size_t budget;
  std::size_t visited = 0;
  bool exhausted = false;

  int neighbour(std::size_t v, std::size_t k) const {
    return v < n ? a.adjacency[v][k] : b.adjacency[v - n][k] + static_cast<int>(n);
  }
  std::size_t degree(std::size_t v) const {
    return v < n ? a.adjacency[v].size() : b.adjacency[v - n].size();
  }

  // Refine to the coarsest equitable partition below `colour`.
  void refine(std::vector<int>& colour) const {
    std::size_t classes = std::set<int>(colour.begin(), colour.end()).size();
    for (;;) {
      std::map<std::pair<int, std::vector<int>>, int> ids;
      std::vector<std::pair<int, std::vector<int>>> sig(2 * n);
      for (std::size_t v = 0; v < 2 * n; ++v) {
        std::vector<int> nb(degree(v));
        for (std::size_t k = 0; k < nb.size(); ++k) nb[k] = colour[neighbour(v, k)];
        std::sort(nb.begin(), nb.end());
        sig[v] = {colour[v], std::move(nb)};
        ids.emplace(sig[v], 0);
      }
      int next = 0;
      for (auto& [key, id] : ids) id = next++;
      for (std::size_t v = 0; v < 2 * n; ++v) colour[v] = ids[sig[v]];
      if (ids.size() == classes) return;
      classes = ids.size();
    }
  }

  bool balanced(const std::vector<int>& colour) const {
    std::map<int, long> count;
    for (std::size_t v = 0; v < n; ++v) ++count[colour[v]];
    for (std::size_t v = n; v < 2 * n; ++v) --count[colour[v]];
    return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 0; });
  }

  bool verify(const std::vector<int>& map) const {
    for (std::size_t v = 0; v < n; ++v) {
      if (a.layer[v] != b.layer[map[v]]) return false;
      std::vector<int> img;
      for (int u : a.adjacency[v]) img.push_back(map[u]);
      std::vector<int> tgt = b.adjacency[map[v]];
      std::sort(img.begin(), img.end());
      std::sort(tgt.begin(), tgt.end());
      if (img != tgt) return false;
    }
    return true;
  }

  std::optional<std::vector<int>> run(std::vector<int> colour) {
    if (++visited > budget) {
      exhausted = true;
      return std::nullopt;
    }
    refine(colour);
    if (!balanced(colour)) return std::nullopt;
    std::map<int, std::vector<int>> cls_a, cls_b;
    for (std::size_t v = 0; v < n; ++v) cls_a[colour[v]].push_back(static_cast<int>(v));
    for (std::size_t v = n; v < 2 * n; ++v) cls_b[colour[v]].push_back(static_cast<int>(v - n));
    int pick = -1;
    std::size_t best = 0;
    for (const auto& [c, members] : cls_a) {
      if (members.size() > 1 && (pick < 0 || members.size() < best)) {
        pick = c;
        best = members.size();
      }
    }
    if (pick < 0) {
      std::vector<int> map(n);
      for (const auto& [c, members] : cls_a) map[members[0]] = cls_b[c][0];
      if (verify(map)) return map;
      return std::nullopt;
    }
    int fresh = *std::max_element(colour.begin(), colour.end()) + 1;
    int v = cls_a[pick][0];
    for (int w : cls_b[pick]) {
      std::vector<int> next = colour;
      next[v] = fresh;
      next[w + n] = fresh;
      if (auto found = run(std::move(next))) return found;
      if (exhausted) return std::nullopt;
    }
    return std::nullopt;
  }
};

}  // namespace

LayeredIsoResult find_layered_isomorphism(const LayeredGraph& a, const LayeredGraph& b,
                                          std::size_t budget) {
  LayeredIsoResult result;
  if (a.size() != b.size()) return result;
  const std::size_t n = a.size();
  if (n == 0) {
    result.mapping = std::vector<int>{};
    return result;
  }
  std::map<int, int> layer_ids;
  for (int l : a.layer) layer_ids.emplace(l, 0);
  for (int l : b.layer) layer_ids.emplace(l, 0);
  int next = 0;
  for (auto& [l, id] : layer_ids) id = next++;
  std::vector<int> colour(2 * n);
  for (std::size_t v = 0; v < n; ++v) colour[v] = layer_ids[a.layer[v]];
  for (std::size_t v = 0; v < n; ++v) colour[v + n] = layer_ids[b.layer[v]];
  Search search{a, b, n, budget};
  result.mapping = search.run(std::move(colour));
  result.budget_exceeded = search.exhausted;
  return result;
}

}  // namespace mapper
