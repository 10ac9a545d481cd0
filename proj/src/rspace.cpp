#include "mapper/rspace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "union_find.hpp"

namespace mapper {

std::size_t RGraph::vertex_count() const {
  std::size_t n = 0;
  for (const auto& v : vertices) n += v.size();
  return n;
}

std::size_t RGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

namespace {

bool has_duplicates(const LabelSet& s) {
  return std::set<Label>(s.begin(), s.end()).size() != s.size();
}

std::size_t index_of(const LabelSet& s, const Label& x) {
  return static_cast<std::size_t>(std::find(s.begin(), s.end(), x) - s.begin());
}

void require_valid(const RGraph& X) {
  const auto v = validate(X);
  if (!v.empty()) throw RGraphError("invalid R-graph: " + v.front());
}

}  // namespace

std::vector<std::string> validate(const RGraph& X) {
  std::vector<std::string> out;
  const std::size_t n = X.critical.size();
  for (std::size_t i = 1; i < n; ++i)
    if (!(X.critical[i - 1] < X.critical[i])) {
      out.push_back("critical not increasing");
      break;
    }
  const std::size_t gaps = n == 0 ? 0 : n - 1;
  if (X.vertices.size() != n) out.push_back("expected one vertex set per critical value");
  if (X.edges.size() != gaps) out.push_back("expected one edge set per gap");
  if (X.attach_left.size() != gaps) out.push_back("expected one attach_left map per gap");
  if (X.attach_right.size() != gaps) out.push_back("expected one attach_right map per gap");
  if (!out.empty() && (X.vertices.size() != n || X.edges.size() != gaps ||
                       X.attach_left.size() != gaps || X.attach_right.size() != gaps))
    return out;
  for (std::size_t i = 0; i < n; ++i)
    if (has_duplicates(X.vertices[i])) out.push_back("duplicate label in V_" + std::to_string(i));
  for (std::size_t i = 0; i < gaps; ++i) {
    const std::string tag = "E_" + std::to_string(i);
    if (has_duplicates(X.edges[i])) out.push_back("duplicate label in " + tag);
    const std::pair<const char*, const std::map<Label, Label>*> sides[] = {
        {"attach_left", &X.attach_left[i]}, {"attach_right", &X.attach_right[i]}};
    for (const auto& [name, m] : sides) {
      const LabelSet& cod = X.vertices[name == std::string("attach_left") ? i : i + 1];
      bool total = true;
      for (const auto& e : X.edges[i])
        if (!m->count(e)) total = false;
      if (!total) out.push_back(std::string(name) + " not total on " + tag);
      for (const auto& [e, v] : *m) {
        if (index_of(X.edges[i], e) == X.edges[i].size())
          out.push_back(std::string(name) + " on " + tag + " mentions unknown edge '" + e + "'");
        else if (index_of(cod, v) == cod.size())
          out.push_back(std::string(name) + " on " + tag + " sends '" + e + "' to unknown vertex '" +
                        v + "'");
      }
    }
  }
  return out;
}

Betti betti(const RGraph& X) {
  require_valid(X);
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  for (const auto& v : X.vertices) {
    offset.push_back(total);
    total += v.size();
  }
  UnionFind uf(total);
  for (std::size_t i = 0; i < X.edges.size(); ++i)
    for (const auto& e : X.edges[i])
      uf.unite(offset[i] + index_of(X.vertices[i], X.attach_left[i].at(e)),
               offset[i + 1] + index_of(X.vertices[i + 1], X.attach_right[i].at(e)));
  std::set<std::size_t> roots;
  for (std::size_t v = 0; v < total; ++v) roots.insert(uf.find(v));
  Betti b;
  b.b0 = roots.size();
  b.b1 = X.edge_count() + b.b0 - total;
  return b;
}

ConstructibleCosheaf reeb_cosheaf(const RGraph& X) {
  require_valid(X);
  ConstructibleCosheaf F;
  const std::size_t n = X.critical.size();
  F.critical = X.critical;
  F.strata.push_back({});
  for (const auto& e : X.edges) F.strata.push_back(e);
  if (n > 0) F.strata.push_back({});
  // Each fiber component over a critical value holds exactly one vertex,
  // since every edge there is attached to one.
  F.points = X.vertices;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> l, r;
    if (j > 0)
      for (const auto& e : X.edges[j - 1])
        l.push_back(index_of(X.vertices[j], X.attach_right[j - 1].at(e)));
    if (j + 1 < n)
      for (const auto& e : X.edges[j]) r.push_back(index_of(X.vertices[j], X.attach_left[j].at(e)));
    F.left.push_back(std::move(l));
    F.right.push_back(std::move(r));
  }
  return F;
}

RGraph realize(const ConstructibleCosheaf& F) {
  F.validate();
  const std::size_t k = F.size();
  if (!F.strata.front().empty() || !F.strata.back().empty())
    throw CosheafError("non-compact support");
  RGraph X;
  X.critical = F.critical;
  X.vertices = F.points;
  for (std::size_t i = 1; i < k; ++i) {
    X.edges.push_back(F.strata[i]);
    std::map<Label, Label> l, r;
    for (std::size_t e = 0; e < F.strata[i].size(); ++e) {
      l[F.strata[i][e]] = F.points[i - 1][F.right[i - 1][e]];
      r[F.strata[i][e]] = F.points[i][F.left[i][e]];
    }
    X.attach_left.push_back(std::move(l));
    X.attach_right.push_back(std::move(r));
  }
  return X;
}

RGraph reeb_graph(const RGraph& X) { return realize(normalize(reeb_cosheaf(X))); }

bool rgraph_isomorphic(const RGraph& a, const RGraph& b) {
  return is_isomorphic(reeb_cosheaf(a), reeb_cosheaf(b)).isomorphic;
}

nlohmann::json to_json(const RGraph& X) {
  nlohmann::json j;
  j["critical"] = X.critical;
  j["vertices"] = X.vertices;
  j["edges"] = X.edges;
  j["attach_left"] = nlohmann::json::array();
  j["attach_right"] = nlohmann::json::array();
  for (const auto& m : X.attach_left) j["attach_left"].push_back(m);
  for (const auto& m : X.attach_right) j["attach_right"].push_back(m);
  return j;
}

RGraph rgraph_from_json(const nlohmann::json& j) {
  for (const char* key : {"critical", "vertices", "edges", "attach_left", "attach_right"})
    if (!j.contains(key)) throw RGraphError(std::string("R-graph JSON lacks \"") + key + "\"");
  RGraph X;
  try {
    X.critical = j.at("critical").get<std::vector<double>>();
    X.vertices = j.at("vertices").get<std::vector<LabelSet>>();
    X.edges = j.at("edges").get<std::vector<LabelSet>>();
    X.attach_left = j.at("attach_left").get<std::vector<std::map<Label, Label>>>();
    X.attach_right = j.at("attach_right").get<std::vector<std::map<Label, Label>>>();
  } catch (const nlohmann::json::exception& e) {
    throw RGraphError(std::string("malformed R-graph JSON: ") + e.what());
  }
  return X;
}

std::string to_dot(const RGraph& X, const std::string& name) {
  std::ostringstream os;
  os.precision(17);
  os << "graph " << name << " {\n";
  auto vid = [](std::size_t i, std::size_t v) {
    return "\"v" + std::to_string(i) + "_" + std::to_string(v) + "\"";
  };
  for (std::size_t i = 0; i < X.vertices.size(); ++i)
    for (std::size_t v = 0; v < X.vertices[i].size(); ++v)
      os << "  " << vid(i, v) << " [label=\"" << X.vertices[i][v] << "\", value=" << X.critical[i]
         << "];\n";
  for (std::size_t i = 0; i < X.edges.size(); ++i)
    for (const auto& e : X.edges[i]) {
      const auto a = index_of(X.vertices[i], X.attach_left[i].at(e));
      const auto b = index_of(X.vertices[i + 1], X.attach_right[i].at(e));
      os << "  " << vid(i, a) << " -- " << vid(i + 1, b) << " [label=\"" << e << "\", span=\"["
         << X.critical[i] << "," << X.critical[i + 1] << "]\"];\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace mapper
