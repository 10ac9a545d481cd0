#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mapper/cosheaf.hpp"
#include "mapper/cover.hpp"

namespace mapper {

// One half of an interleaving, A -> B thickened by eps, recorded on the grid
// crit(A) ∪ {b ± eps}.  Cells alternate stratum, point, stratum, ...; a point
// cell is the star interval around its grid value.  maps[c][x] indexes
// evaluate(B, cells[c].thickened(eps)).
struct HalfInterleaving {
  std::vector<double> grid;
  std::vector<Interval> cells;
  std::vector<std::vector<std::size_t>> maps;
};

struct InterleavingWitness {
  double epsilon = 0;
  HalfInterleaving phi;  // F -> G^eps
  HalfInterleaving psi;  // G -> F^eps
  std::vector<std::string> log;
};

struct SearchLimits {
  std::size_t max_critical = 24;  // combined, after normalization
  std::size_t max_set = 8;
  std::size_t budget = 2'000'000;  // search nodes per check
};

struct InterleavingResult {
  std::optional<InterleavingWitness> witness;  // refers to source/target below
  bool budget_exceeded = false;
  ConstructibleCosheaf source;  // normalize(F)
  ConstructibleCosheaf target;  // normalize(G)
  explicit operator bool() const { return witness.has_value(); }
};

InterleavingResult check_interleaving(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                                      double eps, const SearchLimits& limits = {});

// Grid and cells each half must use for (F, G, eps).
HalfInterleaving interleaving_frame(const ConstructibleCosheaf& A, const ConstructibleCosheaf& B,
                                    double eps);

// Checks naturality and both triangle identities of w as an interleaving of
// F and G (taken as given, not normalized).  Problems are appended to *why.
bool validate_interleaving(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                           const InterleavingWitness& w, std::vector<std::string>* why = nullptr);

struct DistanceResult {
  double epsilon = kInf;
  bool budget_exceeded = false;
  std::optional<InterleavingWitness> witness;  // at epsilon, on normalized inputs
};

// exact=false stops at the smallest feasible candidate (an upper bound);
// exact=true then bisects below it down to tol.
DistanceResult interleaving_distance(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                                     double tol = 1e-9, bool exact = true,
                                     const SearchLimits& limits = {});

struct Certificate {
  double resolution = 0;
  ConstructibleCosheaf mapper;  // mapper cosheaf on the cover's boundary grid
  InterleavingWitness witness;  // F vs mapper at eps = resolution
  bool valid = false;
  std::vector<std::string> problems;
};

// Explicit interleaving of F with its mapper cosheaf at the cover resolution.
Certificate resolution_certificate(const ConstructibleCosheaf& F, const NiceCover& U);

struct StabilityReport {
  double distance = kInf;         // between F and G
  double mapper_distance = kInf;  // between their mapper cosheaves
  double margin = 0;              // min |s - b| over critical values s, boundary points b
  bool precondition = false;      // distance < margin
  bool conclusion = false;        // mapper_distance <= distance (+ tol)
  bool budget_exceeded = false;
};

StabilityReport stability_check(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                                const NiceCover& U, double tol = 1e-9,
                                const SearchLimits& limits = {});

nlohmann::json to_json(const InterleavingWitness& w);

}  // namespace mapper
