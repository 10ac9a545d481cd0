#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mapper/density.hpp"
#include "mapper/synth.hpp"

namespace mapper {

// Per-sample KDE settings; unset values fall back to the data-driven defaults.
struct KdeTemplate {
  double beta = 3.0;
  std::optional<double> r, L1, L2, eps1, eps2;

  KdeConfig instantiate(const PointCloud& cloud) const;
};

KdeTemplate kde_template_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KdeTemplate& t);
// TOML document as JSON; infinities become "Infinity" strings.
nlohmann::json toml_to_json(const std::string& text);

struct ExperimentPlan {
  GeometricComplex complex;
  NiceCover cover;
  double sigma = 0;
  std::vector<std::size_t> sizes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  KdeTemplate kde;
  double delta_pitch = 0.01;  // grid pitch for the thickening estimate

  void validate() const;
};

// Relative paths for "complex"/"cover" entries resolve against base_dir.
ExperimentPlan plan_from_toml(const std::string& text, const std::string& base_dir = ".");
ExperimentPlan plan_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
nlohmann::json to_json(const ExperimentPlan& plan);

struct TrialOutcome {
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool recovered = false;
  bool budget_exceeded = false;
  std::string error;
};

struct ExperimentRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t recovered = 0;
  std::size_t budget_exceeded = 0;
  std::size_t certified = 0;  // recovered trials whose implied bound is certified
  std::size_t errors = 0;
  double rate = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<TrialOutcome> outcomes;  // ordered by (size index, trial)
  DeltaEstimate delta;
  double resolution = 0;
  bool certificate_valid = false;
  bool inapplicable = false;  // thickening estimate is zero
  std::vector<std::string> warnings;
};

TrialOutcome run_trial(const ExperimentPlan& plan, const ConstructibleCosheaf& target, std::size_t n,
                       std::size_t trial);
// jobs = 0 uses the OpenMP default; jobs = 1 runs the serial loop.
ExperimentResult run_experiment(const ExperimentPlan& plan, int jobs = 0);
std::string to_csv(const ExperimentResult& result);

// Recovery rates non-decreasing in n, allowing `inversions` drops of at most `slack`.
bool rates_nondecreasing(const std::vector<ExperimentRow>& rows, std::size_t inversions = 1, double slack = 0.05);

}  // namespace mapper
