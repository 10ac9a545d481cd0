#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mapper/cosheaf.hpp"
#include "mapper/cover.hpp"

namespace mapper {

class DensityError : public CosheafError {
 public:
  using CosheafError::CosheafError;
};

// f(x) = w·x + c with ‖w‖ = 1.
struct AffineFilter {
  std::vector<double> w;
  double c = 0;

  double operator()(const double* x) const;
  void validate(std::size_t dim) const;
};

struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;  // row-major, dim per point
  AffineFilter filter;

  std::size_t size() const { return dim ? coords.size() / dim : 0; }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
  double value(std::size_t i) const { return filter(point(i)); }
  void validate() const;
};

enum class KernelId { Bump };

// Profile as a function of the squared norm.
double kernel_profile(KernelId k, double squared_norm);
// ∫ K over R^d, by adaptive radial quadrature; cached per dimension.
double kernel_integral(KernelId k, std::size_t dim);

struct KdeConfig {
  KernelId kernel = KernelId::Bump;
  double r = 0;
  double C_K = 0;
  double L1 = 0;
  double L2 = 0;
  double eps1 = 0;
  double eps2 = 0;

  double inner_level() const { return L1 + eps1; }
  double outer_level() const { return L2 - eps2; }
  // Throws DensityError on the first violated invariant.
  void validate() const;
};

// r = (beta log n / n)^(1/d); levels from the median of the estimate at the samples.
KdeConfig default_config(const PointCloud& cloud, double beta = 3.0);
double default_bandwidth(std::size_t n, std::size_t dim, double beta);
// Fill levels and margins from sample estimates: L2 = m/4, L1 = 3m/4, eps = (L1-L2)/8.
void default_levels(KdeConfig& cfg, const std::vector<double>& sample_density);

double kde_eval(const PointCloud& cloud, const KdeConfig& cfg, const double* x);
std::vector<double> kde_at_samples(const PointCloud& cloud, const KdeConfig& cfg, bool parallel = true);
std::vector<std::size_t> superlevel_indices(const std::vector<double>& sample_density, double L);
std::vector<std::size_t> superlevel_indices(const PointCloud& cloud, const KdeConfig& cfg, double L);

struct ValueRange {
  double lo;
  double hi;
};
// Range of the filter over B_r(a) ∩ B_r(b), open balls; nothing when they miss.
std::optional<ValueRange> lens_f_range(const double* a, const double* b, std::size_t dim, double r,
                                       const AffineFilter& f);

// Components over qualifying sample indices, labelled "p<min index>" and
// ordered by that index.
struct Partition {
  std::vector<std::size_t> qualifying;  // increasing
  std::vector<std::size_t> component;   // parallel to qualifying
  LabelSet labels;
  std::vector<std::size_t> first;       // smallest member per component

  std::size_t size() const { return labels.size(); }
  // Component of sample index i, or nothing when i does not qualify.
  std::optional<std::size_t> component_of(std::size_t i) const;
};

// Precomputed estimates, filter values and lens ranges for one cloud.
class DensityIndex {
 public:
  DensityIndex(const PointCloud& cloud, const KdeConfig& cfg, bool parallel = true);

  const PointCloud& cloud() const { return cloud_; }
  const KdeConfig& config() const { return cfg_; }
  const std::vector<double>& density() const { return density_; }
  std::size_t lens_count() const { return lens_.size(); }

  Partition restricted_components(double L, const Interval& V) const;
  // Inner components into the outer component holding their smallest member.
  SetMap pi0_map(double L_inner, double L_outer, const Interval& V) const;

 private:
  bool qualifies(std::size_t i, double L, const Interval& V) const;

  const PointCloud& cloud_;
  KdeConfig cfg_;
  std::vector<double> density_;
  std::vector<double> fvalue_;
  struct Lens {
    std::size_t i, j;
    ValueRange range;
  };
  std::vector<Lens> lens_;
};

Partition restricted_components(const PointCloud& cloud, const KdeConfig& cfg, double L,
                                const Interval& V);
SetMap pi0_map(const PointCloud& cloud, const KdeConfig& cfg, double L_inner, double L_outer,
               const Interval& V);

// V -> π0 of the level-L estimate restricted to f^{-1}(V).
class LevelSetFunctor final : public IntervalFunctor {
 public:
  LevelSetFunctor(const DensityIndex& index, double level) : index_(index), level_(level) {}
  LabelSet evaluate(const Interval& I) const override;
  SetMap extend(const Interval& I, const Interval& J) const override;

 private:
  const DensityIndex& index_;
  double level_;
};

// Mapper cosheaf of the image of the inner-level components in the
// outer-level ones, on the cover's grid, not normalized.
ConstructibleCosheaf dhat_pi_cosheaf(const DensityIndex& index, const NiceCover& U);
ConstructibleCosheaf dhat_pi_cosheaf(const PointCloud& cloud, const KdeConfig& cfg, const NiceCover& U);

// Cover elements and consecutive overlaps whose component counts change when
// either working level moves by half its margin.
std::vector<std::string> tameness_warnings(const DensityIndex& index, const NiceCover& U);

nlohmann::json to_json(const KdeConfig& cfg);
// Missing keys keep the values already in `base`.
KdeConfig kde_config_from_json(const nlohmann::json& j, KdeConfig base = {});

}  // namespace mapper
