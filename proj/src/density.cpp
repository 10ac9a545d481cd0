#include "mapper/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mapper/density_kernels.hpp"
#include "mapper/mapper.hpp"
#include "union_find.hpp"

namespace mapper {

double AffineFilter::operator()(const double* x) const {
  double s = c;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x[k];
  return s;
}

void AffineFilter::validate(std::size_t dim) const {
  if (w.size() != dim)
    throw DensityError("filter direction has " + std::to_string(w.size()) + " components, points have " +
                       std::to_string(dim));
  double n2 = 0;
  for (double v : w) n2 += v * v;
  if (std::abs(std::sqrt(n2) - 1) > 1e-12) throw DensityError("filter direction is not a unit vector");
  if (!std::isfinite(c)) throw DensityError("filter offset is not finite");
}

void PointCloud::validate() const {
  if (dim == 0) throw DensityError("point dimension must be positive");
  if (coords.size() % dim != 0) throw DensityError("coordinate count is not a multiple of the dimension");
  if (size() == 0) throw DensityError("point cloud is empty");
  for (double v : coords)
    if (!std::isfinite(v)) throw DensityError("point cloud has a non-finite coordinate");
  filter.validate(dim);
}

double kernel_profile(KernelId, double squared_norm) { return kernels::bump(squared_norm); }

double kernel_integral(KernelId k, std::size_t dim) {
  static std::mutex mu;
  static std::map<std::pair<int, std::size_t>, double> cache;
  const std::lock_guard lock(mu);
  const auto key = std::make_pair(static_cast<int>(k), dim);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const double d = static_cast<double>(dim);
  const double sphere = 2 * std::pow(std::numbers::pi, d / 2) / std::tgamma(d / 2);
  auto radial = [&](double rho) { return kernel_profile(k, rho * rho) * std::pow(rho, d - 1); };
  const double value =
      sphere * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 15, 1e-14);
  cache.emplace(key, value);
  return value;
}

void KdeConfig::validate() const {
  if (!(r > 0) || !std::isfinite(r)) throw DensityError("bandwidth r must be positive");
  if (!(C_K > 0) || !std::isfinite(C_K)) throw DensityError("kernel integral C_K must be positive");
  if (!(L2 > 0)) throw DensityError("level L2 must be positive");
  if (!(L1 > L2)) throw DensityError("level L1 must exceed L2");
  if (!(eps1 > 0) || !(eps2 > 0)) throw DensityError("margins eps1, eps2 must be positive");
  if (!(L1 - 2 * eps1 > L2 + 2 * eps2))
    throw DensityError("levels violate L1 - 2 eps1 > L2 + 2 eps2");
}

double default_bandwidth(std::size_t n, std::size_t dim, double beta) {
  const double nn = static_cast<double>(std::max<std::size_t>(n, 2));
  return std::pow(beta * std::log(nn) / nn, 1.0 / static_cast<double>(dim));
}

void default_levels(KdeConfig& cfg, const std::vector<double>& sample_density) {
  if (sample_density.empty()) throw DensityError("no samples to set levels from");
  std::vector<double> v = sample_density;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  const double median = v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
  cfg.L2 = 0.25 * median;
  cfg.L1 = 0.75 * median;
  cfg.eps1 = cfg.eps2 = (cfg.L1 - cfg.L2) / 8;
}

KdeConfig default_config(const PointCloud& cloud, double beta) {
  cloud.validate();
  if (!(beta > 0)) throw DensityError("bandwidth factor beta must be positive");
  KdeConfig cfg;
  cfg.r = default_bandwidth(cloud.size(), cloud.dim, beta);
  cfg.C_K = kernel_integral(cfg.kernel, cloud.dim);
  default_levels(cfg, kde_at_samples(cloud, cfg));
  cfg.validate();
  return cfg;
}

namespace {

double normalizer(const PointCloud& cloud, const KdeConfig& cfg) {
  return 1.0 / (cfg.C_K * static_cast<double>(cloud.size()) * std::pow(cfg.r, static_cast<double>(cloud.dim)));
}

}  // namespace

double kde_eval(const PointCloud& cloud, const KdeConfig& cfg, const double* x) {
  double s = 0;
  const double r2 = cfg.r * cfg.r;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = cloud.point(i);
    double d2 = 0;
    for (std::size_t k = 0; k < cloud.dim; ++k) d2 += (x[k] - p[k]) * (x[k] - p[k]);
    s += kernel_profile(cfg.kernel, d2 / r2);
  }
  return s * normalizer(cloud, cfg);
}

std::vector<double> kde_at_samples(const PointCloud& cloud, const KdeConfig& cfg, bool parallel) {
  auto sums = parallel ? kernels::bump_sums_parallel(cloud.coords, cloud.dim, cfg.r)
                       : kernels::bump_sums_serial(cloud.coords, cloud.dim, cfg.r);
  const double scale = normalizer(cloud, cfg);
  for (double& s : sums) s *= scale;
  return sums;
}

std::vector<std::size_t> superlevel_indices(const std::vector<double>& sample_density, double L) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sample_density.size(); ++i)
    if (sample_density[i] >= L) out.push_back(i);
  return out;
}

std::vector<std::size_t> superlevel_indices(const PointCloud& cloud, const KdeConfig& cfg, double L) {
  return superlevel_indices(kde_at_samples(cloud, cfg), L);
}

namespace {

// Largest value of w·x over the lens of two balls at distance D < 2r.
double lens_max(const double* a, const double* b, std::size_t dim, double r, const std::vector<double>& w) {
  double D2 = 0, wa = 0, wb = 0, wu = 0;
  for (std::size_t k = 0; k < dim; ++k) {
    D2 += (b[k] - a[k]) * (b[k] - a[k]);
    wa += w[k] * a[k];
    wb += w[k] * b[k];
  }
  const double D = std::sqrt(D2);
  if (D == 0) return wa + r;
  double gap_a = 0, gap_b = 0;  // |a + r w - b|^2 and |b + r w - a|^2
  for (std::size_t k = 0; k < dim; ++k) {
    const double u = (b[k] - a[k]) / D;
    wu += w[k] * u;
    gap_a += (a[k] + r * w[k] - b[k]) * (a[k] + r * w[k] - b[k]);
    gap_b += (b[k] + r * w[k] - a[k]) * (b[k] + r * w[k] - a[k]);
  }
  if (gap_a <= r * r) return wa + r;
  if (gap_b <= r * r) return wb + r;
  const double rho = std::sqrt(std::max(0.0, r * r - D2 / 4));
  return (wa + wb) / 2 + rho * std::sqrt(std::max(0.0, 1 - wu * wu));
}

}  // namespace

std::optional<ValueRange> lens_f_range(const double* a, const double* b, std::size_t dim, double r,
                                       const AffineFilter& f) {
  double D2 = 0;
  for (std::size_t k = 0; k < dim; ++k) D2 += (b[k] - a[k]) * (b[k] - a[k]);
  if (D2 >= 4 * r * r) return std::nullopt;
  std::vector<double> neg(f.w.size());
  for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -f.w[k];
  return ValueRange{-lens_max(a, b, dim, r, neg) + f.c, lens_max(a, b, dim, r, f.w) + f.c};
}

std::optional<std::size_t> Partition::component_of(std::size_t i) const {
  auto it = std::lower_bound(qualifying.begin(), qualifying.end(), i);
  if (it == qualifying.end() || *it != i) return std::nullopt;
  return component[static_cast<std::size_t>(it - qualifying.begin())];
}

DensityIndex::DensityIndex(const PointCloud& cloud, const KdeConfig& cfg, bool parallel)
    : cloud_(cloud), cfg_(cfg) {
  cloud.validate();
  cfg.validate();
  density_ = kde_at_samples(cloud, cfg, parallel);
  fvalue_.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) fvalue_[i] = cloud.value(i);
  const auto pairs = parallel ? kernels::pairs_within_parallel(cloud.coords, cloud.dim, 2 * cfg.r)
                              : kernels::pairs_within_serial(cloud.coords, cloud.dim, 2 * cfg.r);
  lens_.resize(pairs.size());
  std::vector<char> keep(pairs.size(), 0);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (auto range = lens_f_range(cloud.point(i), cloud.point(j), cloud.dim, cfg.r, cloud.filter)) {
      lens_[p] = {i, j, *range};
      keep[p] = 1;
    }
  }
  std::size_t w = 0;
  for (std::size_t p = 0; p < lens_.size(); ++p)
    if (keep[p]) lens_[w++] = lens_[p];
  lens_.resize(w);
}

bool DensityIndex::qualifies(std::size_t i, double L, const Interval& V) const {
  return density_[i] >= L && fvalue_[i] - cfg_.r < V.hi && fvalue_[i] + cfg_.r > V.lo;
}

Partition DensityIndex::restricted_components(double L, const Interval& V) const {
  const std::size_t n = cloud_.size();
  Partition part;
  std::vector<std::size_t> local(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!qualifies(i, L, V)) continue;
    local[i] = part.qualifying.size();
    part.qualifying.push_back(i);
  }
  UnionFind uf(part.qualifying.size());
  for (const Lens& e : lens_) {
    if (local[e.i] == n || local[e.j] == n) continue;
    if (e.range.lo < V.hi && e.range.hi > V.lo) uf.unite(local[e.i], local[e.j]);
  }
  std::vector<std::size_t> id(part.qualifying.size(), n);
  part.component.resize(part.qualifying.size());
  for (std::size_t q = 0; q < part.qualifying.size(); ++q) {
    const std::size_t root = uf.find(q);
    if (id[root] == n) {
      id[root] = part.labels.size();
      part.labels.push_back("p" + std::to_string(part.qualifying[q]));
      part.first.push_back(part.qualifying[q]);
    }
    part.component[q] = id[root];
  }
  return part;
}

SetMap DensityIndex::pi0_map(double L_inner, double L_outer, const Interval& V) const {
  if (L_inner < L_outer) throw DensityError("inner level below outer level");
  const Partition in = restricted_components(L_inner, V);
  const Partition out = restricted_components(L_outer, V);
  SetMap m{in.labels, out.labels, {}};
  for (std::size_t first : in.first) m.assignment.push_back(*out.component_of(first));
  return m;
}

Partition restricted_components(const PointCloud& cloud, const KdeConfig& cfg, double L,
                                const Interval& V) {
  return DensityIndex(cloud, cfg).restricted_components(L, V);
}

SetMap pi0_map(const PointCloud& cloud, const KdeConfig& cfg, double L_inner, double L_outer,
               const Interval& V) {
  return DensityIndex(cloud, cfg).pi0_map(L_inner, L_outer, V);
}

LabelSet LevelSetFunctor::evaluate(const Interval& I) const {
  return index_.restricted_components(level_, I).labels;
}

SetMap LevelSetFunctor::extend(const Interval& I, const Interval& J) const {
  const Partition a = index_.restricted_components(level_, I);
  const Partition b = index_.restricted_components(level_, J);
  SetMap m{a.labels, b.labels, {}};
  for (std::size_t first : a.first) {
    auto c = b.component_of(first);
    if (!c) throw DensityError("extension between non-nested intervals");
    m.assignment.push_back(*c);
  }
  return m;
}

ConstructibleCosheaf dhat_pi_cosheaf(const DensityIndex& index, const NiceCover& U) {
  const KdeConfig& cfg = index.config();
  const LevelSetFunctor inner(index, cfg.inner_level());
  const LevelSetFunctor outer(index, cfg.outer_level());
  const ImagePrecosheaf image(inner, outer, [&](const Interval& I) {
    return index.pi0_map(cfg.inner_level(), cfg.outer_level(), I);
  });
  return mapper_raw(image, U).cosheaf;
}

ConstructibleCosheaf dhat_pi_cosheaf(const PointCloud& cloud, const KdeConfig& cfg, const NiceCover& U) {
  return dhat_pi_cosheaf(DensityIndex(cloud, cfg), U);
}

namespace {

std::string show(const Interval& V) {
  auto num = [](double x) {
    if (x == kInf) return std::string("inf");
    if (x == -kInf) return std::string("-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return std::string(buf);
  };
  return "(" + num(V.lo) + ", " + num(V.hi) + ")";
}

}  // namespace

std::vector<std::string> tameness_warnings(const DensityIndex& index, const NiceCover& U) {
  std::vector<Interval> probes = U.elements;
  for (std::size_t i = 0; i + 1 < U.size(); ++i)
    if (auto w = intersect(U.elements[i], U.elements[i + 1])) probes.push_back(*w);
  const KdeConfig& cfg = index.config();
  const std::pair<double, double> levels[] = {{cfg.inner_level(), cfg.eps1}, {cfg.outer_level(), cfg.eps2}};
  std::vector<std::string> out;
  for (const Interval& V : probes) {
    for (const auto& [L, eps] : levels) {
      const double nu = eps / 2;
      const std::size_t below = index.restricted_components(L - nu, V).size();
      const std::size_t at = index.restricted_components(L, V).size();
      const std::size_t above = index.restricted_components(L + nu, V).size();
      if (below != at || above != at) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "component count on %s changes near level %g: %zu/%zu/%zu at -%g/0/+%g",
                      show(V).c_str(), L, below, at, above, nu, nu);
        out.push_back(buf);
      }
    }
  }
  return out;
}

nlohmann::json to_json(const KdeConfig& cfg) {
  return {{"kernel", "bump"}, {"r", cfg.r},   {"C_K", cfg.C_K},   {"L1", cfg.L1},
          {"L2", cfg.L2},     {"eps1", cfg.eps1}, {"eps2", cfg.eps2}};
}

KdeConfig kde_config_from_json(const nlohmann::json& j, KdeConfig base) {
  if (!j.is_object()) throw DensityError("KDE config must be an object");
  if (j.contains("kernel") && j.at("kernel") != "bump")
    throw DensityError("unknown kernel '" + j.at("kernel").dump() + "'");
  auto read = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw DensityError(std::string("config field '") + key + "' must be a number");
    slot = j.at(key).get<double>();
  };
  read("r", base.r);
  read("C_K", base.C_K);
  read("L1", base.L1);
  read("L2", base.L2);
  read("eps1", base.eps1);
  read("eps2", base.eps2);
  return base;
}

}  // namespace mapper
