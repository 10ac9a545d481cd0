#include "mapper/density_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <omp.h>

namespace mapper::kernels {

double bump(double s) { return s < 1 ? std::exp(1 - 1 / (1 - s)) : 0.0; }

namespace {

// Uniform grid of cubes with side `h`; neighbours of a point lie in the 3^d
// surrounding cells.
class CellHash {
 public:
  CellHash(const std::vector<double>& pts, std::size_t dim, double h) : pts_(pts), dim_(dim), h_(h) {
    const std::size_t n = dim ? pts.size() / dim : 0;
    for (std::size_t i = 0; i < n; ++i) cells_[key(cell_of(i))].push_back(i);
  }

  template <class Fn>
  void for_each_near(std::size_t i, Fn&& fn) const {
    const auto base = cell_of(i);
    std::vector<long> c(dim_);
    const std::size_t total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(dim_)));
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t k = 0; k < dim_; ++k) {
        c[k] = base[k] + static_cast<long>(rest % 3) - 1;
        rest /= 3;
      }
      auto it = cells_.find(key(c));
      if (it == cells_.end()) continue;
      for (std::size_t j : it->second) fn(j);
    }
  }

  double sq_dist(std::size_t i, std::size_t j) const {
    double s = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double d = pts_[i * dim_ + k] - pts_[j * dim_ + k];
      s += d * d;
    }
    return s;
  }

 private:
  std::vector<long> cell_of(std::size_t i) const {
    std::vector<long> c(dim_);
    for (std::size_t k = 0; k < dim_; ++k) c[k] = static_cast<long>(std::floor(pts_[i * dim_ + k] / h_));
    return c;
  }
  static std::uint64_t key(const std::vector<long>& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (long v : c) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return h;
  }

  const std::vector<double>& pts_;
  std::size_t dim_;
  double h_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Sum over neighbours in increasing index order so both versions agree bit for bit.
double bump_sum_at(const CellHash& grid, std::size_t i, double r2) {
  std::vector<std::size_t> near;
  grid.for_each_near(i, [&](std::size_t j) { near.push_back(j); });
  std::sort(near.begin(), near.end());
  near.erase(std::unique(near.begin(), near.end()), near.end());
  double s = 0;
  for (std::size_t j : near) s += bump(grid.sq_dist(i, j) / r2);
  return s;
}

void pairs_at(const CellHash& grid, std::size_t i, double radius2,
              std::vector<std::pair<std::size_t, std::size_t>>& out) {
  std::vector<std::size_t> near;
  grid.for_each_near(i, [&](std::size_t j) {
    if (j > i && grid.sq_dist(i, j) < radius2) near.push_back(j);
  });
  std::sort(near.begin(), near.end());
  near.erase(std::unique(near.begin(), near.end()), near.end());
  for (std::size_t j : near) out.push_back({i, j});
}

}  // namespace

std::vector<double> bump_sums_serial(const std::vector<double>& pts, std::size_t dim, double r) {
  const std::size_t n = pts.size() / dim;
  const CellHash grid(pts, dim, r);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = bump_sum_at(grid, i, r * r);
  return out;
}

std::vector<double> bump_sums_parallel(const std::vector<double>& pts, std::size_t dim, double r) {
  const std::size_t n = pts.size() / dim;
  const CellHash grid(pts, dim, r);
  std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i) out[i] = bump_sum_at(grid, i, r * r);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_within_serial(const std::vector<double>& pts,
                                                                     std::size_t dim, double radius) {
  const std::size_t n = pts.size() / dim;
  const CellHash grid(pts, dim, radius);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) pairs_at(grid, i, radius * radius, out);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_within_parallel(const std::vector<double>& pts,
                                                                       std::size_t dim, double radius) {
  const std::size_t n = pts.size() / dim;
  const CellHash grid(pts, dim, radius);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_point(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i) pairs_at(grid, i, radius * radius, per_point[i]);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto& v : per_point) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace mapper::kernels
