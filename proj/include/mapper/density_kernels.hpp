#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mapper::kernels {

// Points are stored row-major, `dim` coordinates each.  Every kernel has a
// serial reference and an OpenMP version producing identical output.

// Unnormalized bump sums: out[i] = sum_j K(|X_i - X_j| / r).
std::vector<double> bump_sums_serial(const std::vector<double>& pts, std::size_t dim, double r);
std::vector<double> bump_sums_parallel(const std::vector<double>& pts, std::size_t dim, double r);

// Index pairs (i < j) with |X_i - X_j| < radius, sorted.
std::vector<std::pair<std::size_t, std::size_t>> pairs_within_serial(const std::vector<double>& pts,
                                                                     std::size_t dim, double radius);
std::vector<std::pair<std::size_t, std::size_t>> pairs_within_parallel(const std::vector<double>& pts,
                                                                       std::size_t dim, double radius);

double bump(double squared_norm);

}  // namespace mapper::kernels
