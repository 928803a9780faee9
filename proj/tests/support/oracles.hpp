#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "obtune/experiments.hpp"
#include "obtune/space.hpp"

namespace obtune::test {

// Brute-force k-NN regression: full stable sort over every row instead of a
// partial sort. Shares the arithmetic contract with the library (squared
// distances accumulated in ascending feature order, inverse-distance weights
// summed in neighbor order, exact match short-circuits to the lowest index)
// so agreement is expected bit for bit.
inline double knn_oracle(const std::vector<std::vector<double>>& features,
                         const std::vector<double>& targets, std::size_t k,
                         const std::vector<double>& query) {
  struct Entry {
    double d2;
    std::size_t row;
  };
  std::vector<Entry> entries;
  entries.reserve(features.size());
  for (std::size_t r = 0; r < features.size(); ++r) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      const double diff = query[j] - features[r][j];
      d2 += diff * diff;
    }
    if (d2 == 0.0) return targets[r];
    entries.push_back({d2, r});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.d2 < b.d2; });
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = 1.0 / (std::sqrt(entries[i].d2) + 1e-12);
    weighted += w * targets[entries[i].row];
    total += w;
  }
  return weighted / total;
}

// Exhaustive lattice maximum of a true objective, for calibrating
// convergence thresholds against something the tuner cannot game.
inline double dense_grid_max(const HyperParamSpace& space,
                             const Objective& obj, std::size_t per_axis) {
  const std::size_t n = space.size();
  std::vector<std::size_t> idx(n, 0);
  double best = 0.0;
  bool first = true;
  while (true) {
    std::vector<double> unit(n);
    for (std::size_t j = 0; j < n; ++j)
      unit[j] = per_axis == 1
                    ? 0.5
                    : static_cast<double>(idx[j]) /
                          static_cast<double>(per_axis - 1);
    const double q = obj(space.denormalize(unit));
    if (first || q > best) best = q;
    first = false;
    std::size_t axis = n;
    while (axis-- > 0) {
      if (++idx[axis] < per_axis) break;
      idx[axis] = 0;
      if (axis == 0) return best;
    }
  }
}

}  // namespace obtune::test
