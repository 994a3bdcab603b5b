// Copyright 2026 The gramclust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRAMCLUST_ORACLE_HPP_
#define GRAMCLUST_ORACLE_HPP_

// Exact ground truth at small scale: exhaustive Clust(A|B), a dense ray grid
// for C(B) with three labels, and the diag(1, 1, c) regression table.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/ball.hpp"
#include "gramclust/conic.hpp"
#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/rounding.hpp"

namespace gramclust {

inline constexpr double kMaxOracleStates = 5e7;

struct ExactClustering {
  double value = 0.0;
  Assignment sigma;
  std::uint64_t states = 0;
};

/// max over all k^n assignments, walked in reflected k-ary Gray order so each
/// step moves one point and updates the row masses in O(n + k).
inline ExactClustering brute_force_clust(const SymMatrix& a, const SymMatrix& b,
                                         double max_states = kMaxOracleStates) {
  const int n = a.dim(), k = b.dim();
  const double states = std::pow(static_cast<double>(k), n);
  if (states > max_states) {
    throw Error(ErrorKind::kTooLarge, std::to_string(k) + "^" + std::to_string(n) +
                                          " assignments exceed the enumeration cap");
  }
  const Matrix& am = a.matrix();
  const Matrix& bm = b.matrix();
  Assignment digit(n, 0);
  std::vector<int> dir(n, 1);
  // rowmass(i, s) = sum_{j : sigma_j = s} a_ij, including j = i.
  Matrix rowmass = Matrix::Zero(n, k);
  rowmass.col(0) = am.rowwise().sum();
  double value = bm(0, 0) * am.sum();

  ExactClustering best;
  best.value = value;
  best.sigma = digit;
  std::uint64_t steps = 1;
  for (;;) {
    int i = 0;
    while (i < n && (digit[i] + dir[i] < 0 || digit[i] + dir[i] >= k)) {
      dir[i] = -dir[i];
      ++i;
    }
    if (i == n) break;
    const int from = digit[i], to = digit[i] + dir[i];
    const double self = am(i, i);
    double delta = self * (bm(to, to) - bm(from, from));
    for (int s = 0; s < k; ++s) {
      const double others = rowmass(i, s) - (s == from ? self : 0.0);
      delta += 2.0 * others * (bm(to, s) - bm(from, s));
    }
    value += delta;
    rowmass.col(from) -= am.col(i);
    rowmass.col(to) += am.col(i);
    digit[i] = to;
    ++steps;
    if ((steps & 0xFFFF) == 0) {
      value = 0.0;  // resynchronize against accumulated rounding
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < k; ++s) value += rowmass(r, s) * bm(digit[r], s);
    }
    if (value > best.value) {
      best.value = value;
      best.sigma = digit;
    }
  }
  best.value = clustering_value(a, b, best.sigma);
  best.states = steps;
  return best;
}

namespace detail {

/// Psi of the three planar sectors cut by rays at 0, t2, t3, each moment
/// taken as sin(alpha/2) / sqrt(2 pi) along the sector's bisector.
inline double ray_grid_psi(const Matrix& b, double t2, double t3) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double rays[4] = {0.0, t2, t3, two_pi};
  Eigen::Vector2d z[3];
  for (int j = 0; j < 3; ++j) {
    const double alpha = rays[j + 1] - rays[j];
    const double mid = 0.5 * (rays[j + 1] + rays[j]);
    z[j] = std::sin(0.5 * alpha) / std::sqrt(two_pi) * Eigen::Vector2d(std::cos(mid), std::sin(mid));
  }
  double psi = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) psi += b(p, q) * z[p].dot(z[q]);
  return psi;
}

}  // namespace detail

/// C(B) for a 3x3 PSD B by brute force over three boundary rays (one fixed
/// at angle 0 by rotation invariance; the mirror image covers the other
/// cyclic order). Coinciding rays give the two-cell partitions. One local
/// refinement pass on a finer grid follows.
inline double brute_force_c3(const SymMatrix& b, int grid = 360) {
  if (b.dim() != 3) throw Error(ErrorKind::kDimensionMismatch, "brute_force_c3 needs a 3x3 B");
  if (grid < 180) throw Error(ErrorKind::kInvalidArgument, "grid must be at least 180");
  if (!validate_psd(b)) throw Error(ErrorKind::kNotPSD, "B must be positive semidefinite");
  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / grid;
  double best = -1.0, bt2 = 0.0, bt3 = 0.0;
  for (int i = 0; i <= grid; ++i)
    for (int j = i; j <= grid; ++j) {
      const double v = detail::ray_grid_psi(b.matrix(), i * h, j * h);
      if (v > best) {
        best = v;
        bt2 = i * h;
        bt3 = j * h;
      }
    }
  constexpr int kFine = 40;
  const double fine = 2.0 * h / kFine;
  const double c2 = bt2, c3 = bt3;
  for (int i = 0; i <= kFine; ++i)
    for (int j = 0; j <= kFine; ++j) {
      const double t2 = std::clamp(c2 - h + i * fine, 0.0, two_pi);
      const double t3 = std::clamp(c3 - h + j * fine, t2, two_pi);
      best = std::max(best, detail::ray_grid_psi(b.matrix(), t2, t3));
    }
  return best;
}

struct BcFamilyRow {
  double c = 0.0;
  FormulaBc expected;
  double r2 = 0.0;
  double c_of_b = 0.0;
  double ratio = 0.0;
  double r2_rel_err = 0.0;
  double c_rel_err = 0.0;
  double ratio_rel_err = 0.0;
  int active_cells = 0;
  bool pass = false;
};

inline SymMatrix b_c_matrix(double c) { return SymMatrix::diagonal({1.0, 1.0, c}); }

/// Pipeline R^2, C and their ratio for B_c = diag(1, 1, c) against the closed
/// forms; a row passes when all three relative errors are within 1%.
inline std::vector<BcFamilyRow> verify_bc_family(const std::vector<double>& c_list,
                                              const SearchConfig& cfg = {}) {
  std::vector<BcFamilyRow> rows;
  for (double c : c_list) {
    if (!(c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "c must be positive");
    BcFamilyRow row;
    row.c = c;
    row.expected = formula_bc(c);
    const SymMatrix b = b_c_matrix(c);
    row.r2 = radius_squared(b);
    const SearchResult found = search_cb(b, cfg);
    row.c_of_b = found.c_estimate;
    row.ratio = row.r2 / row.c_of_b;
    row.active_cells = found.best.ell();
    auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    row.r2_rel_err = rel(row.r2, row.expected.r2);
    row.c_rel_err = rel(row.c_of_b, row.expected.c_of_b);
    row.ratio_rel_err = rel(row.ratio, row.expected.ratio);
    row.pass = row.r2_rel_err <= 0.01 && row.c_rel_err <= 0.01 && row.ratio_rel_err <= 0.01;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gramclust

#endif  // GRAMCLUST_ORACLE_HPP_
