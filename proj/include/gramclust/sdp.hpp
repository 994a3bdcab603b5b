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

#ifndef GRAMCLUST_SDP_HPP_
#define GRAMCLUST_SDP_HPP_

// SDP(A|B) = max sum_ij a_ij <x_i, x_j> over unit vectors x_i, solved in
// low-rank factored form on a product of spheres. A is PSD, so the objective
// is convex in X and the unit-norm and norm-at-most-one relaxations agree.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/parallel.hpp"
#include "gramclust/rng.hpp"

namespace gramclust {

struct SdpConfig {
  int rank0 = 0;          // <= 0: min(n, ceil(sqrt(2n)) + 1)
  double grad_tol = 0.0;  // <= 0: 1e-7 * ||A||_F
  double value_tol = 0.0; // <= 0: 1e-8 * ||A||_F
  int max_iters = 50000;  // sweeps per restart, across all rank escalations
  int restarts = 4;
  int threads = 1;
};

struct SdpSolution {
  double value = 0.0;
  int rank = 0;
  Matrix vectors;  // n x rank, unit rows
  double stationarity_residual = 0.0;
  int iterations = 0;
  bool converged = true;  // false: sweep cap hit above grad_tol
  /// sum_i y_i - n * lambda_min(Diag(y) - A) with y_i = <(AX)_i, x_i>; an
  /// upper bound on SDP(A|B) that meets `value` at the optimum.
  double dual_bound = 0.0;
  int restart_index = 0;
};

namespace detail {

inline double sdp_objective(const Matrix& a, const Matrix& x) {
  return (x.transpose() * a * x).trace();
}

inline void normalize_rows(Matrix& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nrm = x.row(i).norm();
    if (nrm > 0.0) {
      x.row(i) /= nrm;
    } else {
      x.row(i).setZero();
      x(i, 0) = 1.0;
    }
  }
}

/// Norm of the Riemannian gradient 2 (G_i - <G_i, x_i> x_i), G = A X.
inline double riemannian_residual(const Matrix& a, const Matrix& x) {
  const Matrix g = a * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double proj = g.row(i).dot(x.row(i));
    total += (g.row(i) - proj * x.row(i)).squaredNorm();
  }
  return 2.0 * std::sqrt(total);
}

/// Block-coordinate ascent: x_i <- normalize(sum_{j != i} a_ij x_j), the exact
/// maximizer of the objective in x_i with the others fixed.
inline int ascend(const Matrix& a, Matrix& x, double grad_tol, int budget, double* residual) {
  const auto n = x.rows();
  Matrix g = a * x;
  int sweeps = 0;
  *residual = riemannian_residual(a, x);
  while (sweeps < budget && *residual > grad_tol) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::RowVectorXd target = g.row(i) - a(i, i) * x.row(i);
      const double nrm = target.norm();
      if (nrm <= 0.0) continue;
      target /= nrm;
      const Eigen::RowVectorXd delta = target - x.row(i);
      x.row(i) = target;
      g.noalias() += a.col(i) * delta;
    }
    ++sweeps;
    g = a * x;
    *residual = riemannian_residual(a, x);
  }
  return sweeps;
}

struct DualInfo {
  double bound = 0.0;
  double lambda_min = 0.0;
  Vector direction;
};

inline DualInfo dual_check(const Matrix& a, const Matrix& x) {
  const Matrix g = a * x;
  const auto n = a.rows();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = g.row(i).dot(x.row(i));
  Matrix s = -a;
  s.diagonal() += y;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  DualInfo info;
  info.lambda_min = eig.eigenvalues()(0);
  info.direction = eig.eigenvectors().col(0);
  info.bound = y.sum() - static_cast<double>(n) * info.lambda_min;
  return info;
}

}  // namespace detail

/// Solves SDP(A|B) from one random start per restart and keeps the best.
///
/// Each restart runs coordinate ascent at rank r0, then checks the dual
/// matrix S = Diag(y) - A. A negative eigenvector u of S is a second-order
/// ascent direction: the rank grows by two (u and a small random column)
/// and ascent resumes, for as long as the value improves by more than
/// value_tol.
inline SdpSolution solve_sdp(const SymMatrix& a_sym, const SdpConfig& cfg = {},
                             std::uint64_t seed = 1) {
  const Matrix& a = a_sym.matrix();
  const auto n = static_cast<int>(a.rows());
  const double fro = a.norm();
  const double grad_tol = cfg.grad_tol > 0.0 ? cfg.grad_tol : 1e-7 * fro;
  const double value_tol = cfg.value_tol > 0.0 ? cfg.value_tol : 1e-8 * fro;
  const int rank0 = cfg.rank0 > 0
                        ? std::min(cfg.rank0, n)
                        : std::min(n, static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1);

  if (fro == 0.0 || n == 1) {
    SdpSolution s;
    s.rank = 1;
    s.vectors = Matrix::Zero(n, 1);
    s.vectors.col(0).setOnes();
    s.value = detail::sdp_objective(a, s.vectors);
    s.dual_bound = s.value;
    return s;
  }

  const int restarts = std::max(cfg.restarts, 1);
  std::vector<SdpSolution> slots(restarts);
  parallel_for(static_cast<std::size_t>(restarts), cfg.threads, [&](std::size_t r) {
    const CounterStream rng(seed, mix_stream(0x5D9, r));
    std::uint64_t counter = 0;
    Matrix x(n, rank0);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < rank0; ++c) x(i, c) = rng.gaussian(counter++);
    detail::normalize_rows(x);

    double residual = 0.0;
    int used = detail::ascend(a, x, grad_tol, cfg.max_iters, &residual);
    double value = detail::sdp_objective(a, x);
    detail::DualInfo dual = detail::dual_check(a, x);
    const double eig_tol = 1e-9 * fro;

    while (dual.lambda_min < -eig_tol && used < cfg.max_iters) {
      Matrix trial;
      const auto r = static_cast<int>(x.cols());
      if (r < n) {
        const int grow = std::min(2, n - r);
        trial = Matrix::Zero(n, r + grow);
        trial.leftCols(r) = x;
        trial.col(r) = dual.direction;
        if (grow == 2) {
          for (int i = 0; i < n; ++i) trial(i, r + 1) = 1e-3 * rng.gaussian(counter++);
        }
      } else {
        // Full rank already: move along u q^T with q in the null space of X.
        Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullV);
        const Vector q = svd.matrixV().col(x.cols() - 1);
        trial = x + dual.direction * q.transpose();
      }
      detail::normalize_rows(trial);
      double trial_residual = 0.0;
      used += detail::ascend(a, trial, grad_tol, cfg.max_iters - used, &trial_residual);
      const double trial_value = detail::sdp_objective(a, trial);
      if (trial_value <= value + value_tol) break;
      x = std::move(trial);
      value = trial_value;
      residual = trial_residual;
      dual = detail::dual_check(a, x);
    }

    SdpSolution s;
    s.vectors = x;
    s.rank = static_cast<int>(x.cols());
    s.value = value;
    s.stationarity_residual = residual;
    s.iterations = used;
    s.converged = residual <= grad_tol;
    s.dual_bound = dual.bound;
    s.restart_index = static_cast<int>(r);
    slots[r] = std::move(s);
  });

  int best = 0;
  for (int r = 1; r < restarts; ++r)
    if (slots[r].value > slots[best].value) best = r;
  return slots[best];
}

struct SandwichCheck {
  double lower = 0.0;  // Clust / R^2
  double sdp = 0.0;
  double upper = 0.0;  // Clust / C(B)
  double slack = 0.0;
  bool left_ok = false;
  bool right_ok = false;
  bool ok() const { return left_ok && right_ok; }
};

/// Checks Clust/R^2 <= SDP <= Clust/C(B) up to relative `tol` plus the
/// solver's stationarity residual.
inline SandwichCheck certify_sandwich(const SdpSolution& sdp, double clust_exact, double r2,
                                      double c_of_b, double tol = 1e-4) {
  if (!(r2 > 0.0) || !(c_of_b > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "R(B)^2 and C(B) must be positive");
  }
  SandwichCheck out;
  out.lower = clust_exact / r2;
  out.sdp = sdp.value;
  out.upper = clust_exact / c_of_b;
  out.slack = sdp.stationarity_residual;
  out.left_ok = out.lower <= sdp.value * (1.0 + tol) + out.slack;
  out.right_ok = sdp.value <= out.upper * (1.0 + tol) + out.slack;
  return out;
}

}  // namespace gramclust

#endif  // GRAMCLUST_SDP_HPP_
