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

#ifndef GRAMCLUST_HARDNESS_HPP_
#define GRAMCLUST_HARDNESS_HPP_

// Completeness-side gadgets of the hardness reduction: the perturbed boundary
// distribution mu, an orthonormal basis of functions on ({1..k}, mu), and the
// value of dictatorship assignments.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/ball.hpp"
#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"

namespace gramclust {

struct LabelDistribution {
  Vector mu;
  double beta = 0.0;
  Vector p;  // unperturbed boundary weights
};

struct OrthonormalBasis {
  int k = 0;
  Matrix table;  // table(i, w) = X_i(w); row 0 is the constant 1
};

/// sum_i mu_i |v_i - sum_j mu_j v_j|^2, evaluated on the Gram vectors.
inline double dictatorship_objective(const GramFactor& g, const Vector& mu) {
  const Vector mean = g.vectors.transpose() * mu;
  double total = 0.0;
  for (int i = 0; i < g.k; ++i) total += mu(i) * (g.vector(i) - mean).squaredNorm();
  return total;
}

inline double dictatorship_objective(const SymMatrix& b, const LabelDistribution& dist) {
  return dictatorship_objective(gram_factorize(b), dist.mu);
}

/// mu = (1 - beta) p + beta / k with beta = min(1/8, epsilon / (7 R^2)).
/// Throws if the resulting spread falls below R^2 - epsilon.
inline LabelDistribution build_mu(const EnclosingBall& ball, const GramFactor& g, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kInvalidArgument, "epsilon must be positive");
  const double r2 = ball.radius_squared();
  if (!(r2 > 0.0)) throw Error(ErrorKind::kDegenerateB, "R(B) = 0");
  LabelDistribution out;
  out.p = ball.weights;
  out.beta = std::min(1.0 / 8.0, epsilon / (7.0 * r2));
  out.mu = (1.0 - out.beta) * out.p.array() + out.beta / static_cast<double>(g.k);
  const double spread = dictatorship_objective(g, out.mu);
  if (spread < r2 - epsilon) {
    throw Error(ErrorKind::kInfeasible, "perturbed spread " + std::to_string(spread) +
                                            " is below R^2 - epsilon");
  }
  return out;
}

/// Completes (sqrt(mu_1), ..., sqrt(mu_k)) to an orthogonal U with a
/// Householder reflection and sets X_i(w) = u_iw / sqrt(mu_w).
inline OrthonormalBasis build_basis(const LabelDistribution& dist) {
  const auto k = static_cast<int>(dist.mu.size());
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "empty distribution");
  if ((dist.mu.array() <= 0.0).any()) {
    throw Error(ErrorKind::kZeroMass, "every label needs positive mass");
  }
  const Vector root = dist.mu.cwiseSqrt() / std::sqrt(dist.mu.sum());
  Vector h = -root;
  h(0) += 1.0;  // reflection across h swaps e_1 and root
  Matrix u = Matrix::Identity(k, k);
  const double hn2 = h.squaredNorm();
  if (hn2 > 1e-30) u -= 2.0 * h * h.transpose() / hn2;
  OrthonormalBasis out;
  out.k = k;
  out.table = u;
  for (int w = 0; w < k; ++w) out.table.col(w) /= std::sqrt(dist.mu(w));
  out.table.row(0).setOnes();  // exact: u_1w = sqrt(mu_w)
  return out;
}

}  // namespace gramclust

#endif  // GRAMCLUST_HARDNESS_HPP_
