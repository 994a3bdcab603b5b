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

#ifndef GRAMCLUST_BALL_HPP_
#define GRAMCLUST_BALL_HPP_

// Minimum enclosing ball of the Gram vectors v_1..v_k, with the convex
// weights p that express its center through the boundary points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"

namespace gramclust {

inline constexpr double kBallTol = 1e-7;
/// Above this ambient dimension the exact recursion gives way to Frank-Wolfe.
inline constexpr int kWelzlMaxDim = 10;
inline constexpr int kFrankWolfeMaxIters = 10000;

struct EnclosingBall {
  Vector center;
  double radius = 0.0;
  std::vector<int> support;  // labels on the boundary, ascending
  Vector weights;            // probability vector over all k labels
  bool support_affinely_dependent = false;
  std::string method;  // "welzl" or "frank-wolfe"

  double radius_squared() const { return radius * radius; }
};

namespace detail {

struct Sphere {
  Vector center;
  double r2 = -1.0;  // negative: contains nothing
};

/// Smallest sphere through the given points, centered in their affine hull.
inline Sphere circumsphere(const Matrix& pts, const std::vector<int>& on) {
  Sphere s;
  if (on.empty()) {
    s.center = Vector::Zero(pts.cols());
    return s;
  }
  const Vector p0 = pts.row(on[0]).transpose();
  if (on.size() == 1) {
    s.center = p0;
    s.r2 = 0.0;
    return s;
  }
  const auto m = static_cast<Eigen::Index>(on.size()) - 1;
  Matrix q(pts.cols(), m);
  for (Eigen::Index j = 0; j < m; ++j) q.col(j) = pts.row(on[j + 1]).transpose() - p0;
  const Matrix qtq = q.transpose() * q;
  const Vector rhs = 0.5 * qtq.diagonal();
  const Vector lambda = qtq.completeOrthogonalDecomposition().solve(rhs);
  s.center = p0 + q * lambda;
  s.r2 = 0.0;
  for (int idx : on) s.r2 = std::max(s.r2, (pts.row(idx).transpose() - s.center).squaredNorm());
  return s;
}

inline bool contains(const Sphere& s, const Vector& p, double scale2) {
  if (s.r2 < 0.0) return false;
  return (p - s.center).squaredNorm() <= s.r2 * (1.0 + 1e-12) + 1e-14 * scale2;
}

/// Move-to-front Welzl recursion (Gaertner's formulation).
class WelzlSolver {
 public:
  explicit WelzlSolver(const Matrix& pts) : pts_(pts) {
    for (int i = 0; i < pts.rows(); ++i) order_.push_back(i);
    scale2_ = std::max(1.0, pts.rowwise().squaredNorm().maxCoeff());
  }

  Sphere solve() {
    std::vector<int> boundary;
    recurse(order_.end(), boundary);
    return best_;
  }

 private:
  void recurse(std::list<int>::iterator end, std::vector<int>& boundary) {
    best_ = circumsphere(pts_, boundary);
    if (static_cast<Eigen::Index>(boundary.size()) == pts_.cols() + 1) return;
    for (auto it = order_.begin(); it != end;) {
      const int idx = *it;
      auto next = std::next(it);
      if (!contains(best_, pts_.row(idx).transpose(), scale2_)) {
        boundary.push_back(idx);
        recurse(it, boundary);
        boundary.pop_back();
        order_.splice(order_.begin(), order_, it);
      }
      it = next;
    }
  }

  const Matrix& pts_;
  std::list<int> order_;
  Sphere best_;
  double scale2_ = 1.0;
};

/// Frank-Wolfe with away steps on the dual max_p sum p_i|v_i|^2 - |sum p_i v_i|^2.
inline Sphere frank_wolfe_ball(const Matrix& pts) {
  const auto k = pts.rows();
  Vector p = Vector::Constant(k, 1.0 / static_cast<double>(k));
  const Vector sq = pts.rowwise().squaredNorm();
  Vector center = pts.transpose() * p;
  for (int iter = 0; iter < kFrankWolfeMaxIters; ++iter) {
    const Vector dist2 = (pts.rowwise() - center.transpose()).rowwise().squaredNorm();
    Eigen::Index far = 0;
    const double max_d2 = dist2.maxCoeff(&far);
    const double dual = p.dot(sq) - center.squaredNorm();
    if (max_d2 <= dual * (1.0 + 1e-14) + 1e-300) break;
    Eigen::Index near = -1;
    double min_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (p(i) > 0.0 && dist2(i) < min_d2) {
        min_d2 = dist2(i);
        near = i;
      }
    }
    const bool toward = (max_d2 - dual) >= (dual - min_d2);
    // Direction d = e_j - p (toward) or p - e_i (away); the dual is quadratic,
    // so the exact line search is closed form.
    Vector dir = -p;
    Eigen::Index j = toward ? far : near;
    double step_max = 1.0;
    if (toward) {
      dir(j) += 1.0;
    } else {
      dir = p;
      dir(j) -= 1.0;
      step_max = p(j) < 1.0 ? p(j) / (1.0 - p(j)) : 1.0;
    }
    const Vector dc = pts.transpose() * dir;
    const double slope = dir.dot(sq) - 2.0 * center.dot(dc);
    const double curv = dc.squaredNorm();
    if (slope <= 0.0) break;
    double step = curv > 0.0 ? slope / (2.0 * curv) : step_max;
    step = std::min(step, step_max);
    p += step * dir;
    p = p.cwiseMax(0.0);
    p /= p.sum();
    center = pts.transpose() * p;
  }
  Sphere s;
  s.center = center;
  s.r2 = (pts.rowwise() - center.transpose()).rowwise().squaredNorm().maxCoeff();
  return s;
}

/// Minimum-norm p >= 0 with sum p = 1 and sum p_i v_i = center, supported on
/// `support`. Enumerates faces of the simplex: the min-norm point of the
/// feasible polytope is the min-norm solution of the equality system on its
/// own support, so checking every face finds it exactly.
inline Vector min_norm_weights(const Matrix& pts, const std::vector<int>& support,
                               const Vector& center, double feas_tol, bool* dependent) {
  const auto s = static_cast<int>(support.size());
  const auto d = pts.cols();
  Matrix m(d + 1, s);
  for (int j = 0; j < s; ++j) {
    m.block(0, j, d, 1) = pts.row(support[j]).transpose();
    m(d, j) = 1.0;
  }
  Vector rhs(d + 1);
  rhs.head(d) = center;
  rhs(d) = 1.0;

  Eigen::FullPivLU<Matrix> lu(m);
  *dependent = lu.rank() < s;

  Vector best;
  double best_norm = std::numeric_limits<double>::infinity();
  if (s <= 16) {
    for (unsigned mask = 1; mask < (1u << s); ++mask) {
      std::vector<int> cols;
      for (int j = 0; j < s; ++j)
        if (mask & (1u << j)) cols.push_back(j);
      Matrix sub(d + 1, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) sub.col(c) = m.col(cols[c]);
      const Vector sol = sub.completeOrthogonalDecomposition().solve(rhs);
      if (sol.minCoeff() < -1e-12) continue;
      if ((sub * sol - rhs).norm() > feas_tol) continue;
      const double nrm = sol.norm();
      if (nrm < best_norm - 1e-15) {
        best_norm = nrm;
        best = Vector::Zero(s);
        for (std::size_t c = 0; c < cols.size(); ++c) best(cols[c]) = std::max(sol(c), 0.0);
      }
    }
  } else {
    // Projected gradient on |M p - rhs|^2 over the simplex.
    Vector p = Vector::Constant(s, 1.0 / s);
    const double lip = std::max(1e-300, 2.0 * m.squaredNorm());
    for (int iter = 0; iter < 20000; ++iter) {
      Vector y = p - (2.0 / lip) * (m.transpose() * (m * p - rhs));
      // Euclidean projection onto the simplex.
      Vector u = y;
      std::sort(u.data(), u.data() + u.size(), std::greater<>());
      double cum = 0.0, theta = 0.0;
      for (int j = 0; j < s; ++j) {
        cum += u(j);
        const double t = (cum - 1.0) / (j + 1);
        if (u(j) - t > 0.0) theta = t;
      }
      p = (y.array() - theta).cwiseMax(0.0);
    }
    if ((m * p - rhs).norm() <= feas_tol) best = p;
  }
  if (best.size() == 0) {
    throw Error(ErrorKind::kInfeasible,
                "no convex combination of boundary points reproduces the ball center");
  }
  return best;
}

}  // namespace detail

/// Convex weights p over all k labels: p_i > 0 only on the boundary,
/// sum p_i v_i = center. Ties among several valid p go to the minimum
/// Euclidean norm.
inline Vector support_weights(EnclosingBall& ball, const GramFactor& g) {
  const double band = kBallTol * std::max(ball.radius, 1.0);
  ball.support.clear();
  for (int i = 0; i < g.k; ++i) {
    const double dist = (g.vector(i) - ball.center).norm();
    if (std::abs(dist - ball.radius) <= band) ball.support.push_back(i);
  }
  if (ball.support.empty()) {
    throw Error(ErrorKind::kInfeasible, "enclosing ball has no boundary points");
  }
  bool dependent = false;
  const Vector local = detail::min_norm_weights(g.vectors, ball.support, ball.center,
                                                10.0 * kBallTol * std::max(1.0, ball.radius),
                                                &dependent);
  ball.support_affinely_dependent = dependent;
  ball.weights = Vector::Zero(g.k);
  for (std::size_t j = 0; j < ball.support.size(); ++j) ball.weights(ball.support[j]) = local(j);
  ball.weights /= ball.weights.sum();
  return ball.weights;
}

/// Smallest Euclidean ball containing the rows of g.vectors.
inline EnclosingBall min_enclosing_ball(const GramFactor& g) {
  if (g.k < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one vector");
  EnclosingBall ball;
  detail::Sphere s;
  if (g.ambient_dim == 0) {
    s.center = Vector::Zero(0);
    s.r2 = 0.0;
    ball.method = "welzl";
  } else if (g.ambient_dim <= kWelzlMaxDim) {
    s = detail::WelzlSolver(g.vectors).solve();
    ball.method = "welzl";
  } else {
    s = detail::frank_wolfe_ball(g.vectors);
    ball.method = "frank-wolfe";
  }
  ball.center = s.center;
  // The radius is measured, so containment holds for every input point.
  double r2 = 0.0;
  for (int i = 0; i < g.k; ++i) r2 = std::max(r2, (g.vector(i) - s.center).squaredNorm());
  ball.radius = std::sqrt(r2);
  support_weights(ball, g);
  return ball;
}

/// R(B)^2 for a PSD matrix B.
inline double radius_squared(const SymMatrix& b) {
  return min_enclosing_ball(gram_factorize(b)).radius_squared();
}

}  // namespace gramclust

#endif  // GRAMCLUST_BALL_HPP_
