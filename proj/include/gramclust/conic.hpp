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

#ifndef GRAMCLUST_CONIC_HPP_
#define GRAMCLUST_CONIC_HPP_

// Simplicial conical partitions of R^(l-1), their Gaussian moments, the
// quadratic objective psi, and the search for the rounding constant C(B).
//
// A partition is given by l distinct direction vectors w_j; cell j is the set
// where <x, w_j> is maximal. Moments are exact for l <= 3 (half-lines and
// planar sectors) and Monte Carlo over an antithetic Gaussian cloud above.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/ball.hpp"
#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/parallel.hpp"
#include "gramclust/rng.hpp"

namespace gramclust {

/// Cells with less Gaussian mass than this are treated as empty.
inline constexpr double kEmptyCellMass = 1e-6;

struct ConicalPartition {
  int k = 0;                // total label count
  std::vector<int> active;  // labels with a cell, in cell order
  Matrix directions;        // ell x (ell - 1)

  int ell() const { return static_cast<int>(active.size()); }
  int cone_dim() const { return std::max(ell() - 1, 0); }
};

struct PartitionValue {
  std::vector<Vector> moments;  // z_j per active cell, length ell - 1
  Vector masses;                // Gaussian mass per active cell
  double psi = 0.0;
  double mc_stderr = 0.0;   // worst per-cell standard error of z_j (norm scale)
  double psi_stderr = 0.0;  // delta-method standard error of psi
  bool exact = true;
};

/// Position (within P.active) of the cell containing x; ties go to the
/// smallest position. Only the first ell - 1 coordinates of x are read.
inline int classify_index(const Eigen::Ref<const Vector>& x, const ConicalPartition& p) {
  const int ell = p.ell();
  const int d = p.cone_dim();
  if (ell <= 1 || d == 0) return 0;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < ell; ++j) {
    const double s = p.directions.row(j).dot(x.head(d));
    if (s > best_score) {
      best_score = s;
      best = j;
    }
  }
  return best;
}

/// Label of the cell containing x.
inline int classify(const Eigen::Ref<const Vector>& x, const ConicalPartition& p) {
  return p.active[classify_index(x, p)];
}

/// Gaussian moment of the planar sector of opening alpha about `bisector`:
/// magnitude sin(alpha/2) / sqrt(2 pi).
inline Eigen::Vector2d cone_moment_closed_2d(double alpha, const Eigen::Vector2d& bisector) {
  if (alpha < 0.0 || alpha > 2.0 * std::numbers::pi) {
    throw Error(ErrorKind::kInvalidArgument, "sector opening must lie in [0, 2 pi]");
  }
  return std::sin(0.5 * alpha) / std::sqrt(2.0 * std::numbers::pi) * bisector.normalized();
}

/// sum_{a,b} B(J_a, J_b) <z_a, z_b>.
inline double psi_value(const SymMatrix& b, const std::vector<int>& active,
                        const std::vector<Vector>& moments) {
  if (active.size() != moments.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "one moment vector per active label is required");
  }
  for (const auto& z : moments) {
    if (z.size() != moments.front().size()) {
      throw Error(ErrorKind::kDimensionMismatch, "moment vectors differ in length");
    }
  }
  double total = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a)
    for (std::size_t c = 0; c < active.size(); ++c)
      total += b(active[a], active[c]) * moments[a].dot(moments[c]);
  return total;
}

/// w_a = sum_c B(J_a, J_c) z_c, one row per active label.
inline Matrix directions_from_moments(const SymMatrix& b, const std::vector<int>& active,
                                      const std::vector<Vector>& moments) {
  const auto ell = static_cast<int>(active.size());
  const auto d = ell > 0 ? moments.front().size() : 0;
  Matrix w = Matrix::Zero(ell, d);
  for (int a = 0; a < ell; ++a)
    for (int c = 0; c < ell; ++c) w.row(a) += b(active[a], active[c]) * moments[c].transpose();
  return w;
}

/// Builds the three-cell planar partition whose boundary rays sit at the given
/// angles (counterclockwise; cell j spans [rays[j], rays[j+1]]). Each sector
/// must be narrower than pi.
inline ConicalPartition partition_from_rays(int k, const std::vector<int>& labels,
                                            const std::array<double, 3>& rays) {
  auto normal = [](double theta) {
    return Eigen::Vector2d(std::cos(theta + 0.5 * std::numbers::pi),
                           std::sin(theta + 0.5 * std::numbers::pi));
  };
  // Crossing ray r from cell r-1 into cell r raises <x, w_r - w_(r-1)>; the
  // steps t_r * n_r must close up around the origin.
  const Eigen::Vector2d n0 = normal(rays[0]), n1 = normal(rays[1]), n2 = normal(rays[2]);
  Eigen::Matrix2d m;
  m.col(0) = n1;
  m.col(1) = n2;
  const Eigen::Vector2d t = m.fullPivLu().solve(-n0);
  if (!(t.array() > 0.0).all()) {
    throw Error(ErrorKind::kInvalidArgument, "sectors must each be narrower than pi");
  }
  ConicalPartition p;
  p.k = k;
  p.active = labels;
  p.directions.resize(3, 2);
  // Cell 0 is entered across ray 0, cell 1 across ray 1, cell 2 across ray 2.
  const Eigen::Vector2d w0 = Eigen::Vector2d::Zero();
  const Eigen::Vector2d w1 = w0 + t(0) * n1;
  const Eigen::Vector2d w2 = w1 + t(1) * n2;
  p.directions.row(0) = w0.transpose();
  p.directions.row(1) = w1.transpose();
  p.directions.row(2) = w2.transpose();
  return p;
}

namespace detail {

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

/// Exact moments of a max-linear partition of the plane: the cell label is
/// constant between consecutive breakpoints of the pairwise comparisons.
inline void planar_moments(const Matrix& w, std::vector<Vector>& z, Vector& mass) {
  const auto ell = static_cast<int>(w.rows());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double radial = 1.0 / (2.0 * std::sqrt(two_pi));
  std::vector<double> cuts{0.0, two_pi};
  for (int i = 0; i < ell; ++i)
    for (int j = i + 1; j < ell; ++j) {
      const Eigen::Vector2d d = (w.row(i) - w.row(j)).transpose();
      if (d.squaredNorm() == 0.0) continue;
      const double phi = std::atan2(d(1), d(0));
      cuts.push_back(wrap_angle(phi + 0.5 * std::numbers::pi));
      cuts.push_back(wrap_angle(phi - 0.5 * std::numbers::pi));
    }
  std::sort(cuts.begin(), cuts.end());
  z.assign(ell, Vector::Zero(2));
  mass = Vector::Zero(ell);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    if (b - a <= 0.0) continue;
    const double mid = 0.5 * (a + b);
    const Eigen::Vector2d u(std::cos(mid), std::sin(mid));
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < ell; ++j) {
      const double s = w.row(j).dot(u);
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    z[best](0) += radial * (std::sin(b) - std::sin(a));
    z[best](1) += radial * (std::cos(a) - std::cos(b));
    mass(best) += (b - a) / two_pi;
  }
}

}  // namespace detail

/// Exact moments for partitions with at most three cells.
inline PartitionValue partition_moments_exact(const SymMatrix& b, const ConicalPartition& p) {
  PartitionValue out;
  const int ell = p.ell();
  if (ell > 3) throw Error(ErrorKind::kInvalidArgument, "exact moments need at most 3 cells");
  if (ell == 1) {
    out.moments = {Vector::Zero(0)};
    out.masses = Vector::Ones(1);
  } else if (ell == 2) {
    const double half = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double w0 = p.directions(0, 0), w1 = p.directions(1, 0);
    out.moments = {Vector::Zero(1), Vector::Zero(1)};
    out.masses = Vector::Zero(2);
    if (w0 == w1) {
      out.masses(0) = 1.0;
    } else {
      const int pos = w0 > w1 ? 0 : 1;  // owner of the positive half-line
      out.moments[pos](0) = half;
      out.moments[1 - pos](0) = -half;
      out.masses.setConstant(0.5);
    }
  } else {
    detail::planar_moments(p.directions, out.moments, out.masses);
  }
  out.psi = psi_value(b, p.active, out.moments);
  out.exact = true;
  return out;
}

/// A fixed set of Gaussian points in R^dim stored as antithetic pairs
/// (x, -x), so the empirical mean is exactly zero.
class GaussianCloud {
 public:
  GaussianCloud(int dim, std::size_t samples, std::uint64_t seed, std::uint64_t stream = 0)
      : dim_(dim) {
    const std::size_t pairs = std::max<std::size_t>(samples / 2, 1);
    const CounterStream rng(seed, mix_stream(0xC10D + static_cast<std::uint64_t>(dim), stream));
    base_.resize(static_cast<Eigen::Index>(pairs), dim);
    for (std::size_t i = 0; i < pairs; ++i)
      for (int c = 0; c < dim; ++c)
        base_(static_cast<Eigen::Index>(i), c) = rng.gaussian(i * static_cast<std::uint64_t>(dim) + c);
  }

  int dim() const { return dim_; }
  std::size_t pairs() const { return static_cast<std::size_t>(base_.rows()); }
  const Matrix& base() const { return base_; }

 private:
  int dim_;
  Matrix base_;
};

/// Monte Carlo moments of P over `cloud` (dimension ell - 1).
inline PartitionValue partition_moments_cloud(const SymMatrix& b, const ConicalPartition& p,
                                              const GaussianCloud& cloud) {
  const int ell = p.ell();
  const int d = p.cone_dim();
  PartitionValue out;
  out.exact = false;
  if (ell <= 1 || d == 0) {
    out.moments.assign(std::max(ell, 1), Vector::Zero(d));
    out.masses = Vector::Ones(std::max(ell, 1));
    out.psi = 0.0;
    return out;
  }
  if (cloud.dim() != d) throw Error(ErrorKind::kDimensionMismatch, "cloud dimension mismatch");
  const Matrix& x = cloud.base();
  const auto pairs = static_cast<Eigen::Index>(cloud.pairs());
  const Matrix scores = x * p.directions.transpose();  // pairs x ell

  // Per pair and cell: y = (x 1[x in cell] - x 1[-x in cell]) / 2.
  std::vector<int> plus(pairs), minus(pairs);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    int hi = 0, lo = 0;
    for (int j = 1; j < ell; ++j) {
      if (scores(i, j) > scores(i, hi)) hi = j;
      if (-scores(i, j) > -scores(i, lo)) lo = j;
    }
    plus[i] = hi;
    minus[i] = lo;
  }
  Matrix sum = Matrix::Zero(ell, d), sumsq = Matrix::Zero(ell, d);
  Vector count = Vector::Zero(ell);
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const int a = plus[i], c = minus[i];
    count(a) += 0.5;
    count(c) += 0.5;
    if (a == c) continue;  // contributions cancel
    const auto row = x.row(i);
    sum.row(a) += 0.5 * row;
    sum.row(c) -= 0.5 * row;
    sumsq.row(a) += 0.25 * row.cwiseAbs2();
    sumsq.row(c) += 0.25 * row.cwiseAbs2();
  }
  const double np = static_cast<double>(pairs);
  out.moments.resize(ell);
  out.masses = count / np;
  for (int j = 0; j < ell; ++j) out.moments[j] = (sum.row(j) / np).transpose();
  out.psi = psi_value(b, p.active, out.moments);

  double worst = 0.0;
  for (int j = 0; j < ell; ++j) {
    double var = 0.0;
    for (int c = 0; c < d; ++c) {
      const double mean = sum(j, c) / np;
      var += std::max(sumsq(j, c) / np - mean * mean, 0.0) / np;
    }
    worst = std::max(worst, std::sqrt(var));
  }
  out.mc_stderr = worst;

  // Linearization of psi: d psi = 2 sum_j <w_j, dz_j>, with w = B z.
  const Matrix w = directions_from_moments(b, p.active, out.moments);
  double lsum = 0.0, lsumsq = 0.0;
  for (Eigen::Index i = 0; i < pairs; ++i) {
    const int a = plus[i], c = minus[i];
    double l = 0.0;
    if (a != c) l = (w.row(a) - w.row(c)).dot(x.row(i));  // 2 * (1/2) * (...)
    lsum += l;
    lsumsq += l * l;
  }
  const double lmean = lsum / np;
  out.psi_stderr = std::sqrt(std::max(lsumsq / np - lmean * lmean, 0.0) / np);
  return out;
}

/// Monte Carlo moments with `samples` Gaussian points (antithetic pairs).
inline PartitionValue partition_moments_mc(const SymMatrix& b, const ConicalPartition& p,
                                           std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw Error(ErrorKind::kInvalidArgument, "need at least 1000 samples");
  return partition_moments_cloud(b, p, GaussianCloud(p.cone_dim(), samples, seed));
}

/// Closed-form constants for B_c = diag(1, 1, c).
struct FormulaBc {
  double r2 = 0.0;
  double c_of_b = 0.0;
  double ratio = 0.0;
};

inline FormulaBc formula_bc(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::kInvalidArgument, "c must be positive");
  FormulaBc f;
  f.r2 = (1.0 + c) * (1.0 + c) / (2.0 + 4.0 * c);
  f.c_of_b = c >= 0.5 ? (2.0 * c + 1.0) * (2.0 * c + 1.0) / (8.0 * std::numbers::pi * c)
                      : 1.0 / std::numbers::pi;
  f.ratio = f.r2 / f.c_of_b;
  return f;
}

struct SearchConfig {
  double epsilon = 0.0;             // <= 0 selects 1e-3 * R(B)^2
  double net_delta_override = 0.0;  // > 0 replaces the derived net spacing
  std::size_t mc_samples = 200000;  // final evaluation for partitions with >= 4 cells
  std::size_t search_samples = 40000;  // cloud used while iterating (>= 4 cells)
  double fp_tol = 1e-6;
  int max_iters = 200;
  std::uint64_t seed = 1;
  int max_net_points = 24;  // multistart seeds per active set
  int angle_grid = 120;     // per-axis grid for the planar ray search
  int threads = 1;
};

struct SearchResult {
  double c_estimate = 0.0;
  ConicalPartition best;
  PartitionValue value;
  double r2 = 0.0;
  double epsilon = 0.0;
  double net_delta = 0.0;
  double log10_net_points_required = 0.0;
  bool net_exhaustive = false;
  bool heuristic = false;  // k > 4: value is a lower bound on C(B) only
  double fp_residual = 0.0;
  int candidates = 0;
};

/// Evaluates moments exactly (<= 3 cells) or on shared Gaussian clouds.
class MomentEngine {
 public:
  MomentEngine(const SymMatrix& b, std::size_t samples, std::uint64_t seed, std::uint64_t stream)
      : b_(b), samples_(samples), seed_(seed), stream_(stream) {}

  PartitionValue operator()(const ConicalPartition& p) {
    if (p.ell() <= 3) return partition_moments_exact(b_, p);
    return partition_moments_cloud(b_, p, cloud(p.cone_dim()));
  }

  const GaussianCloud& cloud(int dim) {
    auto it = clouds_.find(dim);
    if (it == clouds_.end()) {
      it = clouds_.emplace(dim, std::make_shared<GaussianCloud>(dim, samples_, seed_, stream_)).first;
    }
    return *it->second;
  }

 private:
  const SymMatrix& b_;
  std::size_t samples_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::map<int, std::shared_ptr<GaussianCloud>> clouds_;
};

/// Re-expresses P on its active cells of positive mass, in R^(l'-1).
/// The comparisons only see differences of directions, so projecting onto
/// their span leaves the partition unchanged up to a Gaussian-preserving
/// change of coordinates.
inline ConicalPartition drop_empty_cells(const ConicalPartition& p, const Vector& masses) {
  std::vector<int> keep;
  for (int j = 0; j < p.ell(); ++j)
    if (masses(j) >= kEmptyCellMass) keep.push_back(j);
  if (static_cast<int>(keep.size()) == p.ell()) return p;
  ConicalPartition out;
  out.k = p.k;
  const auto ell = static_cast<int>(keep.size());
  for (int j : keep) out.active.push_back(p.active[j]);
  if (ell <= 1) {
    out.directions = Matrix::Zero(ell, 0);
    return out;
  }
  Matrix w(ell, p.cone_dim());
  for (int a = 0; a < ell; ++a) w.row(a) = p.directions.row(keep[a]);
  Matrix diffs(p.cone_dim(), ell - 1);
  for (int a = 1; a < ell; ++a) diffs.col(a - 1) = (w.row(a) - w.row(0)).transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(diffs);
  const Matrix q = qr.householderQ() * Matrix::Identity(p.cone_dim(), ell - 1);
  out.directions = w * q;  // ell x (ell - 1); a rank-deficient tail is harmless
  return out;
}

namespace detail {

struct Candidate {
  ConicalPartition partition;
  PartitionValue value;
  double fp_residual = 0.0;
  bool valid = false;
};

/// z <- moments(P(B z)) until the moments settle. Psi never decreases on a
/// fixed measure (the new partition maximizes the linearization of the convex
/// objective), but the iteration is only a heuristic for reaching C(B).
inline Candidate fixed_point(const SymMatrix& b, ConicalPartition p, MomentEngine& engine,
                             const SearchConfig& cfg) {
  Candidate best;
  PartitionValue v = engine(p);
  best.partition = p;
  best.value = v;
  best.valid = true;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    ConicalPartition next = p;
    next.directions = directions_from_moments(b, p.active, v.moments);
    PartitionValue nv = engine(next);
    double delta = 0.0;
    for (std::size_t j = 0; j < nv.moments.size(); ++j)
      delta = std::max(delta, (nv.moments[j] - v.moments[j]).norm());
    p = std::move(next);
    v = std::move(nv);
    if (v.psi >= best.value.psi) {
      best.partition = p;
      best.value = v;
      best.fp_residual = delta;
    }
    if (delta < cfg.fp_tol) break;
  }
  return best;
}

/// Psi for the three planar sectors [0, t2], [t2, t3], [t3, 2 pi] and its
/// gradient in (t2, t3).
inline double sector_psi(const Eigen::Matrix3d& bj, double t2, double t3, Eigen::Vector2d* grad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double radial = 1.0 / (2.0 * std::sqrt(two_pi));
  const std::array<double, 4> r{0.0, t2, t3, two_pi};
  std::array<Eigen::Vector2d, 3> z;
  for (int j = 0; j < 3; ++j) {
    z[j] = radial * Eigen::Vector2d(std::sin(r[j + 1]) - std::sin(r[j]),
                                    std::cos(r[j]) - std::cos(r[j + 1]));
  }
  double psi = 0.0;
  std::array<Eigen::Vector2d, 3> w;
  for (int a = 0; a < 3; ++a) {
    w[a].setZero();
    for (int c = 0; c < 3; ++c) w[a] += bj(a, c) * z[c];
    psi += z[a].dot(w[a]);
  }
  if (grad) {
    // Moving ray r shifts mass between the cell ending at r and the one
    // starting at r.
    const Eigen::Vector2d u2(std::cos(t2), std::sin(t2)), u3(std::cos(t3), std::sin(t3));
    (*grad)(0) = 2.0 * radial * (w[0] - w[1]).dot(u2);
    (*grad)(1) = 2.0 * radial * (w[1] - w[2]).dot(u3);
  }
  return psi;
}

/// Best planar three-sector partition for labels J: grid over the two free
/// rays, then projected gradient ascent with backtracking.
inline std::optional<std::vector<Vector>> planar_ray_search(const SymMatrix& b,
                                                            const std::vector<int>& j3, int grid) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Eigen::Matrix3d bj;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) bj(a, c) = b(j3[a], j3[c]);
  double best = -1.0, t2 = 0.0, t3 = 0.0;
  for (int i = 0; i <= grid; ++i)
    for (int j = i; j <= grid; ++j) {
      const double a = two_pi * i / grid, c = two_pi * j / grid;
      const double v = sector_psi(bj, a, c, nullptr);
      if (v > best) {
        best = v;
        t2 = a;
        t3 = c;
      }
    }
  auto clamp = [two_pi](double a, double c) {
    a = std::clamp(a, 0.0, two_pi);
    c = std::clamp(c, a, two_pi);
    return std::pair{a, c};
  };
  double step = two_pi / grid;
  Eigen::Vector2d g;
  double val = sector_psi(bj, t2, t3, &g);
  for (int iter = 0; iter < 5000 && step > 1e-16; ++iter) {
    if (g.norm() < 1e-14) break;
    const Eigen::Vector2d dir = g.normalized();
    auto [a, c] = clamp(t2 + step * dir(0), t3 + step * dir(1));
    Eigen::Vector2d ng;
    const double nv = sector_psi(bj, a, c, &ng);
    if (nv > val) {
      t2 = a;
      t3 = c;
      val = nv;
      g = ng;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  const double widths[3] = {t2, t3 - t2, two_pi - t3};
  for (double wdt : widths)
    if (wdt / two_pi < kEmptyCellMass) return std::nullopt;  // a two-cell optimum
  const double radial = 1.0 / (2.0 * std::sqrt(two_pi));
  const std::array<double, 4> r{0.0, t2, t3, two_pi};
  std::vector<Vector> z(3, Vector::Zero(2));
  for (int j = 0; j < 3; ++j) {
    z[j](0) = radial * (std::sin(r[j + 1]) - std::sin(r[j]));
    z[j](1) = radial * (std::cos(r[j]) - std::cos(r[j + 1]));
  }
  return z;
}

inline std::vector<std::vector<int>> subsets_of_size(int k, int ell) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == ell) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < k; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

/// Searches for the conical partition maximizing psi, i.e. estimates C(B).
///
/// Every active set J is tried: two cells in closed form, three cells by an
/// exact planar ray search, and every J with three or more cells by
/// fixed-point iteration from a deterministic family of seeds in the ball of
/// radius sqrt(|J|). Candidates are compared by measured psi alone; ties keep
/// the partition with fewer cells. For k > 4 only the full label set is
/// iterated beyond three cells and the result is flagged heuristic.
inline SearchResult search_cb(const SymMatrix& b, const SearchConfig& cfg = {}) {
  const int k = b.dim();
  if (k < 2) throw Error(ErrorKind::kDegenerateB, "need at least two labels");
  const GramFactor g = gram_factorize(b);
  const EnclosingBall ball = min_enclosing_ball(g);
  SearchResult result;
  result.r2 = ball.radius_squared();
  const double scale = std::max(b.matrix().diagonal().maxCoeff(), 0.0);
  if (result.r2 <= kGramTol * std::max(scale, 1e-300) || scale == 0.0) {
    throw Error(ErrorKind::kDegenerateB,
                "all Gram vectors coincide; every clustering of a centered matrix scores 0");
  }
  result.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-3 * result.r2;
  result.net_delta = cfg.net_delta_override > 0.0
                         ? cfg.net_delta_override
                         : result.epsilon / (8.0 * std::sqrt(static_cast<double>(k)) * b.entry_l1());
  result.heuristic = k > 4;

  struct Job {
    std::vector<int> active;
    int kind;  // 0: pair closed form, 1: planar ray search, 2: fixed point from seed
    int seed_index;
  };
  std::vector<Job> jobs;
  bool exhaustive = true;
  for (int ell = 2; ell <= k; ++ell) {
    if (ell > 3 && k > 4 && ell != k) continue;
    const double log10_required =
        ell * (ell - 1) * std::log10(3.0 * std::sqrt(static_cast<double>(ell)) / result.net_delta);
    result.log10_net_points_required = std::max(result.log10_net_points_required, log10_required);
    for (auto& subset : detail::subsets_of_size(k, ell)) {
      if (ell == 2) {
        jobs.push_back({subset, 0, 0});
        continue;
      }
      if (ell == 3) jobs.push_back({subset, 1, 0});
      const double required = std::pow(10.0, std::min(log10_required, 300.0));
      const int seeds = static_cast<int>(std::min<double>(required, cfg.max_net_points));
      if (required > cfg.max_net_points) exhaustive = false;
      for (int s = 0; s < seeds; ++s) jobs.push_back({subset, 2, s});
    }
  }
  result.net_exhaustive = exhaustive;

  std::vector<detail::Candidate> slots(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t idx) {
    const Job& job = jobs[idx];
    const int ell = static_cast<int>(job.active.size());
    MomentEngine engine(b, cfg.search_samples, cfg.seed, 1);
    ConicalPartition p;
    p.k = k;
    p.active = job.active;
    if (job.kind == 0) {
      p.directions = Matrix(2, 1);
      p.directions << 1.0, -1.0;
      detail::Candidate c;
      c.partition = p;
      c.value = engine(p);
      c.valid = true;
      slots[idx] = std::move(c);
      return;
    }
    std::vector<Vector> z;
    if (job.kind == 1) {
      auto found = detail::planar_ray_search(b, job.active, cfg.angle_grid);
      if (!found) return;
      z = std::move(*found);
    } else {
      // Seeds: the first is a centered regular simplex, the rest are
      // deterministic pseudo-random points of the radius-sqrt(ell) ball.
      const int d = ell - 1;
      const CounterStream rng(cfg.seed, mix_stream(0x5EED, mix_stream(idx, job.seed_index)));
      z.assign(ell, Vector::Zero(d));
      if (job.seed_index == 0) {
        const Matrix centered = Matrix::Identity(ell, ell).rowwise() -
                                Vector::Constant(ell, 1.0 / ell).transpose();
        Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
        for (int a = 0; a < ell; ++a) z[a] = (centered.row(a) * svd.matrixV().leftCols(d)).transpose();
      } else {
        std::uint64_t counter = 0;
        for (int a = 0; a < ell; ++a) {
          for (int c = 0; c < d; ++c) z[a](c) = rng.gaussian(counter++);
          const double radius = std::sqrt(static_cast<double>(ell)) *
                                std::pow(rng.uniform(counter++), 1.0 / d);
          if (z[a].norm() > 0.0) z[a] *= radius / z[a].norm();
        }
      }
    }
    p.directions = directions_from_moments(b, p.active, z);
    if (p.directions.rowwise().squaredNorm().maxCoeff() == 0.0) return;
    slots[idx] = detail::fixed_point(b, p, engine, cfg);
  });
  result.candidates = static_cast<int>(jobs.size());

  int best = -1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].valid) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const double cur = slots[best].value.psi;
    const double cand = slots[i].value.psi;
    const bool fewer = slots[i].partition.ell() < slots[best].partition.ell();
    if (cand > cur + 1e-12 * std::abs(cur) || (fewer && cand >= cur - 1e-12 * std::abs(cur))) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw Error(ErrorKind::kInfeasible, "no candidate partition was produced");

  // Polish the winner: drop empty cells, then iterate on the evaluation
  // measure (exact for <= 3 cells, the full-size cloud otherwise).
  detail::Candidate win = slots[best];
  SearchConfig polish = cfg;
  MomentEngine fine(b, cfg.mc_samples, cfg.seed, 2);
  // Exact moments cost microseconds, so iterate well past the usual cap.
  const int exact_iters = 20 * cfg.max_iters;
  for (int round = 0; round < 3; ++round) {
    ConicalPartition reduced = drop_empty_cells(win.partition, win.value.masses);
    if (reduced.ell() < 2) break;
    polish.max_iters = reduced.ell() <= 3 ? exact_iters : cfg.max_iters;
    detail::Candidate next = detail::fixed_point(b, reduced, fine, polish);
    const bool shrunk = reduced.ell() < win.partition.ell();
    win = std::move(next);
    if (!shrunk) break;
  }

  // Report moments measured on an independent cloud so psi is not biased by
  // the selection; the fixed-point residual is measured on the same cloud.
  MomentEngine report(b, cfg.mc_samples, cfg.seed, 3);
  PartitionValue value = report(win.partition);
  ConicalPartition step = win.partition;
  step.directions = directions_from_moments(b, step.active, value.moments);
  const PartitionValue next = report(step);
  double residual = 0.0;
  for (std::size_t j = 0; j < value.moments.size(); ++j)
    residual = std::max(residual, (next.moments[j] - value.moments[j]).norm());

  result.best = win.partition;
  result.value = value;
  result.c_estimate = value.psi;
  result.fp_residual = residual;
  return result;
}

}  // namespace gramclust

#endif  // GRAMCLUST_CONIC_HPP_
