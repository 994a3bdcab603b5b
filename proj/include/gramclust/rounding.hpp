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

#ifndef GRAMCLUST_ROUNDING_HPP_
#define GRAMCLUST_ROUNDING_HPP_

// Randomized rounding: project the SDP vectors through a Gaussian matrix into
// the cone space of a conical partition and read off the cell labels.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/conic.hpp"
#include "gramclust/errors.hpp"
#include "gramclust/matrix.hpp"
#include "gramclust/parallel.hpp"
#include "gramclust/rng.hpp"

namespace gramclust {

/// sigma[i] is the (0-based) label of point i.
using Assignment = std::vector<int>;

struct Clustering {
  Assignment sigma;
  double value = 0.0;
  int trial_index = -1;  // -1 - l for the constant assignment to label l
  std::uint64_t seed = 0;
  std::vector<double> trial_values;
};

/// sum_ij a_ij b(sigma_i, sigma_j), via the k x k cluster masses
/// c_pq = sum over S_p x S_q of a_ij.
inline double clustering_value(const SymMatrix& a, const SymMatrix& b, const Assignment& sigma) {
  const int n = a.dim(), k = b.dim();
  if (static_cast<int>(sigma.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch, "assignment length differs from A");
  }
  for (int s : sigma)
    if (s < 0 || s >= k) throw Error(ErrorKind::kLabelOutOfRange, "label " + std::to_string(s));
  Matrix rowmass = Matrix::Zero(n, k);  // rowmass(i, q) = sum_{j in S_q} a_ij
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rowmass(i, sigma[j]) += a(i, j);
  Matrix mass = Matrix::Zero(k, k);
  for (int i = 0; i < n; ++i) mass.row(sigma[i]) += rowmass.row(i);
  return mass.cwiseProduct(b.matrix()).sum();
}

/// One draw: G is (ell - 1) x r with iid N(0, 1) entries keyed by
/// (seed, trial, entry); sigma(i) = classify(G x_i). Only active labels occur.
inline Assignment round_once(const Matrix& x, const ConicalPartition& p, std::uint64_t seed,
                             std::uint64_t trial) {
  const auto n = static_cast<int>(x.rows());
  const auto r = static_cast<int>(x.cols());
  const int d = p.cone_dim();
  Assignment sigma(n, p.active.empty() ? 0 : p.active.front());
  if (d == 0) return sigma;
  const CounterStream rng(seed, mix_stream(0x60D, trial));
  Matrix g(d, r);
  for (int row = 0; row < d; ++row)
    for (int c = 0; c < r; ++c) g(row, c) = rng.gaussian(static_cast<std::uint64_t>(row) * r + c);
  const Matrix projected = x * g.transpose();  // n x d
  for (int i = 0; i < n; ++i) sigma[i] = classify(projected.row(i).transpose(), p);
  return sigma;
}

/// Best of `trials` independent draws and the k constant assignments.
/// Ties keep the earlier trial; every trial value is recorded.
inline Clustering round_best_of(const SymMatrix& a, const SymMatrix& b, const Matrix& x,
                                const ConicalPartition& p, int trials, std::uint64_t seed,
                                int threads = 1) {
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one trial");
  std::vector<Assignment> draws(trials);
  std::vector<double> values(trials);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    draws[t] = round_once(x, p, seed, t);
    values[t] = clustering_value(a, b, draws[t]);
  });
  Clustering best;
  best.seed = seed;
  best.trial_values = values;
  best.trial_index = 0;
  best.sigma = draws[0];
  best.value = values[0];
  for (int t = 1; t < trials; ++t) {
    if (values[t] > best.value) {
      best.value = values[t];
      best.sigma = draws[t];
      best.trial_index = t;
    }
  }
  for (int label = 0; label < b.dim(); ++label) {
    Assignment constant(a.dim(), label);
    const double v = clustering_value(a, b, constant);
    if (v > best.value) {
      best.value = v;
      best.sigma = std::move(constant);
      best.trial_index = -1 - label;
    }
  }
  return best;
}

struct Expectation {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error (n - 1 denominator).
inline Expectation estimate_expectation(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(ErrorKind::kTooFewTrials, "need at least two trials");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace gramclust

#endif  // GRAMCLUST_ROUNDING_HPP_
