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

#ifndef GRAMCLUST_MATRIX_HPP_
#define GRAMCLUST_MATRIX_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gramclust/errors.hpp"
#include "gramclust/rng.hpp"

namespace gramclust {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative tolerance for Gram reconstruction and numerical rank.
inline constexpr double kGramTol = 1e-8;
/// Relative tolerance for the zero-sum test on A.
inline constexpr double kCenteredTol = 1e-8;
/// Largest asymmetry |m_ij - m_ji| (relative to max |m|) folded away on ingestion.
inline constexpr double kAsymmetryTol = 1e-9;

/// Dense symmetric matrix. Symmetry is exact: every constructor stores
/// (M + M^T) / 2.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "matrix must be square and non-empty, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw Error(ErrorKind::kParseError, "matrix contains NaN or Inf");
    max_asymmetry_ = (m - m.transpose()).cwiseAbs().maxCoeff();
    data_ = 0.5 * (m + m.transpose());
  }

  /// Builds from nested rows, rejecting asymmetry above kAsymmetryTol.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw Error(ErrorKind::kParseError, "empty matrix");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n) {
        throw Error(ErrorKind::kParseError, "row " + std::to_string(i) + " has " +
                                                std::to_string(rows[i].size()) +
                                                " entries, expected " + std::to_string(n));
      }
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    if (!m.allFinite()) throw Error(ErrorKind::kParseError, "matrix contains NaN or Inf");
    SymMatrix out(m);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (out.max_asymmetry_ > kAsymmetryTol * scale) {
      throw Error(ErrorKind::kParseError,
                  "matrix is not symmetric (max |m_ij - m_ji| = " +
                      std::to_string(out.max_asymmetry_) + ")");
    }
    return out;
  }

  static SymMatrix identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }
  static SymMatrix diagonal(const std::vector<double>& d) {
    return SymMatrix(Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()))
                         .asDiagonal()
                         .toDenseMatrix());
  }

  int dim() const { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }
  const Matrix& matrix() const { return data_; }
  /// Largest |m_ij - m_ji| seen before symmetrization.
  double max_asymmetry() const { return max_asymmetry_; }
  bool was_symmetrized() const { return max_asymmetry_ > 0.0; }

  SymMatrix scaled(double t) const { return SymMatrix(t * data_); }

  /// P M P^T for the permutation sending label i to perm[i].
  SymMatrix permuted(const std::vector<int>& perm) const {
    const int n = dim();
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(perm[i], perm[j]) = data_(i, j);
    return SymMatrix(out);
  }

  /// Sum of |m_ij| over all entries (the entrywise 1-norm).
  double entry_l1() const { return data_.cwiseAbs().sum(); }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out(dim(), std::vector<double>(dim()));
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) out[i][j] = data_(i, j);
    return out;
  }

 private:
  Matrix data_;
  double max_asymmetry_ = 0.0;
};

inline Vector eigenvalues(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// True iff lambda_min(M) >= -tol * max(1, ||M||_2).
inline bool validate_psd(const SymMatrix& m, double tol = kGramTol) {
  const Vector ev = eigenvalues(m);
  const double spectral = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  return ev.minCoeff() >= -tol * std::max(1.0, spectral);
}

/// True iff |sum_ij M_ij| <= tol * (1 + sum_ij |M_ij|).
inline bool validate_centered(const SymMatrix& m, double tol = kCenteredTol) {
  return std::abs(m.matrix().sum()) <= tol * (1.0 + m.entry_l1());
}

/// Vectors v_1..v_k (rows of `vectors`) whose Gram matrix reproduces B.
/// Only inner products are meaningful; coordinates carry an arbitrary
/// orthogonal freedom.
struct GramFactor {
  int k = 0;
  int ambient_dim = 0;
  Matrix vectors;  // k x ambient_dim

  Vector vector(int i) const { return vectors.row(i).transpose(); }

  Matrix gram() const { return vectors * vectors.transpose(); }

  /// Vectors zero-padded to length `dim` (dim >= ambient_dim).
  Matrix padded(int dim) const {
    Matrix out = Matrix::Zero(k, std::max(dim, ambient_dim));
    out.leftCols(ambient_dim) = vectors;
    return out;
  }
};

/// Gram factorization by symmetric eigendecomposition; eigenvalues in
/// [-tol*lambda_max, 0] are clamped to zero, so rank-deficient B is fine.
inline GramFactor gram_factorize(const SymMatrix& b, double tol = kGramTol) {
  if (!validate_psd(b, tol)) {
    throw Error(ErrorKind::kNotPSD, "Gram factorization needs a positive semidefinite matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(b.matrix());
  const Vector& ev = solver.eigenvalues();  // ascending
  const double top = std::max(ev.maxCoeff(), 0.0);
  std::vector<int> kept;
  for (int i = static_cast<int>(ev.size()) - 1; i >= 0; --i) {
    if (ev(i) > tol * top && ev(i) > 0.0) kept.push_back(i);
  }
  GramFactor out;
  out.k = b.dim();
  out.ambient_dim = static_cast<int>(kept.size());
  out.vectors.resize(b.dim(), out.ambient_dim);
  for (int c = 0; c < out.ambient_dim; ++c) {
    out.vectors.col(c) = solver.eigenvectors().col(kept[c]) * std::sqrt(ev(kept[c]));
  }
  return out;
}

/// A = U U^T for n Gaussian vectors u_i in R^n translated so sum u_i = 0.
inline SymMatrix random_centered_psd(int n, std::uint64_t seed, std::uint64_t stream = 0) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "random_centered_psd needs n >= 2");
  const CounterStream rng(seed, mix_stream(0xA11CE, stream));
  Matrix u(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u(i, j) = rng.gaussian(static_cast<std::uint64_t>(i) * n + j);
  u.rowwise() -= u.colwise().mean();
  return SymMatrix(u * u.transpose());
}

/// Gram matrix of k Gaussian vectors in R^dim (a generic PSD test matrix).
inline SymMatrix random_psd(int k, int dim, std::uint64_t seed, std::uint64_t stream = 0) {
  const CounterStream rng(seed, mix_stream(0xB0B, stream));
  Matrix v(k, dim);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < dim; ++j) v(i, j) = rng.gaussian(static_cast<std::uint64_t>(i) * dim + j);
  return SymMatrix(v * v.transpose());
}

/// FNV-1a over the stored entries; stable identifier for caching and reports.
inline std::uint64_t content_hash(const SymMatrix& m, std::uint64_t h = 0xCBF29CE484222325ull) {
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ull;
    }
  };
  const std::int64_t n = m.dim();
  mix(&n, sizeof(n));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      const double x = m(i, j) == 0.0 ? 0.0 : m(i, j);  // fold -0.0
      mix(&x, sizeof(x));
    }
  return h;
}

}  // namespace gramclust

#endif  // GRAMCLUST_MATRIX_HPP_
