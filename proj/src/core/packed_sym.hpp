#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace mba {

// Symmetric d x d matrix stored as the packed upper triangle, row major:
// entry (i, j) with i <= j lives at row_offset(i) + (j - i). Only this half is
// ever written, so sigma stays symmetric by construction.
class PackedSymmetric {
 public:
  PackedSymmetric() = default;
  explicit PackedSymmetric(std::size_t d) : d_(d), data_(d * (d + 1) / 2, 0.0) {}

  std::size_t dim() const { return d_; }
  std::size_t packed_size() const { return data_.size(); }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::size_t row_offset(std::size_t i) const { return i * d_ - i * (i - 1) / 2; }

  double at(std::size_t i, std::size_t j) const {
    return i <= j ? data_[row_offset(i) + (j - i)] : data_[row_offset(j) + (i - j)];
  }
  double& upper(std::size_t i, std::size_t j) { return data_[row_offset(i) + (j - i)]; }

  void scale(double factor) {
    for (auto& v : data_) v *= factor;
  }

  // this += weight * other
  void axpy(double weight, const PackedSymmetric& other) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += weight * other.data_[k];
  }

  // this += weight * z z^T for a sparse z given as (indices, values).
  void rank1_update(const std::vector<std::uint32_t>& indices,
                    const std::vector<double>& values, double weight) {
    const std::size_t nnz = indices.size();
    for (std::size_t a = 0; a < nnz; ++a) {
      const std::size_t i = indices[a];
      const double wa = weight * values[a];
      double* row = data_.data() + row_offset(i) - i;
      for (std::size_t b = a; b < nnz; ++b) row[indices[b]] += wa * values[b];
    }
  }

  // y = A x
  void matvec(const double* x, double* y) const {
    for (std::size_t i = 0; i < d_; ++i) y[i] = 0.0;
    const double* p = data_.data();
    for (std::size_t i = 0; i < d_; ++i) {
      const double xi = x[i];
      double acc = *p * xi;  // diagonal
      ++p;
      for (std::size_t j = i + 1; j < d_; ++j, ++p) {
        acc += *p * x[j];
        y[j] += *p * xi;
      }
      y[i] += acc;
    }
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m(d_, d_);
    std::size_t k = 0;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = i; j < d_; ++j, ++k) m(i, j) = m(j, i) = data_[k];
    return m;
  }

  double max_abs() const {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
  }

 private:
  std::size_t d_ = 0;
  std::vector<double> data_;
};

// Spectral norm (largest |eigenvalue|) of a symmetric operator given as a
// matvec callback; plain power iteration from a fixed start vector.
template <typename MatVec>
double spectral_norm_power(std::size_t d, MatVec&& apply, double rel_tol = 1e-9,
                           std::size_t max_iters = 10000) {
  if (d == 0) return 0.0;
  std::vector<double> x(d), y(d);
  // Deterministic, non-degenerate start: varying entries so eigenvectors with
  // structured zeros are still reachable.
  double norm = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    x[i] = 1.0 + 0.5 * static_cast<double>(i % 7) / 7.0;
    norm += x[i] * x[i];
  }
  norm = std::sqrt(norm);
  for (auto& v : x) v /= norm;

  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    apply(x.data(), y.data());
    double ynorm = 0.0;
    for (double v : y) ynorm += v * v;
    ynorm = std::sqrt(ynorm);
    if (ynorm == 0.0) return 0.0;
    const double prev = lambda;
    lambda = ynorm;  // |Rayleigh| limit for symmetric A with unit x
    for (std::size_t i = 0; i < d; ++i) x[i] = y[i] / ynorm;
    if (it > 0 && std::abs(lambda - prev) <= rel_tol * std::max(1e-300, lambda)) break;
  }
  return lambda;
}

inline double spectral_norm(const PackedSymmetric& a, double rel_tol = 1e-9) {
  return spectral_norm_power(
      a.dim(), [&](const double* x, double* y) { a.matvec(x, y); }, rel_tol);
}

// Spectral norm of (a - b) without materializing the difference.
inline double spectral_norm_diff(const PackedSymmetric& a, const PackedSymmetric& b,
                                 double rel_tol = 1e-9) {
  std::vector<double> tmp(a.dim());
  return spectral_norm_power(
      a.dim(),
      [&](const double* x, double* y) {
        a.matvec(x, y);
        b.matvec(x, tmp.data());
        for (std::size_t i = 0; i < a.dim(); ++i) y[i] -= tmp[i];
      },
      rel_tol);
}

}  // namespace mba
