#pragma once

// Small dense complex linear algebra and channel samplers.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "oso/error.hpp"
#include "oso/random.hpp"

namespace oso {

using Complex = std::complex<double>;

/// Complex column vector, length >= 1.
class CVec {
 public:
  explicit CVec(std::size_t n);
  CVec(std::initializer_list<Complex> entries);
  explicit CVec(std::vector<Complex> entries);

  std::size_t size() const noexcept { return v_.size(); }
  Complex& operator[](std::size_t i) noexcept { return v_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return v_[i]; }

  std::span<Complex> entries() noexcept { return v_; }
  std::span<const Complex> entries() const noexcept { return v_; }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  bool is_finite() const noexcept;

  friend bool operator==(const CVec&, const CVec&) = default;

 private:
  std::vector<Complex> v_;
};

/// Row-major complex matrix, rows >= 1 and cols >= 1.
class CMat {
 public:
  CMat(std::size_t rows, std::size_t cols);
  /// Rows given as nested lists; all rows must have equal length.
  CMat(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMat identity(std::size_t n);
  /// Matrix whose columns are the given vectors.
  static CMat from_columns(std::span<const CVec> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  CVec column(std::size_t c) const;
  CMat adjoint() const;
  bool is_finite() const noexcept;

  friend bool operator==(const CMat&, const CMat&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

/// <a, b> = sum_i a(i) conj(b(i)).
Complex inner(const CVec& a, const CVec& b);
double norm_sq(const CVec& a) noexcept;

CVec operator*(const CMat& m, const CVec& x);
CMat operator*(const CMat& a, const CMat& b);
double frobenius_norm(const CMat& m) noexcept;

/// Thin SVD: k = min(rows, cols) triples, singular values descending.
struct SvdFactors {
  std::vector<CVec> left_vectors;
  std::vector<double> singular_values;
  std::vector<CVec> right_vectors;

  /// sum_k sigma_k u_k v_k^H
  CMat reconstruct() const;
};

inline constexpr std::size_t kMaxSvdDim = 8;

/// One-sided Jacobi SVD for matrices up to 8x8. Deterministic; equal singular
/// values keep the column order of the input.
/// Throws NumericError on non-finite entries, DimensionError above 8x8.
SvdFactors svd_small(const CMat& m);

/// Columns orthonormalized by two-pass modified Gram-Schmidt. With positive
/// R diagonal this is the phase-normalized Q of a QR decomposition.
CMat orthonormalize_columns(const CMat& m);

template <Uniform64 G>
CMat sample_rayleigh(std::size_t rows, std::size_t cols, G& gen) {
  CMat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_normal(gen);
  return m;
}

template <Uniform64 G>
CVec sample_rayleigh_vec(std::size_t n, G& gen) {
  CVec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = complex_normal(gen);
  return v;
}

/// Haar-distributed n x n unitary.
template <Uniform64 G>
CMat haar_unitary(std::size_t n, G& gen) {
  return orthonormalize_columns(sample_rayleigh(n, n, gen));
}

/// U diag(s) V^H from the given spectrum; singular vectors are Haar-random.
/// Throws DomainError for negative values, DimensionError if the spectrum
/// length differs from min(rows, cols).
CMat compose_from_spectrum(const CMat& left_unitary, std::span<const double> singular_values,
                           const CMat& right_unitary);

template <Uniform64 G>
CMat sample_conditioned(std::size_t rows, std::size_t cols, std::span<const double> singular_values,
                        G& gen) {
  const CMat u = haar_unitary(rows, gen);
  const CMat v = haar_unitary(cols, gen);
  return compose_from_spectrum(u, singular_values, v);
}

}  // namespace oso
