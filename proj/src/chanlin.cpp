#include "oso/chanlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace oso {

namespace {

constexpr double kJacobiTolerance = 1e-14;
constexpr int kMaxSweeps = 80;
// Below this fraction of the largest singular value a Jacobi column carries
// no usable direction; its left vector is completed from the standard basis.
constexpr double kNullColumnRatio = 1e-13;

void require_same_length(const CVec& a, const CVec& b, const char* what) {
  if (a.size() != b.size())
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
}

double column_norm_sq(const std::vector<Complex>& col) {
  double s = 0.0;
  for (const auto& z : col) s += std::norm(z);
  return s;
}

// conj(a)^T b
Complex column_dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void rotate(std::vector<Complex>& p, std::vector<Complex>& q, double c, Complex s_phase_conj,
            Complex s_phase) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Complex xp = p[i];
    const Complex xq = q[i];
    p[i] = c * xp - s_phase_conj * xq;
    q[i] = s_phase * xp + c * xq;
  }
}

// Tall or square input only (rows >= cols).
SvdFactors jacobi_tall(const CMat& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  std::vector<std::vector<Complex>> w(n, std::vector<Complex>(m));
  std::vector<std::vector<Complex>> v(n, std::vector<Complex>(n, Complex{}));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < m; ++r) w[c][r] = a(r, c);
    v[c][c] = 1.0;
  }

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = column_norm_sq(w[p]);
        const double beta = column_norm_sq(w[q]);
        const Complex g = column_dot(w[p], w[q]);
        const double g_abs = std::abs(g);
        if (g_abs == 0.0 || g_abs <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
        converged = false;

        const Complex phase = g / g_abs;
        const double zeta = (beta - alpha) / (2.0 * g_abs);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(w[p], w[q], c, s * std::conj(phase), s * phase);
        rotate(v[p], v[q], c, s * std::conj(phase), s * phase);
      }
    }
  }
  if (!converged) throw NumericError("svd_small: Jacobi sweeps did not converge");

  std::vector<double> sigma(n);
  for (std::size_t c = 0; c < n; ++c) sigma[c] = std::sqrt(column_norm_sq(w[c]));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdFactors out;
  out.singular_values.reserve(n);
  out.left_vectors.reserve(n);
  out.right_vectors.reserve(n);
  const double sigma_max = sigma[order.front()];

  for (std::size_t idx : order) {
    const double s = sigma[idx];
    out.singular_values.push_back(s);
    out.right_vectors.emplace_back(v[idx]);

    if (sigma_max > 0.0 && s > kNullColumnRatio * sigma_max) {
      CVec u(m);
      for (std::size_t r = 0; r < m; ++r) u[r] = w[idx][r] / s;
      out.left_vectors.push_back(std::move(u));
      continue;
    }

    // Complete with the standard basis vector that keeps the largest residual.
    CVec best(m);
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m; ++e) {
      CVec cand(m);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : out.left_vectors) {
          const Complex proj = inner(cand, u);
          for (std::size_t r = 0; r < m; ++r) cand[r] -= proj * u[r];
        }
      }
      const double nn = norm_sq(cand);
      if (nn > best_norm) {
        best_norm = nn;
        best = std::move(cand);
      }
    }
    const double scale = 1.0 / std::sqrt(best_norm);
    for (std::size_t r = 0; r < m; ++r) best[r] *= scale;
    out.left_vectors.push_back(std::move(best));
  }
  return out;
}

}  // namespace

CVec::CVec(std::size_t n) : v_(n) {
  if (n == 0) throw DimensionError("CVec: length must be >= 1");
}

CVec::CVec(std::initializer_list<Complex> entries) : v_(entries) {
  if (v_.empty()) throw DimensionError("CVec: length must be >= 1");
}

CVec::CVec(std::vector<Complex> entries) : v_(std::move(entries)) {
  if (v_.empty()) throw DimensionError("CVec: length must be >= 1");
}

bool CVec::is_finite() const noexcept {
  return std::all_of(v_.begin(), v_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

CMat::CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw DimensionError("CMat: dimensions must be >= 1");
}

CMat::CMat(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("CMat: dimensions must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("CMat: ragged row list");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::from_columns(std::span<const CVec> columns) {
  if (columns.empty()) throw DimensionError("CMat::from_columns: no columns");
  CMat m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m.rows()) throw DimensionError("CMat::from_columns: ragged columns");
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = columns[c][r];
  }
  return m;
}

CVec CMat::column(std::size_t c) const {
  CVec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

CMat CMat::adjoint() const {
  CMat out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

bool CMat::is_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Complex inner(const CVec& a, const CVec& b) {
  require_same_length(a, b, "inner");
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

double norm_sq(const CVec& a) noexcept {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return s;
}

CVec operator*(const CMat& m, const CVec& x) {
  if (m.cols() != x.size())
    throw DimensionError("matrix-vector product: " + std::to_string(m.cols()) + " columns vs length " +
                         std::to_string(x.size()));
  CVec y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Complex s{};
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

CMat operator*(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  CMat out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex ark = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

double frobenius_norm(const CMat& m) noexcept {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) s += std::norm(m(r, c));
  return std::sqrt(s);
}

CMat SvdFactors::reconstruct() const {
  CMat out(left_vectors.front().size(), right_vectors.front().size());
  for (std::size_t k = 0; k < singular_values.size(); ++k) {
    const auto& u = left_vectors[k];
    const auto& v = right_vectors[k];
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c)
        out(r, c) += singular_values[k] * u[r] * std::conj(v[c]);
  }
  return out;
}

SvdFactors svd_small(const CMat& m) {
  if (m.rows() > kMaxSvdDim || m.cols() > kMaxSvdDim)
    throw DimensionError("svd_small: matrices larger than 8x8 are not supported");
  if (!m.is_finite()) throw NumericError("svd_small: non-finite matrix entry");

  if (m.rows() >= m.cols()) return jacobi_tall(m);

  // A^H = U S V^H  =>  A = V S U^H
  SvdFactors t = jacobi_tall(m.adjoint());
  std::swap(t.left_vectors, t.right_vectors);
  return t;
}

CMat orthonormalize_columns(const CMat& m) {
  const std::size_t rows = m.rows();
  std::vector<CVec> q;
  q.reserve(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    CVec v = m.column(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& prev : q) {
        const Complex proj = inner(v, prev);
        for (std::size_t r = 0; r < rows; ++r) v[r] -= proj * prev[r];
      }
    }
    const double nn = std::sqrt(norm_sq(v));
    if (!(nn > 0.0)) throw NumericError("orthonormalize_columns: linearly dependent columns");
    for (std::size_t r = 0; r < rows; ++r) v[r] /= nn;
    q.push_back(std::move(v));
  }
  return CMat::from_columns(q);
}

CMat compose_from_spectrum(const CMat& left_unitary, std::span<const double> singular_values,
                           const CMat& right_unitary) {
  const std::size_t rows = left_unitary.rows();
  const std::size_t cols = right_unitary.rows();
  if (singular_values.size() != std::min(rows, cols))
    throw DimensionError("sample_conditioned: expected " + std::to_string(std::min(rows, cols)) +
                         " singular values, got " + std::to_string(singular_values.size()));
  for (double s : singular_values)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw DomainError("sample_conditioned: singular values must be finite and non-negative");

  CMat out(rows, cols);
  for (std::size_t k = 0; k < singular_values.size(); ++k)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out(r, c) += singular_values[k] * left_unitary(r, k) * std::conj(right_unitary(c, k));
  return out;
}

}  // namespace oso
