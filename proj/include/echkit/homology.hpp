#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "echkit/errors.hpp"
#include "echkit/real_scalar.hpp"

namespace echkit {

using IntVector = std::vector<BigInt>;

/// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<IntVector>& rows, std::size_t cols) {
    IntMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw DimensionError("row " + std::to_string(i) + " has wrong length");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  IntVector row(std::size_t i) const { return IntVector(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }

  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
  }
  void swap_cols(std::size_t j, std::size_t k) {
    if (j == k) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, j), (*this)(i, k));
  }
  /// row_i += q * row_k
  void add_row(std::size_t i, std::size_t k, const BigInt& q) {
    if (q == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) += q * (*this)(k, j);
  }
  /// col_j += q * col_k
  void add_col(std::size_t j, std::size_t k, const BigInt& q) {
    if (q == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) += q * (*this)(i, k);
  }
  void negate_row(std::size_t i) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = -(*this)(i, j);
  }

  friend IntMatrix operator*(const IntMatrix& x, const IntMatrix& y) {
    if (x.cols_ != y.rows_) throw DimensionError("matrix product shape mismatch");
    IntMatrix out(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        if (x(i, k) == 0) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) out(i, j) += x(i, k) * y(k, j);
      }
    return out;
  }

  friend bool operator==(const IntMatrix& x, const IntMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> a_;
};

inline IntVector row_times(const IntVector& x, const IntMatrix& m) {
  if (x.size() != m.rows()) throw DimensionError("vector length does not match matrix rows");
  IntVector out(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += x[i] * m(i, j);
  }
  return out;
}

/// U * A * V = D with U, V unimodular, D diagonal, nonnegative and d_i | d_{i+1}.
struct SmithForm {
  IntMatrix U;
  IntMatrix V;
  IntMatrix D;
  std::size_t rank = 0;

  std::vector<BigInt> diagonal() const {
    std::vector<BigInt> out;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) out.push_back(D(i, i));
    return out;
  }
};

namespace detail {

inline BigInt floor_quotient(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace detail

inline SmithForm smith_normal_form(const IntMatrix& A) {
  const std::size_t r = A.rows();
  const std::size_t c = A.cols();
  SmithForm s{IntMatrix::identity(r), IntMatrix::identity(c), A, 0};
  IntMatrix& D = s.D;
  IntMatrix& U = s.U;
  IntMatrix& V = s.V;

  auto row_op = [&](std::size_t i, std::size_t k, const BigInt& q) {
    D.add_row(i, k, q);
    U.add_row(i, k, q);
  };
  auto col_op = [&](std::size_t j, std::size_t k, const BigInt& q) {
    D.add_col(j, k, q);
    V.add_col(j, k, q);
  };

  for (std::size_t t = 0; t < std::min(r, c); ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      bool found = false;
      std::size_t pi = t, pj = t;
      BigInt best;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j) {
          if (D(i, j) == 0) continue;
          BigInt v = abs(D(i, j));
          if (!found || v < best) {
            found = true;
            best = v;
            pi = i;
            pj = j;
          }
        }
      if (!found) goto done;
      D.swap_rows(t, pi);
      U.swap_rows(t, pi);
      D.swap_cols(t, pj);
      V.swap_cols(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        if (D(i, t) == 0) continue;
        row_op(i, t, -detail::floor_quotient(D(i, t), D(t, t)));
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        if (D(t, j) == 0) continue;
        col_op(j, t, -detail::floor_quotient(D(t, j), D(t, t)));
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // divisibility: fold a row carrying a non-multiple into the pivot row
      bool divides = true;
      for (std::size_t i = t + 1; i < r && divides; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (D(i, j) % D(t, t) != 0) {
            row_op(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      U.negate_row(t);
    }
    s.rank = t + 1;
  }
done:
  return s;
}

/// Row-echelon basis (Hermite style, nonzero rows only) of the lattice spanned
/// by `rows`. Each basis row has a positive leading entry.
inline std::vector<IntVector> lattice_basis(std::vector<IntVector> rows, std::size_t dim) {
  std::vector<IntVector> out;
  std::size_t col = 0;
  while (!rows.empty() && col < dim) {
    for (;;) {
      std::size_t piv = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        if (piv == rows.size() || abs(rows[i][col]) < abs(rows[piv][col])) piv = i;
      }
      if (piv == rows.size()) break;
      bool reduced = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == piv || rows[i][col] == 0) continue;
        BigInt q = detail::floor_quotient(rows[i][col], rows[piv][col]);
        for (std::size_t j = 0; j < dim; ++j) rows[i][j] -= q * rows[piv][j];
        if (rows[i][col] != 0) reduced = false;
      }
      if (reduced) {
        IntVector p = rows[piv];
        if (p[col] < 0)
          for (auto& v : p) v = -v;
        out.push_back(p);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(piv));
        break;
      }
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const IntVector& v) { return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x == 0; }); }),
               rows.end());
    ++col;
  }
  // reduce entries above pivots into [0, pivot)
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t pc = 0;
    while (out[k][pc] == 0) ++pc;
    for (std::size_t i = 0; i < k; ++i) {
      BigInt q = detail::floor_quotient(out[i][pc], out[k][pc]);
      for (std::size_t j = 0; j < dim; ++j) out[i][j] -= q * out[k][j];
    }
  }
  return out;
}

/// Finitely generated abelian group given by generators and relations:
/// H = Z^g / (row lattice of `relations`).
class HomologyGroup {
 public:
  HomologyGroup() : HomologyGroup(IntMatrix(0, 0)) {}
  explicit HomologyGroup(IntMatrix relations) : rel_(std::move(relations)), snf_(smith_normal_form(rel_)) {}

  static HomologyGroup free(std::size_t g) { return HomologyGroup(IntMatrix(0, g)); }

  std::size_t generators() const { return rel_.cols(); }
  const IntMatrix& relations() const { return rel_; }
  const SmithForm& smith() const { return snf_; }

  std::size_t free_rank() const { return rel_.cols() - snf_.rank; }

  /// Torsion invariants d_i > 1.
  std::vector<BigInt> torsion() const {
    std::vector<BigInt> out;
    for (std::size_t i = 0; i < snf_.rank; ++i)
      if (snf_.D(i, i) > 1) out.push_back(snf_.D(i, i));
    return out;
  }

  /// Coordinates x*V with the first `rank` entries reduced mod d_i; equal for
  /// two elements iff they represent the same class.
  IntVector canonical(const IntVector& x) const {
    check(x);
    IntVector y = row_times(x, snf_.V);
    for (std::size_t i = 0; i < snf_.rank; ++i) {
      const BigInt& d = snf_.D(i, i);
      y[i] = y[i] % d;
      if (y[i] < 0) y[i] += d;
    }
    return y;
  }

  bool equal(const IntVector& x, const IntVector& y) const { return canonical(x) == canonical(y); }
  bool is_zero(const IntVector& x) const { return equal(x, IntVector(generators())); }

  bool is_torsion(const IntVector& x) const {
    IntVector y = canonical(x);
    for (std::size_t i = snf_.rank; i < y.size(); ++i)
      if (y[i] != 0) return false;
    return true;
  }

  void check(const IntVector& x) const {
    if (x.size() != generators())
      throw DimensionError("element has " + std::to_string(x.size()) + " coordinates, group has " +
                           std::to_string(generators()) + " generators");
  }

 private:
  IntMatrix rel_;
  SmithForm snf_;
};

struct KernelResult {
  std::size_t rank = 0;
  std::vector<IntVector> basis;  // lattice basis of the kernel in Z^n
};

/// Kernel of Z^n -> H, (m_1..m_n) -> sum m_i classes[i].
inline KernelResult kernel_rank(const std::vector<IntVector>& classes, const HomologyGroup& group) {
  const std::size_t n = classes.size();
  const std::size_t g = group.generators();
  for (const auto& c : classes) group.check(c);
  const IntMatrix& R = group.relations();
  IntMatrix M(n + R.rows(), g);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < g; ++j) M(i, j) = classes[i][j];
  for (std::size_t i = 0; i < R.rows(); ++i)
    for (std::size_t j = 0; j < g; ++j) M(n + i, j) = R(i, j);
  SmithForm s = smith_normal_form(M);
  // rows of U past the rank span the left kernel of M
  std::vector<IntVector> gens;
  for (std::size_t i = s.rank; i < M.rows(); ++i) {
    IntVector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = s.U(i, j);
    gens.push_back(std::move(v));
  }
  KernelResult out;
  out.basis = lattice_basis(gens, n);
  out.rank = out.basis.size();
  return out;
}

}  // namespace echkit
