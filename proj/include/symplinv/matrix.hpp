#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "symplinv/field.hpp"

namespace symplinv {

// Dense exact matrix, row-major. Subspaces are carried as matrices whose
// columns form a basis; an n x 0 matrix is the zero subspace.
class Matrix {
 public:
  Matrix() = default;

  Matrix(const Field& f, std::size_t rows, std::size_t cols)
      : field_(f), rows_(rows), cols_(cols), a_(rows * cols, f.zero()) {}

  static Matrix identity(const Field& f, std::size_t n) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = f.one();
    return m;
  }

  static Matrix scalar(const Scalar& s, std::size_t n) {
    Matrix m(s.field(), n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
  }

  static Matrix from_ints(const Field& f, const std::vector<std::vector<long long>>& rows) {
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    Matrix m(f, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      require(rows[i].size() == c, ErrorCode::ShapeMismatch, "ragged rows");
      for (std::size_t j = 0; j < c; ++j) m(i, j) = f.from_int(rows[i][j]);
    }
    return m;
  }

  static Matrix diagonal(const std::vector<Scalar>& d) {
    require(!d.empty(), ErrorCode::ShapeMismatch, "empty diagonal");
    Matrix m(d[0].field(), d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  // Column vector.
  static Matrix vector(const std::vector<Scalar>& v) {
    require(!v.empty(), ErrorCode::ShapeMismatch, "empty vector");
    Matrix m(v[0].field(), v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }

  static Matrix unit_vector(const Field& f, std::size_t n, std::size_t i) {
    Matrix m(f, n, 1);
    m(i, 0) = f.one();
    return m;
  }

  const Field& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Scalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_) {
      if (!x.is_zero()) return false;
    }
    return true;
  }

  bool is_identity() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        const Scalar& x = (*this)(i, j);
        if (i == j ? !x.is_one() : !x.is_zero()) return false;
      }
    }
    return true;
  }

  Matrix transpose() const {
    Matrix t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

  Matrix column(std::size_t j) const { return block(0, j, rows_, 1); }

  Matrix columns(std::size_t first, std::size_t count) const { return block(0, first, rows_, count); }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    require(r0 + nr <= rows_ && c0 + nc <= cols_, ErrorCode::ShapeMismatch, "block out of range");
    Matrix b(field_, nr, nc);
    for (std::size_t i = 0; i < nr; ++i) {
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    }
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, ErrorCode::ShapeMismatch, "block out of range");
    for (std::size_t i = 0; i < b.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
  }

  Matrix& operator+=(const Matrix& o) {
    check_shape(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    check_shape(o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

  Matrix operator-() const {
    Matrix r = *this;
    for (auto& x : r.a_) x = -x;
    return r;
  }

  friend Matrix operator*(const Scalar& s, Matrix m) {
    for (auto& x : m.a_) x *= s;
    return m;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.rows_, ErrorCode::ShapeMismatch, "product of incompatible shapes");
    require(a.field_ == b.field_, ErrorCode::FieldMismatch, "matrices over different fields");
    if (a.field_.is_rational()) return rational_product(a, b);
    return modular_product(a, b);
  }

 private:
  // Rows of a and columns of b are brought to integers over a common
  // denominator, so each entry of the product is normalized only once.
  // Integer numerators of a's rows and b's columns over per-row and per-column
  // common denominators.
  struct IntegerForm {
    std::vector<mpz_class> num;
    std::vector<mpz_class> den;
  };

  static IntegerForm integer_rows(const Matrix& a) {
    IntegerForm out{std::vector<mpz_class>(a.rows_ * a.cols_), std::vector<mpz_class>(a.rows_, 1)};
    for (std::size_t i = 0; i < a.rows_; ++i) {
      mpz_class& d = out.den[i];
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const mpq_class& x = a(i, k).rational();
        if (x.get_den() != 1) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den_mpz_t());
      }
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const mpq_class& x = a(i, k).rational();
        if (sgn(x) != 0) out.num[i * a.cols_ + k] = x.get_num() * (d / x.get_den());
      }
    }
    return out;
  }

  // Unnormalized integer products: result (i, j) is num / (row_den[i] col_den[j]).
  static std::vector<mpz_class> integer_product(const Matrix& a, const Matrix& b, IntegerForm& ai, IntegerForm& bi) {
    ai = integer_rows(a);
    bi = integer_rows(b.transpose());
    std::size_t n = a.rows_, m = a.cols_, c = b.cols_;
    std::vector<mpz_class> out(n * c);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        mpz_class& acc = out[i * c + j];
        for (std::size_t k = 0; k < m; ++k) {
          const mpz_class& x = ai.num[i * m + k];
          const mpz_class& y = bi.num[j * m + k];
          if (sgn(x) != 0 && sgn(y) != 0) mpz_addmul(acc.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        }
      }
    }
    return out;
  }

  static bool single_entry_rows(const Matrix& a) {
    for (std::size_t i = 0; i < a.rows_; ++i) {
      int count = 0;
      for (std::size_t k = 0; k < a.cols_; ++k) count += a(i, k).is_zero() ? 0 : 1;
      if (count > 1) return false;
    }
    return true;
  }

  // Rows of a and columns of b are brought to integers over a common
  // denominator, so each entry of the product is normalized only once.
  static Matrix rational_product(const Matrix& a, const Matrix& b) {
    std::size_t n = a.rows_, m = a.cols_, c = b.cols_;
    Matrix r(a.field_, n, c);
    if (single_entry_rows(a)) {
      // permutation-like left factors, e.g. standard Gram matrices
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          if (a(i, k).is_zero()) continue;
          for (std::size_t j = 0; j < c; ++j) r(i, j) = a(i, k) * b(k, j);
        }
      }
      return r;
    }
    IntegerForm ai, bi;
    std::vector<mpz_class> num = integer_product(a, b, ai, bi);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const mpz_class& x = num[i * c + j];
        if (sgn(x) != 0) r(i, j) = Scalar(a.field_, mpq_class(x, ai.den[i] * bi.den[j]));
      }
    }
    return r;
  }

 public:
  // a b == c, decided over Q by cross-multiplication without normalizing the product.
  friend bool product_equals(const Matrix& a, const Matrix& b, const Matrix& c) {
    require(a.cols_ == b.rows_, ErrorCode::ShapeMismatch, "product of incompatible shapes");
    if (c.rows_ != a.rows_ || c.cols_ != b.cols_ || !(c.field_ == a.field_)) return false;
    if (!a.field_.is_rational() || single_entry_rows(a)) return a * b == c;
    IntegerForm ai, bi;
    std::vector<mpz_class> num = integer_product(a, b, ai, bi);
    mpz_class lhs, rhs;
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const mpq_class& z = c(i, j).rational();
        lhs = num[i * b.cols_ + j] * z.get_den();
        rhs = z.get_num() * ai.den[i] * bi.den[j];
        if (lhs != rhs) return false;
      }
    }
    return true;
  }

 private:
  static Matrix modular_product(const Matrix& a, const Matrix& b) {
    std::size_t n = a.rows_, m = a.cols_, c = b.cols_;
    std::uint64_t p = a.field_.modulus();
    std::vector<std::uint64_t> bv(m * c);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < c; ++j) bv[k * c + j] = b(k, j).residue_value();
    Matrix r(a.field_, n, c);
    std::vector<unsigned __int128> acc(c);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(acc.begin(), acc.end(), 0);
      for (std::size_t k = 0; k < m; ++k) {
        std::uint64_t x = a(i, k).residue_value();
        if (x == 0) continue;
        for (std::size_t j = 0; j < c; ++j) acc[j] = (acc[j] + static_cast<unsigned __int128>(x) * bv[k * c + j]) % p;
      }
      for (std::size_t j = 0; j < c; ++j) r(i, j) = Scalar::residue(a.field_, static_cast<std::uint64_t>(acc[j]));
    }
    return r;
  }

 public:
  friend bool operator==(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.field_ != b.field_) return false;
    for (std::size_t i = 0; i < a.a_.size(); ++i) {
      if (a.a_[i] != b.a_[i]) return false;
    }
    return true;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

  Scalar trace() const {
    require(is_square(), ErrorCode::ShapeMismatch, "trace of non-square matrix");
    Scalar t = field_.zero();
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  std::vector<std::vector<std::string>> to_strings() const {
    std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).to_string();
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      s += i ? ", [" : "[";
      for (std::size_t j = 0; j < cols_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
      s += "]";
    }
    return s + "]";
  }

 private:
  void check_shape(const Matrix& o) const {
    require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::ShapeMismatch, "shape mismatch");
    require(field_ == o.field_, ErrorCode::FieldMismatch, "matrices over different fields");
  }

  Field field_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Scalar> a_;
};

inline Matrix hcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorCode::ShapeMismatch, "hcat row mismatch");
  Matrix r(a.field(), a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

inline Matrix hcat(const std::vector<Matrix>& parts, const Field& f, std::size_t rows) {
  Matrix r(f, rows, 0);
  for (const auto& p : parts) r = hcat(r, p);
  return r;
}

inline Matrix vcat(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorCode::ShapeMismatch, "vcat column mismatch");
  Matrix r(a.field(), a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

inline Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix r(a.field(), a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

inline Matrix power(const Matrix& m, unsigned k) {
  Matrix r = Matrix::identity(m.field(), m.rows());
  for (unsigned i = 0; i < k; ++i) r = r * m;
  return r;
}

// Reduced row echelon form with pivot columns.
struct Echelon {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

inline Echelon rref(Matrix m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    if (p != r) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    }
    Scalar inv = m(r, c).inv();
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      Scalar f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) {
        if (!m(r, j).is_zero()) m(i, j) -= f * m(r, j);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

// Columns form a basis of {x : m x = 0}.
inline Matrix kernel(const Matrix& m) {
  Echelon e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!is_pivot[c]) free.push_back(c);
  }
  Matrix k(m.field(), m.cols(), free.size());
  for (std::size_t idx = 0; idx < free.size(); ++idx) {
    std::size_t fc = free[idx];
    k(fc, idx) = m.field().one();
    for (std::size_t r = 0; r < e.pivots.size(); ++r) k(e.pivots[r], idx) = -e.reduced(r, fc);
  }
  return k;
}

inline Matrix inverse(const Matrix& m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "inverse of non-square matrix");
  std::size_t n = m.rows();
  Echelon e = rref(hcat(m, Matrix::identity(m.field(), n)));
  require(e.pivots.size() >= n && (n == 0 || e.pivots[n - 1] == n - 1), ErrorCode::Singular, "matrix is singular");
  return e.reduced.block(0, n, n, n);
}

inline Scalar det(Matrix m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "determinant of non-square matrix");
  std::size_t n = m.rows();
  Scalar d = m.field().one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return m.field().zero();
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    Scalar inv = m(c, c).inv();
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      Scalar f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

// (A^T)^{-1}
inline Matrix sharp(const Matrix& a) { return inverse(a.transpose()); }

// X with a X = b, for a with full column rank and b inside its column space.
inline Matrix solve(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorCode::ShapeMismatch, "solve shape mismatch");
  std::size_t k = a.cols();
  Echelon e = rref(hcat(a, b));
  require(e.pivots.size() >= k && (k == 0 || e.pivots[k - 1] == k - 1), ErrorCode::Singular,
          "coefficient matrix lacks full column rank");
  for (std::size_t r = k; r < e.pivots.size(); ++r) {
    require(e.pivots[r] < k, ErrorCode::Singular, "right-hand side outside the column space");
  }
  return e.reduced.block(0, k, k, b.cols());
}

// Independent columns spanning the same space as m's columns.
inline Matrix column_basis(const Matrix& m) {
  Echelon e = rref(m);
  Matrix b(m.field(), m.rows(), e.pivots.size());
  for (std::size_t i = 0; i < e.pivots.size(); ++i) b.set_block(0, i, m.column(e.pivots[i]));
  return b;
}

inline bool span_contains(const Matrix& space, const Matrix& vectors) {
  if (vectors.cols() == 0) return true;
  return rank(hcat(space, vectors)) == rank(space);
}

inline bool same_span(const Matrix& a, const Matrix& b) {
  std::size_t ra = rank(a);
  return ra == rank(b) && rank(hcat(a, b)) == ra;
}

inline Matrix span_sum(const Matrix& a, const Matrix& b) { return column_basis(hcat(a, b)); }

inline Matrix span_intersection(const Matrix& a, const Matrix& b) {
  Matrix k = kernel(hcat(a, -b));
  return column_basis(a * k.block(0, 0, a.cols(), k.cols()));
}

// Matrix of the restriction of m to the m-stable subspace spanned by basis.
inline Matrix restrict_to(const Matrix& m, const Matrix& basis) { return solve(basis, m * basis); }

// Completes independent columns to a basis of the ambient space using unit vectors.
inline Matrix complete_basis(const Matrix& part) {
  Matrix b = part;
  std::size_t r = rank(b);
  for (std::size_t i = 0; i < part.rows() && r < part.rows(); ++i) {
    Matrix e = Matrix::unit_vector(part.field(), part.rows(), i);
    Matrix trial = hcat(b, e);
    if (rank(trial) > r) {
      b = std::move(trial);
      ++r;
    }
  }
  return b;
}

}  // namespace symplinv
