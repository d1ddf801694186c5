#pragma once

#include <cstdint>
#include <vector>

#include "symplinv/matrix.hpp"
#include "symplinv/polynomial.hpp"

namespace symplinv {

inline Matrix eval(const Polynomial& p, const Matrix& m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "polynomial of non-square matrix");
  Matrix r(m.field(), m.rows(), m.cols());
  for (int i = p.degree(); i >= 0; --i) {
    r = r * m;
    const Scalar& c = p.coeffs()[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < m.rows(); ++k) r(k, k) += c;
  }
  return r;
}

// Companion matrix in the basis (b, Mb, ..., M^{d-1} b): ones on the
// subdiagonal, last column -(c_0, ..., c_{d-1}).
inline Matrix companion(const Polynomial& p) {
  Polynomial q = p.monic();
  std::size_t d = static_cast<std::size_t>(q.degree());
  Matrix c(p.field(), d, d);
  for (std::size_t i = 1; i < d; ++i) c(i, i - 1) = p.field().one();
  for (std::size_t i = 0; i < d; ++i) c(i, d - 1) = -q.coeff(static_cast<int>(i));
  return c;
}

// Characteristic polynomial det(t - M) via reduction to upper Hessenberg form.
inline Polynomial char_poly(const Matrix& m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "characteristic polynomial of non-square matrix");
  const Field& f = m.field();
  std::size_t n = m.rows();
  Matrix h = m;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    std::size_t piv = k;
    while (piv < n && h(piv, k - 1).is_zero()) ++piv;
    if (piv == n) continue;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(piv, j), h(k, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, piv), h(i, k));
    }
    Scalar inv = h(k, k - 1).inv();
    for (std::size_t i = k + 1; i < n; ++i) {
      if (h(i, k - 1).is_zero()) continue;
      Scalar u = h(i, k - 1) * inv;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= u * h(k, j);
      for (std::size_t r = 0; r < n; ++r) h(r, k) += u * h(r, i);
    }
  }
  std::vector<Polynomial> p;
  p.push_back(Polynomial::one(f));
  for (std::size_t mm = 1; mm <= n; ++mm) {
    Polynomial cur = Polynomial::linear(h(mm - 1, mm - 1)) * p[mm - 1];
    Scalar t = f.one();
    for (std::size_t i = 1; i < mm; ++i) {
      t *= h(mm - i, mm - i - 1);
      if (t.is_zero()) break;
      cur -= (t * h(mm - i - 1, mm - 1)) * p[mm - i - 1];
    }
    p.push_back(std::move(cur));
  }
  return p.back();
}

// Incremental echelon of Krylov vectors; each stored vector remembers the
// polynomial q with q(M) x = vector.
namespace detail {

struct KrylovRow {
  Matrix v;
  Polynomial poly;
  std::size_t pivot;
};

// Reduces (v, poly) against the stored rows; returns true when v becomes zero.
inline bool reduce_krylov(std::vector<KrylovRow>& rows, Matrix& v, Polynomial& poly) {
  for (const auto& r : rows) {
    if (v(r.pivot, 0).is_zero()) continue;
    Scalar c = v(r.pivot, 0);
    v -= c * r.v;
    poly -= c * r.poly;
  }
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (!v(i, 0).is_zero()) {
      Scalar inv = v(i, 0).inv();
      v = inv * v;
      poly = inv * poly;
      for (auto& r : rows) {
        if (r.v(i, 0).is_zero()) continue;
        Scalar c = r.v(i, 0);
        r.v -= c * v;
        r.poly -= c * poly;
      }
      rows.push_back({v, poly, i});
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Monic generator of {q : q(M) x = 0}.
inline Polynomial local_min_poly(const Matrix& m, const Matrix& x) {
  const Field& f = m.field();
  std::vector<detail::KrylovRow> rows;
  Matrix cur = x;
  Polynomial tp = Polynomial::one(f);
  for (std::size_t k = 0; k <= m.rows(); ++k) {
    Matrix v = cur;
    Polynomial poly = tp;
    if (detail::reduce_krylov(rows, v, poly)) return poly.monic();
    cur = m * cur;
    tp = tp * Polynomial::t(f);
  }
  fail(ErrorCode::InternalCheckFailed, "Krylov sequence did not terminate");
}

// Columns x, Mx, ..., M^{k-1}x.
inline Matrix krylov_basis(const Matrix& m, const Matrix& x, std::size_t k) {
  Matrix b(m.field(), m.rows(), k);
  Matrix cur = x;
  for (std::size_t i = 0; i < k; ++i) {
    b.set_block(0, i, cur);
    if (i + 1 < k) cur = m * cur;
  }
  return b;
}

// Minimal polynomial as a product of local annihilators over the unit vectors.
inline Polynomial min_poly(const Matrix& m) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "minimal polynomial of non-square matrix");
  const Field& f = m.field();
  Polynomial acc = Polynomial::one(f);
  Matrix acc_m = Matrix::identity(f, m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Matrix y = acc_m.column(i);
    if (y.is_zero()) continue;
    Polynomial q = local_min_poly(m, y);
    if (q.degree() == 0) continue;
    acc = acc * q;
    acc_m = eval(acc, m);
  }
  return acc.monic();
}

inline bool is_cyclic(const Matrix& m) { return min_poly(m).degree() == static_cast<int>(m.rows()); }

namespace detail {

inline Matrix random_vector(Rng& rng, const Field& f, std::size_t n) {
  Matrix v(f, n, 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = rng.scalar(f, 2);
  return v;
}

// A vector whose annihilator has the given degree (the degree of the minimal
// polynomial): unit vectors and sums of pairs first, then seeded random vectors.
inline Matrix maximal_order_vector(const Matrix& m, int target_degree, std::uint64_t seed, int budget = 256) {
  const Field& f = m.field();
  std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    Matrix e = Matrix::unit_vector(f, n, i);
    if (local_min_poly(m, e).degree() == target_degree) return e;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Matrix e = Matrix::unit_vector(f, n, i) + Matrix::unit_vector(f, n, j);
      if (local_min_poly(m, e).degree() == target_degree) return e;
    }
  }
  Rng rng(seed);
  for (int t = 0; t < budget; ++t) {
    Matrix v = random_vector(rng, f, n);
    if (local_min_poly(m, v).degree() == target_degree) return v;
  }
  fail(ErrorCode::SearchExhausted, "no vector of maximal order found");
}

}  // namespace detail

// Rational canonical form. `basis` has as columns the concatenated cyclic bases
// (b_i, M b_i, ..., ) ordered by the factors; transform = basis^{-1}, so that
// transform * M * transform^{-1} is block-companion.
struct RationalCanonicalForm {
  std::vector<Polynomial> factors;  // p_1 | p_2 | ... | p_r
  Matrix basis;
  Matrix transform;
  std::vector<Matrix> generators;   // b_i in ambient coordinates
};

inline RationalCanonicalForm invariant_factors(const Matrix& m, std::uint64_t seed = 0) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "invariant factors of non-square matrix");
  const Field& f = m.field();
  std::size_t n = m.rows();
  std::vector<Polynomial> polys;
  std::vector<Matrix> gens;
  Matrix basis = Matrix::identity(f, n);
  Matrix r = m;
  std::uint64_t round = 0;
  while (r.rows() > 0) {
    std::size_t d = r.rows();
    Polynomial mp = min_poly(r);
    std::size_t k = static_cast<std::size_t>(mp.degree());
    Matrix x = detail::maximal_order_vector(r, static_cast<int>(k), seed + 7919 * ++round);
    Matrix z = krylov_basis(r, x, k);
    polys.push_back(mp);
    gens.push_back(basis * x);
    if (k == d) break;
    // A functional taking R^j x to delta_{j,k-1}; its R-orbit cuts out a stable complement.
    Matrix full = complete_basis(z);
    Matrix phi = inverse(full).block(k - 1, 0, 1, d);
    Matrix rows(f, k, d);
    Matrix cur = phi;
    for (std::size_t i = 0; i < k; ++i) {
      rows.set_block(i, 0, cur);
      cur = cur * r;
    }
    Matrix c = kernel(rows);
    r = restrict_to(r, c);
    basis = basis * c;
  }
  RationalCanonicalForm out;
  std::vector<Matrix> blocks;
  for (std::size_t i = polys.size(); i-- > 0;) {
    out.factors.push_back(polys[i]);
    out.generators.push_back(gens[i]);
    blocks.push_back(krylov_basis(m, gens[i], static_cast<std::size_t>(polys[i].degree())));
  }
  out.basis = hcat(blocks, f, n);
  out.transform = inverse(out.basis);
  return out;
}

inline Matrix block_companion(const std::vector<Polynomial>& factors, const Field& f) {
  std::size_t n = 0;
  for (const auto& p : factors) n += static_cast<std::size_t>(p.degree());
  Matrix r(f, n, n);
  std::size_t at = 0;
  for (const auto& p : factors) {
    r.set_block(at, at, companion(p));
    at += static_cast<std::size_t>(p.degree());
  }
  return r;
}

// Invertible P with P A P^{-1} = B.
inline Matrix similarity_transform(const Matrix& a, const Matrix& b) {
  require(a.is_square() && b.is_square() && a.rows() == b.rows(), ErrorCode::ShapeMismatch,
          "similarity needs square matrices of equal size");
  RationalCanonicalForm ra = invariant_factors(a), rb = invariant_factors(b);
  require(ra.factors == rb.factors, ErrorCode::NotSimilar, "invariant factors differ");
  return rb.basis * ra.transform;
}

// x with (x, Mx, ..., M^{n-1}x) a basis.
inline Matrix cyclic_vector(const Matrix& m, std::uint64_t seed = 0) {
  require(m.is_square(), ErrorCode::ShapeMismatch, "cyclic vector of non-square matrix");
  require(is_cyclic(m), ErrorCode::NotCyclic, "matrix is not cyclic");
  return detail::maximal_order_vector(m, static_cast<int>(m.rows()), seed);
}

// Jordan chains of a nilpotent matrix. Each chain is returned as columns
// (x, Nx, ..., N^{k-1}x) with N^k x = 0; chains are sorted by decreasing length.
inline std::vector<Matrix> jordan_chains(const Matrix& nil) {
  const Field& f = nil.field();
  std::size_t n = nil.rows();
  std::vector<Matrix> kernels{Matrix(f, n, 0)};
  Matrix pw = Matrix::identity(f, n);
  while (kernels.back().cols() < n) {
    pw = pw * nil;
    kernels.push_back(kernel(pw));
    require(kernels.size() <= n + 1, ErrorCode::PreconditionViolated, "matrix is not nilpotent");
  }
  std::vector<Matrix> chains;
  for (std::size_t k = kernels.size() - 1; k >= 1; --k) {
    Matrix s = kernels[k - 1];
    for (const auto& c : chains) s = hcat(s, c.column(c.cols() - k));
    std::size_t r = rank(s);
    for (std::size_t j = 0; j < kernels[k].cols(); ++j) {
      Matrix b = kernels[k].column(j);
      Matrix trial = hcat(s, b);
      if (rank(trial) == r) continue;
      s = std::move(trial);
      ++r;
      chains.push_back(krylov_basis(nil, b, k));
    }
  }
  return chains;
}

// X with a X - X b = c, unique when a and b have no common eigenvalue.
inline Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  require(a.is_square() && b.is_square() && c.rows() == a.rows() && c.cols() == b.rows(), ErrorCode::ShapeMismatch,
          "Sylvester equation shapes");
  const Field& f = a.field();
  std::size_t n = a.rows(), m = b.rows();
  // Unknown x(i, j) sits at index i * m + j.
  Matrix sys(f, n * m, n * m), rhs(f, n * m, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t row = i * m + j;
      for (std::size_t k = 0; k < n; ++k) sys(row, k * m + j) += a(i, k);
      for (std::size_t k = 0; k < m; ++k) sys(row, i * m + k) -= b(k, j);
      rhs(row, 0) = c(i, j);
    }
  }
  Matrix x(f, n * m, 1);
  if (n * m > 0) {
    require(rank(sys) == n * m, ErrorCode::CoprimalityViolated, "Sylvester equation is singular");
    x = solve(sys, rhs);
  }
  Matrix out(f, n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, j) = x(i * m + j, 0);
  return out;
}

}  // namespace symplinv
