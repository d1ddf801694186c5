#pragma once

#include <string>
#include <utility>
#include <vector>

#include "symplinv/linalg.hpp"

namespace symplinv {

// K_{2n} = [[0, I_n], [-I_n, 0]]
inline Matrix standard_gram(const Field& f, std::size_t dim) {
  require(dim % 2 == 0, ErrorCode::ShapeMismatch, "symplectic dimension must be even");
  std::size_t n = dim / 2;
  Matrix k(f, dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, n + i) = f.one();
    k(n + i, i) = -f.one();
  }
  return k;
}

inline bool is_alternating(const Matrix& k) {
  if (!k.is_square()) return false;
  for (std::size_t i = 0; i < k.rows(); ++i) {
    if (!k(i, i).is_zero()) return false;
    for (std::size_t j = i + 1; j < k.cols(); ++j) {
      if (k(i, j) != -k(j, i)) return false;
    }
  }
  return true;
}

inline bool is_involution(const Matrix& m) {
  return m.is_square() && product_equals(m, m, Matrix::identity(m.field(), m.rows()));
}

// A vector space with a non-degenerate alternating form, given by its Gram matrix.
class SymplecticSpace {
 public:
  SymplecticSpace() = default;

  explicit SymplecticSpace(Matrix gram) : gram_(std::move(gram)) {
    require(gram_.is_square() && gram_.rows() % 2 == 0, ErrorCode::ShapeMismatch, "Gram matrix must be square of even size");
    require(is_alternating(gram_), ErrorCode::NotAlternating, "Gram matrix is not alternating");
    require(gram_.rows() == 0 || !det(gram_).is_zero(), ErrorCode::Singular, "Gram matrix is singular");
  }

  static SymplecticSpace standard(const Field& f, std::size_t dim) { return SymplecticSpace(standard_gram(f, dim)); }

  const Field& field() const { return gram_.field(); }
  std::size_t dim() const { return gram_.rows(); }
  std::size_t half() const { return gram_.rows() / 2; }
  const Matrix& gram() const { return gram_; }

  // s(x, y) = x^T K y, for blocks of column vectors.
  Matrix pairing(const Matrix& a, const Matrix& b) const { return a.transpose() * gram_ * b; }
  Scalar form(const Matrix& x, const Matrix& y) const { return pairing(x, y)(0, 0); }

  Matrix identity() const { return Matrix::identity(field(), dim()); }

 private:
  Matrix gram_;
};

inline bool is_symplectic(const SymplecticSpace& space, const Matrix& m) {
  require(m.is_square() && m.rows() == space.dim(), ErrorCode::ShapeMismatch, "matrix size differs from the space");
  return product_equals(m.transpose(), space.gram() * m, space.gram());
}

// A symplectic space together with one of its isometries.
struct SPair {
  SymplecticSpace space;
  Matrix u;

  SPair() = default;
  SPair(SymplecticSpace s, Matrix m) : space(std::move(s)), u(std::move(m)) {
    require(is_symplectic(space, u), ErrorCode::PreconditionViolated, "transformation is not symplectic");
  }

  const Field& field() const { return space.field(); }
  std::size_t dim() const { return space.dim(); }
};

inline Matrix orthogonal_complement(const SymplecticSpace& space, const Matrix& w) {
  if (w.cols() == 0) return space.identity();
  return kernel(space.pairing(w, space.identity()));
}

enum class Singularity { TotallySingular, Regular, Degenerate };

inline Singularity singularity_class(const SymplecticSpace& space, const Matrix& w) {
  Matrix g = space.pairing(w, w);
  if (g.is_zero()) return Singularity::TotallySingular;
  if (rank(g) == w.cols()) return Singularity::Regular;
  return Singularity::Degenerate;
}

inline bool is_totally_singular(const SymplecticSpace& space, const Matrix& w) {
  return space.pairing(w, w).is_zero();
}

inline bool is_regular(const SymplecticSpace& space, const Matrix& w) {
  return w.cols() == 0 || !det(space.pairing(w, w)).is_zero();
}

inline bool is_lagrangian(const SymplecticSpace& space, const Matrix& l) {
  return l.cols() == space.half() && rank(l) == l.cols() && is_totally_singular(space, l);
}

inline bool is_stable(const Matrix& u, const Matrix& w) { return span_contains(w, u * w); }

// Basis (e, f, g): e spans W, and the Gram matrix of [e | f | g] is
// [[0, 0, I_p], [0, K_{2k}, 0], [-I_p, 0, 0]].
struct MixedBasis {
  Matrix e, f, g;
  Matrix all() const { return hcat(hcat(e, f), g); }
};

namespace detail {

// Symplectic Gram-Schmidt on a regular subspace: returns (a_1..a_k, b_1..b_k)
// with s(a_i, b_j) = delta_ij and all other pairings zero. The partner of the
// first remaining vector is the lowest-index vector not orthogonal to it.
inline Matrix symplectic_gram_schmidt(const SymplecticSpace& space, const Matrix& m) {
  std::vector<Matrix> rest;
  for (std::size_t j = 0; j < m.cols(); ++j) rest.push_back(m.column(j));
  std::vector<Matrix> as, bs;
  while (!rest.empty()) {
    Matrix a = rest.front();
    std::size_t partner = 0;
    for (std::size_t j = 1; j < rest.size(); ++j) {
      if (!space.form(a, rest[j]).is_zero()) {
        partner = j;
        break;
      }
    }
    require(partner != 0, ErrorCode::Degenerate, "subspace is not regular");
    Matrix b = space.form(a, rest[partner]).inv() * rest[partner];
    std::vector<Matrix> next;
    for (std::size_t j = 1; j < rest.size(); ++j) {
      if (j == partner) continue;
      const Matrix& v = rest[j];
      next.push_back(v + space.form(b, v) * a - space.form(a, v) * b);
    }
    as.push_back(std::move(a));
    bs.push_back(std::move(b));
    rest = std::move(next);
  }
  Matrix out(space.field(), space.dim(), 0);
  for (const auto& a : as) out = hcat(out, a);
  for (const auto& b : bs) out = hcat(out, b);
  return out;
}

}  // namespace detail

inline MixedBasis mixed_symplectic_basis(const SymplecticSpace& space, const Matrix& w) {
  require(is_totally_singular(space, w), ErrorCode::NotTotallySingular, "subspace is not totally singular");
  require(rank(w) == w.cols(), ErrorCode::ShapeMismatch, "subspace basis is not independent");
  const Field& f = space.field();
  std::size_t p = w.cols();
  // Middle block: a complement of W inside W^perp.
  Matrix perp = orthogonal_complement(space, w);
  Matrix middle(f, space.dim(), 0);
  Matrix acc = w;
  std::size_t r = rank(acc);
  for (std::size_t j = 0; j < perp.cols(); ++j) {
    Matrix trial = hcat(acc, perp.column(j));
    if (rank(trial) > r) {
      acc = std::move(trial);
      ++r;
      middle = hcat(middle, perp.column(j));
    }
  }
  MixedBasis out;
  out.e = w;
  out.f = detail::symplectic_gram_schmidt(space, middle);
  if (p == 0) {
    out.g = Matrix(f, space.dim(), 0);
    return out;
  }
  // h_j with s(e_i, h_j) = delta_ij and s(f_a, h_j) = 0, then corrected by W so the g_j are mutually orthogonal.
  Matrix lhs = vcat(space.pairing(out.e, space.identity()), space.pairing(out.f, space.identity()));
  Matrix rhs(f, lhs.rows(), p);
  for (std::size_t i = 0; i < p; ++i) rhs(i, i) = f.one();
  Echelon ech = rref(hcat(lhs, rhs));
  std::size_t n = space.dim();
  Matrix h(f, n, p);
  for (std::size_t row = 0; row < ech.pivots.size(); ++row) {
    std::size_t c = ech.pivots[row];
    require(c < n, ErrorCode::InternalCheckFailed, "pairing system inconsistent");
    for (std::size_t j = 0; j < p; ++j) h(c, j) = ech.reduced(row, n + j);
  }
  Matrix c = space.pairing(h, h);
  Matrix t(f, p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) t(i, j) = c(i, j);
  }
  out.g = h + out.e * t;
  return out;
}

// Gram matrix of the mixed basis with parameters (p, k).
inline Matrix mixed_gram(const Field& f, std::size_t p, std::size_t k) {
  std::size_t n = 2 * p + 2 * k;
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < p; ++i) {
    m(i, p + 2 * k + i) = f.one();
    m(p + 2 * k + i, i) = -f.one();
  }
  if (k > 0) m.set_block(p, p, standard_gram(f, 2 * k));
  return m;
}

// Symplectic basis (e_1..e_n, f_1..f_n) of the whole space.
inline Matrix symplectic_basis(const SymplecticSpace& space) {
  return mixed_symplectic_basis(space, Matrix(space.field(), space.dim(), 0)).f;
}

// Basis [e | f] with e spanning L, f spanning Lp and s(e_i, f_j) = delta_ij.
inline Matrix adapted_basis(const SymplecticSpace& space, const Matrix& l, const Matrix& lp) {
  require(is_lagrangian(space, l) && is_lagrangian(space, lp), ErrorCode::NotLagrangian, "subspace is not Lagrangian");
  Matrix p = space.pairing(l, lp);
  require(!det(p).is_zero(), ErrorCode::NotTransverse, "Lagrangians are not transverse");
  return hcat(l, lp * inverse(p));
}

// The isometry that stabilizes L and Lp and acts as v (in L's coordinates) on L.
inline Matrix symplectic_extension(const SymplecticSpace& space, const Matrix& l, const Matrix& lp, const Matrix& v) {
  Matrix b = adapted_basis(space, l, lp);
  require(v.is_square() && v.rows() == l.cols(), ErrorCode::ShapeMismatch, "restriction has the wrong size");
  return b * block_diagonal(v, sharp(v)) * inverse(b);
}

struct FormInfo {
  Matrix gram;
  bool symmetric = false;
  bool nondegenerate = false;
};

// Gram matrix of (x, y) -> s(x, u y) on W.
inline FormInfo form_s_u(const SPair& pair, const Matrix& w) {
  FormInfo out;
  out.gram = pair.space.pairing(w, pair.u * w);
  out.symmetric = out.gram == out.gram.transpose();
  out.nondegenerate = w.cols() == 0 || !det(out.gram).is_zero();
  return out;
}

inline SPair orthogonal_sum(const SPair& a, const SPair& b) {
  require(a.field() == b.field(), ErrorCode::FieldMismatch, "orthogonal sum over different fields");
  return SPair(SymplecticSpace(block_diagonal(a.space.gram(), b.space.gram())), block_diagonal(a.u, b.u));
}

// The pair induced on an s-regular u-stable subspace, in the coordinates of `basis`.
inline SPair restrict_pair(const SPair& pair, const Matrix& basis) {
  return SPair(SymplecticSpace(pair.space.pairing(basis, basis)), restrict_to(pair.u, basis));
}

// x -> x + c s(x, v) v
inline Matrix transvection(const SymplecticSpace& space, const Matrix& v, const Scalar& c) {
  Matrix row = v.transpose() * space.gram();
  return space.identity() - c * (v * row);
}

}  // namespace symplinv
