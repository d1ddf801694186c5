#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symplinv/symplectic.hpp"

namespace symplinv {

enum class CellType { I, II, III, IV };

inline const char* cell_type_name(CellType t) {
  switch (t) {
    case CellType::I: return "I";
    case CellType::II: return "II";
    case CellType::III: return "III";
    case CellType::IV: return "IV";
  }
  return "?";
}

// One orthogonal summand. `pair` is expressed in the coordinates of `basis`
// (ambient columns). Cyclic cells use the Krylov basis of their generator, so
// the generator is the first basis vector; a type IV cell is the sum of two
// cyclic blocks of equal odd size k, with generators at positions 0 and k.
struct Cell {
  CellType type = CellType::I;
  SPair pair;
  Matrix basis;
  int eta = 0;
  std::size_t block = 0;  // size of each cyclic block
};

struct CellDecomposition {
  std::vector<Cell> cells;

  Matrix basis(const Field& f, std::size_t dim) const {
    std::vector<Matrix> parts;
    for (const auto& c : cells) parts.push_back(c.basis);
    return hcat(parts, f, dim);
  }

  bool has_type_iv() const {
    for (const auto& c : cells) {
      if (c.type == CellType::IV) return true;
    }
    return false;
  }
};

struct InvolutionPair {
  Matrix j1, j2;  // j1 * j2 is the decomposed element
};

namespace detail {

// The i-th vector of a deterministic sweep over F^n: unit vectors, then sums of
// two unit vectors, then seeded random vectors.
class VectorSweep {
 public:
  VectorSweep(const Field& f, std::size_t n, std::uint64_t seed, std::size_t random_budget = 64)
      : f_(f), n_(n), rng_(seed), random_budget_(random_budget) {}

  bool next(Matrix& out) {
    if (i_ < n_) {
      out = Matrix::unit_vector(f_, n_, i_++);
      return true;
    }
    if (a_ + 1 < n_) {
      out = Matrix::unit_vector(f_, n_, a_) + Matrix::unit_vector(f_, n_, b_);
      if (++b_ == n_) {
        ++a_;
        b_ = a_ + 1;
      }
      return true;
    }
    if (drawn_ < random_budget_) {
      ++drawn_;
      out = random_vector(rng_, f_, n_);
      return true;
    }
    return false;
  }

 private:
  Field f_;
  std::size_t n_;
  Rng rng_;
  std::size_t random_budget_;
  std::size_t i_ = 0, a_ = 0, b_ = 1, drawn_ = 0;
};

inline bool regular_block(const Matrix& gram, const Matrix& z) {
  if (rank(z) != z.cols()) return false;
  return !det(z.transpose() * gram * z).is_zero();
}

inline bool has_coprime_split(const Polynomial& m);

// Peels cells off the u-stable regular subspace spanned by `basis`.
inline void peel_cells(const SPair& pair, Matrix basis, int eta, std::uint64_t seed, std::vector<Cell>& out) {
  const Field& f = pair.field();
  std::uint64_t round = 0;
  while (basis.cols() > 0) {
    Matrix gram = pair.space.pairing(basis, basis);
    Matrix r = restrict_to(pair.u, basis);
    std::size_t d = r.rows();
    Polynomial mp = min_poly(r);
    std::size_t k = static_cast<std::size_t>(mp.degree());
    bool odd = eta != 0 && k % 2 == 1;
    std::uint64_t s = seed + 104729 * ++round;
    Matrix z;
    bool found = false;
    VectorSweep xs(f, d, s);
    Matrix x;
    std::size_t tried_x = 0;
    while (!found && xs.next(x)) {
      if (local_min_poly(r, x).degree() != static_cast<int>(k)) continue;
      Matrix zx = krylov_basis(r, x, k);
      if (!odd) {
        if (regular_block(gram, zx)) {
          z = zx;
          found = true;
        }
        continue;
      }
      if (++tried_x > 8) break;
      VectorSweep ys(f, d, s ^ 0x5bd1e995);
      Matrix y;
      while (ys.next(y)) {
        if (local_min_poly(r, y).degree() != static_cast<int>(k)) continue;
        Matrix zz = hcat(zx, krylov_basis(r, y, k));
        if (regular_block(gram, zz)) {
          z = zz;
          found = true;
          break;
        }
      }
    }
    require(found, ErrorCode::DecompositionFailed, "no regular cyclic block found");
    Cell c;
    c.basis = basis * z;
    c.pair = restrict_pair(pair, c.basis);
    c.eta = eta;
    c.block = k;
    if (eta != 0) {
      c.type = odd ? CellType::IV : CellType::III;
    } else {
      c.type = has_coprime_split(mp) ? CellType::II : CellType::I;
    }
    out.push_back(std::move(c));
    Matrix comp = kernel(z.transpose() * gram);
    basis = basis * comp;
  }
}

}  // namespace detail

// Orthogonal decomposition of the pair into cyclic cells (types I-III) and
// type IV pairs of odd Jordan blocks for the eigenvalues +-1.
inline CellDecomposition cell_decomposition(const SPair& pair, std::uint64_t seed = 0) {
  const Field& f = pair.field();
  Polynomial chi = char_poly(pair.u);
  Polynomial tm1 = Polynomial::linear(f.one()), tp1 = Polynomial::linear(-f.one());
  int a = multiplicity(tm1, chi), b = multiplicity(tp1, chi);
  Polynomial rest = coprime_part(coprime_part(chi, tm1), tp1);
  CellDecomposition out;
  if (rest.degree() > 0) detail::peel_cells(pair, kernel(eval(rest, pair.u)), 0, seed, out.cells);
  if (a > 0) detail::peel_cells(pair, kernel(eval(tm1.pow(a), pair.u)), 1, seed + 1, out.cells);
  if (b > 0) detail::peel_cells(pair, kernel(eval(tp1.pow(b), pair.u)), -1, seed + 2, out.cells);
  return out;
}

// Result of splitting off the u-stable subspace generated around a totally
// singular stable W. Subspaces are ambient bases; `lagrangian` and
// `complement` are in the coordinates of `basis0`.
struct SingularSplit {
  Polynomial p;  // characteristic polynomial of u on W
  Matrix basis0, basis1;
  SPair pair0, pair1;
  Matrix lagrangian;
  std::optional<Matrix> complement;  // set when u on the first summand extends u on W
};

inline SingularSplit split_off_singular(const SPair& pair, const Matrix& w) {
  const Field& f = pair.field();
  require(is_totally_singular(pair.space, w), ErrorCode::NotTotallySingular, "subspace is not totally singular");
  require(is_stable(pair.u, w), ErrorCode::NotStable, "subspace is not stable");
  SingularSplit out{Polynomial::one(f), {}, {}, {}, {}, {}, std::nullopt};
  if (w.cols() > 0) out.p = char_poly(restrict_to(pair.u, w));
  Polynomial pp = out.p * reciprocal(out.p);
  Polynomial chi = char_poly(pair.u);
  auto [q, rem] = chi.divmod(pp);
  require(rem.is_zero() && coprime_over_closure(q, pp), ErrorCode::CoprimalityViolated,
          "quotient shares roots with p p#");
  out.basis0 = kernel(eval(pp, pair.u));
  out.basis1 = kernel(eval(q, pair.u));
  out.pair0 = restrict_pair(pair, out.basis0);
  out.pair1 = restrict_pair(pair, out.basis1);
  out.lagrangian = solve(out.basis0, w);
  if (w.cols() > 0 && coprime_over_closure(out.p, reciprocal(out.p))) {
    out.complement = kernel(eval(reciprocal(out.p), out.pair0.u));
  }
  return out;
}

namespace detail {

// H x for the Hermitian elements H of F[t]/(m), m the minimal polynomial of u
// on the cyclic span of x; `u` must be cyclic with cyclic vector x.
inline Matrix hermitian_span(const Matrix& u, const Matrix& x) {
  std::size_t d = u.rows();
  Matrix z = krylov_basis(u, x, d);
  Matrix zinv = inverse(z);
  Matrix uinv = inverse(u);
  Matrix star(u.field(), d, d);
  Matrix cur = x;
  for (std::size_t j = 0; j < d; ++j) {
    star.set_block(0, j, zinv * cur);
    cur = uinv * cur;
  }
  return z * kernel(star - Matrix::identity(u.field(), d));
}

}  // namespace detail

// Lagrangian L with s(x, u y) symmetric and nondegenerate on L.
inline Matrix hermitian_lagrangian(const SPair& pair, std::uint64_t seed = 0) {
  CellDecomposition dec = cell_decomposition(pair, seed);
  std::vector<Matrix> parts;
  for (const auto& c : dec.cells) {
    require(c.type != CellType::IV, ErrorCode::OddCellPresent, "odd Jordan block for eigenvalue +-1");
    Matrix x = Matrix::unit_vector(pair.field(), c.pair.dim(), 0);
    parts.push_back(c.basis * detail::hermitian_span(c.pair.u, x));
  }
  Matrix l = hcat(parts, pair.field(), pair.dim());
  FormInfo fi = form_s_u(pair, l);
  require(is_lagrangian(pair.space, l) && fi.symmetric && fi.nondegenerate, ErrorCode::InternalCheckFailed,
          "Hermitian span is not a good Lagrangian");
  return l;
}

// Basis Q with Q^T G Q diagonal, for a symmetric G.
inline Matrix diagonalizing_basis(const Matrix& g) {
  const Field& f = g.field();
  std::size_t n = g.rows();
  Matrix q = Matrix::identity(f, n);
  Matrix m = g;
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i).is_zero()) {
      std::size_t j = i + 1;
      while (j < n && m(j, j).is_zero()) ++j;
      if (j < n) {
        // swap columns i and j
        Matrix sw = Matrix::identity(f, n);
        sw(i, i) = f.zero();
        sw(j, j) = f.zero();
        sw(i, j) = f.one();
        sw(j, i) = f.one();
        q = q * sw;
        m = sw.transpose() * m * sw;
      } else {
        j = i + 1;
        while (j < n && m(i, j).is_zero()) ++j;
        if (j == n) continue;  // row i is zero
        Matrix add = Matrix::identity(f, n);
        add(j, i) = f.one();  // e_i <- e_i + e_j
        q = q * add;
        m = add.transpose() * m * add;
      }
    }
    Matrix el = Matrix::identity(f, n);
    for (std::size_t j = i + 1; j < n; ++j) el(i, j) = -(m(i, j) / m(i, i));
    q = q * el;
    m = el.transpose() * m * el;
  }
  return q;
}

// Lagrangian L with Gram of s(x, u y) on L equal to diag(targets). Requires u
// annihilated by (t - lambda)(t - 1/lambda), lambda not in {0, 1, -1}, or u^2 = -id.
inline Matrix lagrangian_with_form(const SPair& pair, const std::vector<Scalar>& targets, const Scalar& lambda) {
  const Field& f = pair.field();
  std::size_t n = pair.space.half();
  require(targets.size() == n, ErrorCode::ShapeMismatch, "one target per Lagrangian dimension");
  for (const auto& a : targets) require(!a.is_zero(), ErrorCode::ZeroTarget, "target form entry is zero");
  Matrix id = pair.space.identity();
  std::vector<Matrix> xs;
  bool quadratic = !lambda.is_zero() && !lambda.is_one() && !(-lambda).is_one() &&
                   ((pair.u - lambda * id) * (pair.u - lambda.inv() * id)).is_zero();
  if (quadratic) {
    Matrix e = kernel(pair.u - lambda * id), fl = kernel(pair.u - lambda.inv() * id);
    Matrix ad = adapted_basis(pair.space, e, fl);
    Scalar c = (lambda.inv() - lambda).inv();
    for (std::size_t i = 0; i < n; ++i) xs.push_back(ad.column(i) + (targets[i] * c) * ad.column(n + i));
  } else {
    require((pair.u * pair.u + id).is_zero(), ErrorCode::NotAnnihilated, "u is not annihilated by the quadratic");
    // Split into regular planes span(x, ux) and solve s(y, uy) = a in each.
    Matrix basis = id;
    std::size_t i = 0;
    while (basis.cols() > 0) {
      Matrix x;
      bool found = false;
      detail::VectorSweep sweep(f, basis.cols(), 17 + i);
      while (sweep.next(x)) {
        x = basis * x;
        if (!pair.space.form(x, pair.u * x).is_zero()) {
          found = true;
          break;
        }
      }
      require(found, ErrorCode::SearchExhausted, "no regular plane found");
      Matrix plane = hcat(x, pair.u * x);
      Scalar q = pair.space.form(x, pair.u * x);
      // s(c1 x + c2 ux, u(c1 x + c2 ux)) = (c1^2 + c2^2) q
      Scalar want = targets[i] / q;
      std::optional<Matrix> y;
      if (f.is_finite()) {
        for (std::uint64_t c1 = 0; c1 < f.modulus() && !y; ++c1) {
          for (std::uint64_t c2 = 0; c2 < f.modulus() && !y; ++c2) {
            Scalar a1 = Scalar::residue(f, c1), a2 = Scalar::residue(f, c2);
            if (a1 * a1 + a2 * a2 == want) y = a1 * x + a2 * (pair.u * x);
          }
        }
      } else {
        for (long long c1 = 0; c1 <= 64 && !y; ++c1) {
          for (long long c2 = 0; c2 <= c1 && !y; ++c2) {
            for (long long den = 1; den <= 64 && !y; ++den) {
              Scalar a1 = f.from_ratio(c1, den), a2 = f.from_ratio(c2, den);
              if (a1 * a1 + a2 * a2 == want) y = a1 * x + a2 * (pair.u * x);
            }
          }
        }
      }
      require(y.has_value(), ErrorCode::SearchExhausted, "target is not a sum of two squares times s(x, ux)");
      xs.push_back(*y);
      Matrix local = solve(basis, plane);
      Matrix gram = pair.space.pairing(basis, basis);
      basis = basis * kernel(local.transpose() * gram);
      ++i;
    }
  }
  Matrix l = hcat(xs, f, pair.dim());
  require(pair.space.pairing(l, pair.u * l) == Matrix::diagonal(targets) && is_lagrangian(pair.space, l),
          ErrorCode::InternalCheckFailed, "Lagrangian does not carry the requested form");
  return l;
}

// Involutions (tau, sigma) of the general linear group with tau * sigma = v.
// In each cyclic block basis (b, vb, ..., v^{d-1} b) sigma reverses the basis.
inline InvolutionPair two_involutions_gl(const Matrix& v) {
  const Field& f = v.field();
  RationalCanonicalForm rcf = invariant_factors(v);
  std::size_t n = v.rows();
  Matrix rev(f, n, n);
  std::size_t at = 0;
  for (const auto& p : rcf.factors) {
    require(is_palindromial(p), ErrorCode::NotSimilarToInverse, "invariant factor is not a palindromial");
    std::size_t d = static_cast<std::size_t>(p.degree());
    for (std::size_t k = 0; k < d; ++k) rev(at + k, at + d - 1 - k) = f.one();
    at += d;
  }
  Matrix sigma = rcf.basis * rev * rcf.transform;
  Matrix tau = v * sigma;
  require(is_involution(sigma) && is_involution(tau), ErrorCode::InternalCheckFailed, "reversal is not an involution");
  return {tau, sigma};
}

// Symplectic involutions j1, j2 with j1 j2 = u, for u stabilizing the
// transverse Lagrangians L and Lp with u on L similar to its inverse.
inline InvolutionPair two_involutions_sp(const SPair& pair, const Matrix& l, const Matrix& lp) {
  require(is_stable(pair.u, l) && is_stable(pair.u, lp), ErrorCode::NotStable, "Lagrangians are not stable");
  Matrix v = restrict_to(pair.u, l);
  InvolutionPair gl = two_involutions_gl(v);
  InvolutionPair out{symplectic_extension(pair.space, l, lp, gl.j1), symplectic_extension(pair.space, l, lp, gl.j2)};
  require(out.j1 * out.j2 == pair.u, ErrorCode::InternalCheckFailed, "extended involutions do not multiply to u");
  return out;
}

// Stable transverse Lagrangians carrying half of the Jordan cells of each
// eigenvalue, for u split over the field without eigenvalues +-1.
inline std::pair<Matrix, Matrix> balanced_lagrangians(const SPair& pair) {
  const Field& f = pair.field();
  Polynomial chi = char_poly(pair.u);
  std::vector<Scalar> roots = roots_in_field(chi);
  int total = 0;
  for (const auto& r : roots) {
    require(!r.is_one() && !(-r).is_one(), ErrorCode::EigenvaluePMOne, "eigenvalue +-1 present");
    total += multiplicity(Polynomial::linear(r), chi);
  }
  require(total == static_cast<int>(pair.dim()), ErrorCode::PreconditionViolated, "u is not triangularizable");
  Matrix id = pair.space.identity();
  std::vector<Matrix> lparts, lpparts;
  std::vector<Scalar> done;
  for (const auto& lam : roots) {
    bool seen = false;
    for (const auto& d : done) seen = seen || d == lam;
    if (seen) continue;
    // Of lambda and 1/lambda, the one with |.| > 1 (or the smaller residue) leads.
    Scalar mu = lam.inv();
    done.push_back(lam);
    done.push_back(mu);
    bool swap = f.is_finite() ? mu.residue_value() < lam.residue_value() : abs(lam.rational()) < 1;
    Scalar lead = swap ? mu : lam, other = swap ? lam : mu;
    int mult = multiplicity(Polynomial::linear(lead), chi);
    Matrix el = kernel(eval(Polynomial::linear(lead).pow(static_cast<unsigned>(mult)), pair.u));
    Matrix em = kernel(eval(Polynomial::linear(other).pow(static_cast<unsigned>(mult)), pair.u));
    std::vector<Matrix> chains = jordan_chains(restrict_to(pair.u - lead * id, el));
    std::vector<Matrix> as, bs;
    for (std::size_t i = 0; i < chains.size();) {
      std::size_t j = i;
      while (j < chains.size() && chains[j].cols() == chains[i].cols()) ++j;
      require((j - i) % 2 == 0, ErrorCode::CellParityViolated, "odd number of Jordan cells of some size");
      for (std::size_t t = i; t < j; ++t) ((t - i) % 2 == 0 ? as : bs).push_back(el * chains[t]);
      i = j;
    }
    Matrix a = hcat(as, f, pair.dim()), b = hcat(bs, f, pair.dim());
    lparts.push_back(a);
    lparts.push_back(em * kernel(pair.space.pairing(a, em)));
    lpparts.push_back(b);
    lpparts.push_back(em * kernel(pair.space.pairing(b, em)));
  }
  return {hcat(lparts, f, pair.dim()), hcat(lpparts, f, pair.dim())};
}

inline InvolutionPair two_involutions_sp_balanced(const SPair& pair) {
  auto [l, lp] = balanced_lagrangians(pair);
  return two_involutions_sp(pair, l, lp);
}

// Stable transverse Lagrangians of a type IV cell (two Jordan blocks of the
// same odd size for one eigenvalue +-1). With delta = u - u^{-1}, the cyclic
// span of x is totally singular iff s(x, delta^{2i+1} x) = 0 for 2i+1 < k.
// Each condition is corrected in turn by adding a multiple of delta^r w; the
// correction is affine in the multiple and leaves the conditions already met
// untouched.
inline std::pair<Matrix, Matrix> odd_cell_lagrangians(const SPair& pair) {
  const Field& f = pair.field();
  std::size_t n = pair.dim();
  std::size_t k = static_cast<std::size_t>(min_poly(pair.u).degree());
  require(k % 2 == 1 && 2 * k == n, ErrorCode::PreconditionViolated, "not a pair of odd Jordan blocks");
  std::size_t m = (k - 1) / 2;
  Matrix delta = pair.u - inverse(pair.u);
  std::vector<Matrix> dp{Matrix::identity(f, n)};
  for (std::size_t i = 1; i <= 2 * m; ++i) dp.push_back(dp.back() * delta);
  auto cond = [&](const Matrix& v, std::size_t i) { return pair.space.form(v, dp[2 * i + 1] * v); };
  auto make_singular = [&](Matrix x) {
    Matrix top = dp[2 * m] * x;
    std::size_t j = 0;
    while (pair.space.form(top, Matrix::unit_vector(f, n, j)).is_zero()) ++j;
    Matrix w = Matrix::unit_vector(f, n, j);
    for (std::size_t i = m; i-- > 0;) {
      Scalar f0 = cond(x, i);
      if (f0.is_zero()) continue;
      Matrix dw = dp[2 * m - 1 - 2 * i] * w;
      Scalar slope = cond(x + dw, i) - f0;
      require(!slope.is_zero(), ErrorCode::InternalCheckFailed, "flat correction");
      x = x - (f0 / slope) * dw;
    }
    return krylov_basis(pair.u, x, k);
  };
  Matrix x0 = detail::maximal_order_vector(pair.u, static_cast<int>(k), 0);
  Matrix l = make_singular(x0);
  Matrix socle = dp[2 * m] * l.column(0);
  Matrix lp;
  bool found = false;
  detail::VectorSweep sweep(f, n, 1);
  Matrix y;
  while (sweep.next(y)) {
    if (rank(hcat(socle, dp[2 * m] * y)) == 2) {
      lp = make_singular(y);
      found = true;
      break;
    }
  }
  require(found, ErrorCode::DecompositionFailed, "no second block generator");
  require(is_lagrangian(pair.space, l) && is_lagrangian(pair.space, lp) &&
              !det(pair.space.pairing(l, lp)).is_zero(),
          ErrorCode::InternalCheckFailed, "odd cell Lagrangians are not transverse");
  return {l, lp};
}

// A coprime split chi_u = p p# of the characteristic polynomial.
struct Extension {
  Polynomial p;
  Matrix l, lp;
};

namespace detail {

// Monic factors of q found without general factorization: linear factors with
// roots in the field, and t^2 - c with c a non-square root of F where
// gcd(q(t), q(-t)) = F(t^2). Returns (atoms with multiplicities, unfactored rest).
inline std::pair<std::vector<std::pair<Polynomial, int>>, Polynomial> visible_factors(const Polynomial& q) {
  const Field& f = q.field();
  std::vector<std::pair<Polynomial, int>> atoms;
  Polynomial rest = q.monic();
  for (const auto& r : roots_in_field(rest)) {
    Polynomial a = Polynomial::linear(r);
    int k = multiplicity(a, rest);
    atoms.emplace_back(a, k);
    rest = rest / a.pow(static_cast<unsigned>(k));
  }
  Polynomial e = gcd(rest, rest.negate_variable());
  if (e.degree() >= 2) {
    std::vector<Scalar> half;
    for (int i = 0; i <= e.degree(); i += 2) half.push_back(e.coeff(i));
    for (const auto& c : roots_in_field(Polynomial(f, half))) {
      Polynomial a = Polynomial(f, {-c, f.zero(), f.one()});
      int k = multiplicity(a, rest);
      if (k == 0) continue;
      atoms.emplace_back(a, k);
      rest = rest / a.pow(static_cast<unsigned>(k));
    }
  }
  return {atoms, rest};
}

// All splits q = p p# with gcd(p, p#) = 1 built from visible factors.
inline std::vector<Polynomial> coprime_splits(const Polynomial& q) {
  auto [atoms, rest] = visible_factors(q);
  std::vector<Polynomial> out;
  if (rest.degree() > 0 || q.coeff(0).is_zero()) return out;
  std::vector<std::pair<Polynomial, int>> chosen;
  std::vector<bool> used(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (used[i]) continue;
    Polynomial partner = reciprocal(atoms[i].first);
    if (partner == atoms[i].first) return out;
    std::size_t j = i + 1;
    while (j < atoms.size() && atoms[j].first != partner) ++j;
    if (j == atoms.size() || atoms[j].second != atoms[i].second) return out;
    used[i] = used[j] = true;
    chosen.push_back(atoms[i]);
  }
  if (chosen.empty() || chosen.size() > 8) return out;
  for (std::size_t mask = 0; mask < (std::size_t(1) << chosen.size()); ++mask) {
    Polynomial p = Polynomial::one(q.field());
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      Polynomial a = (mask >> i) & 1 ? reciprocal(chosen[i].first) : chosen[i].first;
      p = p * a.pow(static_cast<unsigned>(chosen[i].second));
    }
    out.push_back(p);
  }
  return out;
}

inline bool has_coprime_split(const Polynomial& m) { return !coprime_splits(m).empty(); }

}  // namespace detail

// Every coprime split chi_u = p p# visible without factorization, each with
// L = Ker p(u) and Lp = Ker p#(u).
inline std::vector<Extension> extension_candidates(const SPair& pair) {
  std::vector<Extension> out;
  for (const auto& p : detail::coprime_splits(char_poly(pair.u))) {
    Matrix l = kernel(eval(p, pair.u));
    Matrix lp = kernel(eval(reciprocal(p), pair.u));
    require(is_lagrangian(pair.space, l) && is_lagrangian(pair.space, lp), ErrorCode::InternalCheckFailed,
            "kernel of a coprime factor is not Lagrangian");
    out.push_back({p, l, lp});
  }
  return out;
}

inline std::optional<Extension> detect_extension(const SPair& pair) {
  auto all = extension_candidates(pair);
  if (all.empty()) return std::nullopt;
  return all.front();
}

// phi with phi^T K_B phi = K_A and phi^{-1} u_B phi = u_A, for two symplectic
// extensions of similar automorphisms.
inline Matrix isometry_between_extensions(const SPair& a, const Matrix& la, const Matrix& lpa, const SPair& b,
                                          const Matrix& lb, const Matrix& lpb) {
  require(a.dim() == b.dim(), ErrorCode::ShapeMismatch, "pairs of different dimension");
  require(is_stable(a.u, la) && is_stable(a.u, lpa) && is_stable(b.u, lb) && is_stable(b.u, lpb),
          ErrorCode::NotStable, "Lagrangians are not stable");
  Matrix ba = adapted_basis(a.space, la, lpa), bb = adapted_basis(b.space, lb, lpb);
  Matrix h = similarity_transform(restrict_to(a.u, la), restrict_to(b.u, lb));
  Matrix phi = bb * block_diagonal(h, sharp(h)) * inverse(ba);
  require(phi.transpose() * b.space.gram() * phi == a.space.gram() && b.u * phi == phi * a.u,
          ErrorCode::InternalCheckFailed, "transported map is not an isometry of pairs");
  return phi;
}

struct Fit {
  Matrix w;       // symplectic, fixes L pointwise, maps Lp onto u(L)
  SPair fitted;   // w^{-1} u w, which maps L onto Lp
};

inline Fit lagrangian_fit(const SPair& pair, const Matrix& l, const Matrix& lp) {
  Matrix ul = pair.u * l;
  Matrix s = pair.space.pairing(l, ul);
  require(!det(s).is_zero(), ErrorCode::Degenerate, "s(x, u y) is degenerate on L");
  Matrix from = adapted_basis(pair.space, l, lp);
  Matrix to = hcat(l, ul * inverse(s));
  Fit out;
  out.w = to * inverse(from);
  out.fitted = SPair(pair.space, inverse(out.w) * pair.u * out.w);
  require(same_span(out.fitted.u * l, lp) &&
              pair.space.pairing(l, out.fitted.u * l) == s,
          ErrorCode::InternalCheckFailed, "fit postconditions fail");
  return out;
}

}  // namespace symplinv
