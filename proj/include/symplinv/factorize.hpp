#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "symplinv/structure.hpp"

namespace symplinv {

struct Certificate;

// One step of a factorization transcript; `subs` holds the certificates of
// sub-problems solved along the way.
struct Step {
  std::string step;
  std::string rule;
  std::uint64_t seed = 0;
  std::string note;
  std::vector<Certificate> subs;
};

struct Certificate {
  SymplecticSpace space;
  Matrix target;
  std::vector<Matrix> factors;  // product in order equals target
  std::vector<Step> transcript;
};

// Largest factor count a certificate may use in the given dimension.
inline std::size_t factor_bound(std::size_t dim) {
  if (dim <= 2) return 1;
  return dim % 4 == 0 ? 4 : 5;
}

struct Verdict {
  bool ok = true;
  std::vector<std::string> reasons;
};

inline Verdict verify_certificate(const Certificate& c) {
  Verdict v;
  auto flag = [&](const std::string& r) {
    v.ok = false;
    v.reasons.push_back(r);
  };
  std::size_t n = c.space.dim();
  if (!c.target.is_square() || c.target.rows() != n) {
    flag("shape mismatch");
    return v;
  }
  if (!is_symplectic(c.space, c.target)) flag("target is not symplectic");
  for (std::size_t i = 0; i < c.factors.size(); ++i) {
    const Matrix& m = c.factors[i];
    if (!m.is_square() || m.rows() != n || !(m.field() == c.space.field())) {
      flag("factor " + std::to_string(i + 1) + " has the wrong shape");
      return v;
    }
    bool inv = is_involution(m);
    if (!inv) flag("factor " + std::to_string(i + 1) + " is not an involution");
    // For an involution F, F^T K F = K is equivalent to K F being alternating.
    bool symp = inv ? is_alternating(c.space.gram() * m) : is_symplectic(c.space, m);
    if (!symp) flag("factor " + std::to_string(i + 1) + " is not symplectic");
  }
  // The product is checked as (F_1 ... F_h)(F_{h+1} ... F_k) = target.
  std::size_t h = c.factors.size() / 2;
  Matrix left = c.space.identity(), right = c.space.identity();
  for (std::size_t i = 0; i < c.factors.size(); ++i) (i < h ? left : right) = (i < h ? left : right) * c.factors[i];
  if (!product_equals(left, right, c.target)) flag("product mismatch");
  if (c.factors.size() > factor_bound(n)) flag("count bound");
  return v;
}

namespace detail {

inline Matrix product(const std::vector<Matrix>& ms, const Matrix& id) {
  Matrix p = id;
  for (const auto& m : ms) p = p * m;
  return p;
}

// Factor lists of orthogonal summands (bases in ambient coordinates, factors in
// summand coordinates) combined position by position; short lists are padded
// with identities.
// `outer` maps the coordinates of the part bases to the ambient ones.
inline std::vector<Matrix> zip_summands(const std::vector<std::pair<Matrix, std::vector<Matrix>>>& parts,
                                        const Field& f, std::size_t dim, const Matrix* outer = nullptr,
                                        const Matrix* outer_inverse = nullptr) {
  std::size_t count = 0;
  std::vector<Matrix> bases;
  for (const auto& [b, list] : parts) {
    count = std::max(count, list.size());
    bases.push_back(b);
  }
  Matrix basis = hcat(bases, f, dim);
  Matrix binv = inverse(basis);
  if (outer) {
    basis = *outer * basis;
    binv = binv * *outer_inverse;
  }
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < count; ++i) {
    Matrix d(f, 0, 0);
    for (const auto& [b, list] : parts) d = block_diagonal(d, i < list.size() ? list[i] : Matrix::identity(f, b.cols()));
    out.push_back(basis * d * binv);
  }
  return out;
}

inline Certificate make_certificate(const SPair& pair, std::vector<Matrix> factors, std::vector<Step> steps) {
  Certificate c{pair.space, pair.u, std::move(factors), std::move(steps)};
  Verdict v = verify_certificate(c);
  require(v.ok, ErrorCode::InternalCheckFailed,
          "certificate fails verification: " + (v.reasons.empty() ? std::string("?") : v.reasons.front()));
  return c;
}

inline Matrix k2(const Field& f) { return standard_gram(f, 2); }

}  // namespace detail

// Frame adapted to a totally singular W with s(x, u y) nondegenerate on W:
// e spans W, g spans u(W) with s(e_i, g_j) = delta_ij, f spans (W + u(W))^perp.
// In the basis (e, f, g) the matrix of u reads [[0, 0, *], [0, N, *], [S, *, *]].
struct PullbackFrame {
  Matrix e, f, g;
  Matrix basis;
  Matrix s_gram;                 // S, the Gram of s(x, u y) on W
  SymplecticSpace residual_space;  // Gram of s on span(f)
  Matrix residual_endomorphism;  // N, in f-coordinates
};

inline PullbackFrame pullback_frame(const SPair& pair, const Matrix& w) {
  require(is_totally_singular(pair.space, w) && rank(w) == w.cols(), ErrorCode::NotTotallySingular,
          "subspace is not totally singular");
  PullbackFrame fr;
  fr.e = w;
  Matrix uw = pair.u * w;
  fr.s_gram = pair.space.pairing(w, uw);
  require(!det(fr.s_gram).is_zero(), ErrorCode::DegenerateForm, "s(x, u y) is degenerate on W");
  fr.g = uw * inverse(fr.s_gram);
  fr.f = kernel(pair.space.pairing(hcat(w, uw), pair.space.identity()));
  fr.basis = hcat(hcat(fr.e, fr.f), fr.g);
  fr.residual_space = SymplecticSpace(pair.space.pairing(fr.f, fr.f));
  fr.residual_endomorphism = solve(fr.basis, pair.u * fr.f).block(w.cols(), 0, fr.f.cols(), fr.f.cols());
  return fr;
}

// Involution i with i u stabilizing W, s(x, u y) = b(x, (i u) y) on W, and
// residual involution `residual` on span(f) (frame coordinates).
inline Matrix space_pullback(const SPair& pair, const Matrix& w, const Matrix& b_gram, const Matrix& residual) {
  const Field& fld = pair.field();
  PullbackFrame fr = pullback_frame(pair, w);
  std::size_t p = w.cols(), k = fr.f.cols();
  require(b_gram.is_square() && b_gram.rows() == p && is_alternating(b_gram) && !det(b_gram).is_zero(),
          ErrorCode::NotAlternating, "form on W is not symplectic");
  require(residual.is_square() && residual.rows() == k, ErrorCode::ShapeMismatch, "residual has the wrong size");
  require(is_involution(residual) && is_symplectic(fr.residual_space, residual), ErrorCode::NotInvolution,
          "residual is not a symplectic involution");
  Matrix t(fld, 2 * p + k, 2 * p + k);
  t.set_block(0, p + k, inverse(b_gram));
  t.set_block(p, p, residual);
  t.set_block(p + k, 0, b_gram);
  Matrix i = fr.basis * t * inverse(fr.basis);
  Matrix iu = i * pair.u;
  require(is_involution(i) && is_symplectic(pair.space, i) && is_stable(iu, w) &&
              b_gram * restrict_to(iu, w) == fr.s_gram,
          ErrorCode::InternalCheckFailed, "pullback involution fails its contract");
  return i;
}

// v1 v2 = v with both factors of characteristic polynomial (t - lambda)(t - 1/lambda).
inline std::pair<Matrix, Matrix> split_quadratic(const Matrix& v, const Scalar& lambda) {
  const Field& f = v.field();
  require(!lambda.is_zero() && !lambda.is_one() && !(-lambda).is_one(), ErrorCode::BadLambda, "lambda in {0, 1, -1}");
  require(v.is_square() && v.rows() == 2 && det(v).is_one(), ErrorCode::PreconditionViolated,
          "needs a 2x2 matrix of determinant 1");
  Matrix x = cyclic_vector(v);
  Matrix basis = hcat(lambda * x, v * x);
  Matrix c(f, 2, 2);
  c(0, 1) = -f.one();
  c(1, 0) = f.one();
  c(1, 1) = lambda + lambda.inv();
  Matrix v1 = basis * c * inverse(basis);
  Matrix v2 = inverse(v1) * v;
  return {v1, v2};
}

// Three involutions of the general linear group with product v, for v cyclic
// 3x3 of determinant +-1: a reflection j = id - 2 x phi^T (phi^T x = 1) is
// chosen so that j v has a palindromic characteristic polynomial, which is a
// linear condition on x, and j v is then split by two_involutions_gl.
inline std::vector<Matrix> cyclic3_involutions(const Matrix& v, std::uint64_t seed = 0) {
  const Field& f = v.field();
  require(v.is_square() && v.rows() == 3, ErrorCode::ShapeMismatch, "needs a 3x3 matrix");
  require(is_cyclic(v), ErrorCode::NotCyclic, "matrix is not cyclic");
  Scalar dv = det(v);
  require(dv.is_one() || (-dv).is_one(), ErrorCode::PreconditionViolated, "determinant is not +-1");
  Matrix id = Matrix::identity(f, 3);
  Scalar two = f.from_int(2);
  // p = t^3 + c2 t^2 + c1 t + c0 is palindromic with c0 = det(v) iff c1 = c0 c2.
  auto defect = [&](const Matrix& m) {
    Polynomial p = char_poly(m);
    return p.coeff(1) - dv * p.coeff(2);
  };
  detail::VectorSweep phis(f, 3, seed);
  Matrix phi;
  while (phis.next(phi)) {
    Matrix psi = phi.transpose() * v;
    auto jv = [&](const Matrix& x) { return v - two * (x * psi); };
    Scalar d0 = defect(jv(Matrix(f, 3, 1)));
    Matrix sys(f, 2, 3), rhs(f, 2, 1);
    for (std::size_t k = 0; k < 3; ++k) {
      sys(0, k) = phi(k, 0);
      sys(1, k) = defect(jv(Matrix::unit_vector(f, 3, k))) - d0;
    }
    rhs(0, 0) = f.one();
    rhs(1, 0) = -d0;
    Echelon ech = rref(hcat(sys, rhs));
    if (!ech.pivots.empty() && ech.pivots.back() == 3) continue;  // inconsistent
    Matrix x0(f, 3, 1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) x0(ech.pivots[r], 0) = ech.reduced(r, 3);
    Matrix ker = kernel(sys);
    detail::VectorSweep coeffs(f, ker.cols(), seed + 1, 16);
    std::vector<Matrix> tries{x0};
    Matrix c;
    while (coeffs.next(c)) tries.push_back(x0 + ker * c);
    for (const auto& x : tries) {
      Matrix j = id - two * (x * phi.transpose());
      Matrix w = j * v;
      if (!is_cyclic(w) || !is_palindromial(char_poly(w))) continue;
      InvolutionPair p = two_involutions_gl(w);
      std::vector<Matrix> out{j, p.j1, p.j2};
      require(is_involution(j) && j * p.j1 * p.j2 == v, ErrorCode::InternalCheckFailed, "cyclic3 product mismatch");
      return out;
    }
  }
  fail(ErrorCode::SearchExhausted, "no reflection making j v palindromic");
}

// Three factors for u extending v on (L, Lp), v cyclic with characteristic
// polynomial t^2 + alpha, alpha^2 != 1. A model u' = ext(lambda id) carries a
// Lagrangian W' on which s(x, u' y) has Gram diag(1, alpha); pulling W' back
// with the form making (i u')|W' the matrix [[0, -alpha], [1, 0]] gives an
// extension isometric to u.
inline Certificate three_refl_quadratic_extension(const SPair& pair, const Matrix& l, const Matrix& lp,
                                                  std::uint64_t seed = 0) {
  const Field& f = pair.field();
  require(is_stable(pair.u, l) && is_stable(pair.u, lp), ErrorCode::PreconditionViolated, "u is not an extension");
  Matrix v = restrict_to(pair.u, l);
  Polynomial p = char_poly(v);
  require(p.degree() == 2 && p.coeff(1).is_zero() && coprime_over_closure(p, reciprocal(p)) && is_cyclic(v),
          ErrorCode::PreconditionViolated, "needs a cyclic restriction with t^2 + a, a^2 != 1");
  Scalar alpha = p.coeff(0);
  Scalar lambda = first_candidate(f, [](const Scalar&) { return false; });
  Matrix id2 = Matrix::identity(f, 2);
  SPair model(pair.space, symplectic_extension(pair.space, l, lp, lambda * id2));
  InvolutionPair jp = two_involutions_sp_balanced(model);
  Matrix wl = lagrangian_with_form(model, {f.one(), alpha}, lambda);
  Matrix vprime(f, 2, 2);
  vprime(0, 1) = -alpha;
  vprime(1, 0) = f.one();
  Matrix a = Matrix::diagonal({f.one(), alpha}) * inverse(vprime);
  Matrix i1 = space_pullback(model, wl, a, Matrix(f, 0, 0));
  SPair moved(pair.space, i1 * model.u);
  Matrix wlp = kernel(eval(reciprocal(p), moved.u));
  Matrix phi = isometry_between_extensions(pair, l, lp, moved, wl, wlp);
  Matrix phinv = inverse(phi);
  std::vector<Matrix> factors{phinv * i1 * phi, phinv * jp.j1 * phi, phinv * jp.j2 * phi};
  Step st{"quadratic-extension", "pullback of a scalar extension model, transported by an isometry", seed,
          "lambda=" + lambda.to_string() + " p=" + p.to_string(), {}};
  return detail::make_certificate(pair, std::move(factors), {st});
}

inline Certificate three_refl_quadratic_extension(const SPair& pair, std::uint64_t seed = 0) {
  for (const auto& e : extension_candidates(pair)) {
    if (e.p.degree() == 2 && e.p.coeff(1).is_zero()) return three_refl_quadratic_extension(pair, e.l, e.lp, seed);
  }
  fail(ErrorCode::PreconditionViolated, "u is not an extension of an even quadratic coprime to its reciprocal");
}

Certificate factor(const SPair& pair, std::uint64_t seed = 0);

namespace detail {

inline bool beyond_paper(const Field& f) { return f.is_finite(); }

inline void require_dim4_field(const Field& f) {
  require(!f.is_finite() || f.modulus() >= 11, ErrorCode::UnsupportedField,
          "dimension 4 needs Q or F_p with p >= 11");
}

// Certificates for +-id and other involutions, or nullopt.
inline std::optional<Certificate> trivial_certificate(const SPair& pair) {
  if (pair.u.is_identity()) return make_certificate(pair, {}, {{"identity", "empty product", 0, "", {}}});
  if (is_involution(pair.u)) return make_certificate(pair, {pair.u}, {{"involution", "single factor", 0, "", {}}});
  return std::nullopt;
}

// Factors of an orthogonal sum of type IV cells: two per cell, zipped.
inline Certificate odd_cells_certificate(const SPair& pair, const std::vector<Cell>& cells, std::uint64_t seed) {
  std::vector<std::pair<Matrix, std::vector<Matrix>>> parts;
  for (const auto& c : cells) {
    auto [l, lp] = odd_cell_lagrangians(c.pair);
    InvolutionPair jp = two_involutions_sp(c.pair, l, lp);
    parts.push_back({c.basis, {jp.j1, jp.j2}});
  }
  return make_certificate(pair, zip_summands(parts, pair.field(), pair.dim()),
                          {{"odd-cells", "extension of a Jordan block similar to its inverse", seed, "", {}}});
}

}  // namespace detail

inline Certificate factor_dim4(const SPair& pair, std::uint64_t seed = 0) {
  require(pair.dim() == 4, ErrorCode::ShapeMismatch, "factor_dim4 needs dimension 4");
  if (auto t = detail::trivial_certificate(pair)) return *t;
  const Field& f = pair.field();
  detail::require_dim4_field(f);
  Rng rng(seed);
  CellDecomposition dec = cell_decomposition(pair, rng.fork());
  std::string note = detail::beyond_paper(f) ? "beyond-paper" : "";
  if (!dec.has_type_iv()) {
    Matrix l = hermitian_lagrangian(pair, rng.fork());
    Matrix s = form_s_u(pair, l).gram;
    Scalar alpha = det(s);
    Scalar lambda = first_candidate(f, [&](const Scalar& x) {
      Scalar c = x * x * alpha;
      return c.is_one() || (-c).is_one();
    });
    Matrix i = space_pullback(pair, l, lambda.inv() * detail::k2(f), Matrix(f, 0, 0));
    SPair moved(pair.space, i * pair.u);
    Polynomial p = char_poly(restrict_to(moved.u, l));
    Matrix lp = kernel(eval(reciprocal(p), moved.u));
    Certificate sub = three_refl_quadratic_extension(moved, l, lp, rng.fork());
    std::vector<Matrix> factors{i};
    for (const auto& m : sub.factors) factors.push_back(m);
    Step st{"dim4-pullback", "pullback on a Hermitian Lagrangian, then a quadratic extension", seed,
            "lambda=" + lambda.to_string() + (note.empty() ? "" : " " + note), {sub}};
    return detail::make_certificate(pair, std::move(factors), {st});
  }
  // u = u1 + eta id_2 with u1 not +-id.
  const Cell* odd = nullptr;
  std::vector<Matrix> rest;
  for (const auto& c : dec.cells) {
    if (!odd && c.type == CellType::IV && c.pair.dim() == 2) {
      odd = &c;
    } else {
      rest.push_back(c.basis);
    }
  }
  require(odd != nullptr, ErrorCode::InternalCheckFailed, "expected a two-dimensional odd cell");
  Scalar eta = f.from_int(odd->eta);
  Matrix b1 = hcat(rest, f, 4);
  Matrix u1 = eta * restrict_to(pair.u, b1);
  Scalar lambda = first_candidate(f, [](const Scalar&) { return false; });
  auto [v1, w1] = split_quadratic(u1, lambda);
  Matrix sb = symplectic_basis(odd->pair.space);
  Matrix c(f, 2, 2);
  c(0, 1) = -f.one();
  c(1, 0) = f.one();
  c(1, 1) = lambda + lambda.inv();
  Matrix v2 = sb * c * inverse(sb);
  Matrix basis = hcat(b1, odd->basis);
  Matrix binv = inverse(basis);
  Matrix x = eta * (basis * block_diagonal(v1, v2) * binv);
  Matrix y = basis * block_diagonal(w1, inverse(v2)) * binv;
  InvolutionPair px = two_involutions_sp_balanced(SPair(pair.space, x));
  InvolutionPair py = two_involutions_sp_balanced(SPair(pair.space, y));
  Step st{"dim4-odd-cell", "split of the regular part into two quadratic factors, each balanced", seed,
          "lambda=" + lambda.to_string() + (note.empty() ? "" : " " + note), {}};
  return detail::make_certificate(pair, {px.j1, px.j2, py.j1, py.j2}, {st});
}

// Output of the six-dimensional seed construction: u' = j1 j2 with
// s(x, u' y) = b(x, v y) on L, v cyclic of determinant 1 with minimal
// polynomial coprime to its reciprocal.
struct SeedPair {
  Matrix u_prime;
  Matrix v;  // in the coordinates of L's basis
  InvolutionPair involutions;
  std::size_t attempts = 0;
};

// E = S A - A# S for the F_3 parameters (a, b, c, d), A = diag(1, K_2).
inline Matrix f3_seed_matrix(const Field& f, long long a, long long b, long long c, long long d) {
  Matrix am = block_diagonal(Matrix::identity(f, 1), detail::k2(f));
  Matrix s = Matrix::from_ints(f, {{0, c, d}, {c, a, b}, {d, b, -a}});
  return s * am - sharp(am) * s;
}

namespace detail {

inline SeedPair assemble_seed(const SymplecticSpace& space, const Matrix& basis, const Matrix& a, const Matrix& s,
                              const Matrix& l2, const Matrix& lp2) {
  const Field& f = space.field();
  Matrix m = block_diagonal(a, sharp(a));
  SymplecticSpace k6 = SymplecticSpace::standard(f, 6);
  InvolutionPair jm = two_involutions_sp(SPair(k6, m), l2, lp2);
  Matrix p = Matrix::identity(f, 6);
  p.set_block(3, 0, s);
  Matrix t = basis * p;
  Matrix tinv = inverse(t);
  SeedPair out;
  out.u_prime = t * m * tinv;
  out.involutions = {t * jm.j1 * tinv, t * jm.j2 * tinv};
  return out;
}

}  // namespace detail

inline constexpr std::size_t kSeedBudget = 64;

inline SeedPair dim6_seed_pair(const SymplecticSpace& space, const Matrix& l, const Matrix& b_gram,
                               std::uint64_t seed = 0) {
  (void)seed;
  const Field& f = space.field();
  require(space.dim() == 6 && is_lagrangian(space, l), ErrorCode::PreconditionViolated, "needs a Lagrangian in dim 6");
  require(b_gram == b_gram.transpose() && !det(b_gram).is_zero(), ErrorCode::PreconditionViolated,
          "form on L is not symmetric nondegenerate");
  Matrix e6 = Matrix::identity(f, 6);
  auto cols = [&](std::initializer_list<std::size_t> idx) {
    std::vector<Matrix> c;
    for (auto i : idx) c.push_back(e6.column(i));
    return hcat(c, f, 6);
  };
  SeedPair out;
  if (f.is_finite() && f.modulus() == 3) {
    // Normalize b to +-I_3 by enumeration, then use the fixed parameters (1, 0, 1, 1).
    Matrix q(f, 3, 3);
    std::optional<Scalar> sign;
    for (std::uint64_t code = 0; code < 19683 && !sign; ++code) {
      std::uint64_t c = code;
      for (std::size_t i = 0; i < 9; ++i, c /= 3) q(i / 3, i % 3) = Scalar::residue(f, c % 3);
      Matrix d = q.transpose() * b_gram * q;
      if (d == Matrix::identity(f, 3)) sign = f.one();
      if (d == -Matrix::identity(f, 3)) sign = -f.one();
    }
    require(sign.has_value(), ErrorCode::ParameterSearchFailed, "form is not equivalent to +-I");
    Matrix lq = l * q;
    Matrix basis = hcat(lq, mixed_symplectic_basis(space, lq).g);
    Matrix a = block_diagonal(Matrix::identity(f, 1), detail::k2(f));
    Matrix s = Matrix::from_ints(f, {{0, 1, 1}, {1, 1, 0}, {1, 0, -1}});
    out = detail::assemble_seed(space, basis, a, s, cols({0, 1, 2}), cols({3, 4, 5}));
    if (!sign->is_one()) {
      out.u_prime = -out.u_prime;
      out.involutions.j1 = -out.involutions.j1;
    }
    out.v = q * f3_seed_matrix(f, 1, 0, 1, 1) * inverse(q);
    out.attempts = 1;
  } else {
    Matrix q = diagonalizing_basis(b_gram);
    Matrix d = q.transpose() * b_gram * q;
    Matrix lq = l * q;
    Matrix basis = hcat(lq, mixed_symplectic_basis(space, lq).g);
    bool done = false;
    CandidateStream lambdas(f);
    Scalar lambda;
    std::size_t attempts = 0;
    while (!done && attempts < kSeedBudget * kSeedBudget && lambdas.next(lambda)) {
      Scalar theta = lambda * d(0, 0) / d(2, 2);
      std::vector<Scalar> xs{f.one(), -f.one()};
      for (const auto& c : candidate_scalars(f, [](const Scalar&) { return false; }, kSeedBudget)) xs.push_back(c);
      for (const auto& x : xs) {
        ++attempts;
        Scalar x2 = x * x;
        if (x2 == -theta.inv() || x2 * x2 * x2 == theta.inv() * theta.inv() * theta.inv()) continue;
        Scalar beta = -(x2 * theta).inv();
        Scalar e = x * d(0, 0), dd = beta * d(1, 1);
        Matrix a = Matrix::diagonal({f.one(), lambda.inv(), lambda.inv()});
        Matrix s(f, 3, 3);
        s(0, 2) = s(2, 0) = e / (lambda.inv() - f.one());
        s(1, 1) = dd / (lambda.inv() - lambda);
        Matrix em = s * a - sharp(a) * s;
        Matrix v = inverse(d) * em;
        Polynomial p = char_poly(v);
        if (!coprime_over_closure(p, p.derivative()) || !coprime_over_closure(p, reciprocal(p))) continue;
        out = detail::assemble_seed(space, basis, a, s, cols({0, 1, 5}), cols({3, 4, 2}));
        out.v = q * v * inverse(q);
        out.attempts = attempts;
        done = true;
        break;
      }
    }
    require(done, ErrorCode::ParameterSearchFailed, "no admissible (lambda, x) within the budget");
  }
  require(space.pairing(l, out.u_prime * l) == b_gram * out.v && det(out.v).is_one() && is_cyclic(out.v),
          ErrorCode::InternalCheckFailed, "seed pair fails its contract");
  return out;
}

inline Certificate factor_dim6(const SPair& pair, std::uint64_t seed = 0) {
  require(pair.dim() == 6, ErrorCode::ShapeMismatch, "factor_dim6 needs dimension 6");
  if (auto t = detail::trivial_certificate(pair)) return *t;
  const Field& f = pair.field();
  Rng rng(seed);
  CellDecomposition dec = cell_decomposition(pair, rng.fork());
  if (!dec.has_type_iv()) {
    Matrix l = hermitian_lagrangian(pair, rng.fork());
    Matrix g = form_s_u(pair, l).gram;
    SeedPair sp = dim6_seed_pair(pair.space, l, g, rng.fork());
    Fit fit = lagrangian_fit(SPair(pair.space, sp.u_prime), l, pair.u * l);
    Matrix winv = inverse(fit.w);
    SPair rest(pair.space, inverse(pair.u) * fit.fitted.u);
    require(restrict_to(rest.u, l) == sp.v, ErrorCode::InternalCheckFailed, "fitted quotient does not act as v");
    Matrix lp = kernel(eval(reciprocal(char_poly(sp.v)), rest.u));
    std::vector<Matrix> ks = cyclic3_involutions(sp.v, rng.fork());
    std::vector<Matrix> factors{winv * sp.involutions.j1 * fit.w, winv * sp.involutions.j2 * fit.w};
    for (std::size_t i = ks.size(); i-- > 0;) factors.push_back(symplectic_extension(pair.space, l, lp, ks[i]));
    Step st{"dim6-seed", "two-reflectional seed fitted to a Hermitian Lagrangian, cofactor split in GL(L)", seed,
            "attempts=" + std::to_string(sp.attempts), {}};
    return detail::make_certificate(pair, std::move(factors), {st});
  }
  if (dec.cells.size() == 1) return detail::odd_cells_certificate(pair, dec.cells, seed);
  const Cell* odd = nullptr;
  std::vector<Matrix> rest;
  for (const auto& c : dec.cells) {
    if (!odd && c.type == CellType::IV && c.pair.dim() == 2) {
      odd = &c;
    } else {
      rest.push_back(c.basis);
    }
  }
  require(odd != nullptr, ErrorCode::InternalCheckFailed, "expected a two-dimensional odd cell");
  Matrix b1 = hcat(rest, f, 6);
  Certificate sub = factor_dim4(restrict_pair(pair, b1), rng.fork());
  std::vector<Matrix> first = sub.factors;
  if (first.empty()) first.push_back(Matrix::identity(f, 4));
  std::vector<std::pair<Matrix, std::vector<Matrix>>> parts{{b1, first}, {odd->basis, {odd->pair.u}}};
  Step st{"dim6-odd-cell", "sign cell absorbed into the first factor of the complement", seed, "", {sub}};
  return detail::make_certificate(pair, detail::zip_summands(parts, f, 6), {st});
}

enum class PlaneKind { Plane, AllTypeIV, InvolutionBlock };

struct PullbackPlane {
  PlaneKind kind = PlaneKind::Plane;
  Matrix plane;  // Plane: 2-dim totally singular, s(x, u y) symmetric nondegenerate
  Matrix block;  // InvolutionBlock: 4-dim regular u-stable subspace on which u is an involution
  CellDecomposition cells;
};

// The first two vectors of an s_{u,.}-orthogonal basis of a Hermitian Lagrangian.
inline Matrix hermitian_pullback_plane(const SPair& pair, const Matrix& lagrangian) {
  Matrix q = diagonalizing_basis(form_s_u(pair, lagrangian).gram);
  return lagrangian * q.columns(0, 2);
}

namespace detail {

// span(x, y) with s(x, y) = 0 and s(x, (u + u^-1) y) = 0 makes s_{u,P}
// symmetric; small sweep vectors keep the entries of the frame small.
inline std::optional<Matrix> direct_pullback_plane(const SPair& pair, std::uint64_t seed, std::size_t budget = 64) {
  const Field& f = pair.field();
  std::size_t n = pair.dim();
  Matrix sym = pair.u + inverse(pair.u);
  VectorSweep xs(f, n, seed, 8);
  Matrix x;
  std::size_t tried = 0;
  while (tried < budget && xs.next(x)) {
    Matrix row = x.transpose() * pair.space.gram();
    Matrix ker = kernel(vcat(row, row * sym));
    VectorSweep cs(f, ker.cols(), seed + 1, 4);
    Matrix c;
    while (tried < budget && cs.next(c)) {
      ++tried;
      Matrix p = hcat(x, ker * c);
      if (rank(p) < 2) continue;
      if (!det(pair.space.pairing(p, pair.u * p)).is_zero()) return p;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline PullbackPlane find_pullback_plane(const SPair& pair, std::uint64_t seed = 0) {
  const Field& f = pair.field();
  require(pair.dim() >= 8, ErrorCode::PreconditionViolated, "plane search needs dimension >= 8");
  PullbackPlane out;
  out.cells = cell_decomposition(pair, seed);
  std::vector<Matrix> rp, ep;
  for (const auto& c : out.cells.cells) (c.type == CellType::IV ? ep : rp).push_back(c.basis);
  Matrix vr = hcat(rp, f, pair.dim()), ve = hcat(ep, f, pair.dim());
  if (vr.cols() == 0) {
    out.kind = PlaneKind::AllTypeIV;
    return out;
  }
  if (vr.cols() >= 4 || !is_involution(restrict_to(pair.u, ve))) {
    if (auto p = detail::direct_pullback_plane(pair, seed + 3)) {
      out.plane = *p;
      return out;
    }
  }
  Matrix w = vr * hermitian_lagrangian(restrict_pair(pair, vr), seed + 1);
  if (vr.cols() >= 4) {
    out.plane = hermitian_pullback_plane(pair, w);
    return out;
  }
  Matrix ue = restrict_to(pair.u, ve);
  if (!is_involution(ue)) {
    detail::VectorSweep sweep(f, ve.cols(), seed + 2);
    Matrix x;
    while (sweep.next(x)) {
      Matrix xa = ve * x;
      if (!pair.space.form(xa, pair.u * xa).is_zero()) {
        out.plane = hcat(w, xa);
        return out;
      }
    }
    fail(ErrorCode::SearchExhausted, "no vector with s(x, u x) != 0 in the odd part");
  }
  std::vector<Matrix> picked;
  Matrix id = Matrix::identity(f, ve.cols());
  for (const Matrix& eig : {kernel(ue - id), kernel(ue + id)}) {
    if (eig.cols() == 0) continue;
    Matrix ea = ve * eig;
    Matrix sb = ea * symplectic_basis(SymplecticSpace(pair.space.pairing(ea, ea)));
    std::size_t half = sb.cols() / 2;
    for (std::size_t i = 0; i < half && picked.size() < 4; ++i) {
      picked.push_back(sb.column(i));
      picked.push_back(sb.column(half + i));
    }
  }
  require(picked.size() == 4, ErrorCode::SearchExhausted, "no regular 4-dim block in the involution part");
  out.kind = PlaneKind::InvolutionBlock;
  out.block = hcat(picked, f, pair.dim());
  return out;
}

namespace detail {

inline Certificate factor_induction(const SPair& pair, std::uint64_t seed) {
  const Field& f = pair.field();
  Rng rng(seed);
  PullbackPlane pp = find_pullback_plane(pair, rng.fork());
  if (pp.kind == PlaneKind::AllTypeIV) return odd_cells_certificate(pair, pp.cells.cells, seed);
  if (pp.kind == PlaneKind::InvolutionBlock) {
    Matrix rest = orthogonal_complement(pair.space, pp.block);
    Certificate sub = factor(restrict_pair(pair, rest), rng.fork());
    std::vector<Matrix> first = sub.factors;
    if (first.empty()) first.push_back(Matrix::identity(f, rest.cols()));
    std::vector<std::pair<Matrix, std::vector<Matrix>>> parts{{rest, first},
                                                               {pp.block, {restrict_to(pair.u, pp.block)}}};
    Step st{"involution-block", "involution block absorbed into the first factor of the complement", seed, "", {sub}};
    return make_certificate(pair, zip_summands(parts, f, pair.dim()), {st});
  }
  PullbackFrame fr = pullback_frame(pair, pp.plane);
  SPair residual(fr.residual_space, fr.residual_endomorphism);
  std::uint64_t sub_seed = rng.fork();
  Certificate sub = factor(residual, sub_seed);
  std::size_t r = sub.factors.size(), k = fr.f.cols();
  Matrix j1 = r > 0 ? sub.factors[0] : residual.space.identity();
  std::vector<Matrix> tail(sub.factors.begin() + (r > 0 ? 1 : 0), sub.factors.end());
  Polynomial chi_tail = char_poly(product(tail, residual.space.identity()));
  Scalar alpha = det(fr.s_gram);
  Scalar lambda = first_candidate(f, [&](const Scalar& x) {
    Scalar c = x * x * alpha;
    if (c.is_one() || (-c).is_one()) return true;
    return !coprime_over_closure(Polynomial(f, {c, f.zero(), f.one()}), chi_tail);
  });
  Matrix i = space_pullback(pair, pp.plane, lambda.inv() * k2(f), j1);
  // Work in the frame (e, f, g): there i u is block upper triangular with
  // diagonal blocks (A^-1 S, R N, *), and the summand complementary to the
  // plane's block is the graph of the Sylvester solution X over span(f).
  Matrix binv = inverse(fr.basis);
  Matrix wf = binv * i * pair.u * fr.basis;
  SymplecticSpace frame_space(fr.basis.transpose() * pair.space.gram() * fr.basis);
  Matrix x = solve_sylvester(wf.block(0, 0, 2, 2), wf.block(2, 2, k, k), -wf.block(0, 2, 2, k));
  Matrix basis1 = vcat(vcat(x, Matrix::identity(f, k)), Matrix(f, 2, k));
  Matrix y = -(inverse(fr.residual_space.gram()) * x.transpose());
  Matrix basis0(f, k + 4, 4);
  basis0.set_block(0, 0, Matrix::identity(f, 2));
  basis0.set_block(2, 2, y);
  basis0.set_block(k + 2, 2, Matrix::identity(f, 2));
  SPair pair0 = restrict_pair(SPair(frame_space, wf), basis0);
  Matrix l0 = Matrix::identity(f, 4).columns(0, 2);
  Polynomial p0 = char_poly(restrict_to(pair0.u, l0));
  Matrix lp0 = kernel(eval(reciprocal(p0), pair0.u));
  Certificate three = three_refl_quadratic_extension(pair0, l0, lp0, rng.fork());
  std::vector<std::pair<Matrix, std::vector<Matrix>>> parts{{basis0, three.factors}, {basis1, tail}};
  std::vector<Matrix> factors{i};
  for (auto& m : zip_summands(parts, f, pair.dim(), &fr.basis, &binv)) factors.push_back(std::move(m));
  Step st{"induction-pullback", "space pullback on a singular plane with the first residual factor", seed,
          "lambda=" + lambda.to_string(), {sub, three}};
  return make_certificate(pair, std::move(factors), {st});
}

}  // namespace detail

// Verified factorization into at most 4 (dim = 0 mod 4) or 5 (dim = 2 mod 4)
// symplectic involutions.
inline Certificate factor(const SPair& pair, std::uint64_t seed) {
  require(pair.dim() >= 2, ErrorCode::ShapeMismatch, "dimension must be at least 2");
  if (auto t = detail::trivial_certificate(pair)) return *t;
  require(pair.dim() != 2, ErrorCode::NotReflectional, "in dimension 2 only +-id are products of involutions");
  if (pair.dim() == 4) return factor_dim4(pair, seed);
  if (pair.dim() == 6) return factor_dim6(pair, seed);
  return detail::factor_induction(pair, seed);
}

}  // namespace symplinv
