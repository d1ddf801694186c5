#include <gtest/gtest.h>

#include "symplinv/structure.hpp"

using namespace symplinv;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InternalCheckFailed;
}

Matrix rand_vec(Rng& rng, const Field& f, std::size_t n) {
  Matrix v(f, n, 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = rng.scalar(f, 3);
  return v;
}

Matrix random_symplectic(Rng& rng, const SymplecticSpace& s, int count) {
  Matrix m = s.identity();
  for (int i = 0; i < count; ++i) m = m * transvection(s, rand_vec(rng, s.field(), s.dim()), rng.nonzero_scalar(s.field(), 2));
  return m;
}

Matrix conj(const Matrix& g, const Matrix& m) { return g * m * inverse(g); }

// Random cyclic matrix with a palindromic minimal polynomial of degree d.
Matrix random_palindromic_cyclic(Rng& rng, const Field& f, std::size_t d) {
  // p = t^d + c_1 t^{d-1} + ... with c_i = eps c_{d-i}, eps = p(0) = +-1 when d is even, built from a palindromic half.
  for (;;) {
    std::vector<Scalar> c(d + 1, f.zero());
    c[d] = f.one();
    Scalar eps = (d % 2 == 1 || rng.below(2) == 0) ? f.one() : -f.one();
    if (d % 2 == 1) eps = rng.below(2) == 0 ? f.one() : -f.one();
    c[0] = eps;
    for (std::size_t i = 1; 2 * i < d; ++i) {
      c[i] = rng.scalar(f, 3);
      c[d - i] = eps * c[i];
    }
    if (d % 2 == 0 && d > 0) {
      if (eps.is_one()) {
        c[d / 2] = rng.scalar(f, 3);
      } else {
        c[d / 2] = f.zero();  // middle coefficient must equal its own negative
      }
    }
    Polynomial p(f, c);
    if (!is_palindromial(p)) continue;
    Matrix g(f, d, d);
    do {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.scalar(f, 1);
    } while (det(g).is_zero());
    return conj(g, companion(p));
  }
}

void expect_reassembles(const SPair& pair, const CellDecomposition& dec) {
  std::size_t total = 0;
  std::vector<Matrix> us;
  Matrix u(pair.field(), 0, 0);
  for (const auto& c : dec.cells) {
    total += c.pair.dim();
    u = block_diagonal(u, c.pair.u);
    EXPECT_TRUE(is_symplectic(c.pair.space, c.pair.u));
  }
  ASSERT_EQ(total, pair.dim());
  Matrix b = dec.basis(pair.field(), pair.dim());
  EXPECT_EQ(b * u * inverse(b), pair.u);
  // pairwise orthogonal cells
  for (std::size_t i = 0; i < dec.cells.size(); ++i)
    for (std::size_t j = i + 1; j < dec.cells.size(); ++j)
      EXPECT_TRUE(pair.space.pairing(dec.cells[i].basis, dec.cells[j].basis).is_zero());
}

void expect_tag_pattern(const Cell& c) {
  auto rcf = invariant_factors(c.pair.u);
  const Field& f = c.pair.field();
  switch (c.type) {
    case CellType::I:
    case CellType::II:
      ASSERT_EQ(rcf.factors.size(), 1u);
      EXPECT_TRUE(is_palindromial(rcf.factors[0]));
      EXPECT_FALSE(rcf.factors[0].eval(f.one()).is_zero());
      EXPECT_FALSE(rcf.factors[0].eval(-f.one()).is_zero());
      break;
    case CellType::III:
      ASSERT_EQ(rcf.factors.size(), 1u);
      EXPECT_EQ(rcf.factors[0], Polynomial::linear(f.from_int(c.eta)).pow(static_cast<unsigned>(c.pair.dim())));
      EXPECT_EQ(c.pair.dim() % 2, 0u);
      break;
    case CellType::IV:
      ASSERT_EQ(rcf.factors.size(), 2u);
      EXPECT_EQ(rcf.factors[0], rcf.factors[1]);
      EXPECT_EQ(rcf.factors[0], Polynomial::linear(f.from_int(c.eta)).pow(static_cast<unsigned>(c.block)));
      EXPECT_EQ(c.block % 2, 1u);
      break;
  }
}

const std::vector<Field> kFields{Field::rationals(), Field::prime(3), Field::prime(7)};

// Orthogonal sums of small blocks with prescribed Jordan structure, conjugated by a random isometry.
SPair structured_pair(Rng& rng, const Field& f, int variant) {
  auto sp2 = [&](const std::vector<long long>& m) { return Matrix::from_ints(f, {{m[0], m[1]}, {m[2], m[3]}}); };
  Matrix u(f, 0, 0);
  switch (variant % 4) {
    case 0:  // type III (t-1)^2, type IV id_2, a quarter turn
      u = block_diagonal(block_diagonal(sp2({1, 1, 0, 1}), sp2({1, 0, 0, 1})), sp2({0, -1, 1, 0}));
      break;
    case 1:  // -(unipotent) and +-id
      u = block_diagonal(block_diagonal(sp2({-1, 1, 0, -1}), sp2({-1, 0, 0, -1})), sp2({1, 0, 0, 1}));
      break;
    case 2: {  // a 6-dim type IV with Jordan blocks of size 3: extension of a 3x3 unipotent block
      Matrix j = Matrix::from_ints(f, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}});
      u = block_diagonal(j, sharp(j));
      break;
    }
    default: {
      Matrix a = Matrix::from_ints(f, {{2, 1}, {0, 2}});
      if (f.is_finite() && f.modulus() == 3) a = Matrix::from_ints(f, {{0, 1}, {-1, 1}});
      u = block_diagonal(a, sharp(a));
      break;
    }
  }
  // u is block-diagonal either for the orthogonal sum of K_2's or for K_{2n}: pick the matching Gram.
  Matrix gram = (variant % 4 <= 1) ? block_diagonal(block_diagonal(standard_gram(f, 2), standard_gram(f, 2)), standard_gram(f, 2))
                                   : standard_gram(f, u.rows());
  SymplecticSpace s(gram);
  Matrix g = random_symplectic(rng, s, 6);
  return SPair(s, conj(g, u));
}

}  // namespace

TEST(CellDecomposition, Examples) {
  Field q = Field::rationals();
  auto dec = cell_decomposition(SPair(SymplecticSpace::standard(q, 4), Matrix::identity(q, 4)));
  ASSERT_EQ(dec.cells.size(), 2u);
  for (const auto& c : dec.cells) {
    EXPECT_EQ(c.type, CellType::IV);
    EXPECT_EQ(c.pair.dim(), 2u);
    EXPECT_EQ(c.eta, 1);
  }
  auto quarter = cell_decomposition(SPair(SymplecticSpace::standard(q, 2), Matrix::from_ints(q, {{0, -1}, {1, 0}})));
  ASSERT_EQ(quarter.cells.size(), 1u);
  EXPECT_EQ(quarter.cells[0].type, CellType::I);
  auto hyper = cell_decomposition(SPair(SymplecticSpace::standard(q, 2), Matrix::diagonal({q.from_int(2), q.from_ratio(1, 2)})));
  ASSERT_EQ(hyper.cells.size(), 1u);
  EXPECT_EQ(hyper.cells[0].type, CellType::II);
}

TEST(CellDecomposition, RandomElementsReassemble) {
  for (const Field& f : kFields) {
    Rng rng(31);
    for (int i = 0; i < 15; ++i) {
      SymplecticSpace s = SymplecticSpace::standard(f, 2 * static_cast<std::size_t>(rng.range(1, 4)));
      SPair pr(s, random_symplectic(rng, s, 10));
      auto dec = cell_decomposition(pr, 5);
      expect_reassembles(pr, dec);
      for (const auto& c : dec.cells) expect_tag_pattern(c);
    }
  }
}

TEST(CellDecomposition, StructuredElements) {
  for (const Field& f : kFields) {
    Rng rng(37);
    for (int v = 0; v < 8; ++v) {
      SPair pr = structured_pair(rng, f, v);
      auto dec = cell_decomposition(pr, 3);
      expect_reassembles(pr, dec);
      for (const auto& c : dec.cells) expect_tag_pattern(c);
    }
  }
}

TEST(SplitOffSingular, BlockTriangularModel) {
  Field q = Field::rationals();
  // Mixed basis (e, f1, f2, g) with Gram [[0,0,1],[0,K_2,0],[-1,0,0]]; u = [[A,*,*],[0,B,*],[0,0,A^#]].
  SymplecticSpace s(mixed_gram(q, 1, 1));
  Matrix b = Matrix::from_ints(q, {{0, -1}, {1, 0}});
  Matrix base = block_diagonal(block_diagonal(Matrix::from_ints(q, {{2}}), b), Matrix::diagonal({q.from_ratio(1, 2)}));
  Rng rng(41);
  // Conjugating by an isometry that fixes e keeps W = span(e) stable.
  Matrix e = Matrix::unit_vector(q, 4, 0);
  Matrix g = s.identity();
  for (int i = 0; i < 4; ++i) {
    // transvections along vectors orthogonal to e fix e
    Matrix perp = orthogonal_complement(s, e);
    Matrix w = perp * rand_vec(rng, q, perp.cols());
    g = g * transvection(s, w, q.one());
  }
  SPair pr(s, conj(g, base));
  ASSERT_TRUE(is_stable(pr.u, e));
  SingularSplit sp = split_off_singular(pr, e);
  EXPECT_EQ(char_poly(sp.pair0.u), Polynomial::linear(q.from_int(2)) * Polynomial::linear(q.from_ratio(1, 2)));
  EXPECT_NO_THROW(similarity_transform(sp.pair1.u, b));
  ASSERT_TRUE(sp.complement.has_value());
  EXPECT_TRUE(is_lagrangian(sp.pair0.space, sp.lagrangian));
  EXPECT_TRUE(pr.space.pairing(sp.basis0, sp.basis1).is_zero());
}

TEST(SplitOffSingular, Edges) {
  Field q = Field::rationals();
  SymplecticSpace s = SymplecticSpace::standard(q, 4);
  Matrix u = Matrix::from_ints(q, {{0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}});
  SPair pr(s, u);
  SingularSplit sp = split_off_singular(pr, Matrix(q, 4, 0));
  EXPECT_EQ(sp.basis1.cols(), 4u);
  EXPECT_EQ(sp.basis0.cols(), 0u);
  SPair id(s, s.identity());
  EXPECT_EQ(code_of([&] { split_off_singular(id, Matrix::unit_vector(q, 4, 0)); }), ErrorCode::CoprimalityViolated);
}

TEST(HermitianLagrangian, Examples) {
  Field q = Field::rationals();
  SymplecticSpace s2 = SymplecticSpace::standard(q, 2);
  SPair quarter(s2, Matrix::from_ints(q, {{0, -1}, {1, 0}}));
  Matrix l = hermitian_lagrangian(quarter);
  EXPECT_EQ(l.cols(), 1u);
  EXPECT_FALSE(form_s_u(quarter, l).gram.is_zero());
  SPair unip(s2, Matrix::from_ints(q, {{1, 1}, {0, 1}}));
  Matrix lu = hermitian_lagrangian(unip);
  EXPECT_TRUE(form_s_u(unip, lu).nondegenerate);
  EXPECT_EQ(code_of([&] { hermitian_lagrangian(SPair(SymplecticSpace(block_diagonal(standard_gram(q, 2), standard_gram(q, 2))),
                                                     block_diagonal(Matrix::from_ints(q, {{0, -1}, {1, 0}}), Matrix::identity(q, 2)))); }),
            ErrorCode::OddCellPresent);
}

TEST(HermitianLagrangian, RandomAndStructured) {
  for (const Field& f : kFields) {
    Rng rng(43);
    int checked = 0;
    for (int i = 0; i < 20; ++i) {
      SymplecticSpace s = SymplecticSpace::standard(f, 2 * static_cast<std::size_t>(rng.range(1, 4)));
      SPair pr(s, random_symplectic(rng, s, 10));
      if (cell_decomposition(pr).has_type_iv()) continue;
      Matrix l = hermitian_lagrangian(pr);
      FormInfo fi = form_s_u(pr, l);
      EXPECT_TRUE(is_lagrangian(s, l));
      EXPECT_TRUE(fi.symmetric);
      EXPECT_TRUE(fi.nondegenerate);
      ++checked;
    }
    EXPECT_GT(checked, 5);
  }
}

TEST(LagrangianWithForm, HyperbolicBlock) {
  Field q = Field::rationals();
  SymplecticSpace s2 = SymplecticSpace::standard(q, 2);
  // M from the construction: [[0,-1],[1,5/2]] has char poly (t-2)(t-1/2)
  Matrix m(q, 2, 2);
  m(0, 1) = -q.one();
  m(1, 0) = q.one();
  m(1, 1) = q.from_ratio(5, 2);
  EXPECT_EQ(char_poly(m), Polynomial::linear(q.from_int(2)) * Polynomial::linear(q.from_ratio(1, 2)));
  EXPECT_TRUE(is_symplectic(s2, m));
  SPair pr(s2, m);
  Matrix l = lagrangian_with_form(pr, {q.one()}, q.from_int(2));
  EXPECT_EQ(s2.form(l, m * l), q.one());
  EXPECT_EQ(code_of([&] { lagrangian_with_form(pr, {q.zero()}, q.from_int(2)); }), ErrorCode::ZeroTarget);
  EXPECT_EQ(code_of([&] { lagrangian_with_form(SPair(s2, s2.identity()), {q.one()}, q.from_int(2)); }),
            ErrorCode::NotAnnihilated);
}

TEST(LagrangianWithForm, QuarterTurnOverF3) {
  Field f3 = Field::prime(3);
  SymplecticSpace s2 = SymplecticSpace::standard(f3, 2);
  SPair pr(s2, Matrix::from_ints(f3, {{0, -1}, {1, 0}}));
  for (long long a : {1, -1}) {
    Matrix l = lagrangian_with_form(pr, {f3.from_int(a)}, f3.from_int(1));
    EXPECT_EQ(s2.form(l, pr.u * l), f3.from_int(a));
  }
}

TEST(LagrangianWithForm, RandomTargetsInDim6) {
  for (const Field& f : {Field::rationals(), Field::prime(7)}) {
    Rng rng(47);
    SymplecticSpace s = SymplecticSpace::standard(f, 6);
    for (int i = 0; i < 10; ++i) {
      Scalar lam = f.from_int(3);
      Matrix u = conj(random_symplectic(rng, s, 6), Matrix::diagonal({lam, lam, lam, lam.inv(), lam.inv(), lam.inv()}));
      SPair pr(s, u);
      std::vector<Scalar> t{rng.nonzero_scalar(f), rng.nonzero_scalar(f), rng.nonzero_scalar(f)};
      Matrix l = lagrangian_with_form(pr, t, lam);
      EXPECT_EQ(s.pairing(l, u * l), Matrix::diagonal(t));
    }
  }
}

TEST(TwoInvolutionsGl, Examples) {
  Field q = Field::rationals();
  Matrix v = Matrix::from_ints(q, {{0, -1}, {1, 0}});
  InvolutionPair p = two_involutions_gl(v);
  EXPECT_EQ(p.j1 * p.j2, v);
  // In the cyclic basis (b, vb) the reversal is the swap and tau = v sigma is diag(-1, 1).
  Matrix b = invariant_factors(v).basis;
  EXPECT_EQ(inverse(b) * p.j2 * b, Matrix::from_ints(q, {{0, 1}, {1, 0}}));
  EXPECT_EQ(inverse(b) * p.j1 * b, Matrix::from_ints(q, {{-1, 0}, {0, 1}}));
  InvolutionPair id = two_involutions_gl(Matrix::identity(q, 3));
  EXPECT_TRUE(id.j1.is_identity());
  EXPECT_TRUE(id.j2.is_identity());
  EXPECT_EQ(code_of([&] { two_involutions_gl(Matrix::from_ints(q, {{2, 0}, {0, 3}})); }), ErrorCode::NotSimilarToInverse);
}

TEST(TwoInvolutionsGl, PalindromicCyclicProperty) {
  for (const Field& f : kFields) {
    Rng rng(53);
    for (int i = 0; i < 60; ++i) {
      std::size_t d = static_cast<std::size_t>(rng.range(2, 8));
      Matrix v = random_palindromic_cyclic(rng, f, d);
      InvolutionPair p = two_involutions_gl(v);
      EXPECT_TRUE((p.j2 * p.j2).is_identity());
      EXPECT_TRUE(((v * p.j2) * (v * p.j2)).is_identity());
      EXPECT_EQ(p.j1 * p.j2, v);
    }
  }
}

TEST(TwoInvolutionsSp, Examples) {
  Field q = Field::rationals();
  SymplecticSpace s4 = SymplecticSpace::standard(q, 4);
  Matrix l = s4.identity().columns(0, 2), lp = s4.identity().columns(2, 2);
  Matrix quarter = Matrix::from_ints(q, {{0, -1}, {1, 0}});
  SPair ext(s4, symplectic_extension(s4, l, lp, quarter));
  InvolutionPair p = two_involutions_sp(ext, l, lp);
  for (const Matrix& j : {p.j1, p.j2}) {
    EXPECT_TRUE(is_involution(j));
    EXPECT_TRUE(is_symplectic(s4, j));
  }
  EXPECT_EQ(p.j1 * p.j2, ext.u);
  SPair minus(s4, -s4.identity());
  InvolutionPair m = two_involutions_sp(minus, l, lp);
  EXPECT_EQ(m.j1 * m.j2, -s4.identity());
  SymplecticSpace s2 = SymplecticSpace::standard(q, 2);
  SPair hyper(s2, Matrix::diagonal({q.from_int(2), q.from_ratio(1, 2)}));
  EXPECT_EQ(code_of([&] { two_involutions_sp(hyper, s2.identity().column(0), s2.identity().column(1)); }),
            ErrorCode::NotSimilarToInverse);
}

TEST(TwoInvolutionsSpBalanced, Examples) {
  Field q = Field::rationals();
  SymplecticSpace s4 = SymplecticSpace::standard(q, 4);
  Scalar two = q.from_int(2), half = q.from_ratio(1, 2);
  SPair pr(s4, Matrix::diagonal({two, two, half, half}));
  auto [l, lp] = balanced_lagrangians(pr);
  Matrix e1 = Matrix::unit_vector(q, 4, 0), e2 = Matrix::unit_vector(q, 4, 1);
  Matrix f1 = Matrix::unit_vector(q, 4, 2), f2 = Matrix::unit_vector(q, 4, 3);
  EXPECT_TRUE(same_span(l, hcat(e1, f2)));
  EXPECT_TRUE(same_span(lp, hcat(e2, f1)));
  InvolutionPair p = two_involutions_sp_balanced(pr);
  EXPECT_EQ(p.j1 * p.j2, pr.u);
  SymplecticSpace s2 = SymplecticSpace::standard(q, 2);
  EXPECT_EQ(code_of([&] { two_involutions_sp_balanced(SPair(s2, Matrix::diagonal({two, half}))); }),
            ErrorCode::CellParityViolated);
  EXPECT_EQ(code_of([&] { two_involutions_sp_balanced(SPair(s2, Matrix::from_ints(q, {{1, 1}, {0, 1}}))); }),
            ErrorCode::EigenvaluePMOne);
}

TEST(TwoInvolutionsSpBalanced, RandomConjugates) {
  for (const Field& f : {Field::rationals(), Field::prime(7), Field::prime(11)}) {
    Rng rng(59);
    SymplecticSpace s = SymplecticSpace::standard(f, 8);
    for (int i = 0; i < 8; ++i) {
      // Two Jordan blocks of size 2 for the eigenvalue 2, extended.
      Scalar a = f.from_int(2);
      Matrix ja = Matrix::from_ints(f, {{1, 1}, {0, 1}});
      Matrix v = block_diagonal(a * ja, a * ja);
      Matrix u = block_diagonal(v, sharp(v));
      Matrix g = random_symplectic(rng, s, 8);
      SPair pr(s, conj(g, u));
      InvolutionPair p = two_involutions_sp_balanced(pr);
      EXPECT_TRUE(is_involution(p.j1) && is_involution(p.j2));
      EXPECT_TRUE(is_symplectic(s, p.j1) && is_symplectic(s, p.j2));
      EXPECT_EQ(p.j1 * p.j2, pr.u);
    }
  }
}

TEST(OddCellLagrangians, TypeIVCells) {
  for (const Field& f : kFields) {
    Rng rng(61);
    for (std::size_t k : {1u, 3u, 5u}) {
      Matrix j = Matrix::identity(f, k);
      for (std::size_t i = 0; i + 1 < k; ++i) j(i, i + 1) = f.one();
      for (int eta : {1, -1}) {
        Matrix u = block_diagonal(f.from_int(eta) * j, sharp(f.from_int(eta) * j));
        SymplecticSpace s = SymplecticSpace::standard(f, 2 * k);
        SPair pr(s, conj(random_symplectic(rng, s, 8), u));
        auto [l, lp] = odd_cell_lagrangians(pr);
        InvolutionPair p = two_involutions_sp(pr, l, lp);
        EXPECT_EQ(p.j1 * p.j2, pr.u);
      }
    }
  }
}

TEST(DetectExtension, Examples) {
  Field q = Field::rationals();
  SymplecticSpace s4 = SymplecticSpace::standard(q, 4);
  Matrix a = companion(Polynomial::linear(q.from_int(2)).pow(2));
  SPair ext(s4, block_diagonal(a, sharp(a)));
  auto d = detect_extension(ext);
  ASSERT_TRUE(d.has_value());
  EXPECT_TRUE(d->p == Polynomial::linear(q.from_int(2)).pow(2) || d->p == Polynomial::linear(q.from_ratio(1, 2)).pow(2));
  EXPECT_TRUE(is_totally_singular(s4, d->l));
  EXPECT_TRUE(is_stable(ext.u, d->l));
  Matrix c = companion(Polynomial::from_ints(q, {1, 0, 1}));
  EXPECT_FALSE(detect_extension(SPair(s4, block_diagonal(c, sharp(c)))).has_value());
  EXPECT_FALSE(detect_extension(SPair(s4, s4.identity())).has_value());
}

TEST(DetectExtension, EvenQuadraticAtoms) {
  Field q = Field::rationals();
  SymplecticSpace s4 = SymplecticSpace::standard(q, 4);
  Matrix a = companion(Polynomial::from_ints(q, {2, 0, 1}));
  Rng rng(67);
  SPair pr(s4, conj(random_symplectic(rng, s4, 6), block_diagonal(a, sharp(a))));
  auto all = extension_candidates(pr);
  ASSERT_EQ(all.size(), 2u);
  for (const auto& e : all) {
    EXPECT_EQ(e.p * reciprocal(e.p), char_poly(pr.u));
    EXPECT_TRUE(!det(s4.pairing(e.l, e.lp)).is_zero());
  }
}

TEST(IsometryBetweenExtensions, Transport) {
  for (const Field& f : {Field::rationals(), Field::prime(7)}) {
    Rng rng(71);
    SymplecticSpace s = SymplecticSpace::standard(f, 6);
    Matrix l = s.identity().columns(0, 3), lp = s.identity().columns(3, 3);
    for (int i = 0; i < 10; ++i) {
      Matrix v(f, 3, 3), h(f, 3, 3);
      do {
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t c = 0; c < 3; ++c) {
            v(r, c) = rng.scalar(f, 2);
            h(r, c) = rng.scalar(f, 2);
          }
      } while (det(v).is_zero() || det(h).is_zero());
      SPair a(s, symplectic_extension(s, l, lp, v));
      Matrix g = random_symplectic(rng, s, 6);
      SPair b(s, conj(g, symplectic_extension(s, l, lp, conj(h, v))));
      Matrix phi = isometry_between_extensions(a, l, lp, b, g * l, g * lp);
      EXPECT_EQ(phi.transpose() * s.gram() * phi, s.gram());
      EXPECT_EQ(inverse(phi) * b.u * phi, a.u);
    }
    SPair one(s, symplectic_extension(s, l, lp, Matrix::diagonal({f.from_int(2), f.one(), f.one()})));
    SPair two(s, symplectic_extension(s, l, lp, Matrix::diagonal({f.from_int(3), f.one(), f.one()})));
    EXPECT_EQ(code_of([&] { isometry_between_extensions(one, l, lp, two, l, lp); }), ErrorCode::NotSimilar);
    Matrix phi = isometry_between_extensions(one, l, lp, one, l, lp);
    EXPECT_EQ(inverse(phi) * one.u * phi, one.u);
  }
}

TEST(LagrangianFit, Examples) {
  Field f7 = Field::prime(7);
  Rng rng(73);
  SymplecticSpace s = SymplecticSpace::standard(f7, 4);
  Matrix l = s.identity().columns(0, 2), lp = s.identity().columns(2, 2);
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    SPair pr(s, random_symplectic(rng, s, 8));
    if (det(s.pairing(l, pr.u * l)).is_zero()) {
      EXPECT_EQ(code_of([&] { lagrangian_fit(pr, l, lp); }), ErrorCode::Degenerate);
      continue;
    }
    Fit fit = lagrangian_fit(pr, l, lp);
    EXPECT_TRUE(is_symplectic(s, fit.w));
    EXPECT_EQ(fit.w * l, l);
    EXPECT_TRUE(same_span(fit.fitted.u * l, lp));
    ++checked;
  }
  EXPECT_GT(checked, 10);
  SPair swap(s, Matrix::from_ints(f7, {{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}}));
  EXPECT_TRUE(lagrangian_fit(swap, l, lp).w.is_identity());
}

TEST(DiagonalizingBasis, SymmetricForms) {
  for (const Field& f : kFields) {
    Rng rng(79);
    for (int i = 0; i < 30; ++i) {
      std::size_t n = static_cast<std::size_t>(rng.range(1, 5));
      Matrix g(f, n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c) g(r, c) = g(c, r) = rng.scalar(f, 2);
      Matrix q = diagonalizing_basis(g);
      EXPECT_FALSE(det(q).is_zero());
      Matrix d = q.transpose() * g * q;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          if (r != c) {
            EXPECT_TRUE(d(r, c).is_zero());
          }
    }
  }
}
