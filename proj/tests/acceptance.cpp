// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Exact arithmetic throughout, so every comparison is an equality.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "symplinv/census.hpp"
#include "symplinv/factorize.hpp"
#include "symplinv/structure.hpp"

using namespace symplinv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

// Product of `count` transvections x -> x + c s(x, v) v, v entries in {-1, 0, 1}, c = +-1.
Matrix random_element(Rng& rng, const SymplecticSpace& s, int count) {
  const Field& f = s.field();
  Matrix m = s.identity();
  for (int i = 0; i < count; ++i) {
    Matrix v(f, s.dim(), 1);
    for (std::size_t r = 0; r < s.dim(); ++r) v(r, 0) = rng.scalar(f, 1);
    m = m * transvection(s, v, rng.nonzero_scalar(f, 1));
  }
  return m;
}

// Runs fn(i) for i < n on all hardware threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

Outcome factorization_bounds() {
  const std::vector<std::size_t> dims{4, 6, 8, 10, 12};
  const std::size_t per_dim = 200;
  std::mutex mu;
  std::map<std::size_t, std::size_t> worst;
  std::vector<std::string> problems;
  parallel_for(dims.size() * per_dim, [&](std::size_t job) {
    std::size_t dim = dims[job / per_dim];
    std::uint64_t seed = 1000 * dim + job % per_dim;
    Rng rng(seed);
    SymplecticSpace s = SymplecticSpace::standard(Field::rationals(), dim);
    std::string problem;
    std::size_t count = 0;
    try {
      Certificate c = factor(SPair(s, random_element(rng, s, 20)), seed);
      Verdict v = verify_certificate(c);
      count = c.factors.size();
      if (!v.ok) problem = v.reasons.front();
      if (count > factor_bound(dim)) problem = "count " + std::to_string(count);
    } catch (const Error& e) {
      problem = error_name(e.code());
    }
    std::lock_guard<std::mutex> lock(mu);
    worst[dim] = std::max(worst[dim], count);
    if (!problem.empty()) problems.push_back("dim " + std::to_string(dim) + " seed " + std::to_string(seed) + ": " + problem);
  });
  std::ostringstream d;
  d << dims.size() * per_dim << " elements, most factors";
  for (auto [dim, w] : worst) d << " " << dim << ":" << w << "/" << factor_bound(dim);
  if (!problems.empty()) d << "; " << problems.size() << " failures, first " << problems.front();
  return {problems.empty(), d.str()};
}

Outcome induction_consistency() {
  SymplecticSpace s = SymplecticSpace::standard(Field::rationals(), 8);
  std::size_t bad = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(500 + seed);
    Certificate c = factor(SPair(s, random_element(rng, s, 20)), seed);
    std::size_t pullbacks = 0;
    for (const auto& st : c.transcript) pullbacks += st.step == "induction-pullback";
    bool ok = pullbacks == 1 && c.transcript.front().step == "induction-pullback" && !c.transcript.front().subs.empty();
    if (ok) {
      const Certificate& sub = c.transcript.front().subs.front();
      ok = sub.space.dim() == 4 && verify_certificate(sub).ok &&
           c.factors.size() <= std::max<std::size_t>(4, sub.factors.size()) && verify_certificate(c).ok;
    }
    if (!ok && bad++ == 0) first = "seed " + std::to_string(seed);
  }
  return {bad == 0, "50 dim-8 pairs, " + std::to_string(bad) + " inconsistent" + (first.empty() ? "" : ", first " + first)};
}

Outcome lower_bound(const census::F3Census& c) {
  census::CheckResult r = census::check_not_three_reflectional(c, true);
  return {r.passed, r.detail};
}

Outcome f3_pathology(const census::F3Census& c) {
  census::CheckResult r = census::check_f3_not_four_reflectional(c);
  return {r.passed, r.detail};
}

Outcome length_two_census(const census::F3Census& c) {
  census::CheckResult r = census::check_two_reflectional_quadratic(c);
  return {r.passed, r.detail};
}

Outcome length_three_trace(const census::F3Census& c) {
  census::CheckResult r = census::check_length_three_trace(c);
  return {r.passed, r.detail};
}

// Monic p of degree d with p(0) = +-1 and coefficients symmetric (or antisymmetric) to match.
Matrix random_palindromic_cyclic(Rng& rng, const Field& f, std::size_t d) {
  for (;;) {
    std::vector<Scalar> c(d + 1, f.zero());
    Scalar eps = rng.below(2) == 0 ? f.one() : -f.one();
    c[d] = f.one();
    c[0] = eps;
    for (std::size_t i = 1; 2 * i < d; ++i) {
      c[i] = rng.scalar(f, 3);
      c[d - i] = eps * c[i];
    }
    if (d % 2 == 0) c[d / 2] = eps.is_one() ? rng.scalar(f, 3) : f.zero();
    Polynomial p(f, c);
    if (!is_palindromial(p)) continue;
    Matrix g(f, d, d);
    do {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.scalar(f, 1);
    } while (det(g).is_zero());
    return g * companion(p) * inverse(g);
  }
}

Outcome two_involution_split() {
  std::size_t bad = 0, total = 0;
  for (const Field& f : {Field::rationals(), Field::prime(3), Field::prime(7)}) {
    Rng rng(700 + f.modulus());
    for (int i = 0; i < 200; ++i) {
      std::size_t d = static_cast<std::size_t>(rng.range(2, 8));
      Matrix v = random_palindromic_cyclic(rng, f, d);
      InvolutionPair p = two_involutions_gl(v);
      const Matrix& tau = p.j1;
      const Matrix& sigma = p.j2;
      Matrix id = Matrix::identity(f, d);
      ++total;
      if (!(sigma * sigma == id && tau * tau == id && tau * sigma == v)) ++bad;
    }
  }
  return {bad == 0, std::to_string(total) + " matrices over Q, F3, F7, " + std::to_string(bad) + " failures"};
}

Outcome pullback_contract() {
  const Field f = Field::prime(7);
  Rng rng(800);
  SymplecticSpace s = SymplecticSpace::standard(f, 6);
  int done = 0, bad = 0;
  while (done < 100) {
    SPair pair(s, random_element(rng, s, 10));
    Matrix w = random_element(rng, s, 8) * s.identity().columns(0, 2);
    if (det(s.pairing(w, pair.u * w)).is_zero()) continue;
    PullbackFrame fr = pullback_frame(pair, w);
    Matrix r = rng.below(2) == 0 ? -fr.residual_space.identity() : fr.residual_space.identity();
    Matrix b = rng.nonzero_scalar(f, 3) * standard_gram(f, 2);
    Matrix i = space_pullback(pair, w, b, r);
    Matrix iu = i * pair.u;
    bool ok = is_involution(i) && is_symplectic(s, i) && is_stable(iu, w);
    // Gram identity on W.
    ok = ok && s.pairing(w, pair.u * w) == b * restrict_to(iu, w);
    // The map induced on W^perp / W, from an independently chosen complement.
    Matrix perp = orthogonal_complement(s, w);
    Matrix full = w;
    for (std::size_t j = 0; j < perp.cols(); ++j) {
      Matrix trial = hcat(full, perp.column(j));
      if (rank(trial) > full.cols()) full = trial;
    }
    Matrix comp = full.columns(2, full.cols() - 2);
    Matrix induced = solve(full, iu * comp).block(2, 0, comp.cols(), comp.cols());
    Matrix target = r * fr.residual_endomorphism;
    ok = ok && char_poly(induced) == char_poly(target);
    if (ok) {
      Matrix x = similarity_transform(target, induced);
      ok = !det(x).is_zero() && x * target == induced * x;
    }
    bad += !ok;
    ++done;
  }
  return {bad == 0, "100 dim-6 instances over F7, " + std::to_string(bad) + " violations"};
}

Outcome dim6_seed() {
  const Field f3 = Field::prime(3);
  Polynomial chi = char_poly(f3_seed_matrix(f3, 1, 0, 1, 1));
  bool ok = chi == Polynomial::from_ints(f3, {-1, -1, 0, 1});
  std::string detail = "F3 char poly " + chi.to_string();
  const Field q = Field::rationals();
  SymplecticSpace s = SymplecticSpace::standard(q, 6);
  Matrix l = s.identity().columns(0, 3);
  Rng rng(900);
  std::size_t most = 0, failed = 0;
  for (int i = 0; i < 50; ++i) {
    Matrix b = Matrix::diagonal({rng.nonzero_scalar(q, 5), rng.nonzero_scalar(q, 5), rng.nonzero_scalar(q, 5)});
    try {
      SeedPair sp = dim6_seed_pair(s, l, b);
      most = std::max(most, sp.attempts);
      if (sp.attempts > kSeedBudget * kSeedBudget || s.pairing(l, sp.u_prime * l) != b * sp.v) ++failed;
    } catch (const Error&) {
      ++failed;
    }
  }
  ok = ok && failed == 0;
  detail += "; 50 diagonal Grams over Q, most attempts " + std::to_string(most) + " of " +
            std::to_string(kSeedBudget * kSeedBudget) + ", " + std::to_string(failed) + " failures";
  return {ok, detail};
}

Outcome pi_obstruction() {
  census::GroupTable g = census::enumerate_group(3, 2);
  std::vector<int> pi;
  for (std::uint32_t id = 0; id < g.size(); ++id) pi.push_back(census::sl2f3_pi(g.matrix(id)));
  std::size_t violations = 0;
  for (std::uint32_t a = 0; a < g.size(); ++a) {
    for (std::uint32_t b = 0; b < g.size(); ++b) {
      auto ab = g.find(g.ops.multiply(g.elements[a], g.elements[b]));
      violations += pi[*ab] != (pi[a] + pi[b]) % 3;
    }
  }
  auto kernel_size = std::count(pi.begin(), pi.end(), 0);
  int pj = census::sl2f3_pi(Matrix::from_ints(Field::prime(3), {{1, 1}, {0, 1}}));
  bool ok = violations == 0 && kernel_size == 8 && pj != 0 && g.size() == 24;
  return {ok, std::to_string(g.size() * g.size()) + " pairs, " + std::to_string(violations) + " violations, kernel " +
                  std::to_string(kernel_size) + ", pi(J) = " + std::to_string(pj)};
}

}  // namespace

int main() {
  report(1, "factorization bounds", factorization_bounds);
  report(2, "induction consistency", induction_consistency);
  // Criteria 3 to 6 share one enumeration of Sp_4(F_3) with its exact lengths.
  std::optional<census::F3Census> table;
  std::string table_error;
  try {
    table.emplace();
  } catch (const std::exception& e) {
    table_error = e.what();
  }
  auto with_table = [&](Outcome (*fn)(const census::F3Census&)) {
    return [&, fn] { return table ? fn(*table) : Outcome{false, "no group table: " + table_error}; };
  };
  report(3, "lower bound four", with_table(lower_bound));
  report(4, "F3 not 4-reflectional", with_table(f3_pathology));
  report(5, "length-2 elements are quadratic", with_table(length_two_census));
  report(6, "length-3 elements have trace 0", with_table(length_three_trace));
  report(7, "two-involution split of palindromic cyclic matrices", two_involution_split);
  report(8, "space pullback contract", pullback_contract);
  report(9, "dim-6 seed construction", dim6_seed);
  report(10, "projective-line homomorphism", pi_obstruction);
  return failures == 0 ? 0 : 1;
}
