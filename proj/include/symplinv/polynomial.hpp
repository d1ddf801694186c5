#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symplinv/field.hpp"

namespace symplinv {

// Univariate polynomial in t, coefficients stored by ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(const Field& f) : field_(f) {}
  Polynomial(const Field& f, std::vector<Scalar> coeffs) : field_(f), c_(std::move(coeffs)) { trim(); }

  static Polynomial constant(const Scalar& c) { return Polynomial(c.field(), {c}); }
  static Polynomial one(const Field& f) { return constant(f.one()); }

  static Polynomial monomial(const Scalar& c, int deg) {
    std::vector<Scalar> v(static_cast<std::size_t>(deg) + 1, c.field().zero());
    v.back() = c;
    return Polynomial(c.field(), std::move(v));
  }

  static Polynomial t(const Field& f) { return monomial(f.one(), 1); }

  // t - a
  static Polynomial linear(const Scalar& a) { return Polynomial(a.field(), {-a, a.field().one()}); }

  static Polynomial from_ints(const Field& f, std::initializer_list<long long> ascending) {
    std::vector<Scalar> v;
    for (long long x : ascending) v.push_back(f.from_int(x));
    return Polynomial(f, std::move(v));
  }

  const Field& field() const { return field_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Scalar>& coeffs() const { return c_; }

  Scalar coeff(int i) const {
    if (i < 0 || i > degree()) return field_.zero();
    return c_[static_cast<std::size_t>(i)];
  }

  const Scalar& leading() const { return c_.back(); }
  bool is_monic() const { return !c_.empty() && c_.back().is_one(); }
  bool is_one() const { return c_.size() == 1 && c_[0].is_one(); }

  Polynomial monic() const {
    if (is_zero()) return *this;
    Scalar inv = leading().inv();
    Polynomial r = *this;
    for (auto& x : r.c_) x *= inv;
    return r;
  }

  Scalar eval(const Scalar& x) const {
    Scalar r = field_.zero();
    for (int i = degree(); i >= 0; --i) r = r * x + c_[static_cast<std::size_t>(i)];
    return r;
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field_.zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field_.zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial(a.field_);
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, a.field_.zero());
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Polynomial(a.field_, std::move(r));
  }

  friend Polynomial operator*(const Scalar& s, Polynomial p) {
    for (auto& x : p.c_) x *= s;
    p.trim();
    return p;
  }

  Polynomial operator-() const { return (-field_.one()) * *this; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] != b.c_[i]) return false;
    }
    return true;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  // Euclidean division: *this = q * d + r with deg r < deg d.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    require(!d.is_zero(), ErrorCode::DivisionByZero, "polynomial division by zero");
    Polynomial r = *this;
    if (r.degree() < d.degree()) return {Polynomial(field_), r};
    std::vector<Scalar> q(static_cast<std::size_t>(r.degree() - d.degree() + 1), field_.zero());
    Scalar lead_inv = d.leading().inv();
    while (!r.is_zero() && r.degree() >= d.degree()) {
      int shift = r.degree() - d.degree();
      Scalar c = r.leading() * lead_inv;
      q[static_cast<std::size_t>(shift)] = c;
      for (int i = 0; i <= d.degree(); ++i) {
        r.c_[static_cast<std::size_t>(i + shift)] -= c * d.c_[static_cast<std::size_t>(i)];
      }
      r.trim();
    }
    return {Polynomial(field_, std::move(q)), r};
  }

  Polynomial operator/(const Polynomial& d) const { return divmod(d).first; }
  Polynomial operator%(const Polynomial& d) const { return divmod(d).second; }

  bool divides(const Polynomial& other) const { return (other % *this).is_zero(); }

  Polynomial pow(unsigned k) const {
    Polynomial r = one(field_);
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  // p(-t)
  Polynomial negate_variable() const {
    Polynomial r = *this;
    for (std::size_t i = 1; i < r.c_.size(); i += 2) r.c_[i] = -r.c_[i];
    return r;
  }

  // p(c t)
  Polynomial scale_variable(const Scalar& c) const {
    Polynomial r = *this;
    Scalar pw = field_.one();
    for (auto& x : r.c_) {
      x *= pw;
      pw *= c;
    }
    r.trim();
    return r;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial(field_);
    std::vector<Scalar> r;
    for (std::size_t i = 1; i < c_.size(); ++i) r.push_back(c_[i] * field_.from_int(static_cast<long long>(i)));
    return Polynomial(field_, std::move(r));
  }

  // Rendered as "t^3 - t - 1"; the zero polynomial renders as "0".
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const Scalar& c = c_[static_cast<std::size_t>(i)];
      if (c.is_zero()) continue;
      bool negative = false;
      std::string mag;
      if (field_.is_rational()) {
        negative = sgn(c.rational()) < 0;
        mag = mpq_class(abs(c.rational())).get_str();
      } else {
        long long v = c.centered();
        negative = v < 0;
        mag = std::to_string(negative ? -v : v);
      }
      if (out.empty()) {
        if (negative) out += "-";
      } else {
        out += negative ? " - " : " + ";
      }
      bool unit = mag == "1";
      if (i == 0) {
        out += mag;
      } else {
        if (!unit) out += mag + "*";
        out += i == 1 ? "t" : "t^" + std::to_string(i);
      }
    }
    return out;
  }

  static Polynomial parse(const Field& f, const std::string& text) {
    std::string s;
    for (char ch : text) {
      if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    require(!s.empty(), ErrorCode::ParseError, "empty polynomial");
    Polynomial acc(f);
    std::size_t i = 0;
    while (i < s.size()) {
      bool negative = false;
      if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
      }
      std::size_t start = i;
      while (i < s.size() && s[i] != '+' && s[i] != '-') ++i;
      std::string term = s.substr(start, i - start);
      require(!term.empty(), ErrorCode::ParseError, "bad polynomial '" + text + "'");
      Scalar coef = f.one();
      int deg = 0;
      std::size_t tpos = term.find('t');
      if (tpos == std::string::npos) {
        coef = f.parse(term);
      } else {
        std::string head = term.substr(0, tpos);
        if (!head.empty() && head.back() == '*') head.pop_back();
        if (!head.empty()) coef = f.parse(head);
        std::string tail = term.substr(tpos + 1);
        if (tail.empty()) {
          deg = 1;
        } else {
          require(tail[0] == '^' && tail.size() > 1, ErrorCode::ParseError, "bad exponent in '" + text + "'");
          deg = std::stoi(tail.substr(1));
        }
      }
      if (negative) coef = -coef;
      acc += monomial(coef, deg);
    }
    return acc;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  Field field_;
  std::vector<Scalar> c_;
};

// Monic gcd; gcd(0, 0) = 0.
inline Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline Polynomial lcm(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial(a.field());
  return ((a * b) / gcd(a, b)).monic();
}

// p^# = p(0)^{-1} t^d p(1/t)
inline Polynomial reciprocal(const Polynomial& p) {
  require(!p.is_zero() && !p.coeff(0).is_zero(), ErrorCode::ZeroConstantTerm, "reciprocal needs p(0) != 0");
  std::vector<Scalar> rev(p.coeffs().rbegin(), p.coeffs().rend());
  Scalar c0inv = p.coeff(0).inv();
  for (auto& x : rev) x *= c0inv;
  return Polynomial(p.field(), std::move(rev));
}

inline bool is_palindromial(const Polynomial& p) { return reciprocal(p) == p; }

// True iff p and q share no root in an algebraic closure.
inline bool coprime_over_closure(const Polynomial& p, const Polynomial& q) { return gcd(p, q).degree() == 0; }

// Largest k with f^k dividing p (f non-constant, p non-zero).
inline int multiplicity(const Polynomial& f, Polynomial p) {
  int k = 0;
  for (;;) {
    auto [q, r] = p.divmod(f);
    if (!r.is_zero()) return k;
    p = std::move(q);
    ++k;
  }
}

// Removes from p every factor it shares with f: the part of p coprime to f.
inline Polynomial coprime_part(Polynomial p, const Polynomial& f) {
  for (;;) {
    Polynomial g = gcd(p, f);
    if (g.degree() <= 0) return p.monic();
    p = p / g;
  }
}

// Roots in the ground field. Over Q this is the rational root test applied to
// an integer-scaled copy; over F_p every residue is tried. Multiplicities are
// not reported.
namespace detail {

// p-adic lift of a simple root r of c (integer coefficients, ascending) modulo
// p, to a root modulo a power of p at least `bound`.
inline mpz_class hensel_lift(const std::vector<mpz_class>& c, mpz_class r, const mpz_class& p, const mpz_class& bound,
                             mpz_class& modulus) {
  auto eval_mod = [&](const std::vector<mpz_class>& coeffs, const mpz_class& x, const mpz_class& m) {
    mpz_class acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
      acc = acc * x + coeffs[i];
      mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
    }
    return acc;
  };
  std::vector<mpz_class> dc;
  for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(c[i] * static_cast<unsigned long>(i));
  modulus = p;
  while (modulus <= bound) {
    modulus *= modulus;
    mpz_class d = eval_mod(dc, r, modulus), inv;
    mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), modulus.get_mpz_t());
    r = r - eval_mod(c, r, modulus) * inv;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  }
  return r;
}

// a / b = r mod m with |a|, |b| <= sqrt(m / 2), if it exists.
inline std::optional<mpq_class> rational_reconstruction(const mpz_class& r, const mpz_class& m) {
  mpz_class r0 = m, r1 = r, t0 = 0, t1 = 1, q, tmp;
  mpz_class limit;
  mpz_sqrt(limit.get_mpz_t(), mpz_class(m / 2).get_mpz_t());
  while (r1 > limit) {
    q = r0 / r1;
    tmp = r0 - q * r1;
    r0 = r1;
    r1 = tmp;
    tmp = t0 - q * t1;
    t0 = t1;
    t1 = tmp;
  }
  if (t1 == 0 || abs(t1) > limit) return std::nullopt;
  mpq_class out(r1, t1);
  out.canonicalize();
  return out;
}

}  // namespace detail

// Roots lying in the field, ascending (by residue over F_p, by value over Q).
// Over Q: simple roots of the squarefree part modulo a prime p that keeps it
// squarefree are lifted p-adically and recovered by rational reconstruction.
inline std::vector<Scalar> roots_in_field(const Polynomial& p) {
  std::vector<Scalar> out;
  if (p.degree() <= 0) return out;
  const Field& f = p.field();
  if (f.is_finite()) {
    for (std::uint64_t r = 0; r < f.modulus(); ++r) {
      Scalar x = Scalar::residue(f, r);
      if (p.eval(x).is_zero()) out.push_back(x);
    }
    return out;
  }
  Polynomial q = p / gcd(p, p.derivative());
  if (q.coeff(0).is_zero()) {
    out.push_back(f.zero());
    q = q / Polynomial::t(f);
  }
  if (q.degree() >= 1) {
    mpz_class den_lcm = 1;
    for (const auto& c : q.coeffs()) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.rational().get_den_mpz_t());
    std::vector<mpz_class> ic;
    for (const auto& c : q.coeffs()) ic.push_back(mpz_class(c.rational() * den_lcm));
    // Roots a/b satisfy |a| <= |c_0| and |b| <= |c_d|.
    mpz_class bound = 2 * abs(ic.front()) * abs(ic.back()) + 1;
    for (std::uint64_t prime = 3;; prime += 2) {
      if (!Field::is_prime(prime)) continue;
      if (mpz_divisible_ui_p(ic.back().get_mpz_t(), prime)) continue;
      Field fp = Field::prime(prime);
      std::vector<Scalar> red;
      for (const auto& c : ic) {
        mpz_class m = c % static_cast<unsigned long>(prime);
        if (m < 0) m += static_cast<unsigned long>(prime);
        red.push_back(Scalar::residue(fp, m.get_ui()));
      }
      Polynomial qp(fp, red);
      if (gcd(qp, qp.derivative()).degree() != 0) continue;
      for (const auto& r : roots_in_field(qp)) {
        mpz_class modulus;
        mpz_class lifted = detail::hensel_lift(ic, mpz_class(static_cast<unsigned long>(r.residue_value())),
                                               mpz_class(static_cast<unsigned long>(prime)), bound * bound, modulus);
        auto cand = detail::rational_reconstruction(lifted, modulus);
        if (!cand) continue;
        Scalar x(f, *cand);
        if (q.eval(x).is_zero()) out.push_back(x);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const Scalar& a, const Scalar& b) { return a.rational() < b.rational(); });
  return out;
}

}  // namespace symplinv
