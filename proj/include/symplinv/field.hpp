#pragma once

#include <cstdint>
#include <functional>
#include <gmpxx.h>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "symplinv/error.hpp"

namespace symplinv {

enum class FieldKind { Rationals, PrimeField };

class Scalar;

// The ground field: either Q or Z/p for an odd prime p that fits in a machine word.
class Field {
 public:
  Field() = default;

  static Field rationals() { return Field(FieldKind::Rationals, 0); }

  static Field prime(std::uint64_t p) {
    require(p != 2, ErrorCode::CharacteristicTwo, "characteristic 2 is not supported");
    require(is_prime(p), ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    require(p < (std::uint64_t(1) << 62), ErrorCode::NotPrime, "modulus too large");
    return Field(FieldKind::PrimeField, p);
  }

  FieldKind kind() const { return kind_; }
  bool is_rational() const { return kind_ == FieldKind::Rationals; }
  bool is_finite() const { return kind_ == FieldKind::PrimeField; }
  std::uint64_t modulus() const { return modulus_; }

  // "Q" or "F<p>", the spelling used in every serialized format.
  std::string name() const { return is_rational() ? "Q" : "F" + std::to_string(modulus_); }

  static Field from_name(const std::string& s) {
    if (s == "Q" || s == "q") return rationals();
    if (s.size() > 1 && (s[0] == 'F' || s[0] == 'f')) {
      std::uint64_t p = 0;
      for (std::size_t i = 1; i < s.size(); ++i) {
        require(s[i] >= '0' && s[i] <= '9', ErrorCode::ParseError, "bad field name '" + s + "'");
        p = p * 10 + std::uint64_t(s[i] - '0');
      }
      return prime(p);
    }
    fail(ErrorCode::ParseError, "bad field name '" + s + "'");
  }

  friend bool operator==(const Field& a, const Field& b) {
    return a.kind_ == b.kind_ && a.modulus_ == b.modulus_;
  }
  friend bool operator!=(const Field& a, const Field& b) { return !(a == b); }

  inline Scalar zero() const;
  inline Scalar one() const;
  inline Scalar from_int(long long v) const;
  inline Scalar from_ratio(long long num, long long den) const;
  inline Scalar parse(const std::string& text) const;

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
      if (n % d == 0) return n == d;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
      d >>= 1;
      ++s;
    }
    // Deterministic Miller-Rabin bases for 64-bit inputs.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
      std::uint64_t x = powmod(a, d, n);
      if (x == 1 || x == n - 1) continue;
      bool composite = true;
      for (int r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) {
          composite = false;
          break;
        }
      }
      if (composite) return false;
    }
    return true;
  }

  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
  }

  static std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
      if (e & 1) r = mulmod(r, a, m);
      a = mulmod(a, a, m);
      e >>= 1;
    }
    return r;
  }

 private:
  Field(FieldKind k, std::uint64_t p) : kind_(k), modulus_(p) {}

  FieldKind kind_ = FieldKind::Rationals;
  std::uint64_t modulus_ = 0;
};

// An exact field element. Rationals are kept canonical by GMP; residues live in [0, p).
class Scalar {
 public:
  Scalar() : value_(mpq_class(0)) {}

  Scalar(const Field& f, mpq_class q) : field_(f) {
    if (f.is_rational()) {
      q.canonicalize();
      value_ = std::move(q);
    } else {
      value_ = reduce(q, f.modulus());
    }
  }

  Scalar(const Field& f, long long v) : field_(f) {
    if (f.is_rational()) {
      value_ = mpq_class(static_cast<long>(v));
    } else {
      long long m = static_cast<long long>(f.modulus());
      long long r = v % m;
      if (r < 0) r += m;
      value_ = static_cast<std::uint64_t>(r);
    }
  }

  static Scalar residue(const Field& f, std::uint64_t r) {
    Scalar s;
    s.field_ = f;
    s.value_ = r % f.modulus();
    return s;
  }

  const Field& field() const { return field_; }

  bool is_zero() const {
    if (field_.is_rational()) return sgn(rational()) == 0;
    return std::get<std::uint64_t>(value_) == 0;
  }

  bool is_one() const {
    if (field_.is_rational()) return rational() == 1;
    return std::get<std::uint64_t>(value_) == 1;
  }

  const mpq_class& rational() const { return std::get<mpq_class>(value_); }
  std::uint64_t residue_value() const { return std::get<std::uint64_t>(value_); }

  Scalar operator-() const {
    if (field_.is_rational()) return Scalar(field_, mpq_class(-rational()), Canonical{});
    std::uint64_t r = residue_value();
    return residue(field_, r == 0 ? 0 : field_.modulus() - r);
  }

  Scalar inv() const {
    require(!is_zero(), ErrorCode::DivisionByZero, "inverse of zero");
    if (field_.is_rational()) {
      mpq_class q;
      mpq_inv(q.get_mpq_t(), rational().get_mpq_t());
      return Scalar(field_, std::move(q), Canonical{});
    }
    return residue(field_, Field::powmod(residue_value(), field_.modulus() - 2, field_.modulus()));
  }

  Scalar& operator+=(const Scalar& o) {
    check_same(o);
    if (field_.is_rational()) {
      std::get<mpq_class>(value_) += o.rational();
    } else {
      std::uint64_t m = field_.modulus();
      std::uint64_t r = residue_value() + o.residue_value();
      value_ = r >= m ? r - m : r;
    }
    return *this;
  }

  Scalar& operator-=(const Scalar& o) {
    check_same(o);
    if (field_.is_rational()) {
      std::get<mpq_class>(value_) -= o.rational();
    } else {
      std::uint64_t m = field_.modulus();
      std::uint64_t a = residue_value(), b = o.residue_value();
      value_ = a >= b ? a - b : a + m - b;
    }
    return *this;
  }

  Scalar& operator*=(const Scalar& o) {
    check_same(o);
    if (field_.is_rational()) {
      std::get<mpq_class>(value_) *= o.rational();
    } else {
      value_ = Field::mulmod(residue_value(), o.residue_value(), field_.modulus());
    }
    return *this;
  }

  Scalar& operator/=(const Scalar& o) {
    check_same(o);
    require(!o.is_zero(), ErrorCode::DivisionByZero, "division by zero");
    if (field_.is_rational()) {
      std::get<mpq_class>(value_) /= o.rational();
      return *this;
    }
    return *this *= o.inv();
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    a.check_same(b);
    if (a.field_.is_rational()) return a.rational() == b.rational();
    return a.residue_value() == b.residue_value();
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar pow(long long e) const {
    if (e < 0) return inv().pow(-e);
    Scalar r = field_.one(), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // Integers and "a/b" over Q, decimal residues over F_p.
  std::string to_string() const {
    if (field_.is_rational()) return rational().get_str();
    return std::to_string(residue_value());
  }

  // Representative in (-p/2, p/2], used only for compact display.
  long long centered() const {
    std::uint64_t r = residue_value(), m = field_.modulus();
    return r > m / 2 ? static_cast<long long>(r) - static_cast<long long>(m) : static_cast<long long>(r);
  }

  std::size_t hash() const {
    if (field_.is_rational()) {
      return std::hash<std::string>{}(rational().get_str());
    }
    return std::hash<std::uint64_t>{}(residue_value());
  }

 private:
  struct Canonical {};
  Scalar(const Field& f, mpq_class q, Canonical) : field_(f), value_(std::move(q)) {}

  static std::uint64_t reduce(const mpq_class& q, std::uint64_t p) {
    mpz_class m(static_cast<unsigned long>(p));
    mpz_class num = q.get_num() % m;
    if (num < 0) num += m;
    mpz_class den = q.get_den() % m;
    require(den != 0, ErrorCode::DivisionByZero, "denominator divisible by the characteristic");
    mpz_class dinv;
    mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
    mpz_class r = (num * dinv) % m;
    return static_cast<std::uint64_t>(r.get_ui());
  }

  void check_same(const Scalar& o) const {
    if (field_ != o.field_) fail(ErrorCode::FieldMismatch, field_.name() + " vs " + o.field_.name());
  }

  Field field_;
  std::variant<std::uint64_t, mpq_class> value_;
};

inline Scalar Field::zero() const { return Scalar(*this, 0LL); }
inline Scalar Field::one() const { return Scalar(*this, 1LL); }
inline Scalar Field::from_int(long long v) const { return Scalar(*this, v); }

inline Scalar Field::from_ratio(long long num, long long den) const {
  return from_int(num) / from_int(den);
}

inline Scalar Field::parse(const std::string& text) const {
  std::string s;
  for (char c : text) {
    if (c != ' ') s += c;
  }
  require(!s.empty(), ErrorCode::ParseError, "empty scalar");
  mpq_class q;
  if (q.set_str(s, 10) != 0) fail(ErrorCode::ParseError, "bad scalar '" + text + "'");
  require(q.get_den() != 0, ErrorCode::ParseError, "zero denominator in '" + text + "'");
  return Scalar(*this, q);
}

// Deterministic pseudo-random source. The draw helpers avoid the standard
// distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform residue over F_p, or a small integer in [-bound, bound] over Q.
  Scalar scalar(const Field& f, long long bound = 3) {
    if (f.is_finite()) return Scalar::residue(f, below(f.modulus()));
    return f.from_int(range(-bound, bound));
  }

  Scalar nonzero_scalar(const Field& f, long long bound = 3) {
    for (;;) {
      Scalar s = scalar(f, bound);
      if (!s.is_zero()) return s;
    }
  }

  // Derives an independent seed for a sub-computation.
  std::uint64_t fork() { return gen_() ^ 0x9e3779b97f4a7c15ULL; }

 private:
  std::mt19937_64 gen_;
};

// Enumerates F \ {0, 1, -1} in a fixed order. Over Q the order is by height
// h = max(|a|, b): h, -h, then h/b, -h/b for b < h, then a/h, -a/h for a < h,
// each with gcd 1. This starts 2, -2, 1/2, -1/2, 3, -3, 3/2, -3/2, 1/3, ...
class CandidateStream {
 public:
  explicit CandidateStream(const Field& f) : field_(f) {}

  // Next candidate, or false once a finite field is used up.
  bool next(Scalar& out) {
    if (field_.is_finite()) {
      if (residue_ + 1 >= field_.modulus()) return false;
      out = Scalar::residue(field_, residue_++);
      return true;
    }
    while (queue_pos_ >= queue_.size()) refill();
    out = queue_[queue_pos_++];
    return true;
  }

 private:
  void refill() {
    queue_.clear();
    queue_pos_ = 0;
    long long h = ++height_;
    auto push_pair = [&](long long a, long long b) {
      queue_.push_back(field_.from_ratio(a, b));
      queue_.push_back(field_.from_ratio(-a, b));
    };
    push_pair(h, 1);
    for (long long b = 2; b < h; ++b) {
      if (std::gcd(h, b) == 1) push_pair(h, b);
    }
    for (long long a = 1; a < h; ++a) {
      if (std::gcd(a, h) == 1) push_pair(a, h);
    }
  }

  Field field_;
  std::uint64_t residue_ = 2;
  long long height_ = 1;
  std::vector<Scalar> queue_;
  std::size_t queue_pos_ = 0;
};

// Up to `limit` candidates avoiding `forbidden`. Over Q the scan is capped at
// `scan_cap` raw candidates so that a pathological predicate cannot loop forever.
inline std::vector<Scalar> candidate_scalars(const Field& f, const std::function<bool(const Scalar&)>& forbidden,
                                             std::size_t limit, std::size_t scan_cap = 100000) {
  std::vector<Scalar> out;
  CandidateStream stream(f);
  Scalar c;
  std::size_t scanned = 0;
  while (out.size() < limit && scanned < scan_cap && stream.next(c)) {
    ++scanned;
    if (!forbidden(c)) out.push_back(c);
  }
  if (out.empty() && limit > 0) fail(ErrorCode::Exhausted, "no admissible scalar in " + f.name());
  return out;
}

// First admissible candidate.
inline Scalar first_candidate(const Field& f, const std::function<bool(const Scalar&)>& forbidden) {
  return candidate_scalars(f, forbidden, 1).front();
}

}  // namespace symplinv
