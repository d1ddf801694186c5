#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "symplinv/linalg.hpp"
#include "symplinv/symplectic.hpp"

namespace symplinv::census {

// Matrices over F_p with p <= 13 and size <= 4, packed four bits per entry in
// row-major order. The all-ones word never encodes a matrix.
using Key = std::uint64_t;
inline constexpr Key kEmptyKey = ~Key(0);

class PackedOps {
 public:
  using Entries = std::array<std::uint8_t, 16>;

  PackedOps(std::uint64_t p, std::size_t dim) : p_(p), dim_(dim), field_(Field::prime(p)) {
    require(p > 2, ErrorCode::UnsupportedField, "census needs an odd prime");
    require(p <= 13, ErrorCode::BudgetExceeded, "census packs residues below 16");
    require(dim >= 2 && dim <= 4 && dim % 2 == 0, ErrorCode::BudgetExceeded, "census handles dimension 2 or 4");
  }

  std::uint64_t p() const { return p_; }
  std::size_t dim() const { return dim_; }
  const Field& field() const { return field_; }
  const Matrix& gram() const {
    if (gram_.rows() == 0) gram_ = standard_gram(field_, dim_);
    return gram_;
  }

  Entries unpack(Key k) const {
    Entries e{};
    for (std::size_t i = 0; i < dim_ * dim_; ++i) e[i] = static_cast<std::uint8_t>((k >> (4 * i)) & 0xf);
    return e;
  }

  Key pack(const Entries& e) const {
    Key k = 0;
    for (std::size_t i = 0; i < dim_ * dim_; ++i) k |= Key(e[i]) << (4 * i);
    return k;
  }

  Key encode(const Matrix& m) const {
    require(m.field() == field_ && m.rows() == dim_ && m.cols() == dim_, ErrorCode::NotInGroup,
            "matrix does not belong to this census");
    Entries e{};
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) e[i * dim_ + j] = static_cast<std::uint8_t>(m(i, j).residue_value());
    }
    return pack(e);
  }

  Matrix decode(Key k) const {
    Entries e = unpack(k);
    Matrix m(field_, dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = Scalar::residue(field_, e[i * dim_ + j]);
    }
    return m;
  }

  Key identity() const { return scalar(1); }
  Key scalar(std::uint64_t c) const {
    Entries e{};
    for (std::size_t i = 0; i < dim_; ++i) e[i * dim_ + i] = static_cast<std::uint8_t>(c % p_);
    return pack(e);
  }

  Key multiply(Key a, Key b) const {
    Entries x = unpack(a), y = unpack(b), z{};
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        unsigned acc = 0;
        for (std::size_t l = 0; l < dim_; ++l) acc += unsigned(x[i * dim_ + l]) * y[l * dim_ + j];
        z[i * dim_ + j] = static_cast<std::uint8_t>(acc % p_);
      }
    }
    return pack(z);
  }

  // a + c*b entrywise.
  Key add_scaled(Key a, Key b, std::uint64_t c) const {
    Entries x = unpack(a), y = unpack(b);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) x[i] = static_cast<std::uint8_t>((x[i] + (c % p_) * y[i]) % p_);
    return pack(x);
  }

  unsigned trace(Key k) const {
    Entries e = unpack(k);
    unsigned t = 0;
    for (std::size_t i = 0; i < dim_; ++i) t += e[i * dim_ + i];
    return t % static_cast<unsigned>(p_);
  }

  std::size_t rank(Key k) const {
    Entries e = unpack(k);
    std::size_t r = 0;
    for (std::size_t c = 0; c < dim_ && r < dim_; ++c) {
      std::size_t piv = r;
      while (piv < dim_ && e[piv * dim_ + c] == 0) ++piv;
      if (piv == dim_) continue;
      for (std::size_t j = 0; j < dim_; ++j) std::swap(e[r * dim_ + j], e[piv * dim_ + j]);
      unsigned inv = static_cast<unsigned>(Field::powmod(e[r * dim_ + c], p_ - 2, p_));
      for (std::size_t i = r + 1; i < dim_; ++i) {
        unsigned f = (e[i * dim_ + c] * inv) % p_;
        if (f == 0) continue;
        for (std::size_t j = 0; j < dim_; ++j) {
          e[i * dim_ + j] = static_cast<std::uint8_t>((e[i * dim_ + j] + (p_ - f) * e[r * dim_ + j]) % p_);
        }
      }
      ++r;
    }
    return r;
  }

 private:
  std::uint64_t p_;
  std::size_t dim_;
  Field field_;
  mutable Matrix gram_;
};

// Open-addressing map from keys to 32-bit ids, linear probing.
class KeyIndex {
 public:
  explicit KeyIndex(std::size_t expected = 16) { reserve(expected); }

  std::size_t size() const { return size_; }

  std::optional<std::uint32_t> find(Key k) const {
    for (std::size_t slot = hash(k) & mask_;; slot = (slot + 1) & mask_) {
      if (keys_[slot] == k) return ids_[slot];
      if (keys_[slot] == kEmptyKey) return std::nullopt;
    }
  }

  bool contains(Key k) const { return find(k).has_value(); }

  // False if the key was already present.
  bool insert(Key k, std::uint32_t id = 0) {
    if (2 * (size_ + 1) > keys_.size()) reserve(keys_.size());
    for (std::size_t slot = hash(k) & mask_;; slot = (slot + 1) & mask_) {
      if (keys_[slot] == k) return false;
      if (keys_[slot] == kEmptyKey) {
        keys_[slot] = k;
        ids_[slot] = id;
        ++size_;
        return true;
      }
    }
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t slot = 0; slot < keys_.size(); ++slot) {
      if (keys_[slot] != kEmptyKey) fn(keys_[slot], ids_[slot]);
    }
  }

 private:
  static std::size_t hash(Key k) {
    k ^= k >> 30;
    k *= 0xbf58476d1ce4e5b9ULL;
    k ^= k >> 27;
    k *= 0x94d049bb133111ebULL;
    k ^= k >> 31;
    return static_cast<std::size_t>(k);
  }

  void reserve(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < 2 * expected + 2) cap <<= 1;
    if (cap <= keys_.size()) return;
    std::vector<Key> old_keys(cap, kEmptyKey);
    std::vector<std::uint32_t> old_ids(cap, 0);
    old_keys.swap(keys_);
    old_ids.swap(ids_);
    mask_ = cap - 1;
    size_ = 0;
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] != kEmptyKey) insert(old_keys[i], old_ids[i]);
    }
  }

  std::vector<Key> keys_;
  std::vector<std::uint32_t> ids_;
  std::size_t mask_ = 0;
  std::size_t size_ = 0;
};

// |Sp_{2n}(F_p)| = p^{n^2} prod_{i=1}^{n} (p^{2i} - 1)
inline std::uint64_t symplectic_group_order(std::uint64_t p, std::size_t dim) {
  std::size_t n = dim / 2;
  std::uint64_t order = 1;
  for (std::size_t i = 0; i < n * n; ++i) order *= p;
  std::uint64_t q = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    q *= p * p;
    order *= q - 1;
  }
  return order;
}

inline bool census_supported(std::uint64_t p, std::size_t dim) {
  return (dim == 2 && p >= 3 && p <= 13) || (dim == 4 && p == 3);
}

struct GroupTable {
  PackedOps ops;
  std::vector<Key> elements;  // id 0 is the identity
  KeyIndex index;
  std::vector<std::uint32_t> involution_ids;

  const Field& field() const { return ops.field(); }
  std::size_t dim() const { return ops.dim(); }
  std::size_t size() const { return elements.size(); }

  std::optional<std::uint32_t> find(Key k) const { return index.find(k); }

  std::uint32_t id_of(const Matrix& m) const {
    auto id = find(ops.encode(m));
    require(id.has_value(), ErrorCode::NotInGroup, "matrix is not in the enumerated group");
    return *id;
  }

  Matrix matrix(std::uint32_t id) const { return ops.decode(elements.at(id)); }

  std::vector<Key> involution_keys() const {
    std::vector<Key> out;
    for (auto id : involution_ids) out.push_back(elements[id]);
    return out;
  }
};

namespace detail {

// Transvections x -> x + s(x, v) v for v = e_i and v = e_i + e_j.
inline std::vector<Key> transvection_generators(const PackedOps& ops) {
  const Field& f = ops.field();
  SymplecticSpace space(ops.gram());
  std::vector<Key> out;
  std::size_t n = ops.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Matrix v = Matrix::unit_vector(f, n, i);
      if (j != i) v = v + Matrix::unit_vector(f, n, j);
      out.push_back(ops.encode(transvection(space, v, f.one())));
    }
  }
  return out;
}

}  // namespace detail

inline GroupTable enumerate_group(std::uint64_t p, std::size_t dim) {
  require(census_supported(p, dim), ErrorCode::BudgetExceeded,
          "census supports Sp_2(F_p) for p <= 13 and Sp_4(F_3)");
  PackedOps ops(p, dim);
  std::uint64_t order = symplectic_group_order(p, dim);
  GroupTable g{ops, {}, KeyIndex(order), {}};
  std::vector<Key> gens = detail::transvection_generators(ops);
  g.elements.reserve(order);
  g.elements.push_back(ops.identity());
  g.index.insert(ops.identity(), 0);
  for (std::size_t head = 0; head < g.elements.size(); ++head) {
    Key x = g.elements[head];
    for (Key t : gens) {
      Key y = ops.multiply(x, t);
      if (g.index.insert(y, static_cast<std::uint32_t>(g.elements.size()))) g.elements.push_back(y);
    }
    require(g.elements.size() <= order, ErrorCode::InternalCheckFailed, "closure exceeds the group order");
  }
  require(g.elements.size() == order, ErrorCode::InternalCheckFailed, "transvections did not generate the group");
  Key id = ops.identity();
  for (std::uint32_t i = 0; i < g.elements.size(); ++i) {
    Key x = g.elements[i];
    if (ops.multiply(x, x) == id) g.involution_ids.push_back(i);
  }
  return g;
}

// Involutions of Sp_2 or Sp_4 over F_p without enumerating the group: +-id,
// and in dimension 4 the maps that are -id on a regular plane P and id on P^perp.
inline std::vector<Key> involutions_from_planes(const PackedOps& ops) {
  std::vector<Key> out{ops.identity(), ops.scalar(ops.p() - 1)};
  if (ops.dim() == 4) {
    const unsigned p = static_cast<unsigned>(ops.p());
    const unsigned count = p * p * p * p;
    KeyIndex seen(1024);
    // (K v)_c = s(e_c, v) for K = [[0, I], [-I, 0]].
    auto k_times = [p](const std::array<unsigned, 4>& v) {
      return std::array<unsigned, 4>{v[2], v[3], (p - v[0]) % p, (p - v[1]) % p};
    };
    auto vector_of = [p](unsigned code) {
      std::array<unsigned, 4> v{};
      for (auto& c : v) {
        c = code % p;
        code /= p;
      }
      return v;
    };
    for (unsigned a = 1; a < count; ++a) {
      auto x = vector_of(a);
      auto kx = k_times(x);
      for (unsigned b = 1; b < count; ++b) {
        auto y = vector_of(b);
        unsigned sxy = 0;
        for (int i = 0; i < 4; ++i) sxy += (p - kx[i]) * y[i];  // x^T K y = -(K x)^T y
        if (sxy % p != 1) continue;
        // -id on span(x, y), id on its orthogonal: I - 2 (x (K y)^T - y (K x)^T).
        auto ky = k_times(y);
        PackedOps::Entries e{};
        for (int r = 0; r < 4; ++r) {
          for (int c = 0; c < 4; ++c) {
            unsigned proj = (x[r] * ky[c] + (p - y[r]) * kx[c]) % p;
            e[r * 4 + c] = static_cast<std::uint8_t>(((r == c ? 1 : 0) + 2 * (p - proj)) % p);
          }
        }
        Key k = ops.pack(e);
        if (seen.insert(k)) out.push_back(k);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct LengthTable {
  static constexpr std::uint8_t kUnreachable = 0xff;
  std::vector<std::uint8_t> lengths;

  bool reachable(std::uint32_t id) const { return lengths.at(id) != kUnreachable; }
  std::uint8_t max_length() const {
    std::uint8_t m = 0;
    for (auto l : lengths) {
      if (l != kUnreachable) m = std::max(m, l);
    }
    return m;
  }
  std::size_t count_at_most(unsigned k) const {
    return static_cast<std::size_t>(
        std::count_if(lengths.begin(), lengths.end(), [k](std::uint8_t l) { return l != kUnreachable && l <= k; }));
  }
};

// Breadth-first search from the identity, each edge a right multiplication by an involution.
inline LengthTable reflection_lengths(const GroupTable& g) {
  LengthTable out;
  out.lengths.assign(g.size(), LengthTable::kUnreachable);
  std::vector<Key> gens;
  for (auto id : g.involution_ids) {
    if (id != 0) gens.push_back(g.elements[id]);
  }
  out.lengths[0] = 0;
  std::vector<std::uint32_t> frontier{0}, next;
  for (std::uint8_t level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (auto x : frontier) {
      for (Key j : gens) {
        auto y = g.find(g.ops.multiply(g.elements[x], j));
        if (out.lengths[*y] == LengthTable::kUnreachable) {
          out.lengths[*y] = level;
          next.push_back(*y);
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier.swap(next);
  }
  return out;
}

// Membership in I^k, with I the involutions (identity included), by meeting in
// the middle: x = a b with a in I^ceil(k/2), b in I^floor(k/2). The product
// sets are built once and reused across queries.
class ReflectionOracle {
 public:
  // Upper bound on the multiplications spent building one product layer.
  static constexpr std::uint64_t kLayerBudget = 50'000'000;

  ReflectionOracle(PackedOps ops, std::vector<Key> involutions) : ops_(std::move(ops)), involutions_(std::move(involutions)) {
    if (std::find(involutions_.begin(), involutions_.end(), ops_.identity()) == involutions_.end()) {
      involutions_.push_back(ops_.identity());
    }
    KeyIndex zero(1);
    zero.insert(ops_.identity());
    layers_.push_back(std::move(zero));
    members_.push_back({ops_.identity()});
  }

  explicit ReflectionOracle(const GroupTable& g) : ReflectionOracle(g.ops, g.involution_keys()) {}

  const PackedOps& ops() const { return ops_; }

  // I^m as a hashed set.
  const KeyIndex& layer(unsigned m) {
    while (layers_.size() <= m) {
      const std::vector<Key>& last = members_.back();
      require(static_cast<std::uint64_t>(last.size()) * involutions_.size() <= kLayerBudget, ErrorCode::BudgetExceeded,
              "product set of involutions exceeds the census budget");
      KeyIndex next(last.size() * 4);
      std::vector<Key> keys;
      for (Key a : last) {
        for (Key j : involutions_) {
          Key y = ops_.multiply(a, j);
          if (next.insert(y)) keys.push_back(y);
        }
      }
      layers_.push_back(std::move(next));
      members_.push_back(std::move(keys));
    }
    return layers_[m];
  }

  bool is_k_reflectional(Key x, unsigned k) {
    require(k <= 6, ErrorCode::BudgetExceeded, "reflection counts above 6 are not supported");
    unsigned lo = k / 2, hi = k - lo;
    layer(hi);
    // a in I^m iff a^{-1} in I^m, so x = a b iff a^{-1} x = b; scan the smaller side.
    const std::vector<Key>& small = members_[lo];
    const KeyIndex& big = layers_[hi];
    for (Key b : small) {
      // x b^{-1} lies in I^hi iff x b' does for b' in I^lo, since the set is closed under inverses.
      if (big.contains(ops_.multiply(x, b))) return true;
    }
    return false;
  }

 private:
  PackedOps ops_;
  std::vector<Key> involutions_;
  std::vector<KeyIndex> layers_;
  std::vector<std::vector<Key>> members_;
};

inline bool is_k_reflectional(const GroupTable& g, std::uint32_t x, unsigned k) {
  ReflectionOracle oracle(g);
  return oracle.is_k_reflectional(g.elements.at(x), k);
}

// SL_2(F_3) -> Z/3 through the action on the four points of the projective
// line, modulo the Klein four-group of A_4.
inline int sl2f3_pi(const Matrix& m) {
  require(m.field().is_finite() && m.field().modulus() == 3 && m.rows() == 2 && m.cols() == 2, ErrorCode::NotInGroup,
          "expected a 2x2 matrix over F_3");
  require(det(m).is_one(), ErrorCode::NotInGroup, "matrix does not have determinant 1");
  static constexpr int points[4][2] = {{1, 0}, {1, 1}, {1, 2}, {0, 1}};
  auto index_of = [](int x, int y) {
    if (x == 0) return 3;
    int inv = x;  // x^{-1} = x in F_3
    return (y * inv) % 3;
  };
  std::array<int, 4> sigma{};
  for (int i = 0; i < 4; ++i) {
    int x = 0, y = 0;
    for (int j = 0; j < 2; ++j) {
      x += static_cast<int>(m(0, j).residue_value()) * points[i][j];
      y += static_cast<int>(m(1, j).residue_value()) * points[i][j];
    }
    sigma[i] = index_of(x % 3, y % 3);
  }
  // The Klein subgroup {id, (01)(23), (02)(13), (03)(12)}; c = (0 1 2).
  auto in_klein = [](const std::array<int, 4>& s) {
    return (s[0] == 0 && s[1] == 1 && s[2] == 2 && s[3] == 3) || (s[0] == 1 && s[1] == 0 && s[2] == 3 && s[3] == 2) ||
           (s[0] == 2 && s[1] == 3 && s[2] == 0 && s[3] == 1) || (s[0] == 3 && s[1] == 2 && s[2] == 1 && s[3] == 0);
  };
  static constexpr std::array<int, 4> c_inverse = {2, 0, 1, 3};
  std::array<int, 4> s = sigma;
  for (int k = 0; k < 3; ++k) {
    if (in_klein(s)) return k;
    std::array<int, 4> t{};
    for (int i = 0; i < 4; ++i) t[i] = c_inverse[s[i]];
    s = t;
  }
  fail(ErrorCode::InternalCheckFailed, "permutation is not even");
}

// One CSV row per element: id, matrix entries, trace, minimal polynomial, length.
inline void write_census_csv(std::ostream& out, const GroupTable& g, const LengthTable& lengths) {
  out << "id,matrix,trace,min_poly,reflection_length\n";
  std::size_t n = g.dim();
  for (std::uint32_t id = 0; id < g.size(); ++id) {
    PackedOps::Entries e = g.ops.unpack(g.elements[id]);
    out << id << ",\"[";
    for (std::size_t i = 0; i < n; ++i) {
      out << (i ? ";" : "");
      for (std::size_t j = 0; j < n; ++j) out << (j ? " " : "") << unsigned(e[i * n + j]);
    }
    out << "]\"," << g.ops.trace(g.elements[id]) << ",\"" << min_poly(g.matrix(id)).to_string() << "\",";
    if (lengths.reachable(id)) {
      out << unsigned(lengths.lengths[id]);
    } else {
      out << "unreachable";
    }
    out << '\n';
  }
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

struct CheckOptions {
  std::uint64_t seed = 0;
  bool extended = false;      // adds Sp_4(F_5) through the meet-in-the-middle oracle
  std::size_t samples = 1000;  // pairs drawn for the two randomized identities
};

namespace detail {

// id_2 on the first hyperbolic plane, the companion of t^2 + a t + 1 on the second.
inline Matrix identity_plus_companion(const Field& f, long long a) {
  Matrix m = Matrix::identity(f, 4);
  m(1, 1) = f.zero();
  m(1, 3) = -f.one();
  m(3, 1) = f.one();
  m(3, 3) = f.from_int(-a);
  return m;
}

// The cell with minimal polynomial t^2 + 1 on (e1, f1) and [[eta, 1], [0, eta]] on (e2, f2).
inline Matrix quarter_turn_plus_jordan(const Field& f, long long eta) {
  Matrix m(f, 4, 4);
  m(0, 2) = -f.one();
  m(2, 0) = f.one();
  m(1, 1) = f.from_int(eta);
  m(1, 3) = f.one();
  m(3, 3) = f.from_int(eta);
  return m;
}

inline Matrix random_invertible(Rng& rng, const Field& f, std::size_t n) {
  for (;;) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.scalar(f, 2);
    }
    if (!det(m).is_zero()) return m;
  }
}

// P diag(C, ..., C) P^{-1} with C the companion of t^2 - s t + c, c != 0.
struct Quadratic {
  Matrix a;
  Scalar constant;
};

inline Quadratic random_quadratic(Rng& rng, const Field& f, std::size_t n) {
  Scalar s = rng.scalar(f, 3);
  Scalar c = rng.nonzero_scalar(f, 3);
  Polynomial p(f, {c, -s, f.one()});
  std::vector<Polynomial> blocks(n / 2, p);
  Matrix p_mat = random_invertible(rng, f, n);
  return {p_mat * block_companion(blocks, f) * inverse(p_mat), c};
}

inline Matrix random_involution(Rng& rng, const Field& f, std::size_t n) {
  std::vector<Scalar> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(rng.below(2) ? f.one() : -f.one());
  Matrix p = random_invertible(rng, f, n);
  return p * Matrix::diagonal(d) * inverse(p);
}

inline std::string join_lengths(const std::vector<unsigned>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace detail

// Sp_4(F_3) with its exact reflection lengths, shared by the exhaustive checks.
struct F3Census {
  GroupTable group = enumerate_group(3, 4);
  LengthTable lengths = reflection_lengths(group);
};

inline CheckResult check_not_three_reflectional(const F3Census& c, bool extended) {
  // Every element with minimal polynomial (t-1)(t^2+1) and a 2-dimensional kernel of u^2+1.
  const PackedOps& ops = c.group.ops;
  Key id = ops.identity();
  std::vector<unsigned> seen;
  std::size_t matches = 0;
  bool ok = true;
  for (std::uint32_t i = 0; i < c.group.size(); ++i) {
    Key u = c.group.elements[i];
    Key u2p1 = ops.add_scaled(ops.multiply(u, u), id, 1);
    Key um1 = ops.add_scaled(u, id, 2);
    if (ops.multiply(um1, u2p1) != 0 || um1 == 0 || u2p1 == 0 || ops.rank(u2p1) != 2) continue;
    ++matches;
    unsigned len = c.lengths.lengths[i];
    if (std::find(seen.begin(), seen.end(), len) == seen.end()) seen.push_back(len);
    ok = ok && len >= 4;
  }
  ReflectionOracle oracle(c.group);
  Key sample = ops.encode(detail::identity_plus_companion(ops.field(), 0));
  bool sample_three = oracle.is_k_reflectional(sample, 3);
  ok = ok && matches > 0 && !sample_three;
  std::sort(seen.begin(), seen.end());
  std::string detail = "F3: " + std::to_string(matches) + " elements, lengths {" + detail::join_lengths(seen) +
                       "}, id_2 + quarter turn has length " +
                       std::to_string(c.lengths.lengths[c.group.id_of(detail::identity_plus_companion(ops.field(), 0))]);
  if (extended) {
    PackedOps f5(5, 4);
    ReflectionOracle o5(f5, involutions_from_planes(f5));
    // Monic palindromials t^2 + a t + 1 over F_5 without roots +-1: a = 0, 1, 4.
    for (long long a : {0LL, 1LL, 4LL}) {
      bool three = o5.is_k_reflectional(f5.encode(detail::identity_plus_companion(f5.field(), a)), 3);
      ok = ok && !three;
      detail += "; F5 a=" + std::to_string(a) + ": 3-reflectional=" + (three ? "true" : "false");
    }
  }
  return {"not-3-reflectional", ok, detail};
}

inline CheckResult check_f3_not_four_reflectional(const F3Census& c) {
  const PackedOps& ops = c.group.ops;
  ReflectionOracle oracle(c.group);
  bool ok = true;
  std::string detail;
  for (long long eta : {1LL, -1LL}) {
    Matrix u = detail::quarter_turn_plus_jordan(ops.field(), eta);
    std::uint32_t id = c.group.id_of(u);
    bool four = oracle.is_k_reflectional(c.group.elements[id], 4);
    unsigned len = c.lengths.lengths[id];
    ok = ok && !four && len >= 5;
    detail += std::string(detail.empty() ? "" : "; ") + "eta=" + std::to_string(eta) +
              ": 4-reflectional=" + (four ? "true" : "false") + ", length " + std::to_string(len);
  }
  return {"f3-not-4-reflectional", ok, detail};
}

// Length-2 elements are annihilated by some t^2 + a t + 1.
inline CheckResult check_two_reflectional_quadratic(const F3Census& c) {
  const PackedOps& ops = c.group.ops;
  Key id = ops.identity();
  std::size_t total = 0, exceptions = 0;
  for (std::uint32_t i = 0; i < c.group.size(); ++i) {
    if (c.lengths.lengths[i] != 2) continue;
    Key u = c.group.elements[i];
    if (ops.multiply(u, u) == id) continue;
    ++total;
    Key u2p1 = ops.add_scaled(ops.multiply(u, u), id, 1);
    bool found = false;
    for (std::uint64_t a = 0; a < ops.p() && !found; ++a) found = ops.add_scaled(u2p1, u, a) == 0;
    if (!found) ++exceptions;
  }
  return {"length-2-quadratic", exceptions == 0 && total > 0,
          std::to_string(total) + " elements, " + std::to_string(exceptions) + " exceptions"};
}

inline CheckResult check_length_three_trace(const F3Census& c) {
  std::size_t total = 0, exceptions = 0;
  for (std::uint32_t i = 0; i < c.group.size(); ++i) {
    if (c.lengths.lengths[i] != 3) continue;
    ++total;
    if (c.group.ops.trace(c.group.elements[i]) != 0) ++exceptions;
  }
  return {"length-3-trace", exceptions == 0 && total > 0,
          std::to_string(total) + " elements, " + std::to_string(exceptions) + " exceptions"};
}

// a, b annihilated by monic quadratics p, q commute with ab + p(0) q(0) (ab)^{-1}.
inline CheckResult check_quadratic_commutation(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  const std::vector<Field> fields = {Field::rationals(), Field::prime(5), Field::prime(7)};
  std::size_t failures = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    const Field& f = fields[t % fields.size()];
    std::size_t n = 2 * (1 + rng.below(3));
    auto a = detail::random_quadratic(rng, f, n);
    auto b = detail::random_quadratic(rng, f, n);
    Matrix u = a.a * b.a;
    Matrix x = u + (a.constant * b.constant) * inverse(u);
    if (a.a * x != x * a.a || b.a * x != x * b.a) ++failures;
  }
  return {"quadratic-commutation", failures == 0,
          std::to_string(samples) + " pairs, " + std::to_string(failures) + " failures"};
}

// For involutions i, j and u = ij, both stabilize ker (u - eta)^k and im (u - eta)^k.
inline CheckResult check_involution_stabilization(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  const std::vector<Field> fields = {Field::rationals(), Field::prime(5), Field::prime(7)};
  std::size_t failures = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    const Field& f = fields[t % fields.size()];
    std::size_t n = 2 + rng.below(5);
    Matrix i = detail::random_involution(rng, f, n);
    Matrix j = detail::random_involution(rng, f, n);
    Matrix u = i * j;
    bool ok = true;
    for (long long eta : {1LL, -1LL}) {
      Matrix shifted = u - Matrix::scalar(f.from_int(eta), n);
      Matrix power = Matrix::identity(f, n);
      for (std::size_t k = 0; k <= n && ok; ++k) {
        Matrix ker = kernel(power);
        Matrix im = column_basis(power);
        ok = span_contains(ker, i * ker) && span_contains(ker, j * ker) && span_contains(im, i * im) &&
             span_contains(im, j * im);
        power = power * shifted;
      }
    }
    if (!ok) ++failures;
  }
  return {"involution-pair-stabilization", failures == 0,
          std::to_string(samples) + " pairs, " + std::to_string(failures) + " failures"};
}

// A = [[D, D], [0, D]] with D = diag(1, -1): not 4-reflectional, or 3-reflectional.
inline CheckResult check_block_matrix_length(const F3Census& c) {
  const Field& f = c.group.field();
  Matrix a = Matrix::from_ints(f, {{1, 0, 1, 0}, {0, -1, 0, -1}, {0, 0, 1, 0}, {0, 0, 0, -1}});
  unsigned len = c.lengths.lengths[c.group.id_of(a)];
  return {"block-matrix-length", len != 4, "length " + std::to_string(len)};
}

inline CheckResult check_lower_bound(const F3Census& c, bool extended) {
  unsigned longest = c.lengths.max_length();
  bool ok = longest >= 4;
  std::string detail = "F3: maximal length " + std::to_string(longest);
  if (extended) {
    PackedOps f5(5, 4);
    ReflectionOracle o5(f5, involutions_from_planes(f5));
    bool three = o5.is_k_reflectional(f5.encode(detail::identity_plus_companion(f5.field(), 0)), 3);
    ok = ok && !three;
    detail += std::string("; F5: id_2 + quarter turn 3-reflectional=") + (three ? "true" : "false");
  }
  return {"lower-bound-4", ok, detail};
}

inline CheckReport run_checks(const CheckOptions& options = {}) {
  F3Census c;
  CheckReport r;
  r.checks.push_back(check_not_three_reflectional(c, options.extended));
  r.checks.push_back(check_f3_not_four_reflectional(c));
  r.checks.push_back(check_two_reflectional_quadratic(c));
  r.checks.push_back(check_length_three_trace(c));
  r.checks.push_back(check_quadratic_commutation(options.seed, options.samples));
  r.checks.push_back(check_involution_stabilization(options.seed + 1, options.samples));
  r.checks.push_back(check_block_matrix_length(c));
  r.checks.push_back(check_lower_bound(c, options.extended));
  return r;
}

}  // namespace symplinv::census
