#pragma once
// Exact arithmetic in F_{p^n} for prime p, 1 <= n <= 12, q = p^n bounded by a
// configurable cap so discrete-log tables stay desk-sized.
//
// Elements are encoded as indices in [0, q): the base-p digits of the index
// are the coefficients of the element in the polynomial basis 1, t, ..,
// t^{n-1} of F_p[t]/(f).  The modulus f is the monic irreducible of degree n
// whose non-leading coefficient vector has the smallest index (same base-p
// encoding), so every (p, n) names one canonical field and results are
// reproducible across runs.  Irreducibility is decided exactly by the
// Frobenius gcd criterion: f of degree n is irreducible over F_p iff
// gcd(t^{p^k} - t, f) = 1 for all 1 <= k <= n/2.
//
// The multiplicative group is tabulated once: g is the generator of smallest
// index, exp[k] = g^k and dlog[x] invert each other, and all products,
// inverses, powers, element orders and subfield-membership tests reduce to
// exact integer arithmetic on exponents mod q-1.

#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "common.hpp"

namespace charbox {

struct Elem {
  u64 v = 0;
  friend bool operator==(Elem a, Elem b) { return a.v == b.v; }
  friend bool operator!=(Elem a, Elem b) { return a.v != b.v; }
  friend bool operator<(Elem a, Elem b) { return a.v < b.v; }
};

namespace poly {
// Dense coefficient vectors over F_p, index = degree.  Only used during
// context construction; hot paths run on dlog tables.

inline void trim(std::vector<u64>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::vector<u64> mul(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  std::vector<u64> c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  }
  trim(c);
  return c;
}

// a mod f, f monic of degree n (coefficients f[0..n], f[n] = 1).
inline std::vector<u64> mod(std::vector<u64> a, const std::vector<u64>& f, u64 p) {
  size_t n = f.size() - 1;
  while (a.size() > n) {
    u64 lead = a.back();
    size_t sh = a.size() - 1 - n;
    if (lead != 0) {
      for (size_t j = 0; j < n; ++j) a[sh + j] = (a[sh + j] + p * p - lead * f[j] % p) % p;
    }
    a.pop_back();
    trim(a);
  }
  trim(a);
  return a;
}

inline std::vector<u64> mulmod(const std::vector<u64>& a, const std::vector<u64>& b,
                               const std::vector<u64>& f, u64 p) {
  return mod(mul(a, b, p), f, p);
}

inline std::vector<u64> powmod(std::vector<u64> base, u64 e, const std::vector<u64>& f, u64 p) {
  std::vector<u64> r{1};
  while (e) {
    if (e & 1) r = mulmod(r, base, f, p);
    base = mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

}  // namespace poly

class FieldCtx {
 public:
  // Builds the canonical field of order p^n.  cap = 0 means: use CHARBOX_CAP
  // from the environment, defaulting to 2^26.
  static FieldCtx make(u64 p, int n, u64 cap = 0) {
    if (cap == 0) cap = env_cap();
    if (!is_prime(p)) fail_invalid("p = " + std::to_string(p) + " is not prime");
    if (n < 1 || n > 12) fail_invalid("n must be in [1, 12], got " + std::to_string(n));
    u64 q = checked_pow(p, static_cast<unsigned>(n));
    if (q > cap) {
      fail_budget("q = " + std::to_string(q) + " exceeds table cap " + std::to_string(cap));
    }
    if (q > (u64(1) << 32)) fail_budget("q exceeds 2^32: dlog tables not representable");
    FieldCtx ctx;
    ctx.p_ = p;
    ctx.n_ = n;
    ctx.q_ = q;
    ctx.modulus_ = find_irreducible(p, n);
    ctx.build_tables();
    return ctx;
  }

  u64 p() const { return p_; }
  int n() const { return n_; }
  u64 q() const { return q_; }
  u64 units() const { return q_ - 1; }
  const std::vector<u64>& modulus() const { return modulus_; }  // c_0..c_n, monic
  Elem gen() const { return g_; }

  // --- element codec ---------------------------------------------------

  Elem from_coeffs(const std::vector<u64>& c) const {
    if (c.size() > static_cast<size_t>(n_)) fail_invalid("coefficient vector longer than n");
    u64 v = 0;
    for (size_t i = c.size(); i-- > 0;) v = v * p_ + c[i] % p_;
    return {v};
  }

  std::vector<u64> coeffs(Elem x) const {
    std::vector<u64> c(n_);
    u64 v = x.v;
    for (int i = 0; i < n_; ++i) {
      c[i] = v % p_;
      v /= p_;
    }
    return c;
  }

  u64 coeff(Elem x, int i) const {
    u64 v = x.v;
    for (int k = 0; k < i; ++k) v /= p_;
    return v % p_;
  }

  // Constant c mod p as a field element (c may be negative).
  Elem from_int(i64 c) const {
    i64 r = c % static_cast<i64>(p_);
    if (r < 0) r += static_cast<i64>(p_);
    return {static_cast<u64>(r)};
  }

  Elem zero() const { return {0}; }
  Elem one() const { return {1}; }

  // --- arithmetic -------------------------------------------------------

  Elem add(Elem a, Elem b) const {
    u64 v = 0, mult = 1, x = a.v, y = b.v;
    for (int i = 0; i < n_; ++i) {
      u64 s = x % p_ + y % p_;
      if (s >= p_) s -= p_;
      v += s * mult;
      mult *= p_;
      x /= p_;
      y /= p_;
    }
    return {v};
  }

  Elem neg(Elem a) const {
    u64 v = 0, mult = 1, x = a.v;
    for (int i = 0; i < n_; ++i) {
      u64 d = x % p_;
      v += (d == 0 ? 0 : p_ - d) * mult;
      mult *= p_;
      x /= p_;
    }
    return {v};
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (a.v == 0 || b.v == 0) return {0};
    u64 e = dlog_[a.v] + dlog_[b.v];
    if (e >= q_ - 1) e -= q_ - 1;
    return {exp_[e]};
  }

  Elem inv(Elem a) const {
    if (a.v == 0) fail_invalid("inverse of zero");
    u64 d = dlog_[a.v];
    return {exp_[d == 0 ? 0 : q_ - 1 - d]};
  }

  Elem pow(Elem a, u64 e) const {
    if (a.v == 0) return e == 0 ? one() : zero();
    u64 k = static_cast<u64>(u128(dlog_[a.v]) * (e % (q_ - 1)) % (q_ - 1));
    return {exp_[k]};
  }

  // c * a for an integer scalar c (c mod p taken first).
  Elem mul_int(Elem a, i64 c) const { return mul(a, from_int(c)); }

  Elem frobenius(Elem a) const { return pow(a, p_); }

  // --- multiplicative structure ------------------------------------------

  u64 dlog(Elem x) const {
    if (x.v == 0) fail_invalid("dlog of zero");
    return dlog_[x.v];
  }

  Elem exp(u64 k) const { return {exp_[k % (q_ - 1)]}; }

  u64 order(Elem x) const {
    if (x.v == 0) fail_invalid("multiplicative order of zero");
    return (q_ - 1) / std::gcd(q_ - 1, dlog_[x.v]);
  }

  // Smallest s (necessarily s | n) with x in the subfield F_{p^s}.
  int subfield_degree(Elem x) const {
    if (x.v == 0) return 1;
    u64 d = dlog_[x.v];
    for (u64 s : divisors(static_cast<u64>(n_))) {
      u64 sub_units = checked_pow(p_, static_cast<unsigned>(s)) - 1;
      if (d % ((q_ - 1) / sub_units) == 0) return static_cast<int>(s);
    }
    return n_;  // unreachable: s = n always passes
  }

  // --- static polynomial machinery ----------------------------------------

  // Exact irreducibility test for a monic poly given as c_0..c_deg (c_deg=1).
  static bool is_irreducible(const std::vector<u64>& f, u64 p) {
    if (f.size() < 2) fail_invalid("polynomial degree must be >= 1");
    if (f.back() != 1) fail_invalid("polynomial must be monic");
    size_t n = f.size() - 1;
    if (n == 1) return true;
    // x := t^(p^k) mod f, iterated; factor of degree k exists iff
    // gcd(x - t, f) != 1 for some k <= n/2.
    std::vector<u64> x{0, 1};
    for (size_t k = 1; k + k <= n; ++k) {
      x = poly::powmod(x, p, f, p);
      std::vector<u64> d = x;
      if (d.size() < 2) d.resize(2, 0);
      d[1] = (d[1] + p - 1) % p;  // x - t
      poly::trim(d);
      if (!poly_gcd_is_unit(d, f, p)) return false;
    }
    return true;
  }

  // Monic irreducible of degree n over F_p with the smallest coefficient
  // index (base-p encoding of c_0..c_{n-1}).
  static std::vector<u64> find_irreducible(u64 p, int n) {
    u64 q = checked_pow(p, static_cast<unsigned>(n));
    for (u64 v = 0; v < q; ++v) {
      std::vector<u64> f(n + 1, 0);
      u64 w = v;
      for (int i = 0; i < n; ++i) {
        f[i] = w % p;
        w /= p;
      }
      f[n] = 1;
      if (is_irreducible(f, p)) return f;
    }
    fail_math("no irreducible polynomial found (impossible)");
  }

 private:
  u64 p_ = 0, q_ = 0;
  int n_ = 0;
  std::vector<u64> modulus_;
  Elem g_{0};
  std::vector<u32> dlog_;  // index -> exponent; entry 0 unused
  std::vector<u32> exp_;   // exponent -> index

  static bool poly_gcd_is_unit(std::vector<u64> a, std::vector<u64> b, u64 p) {
    poly::trim(a);
    poly::trim(b);
    while (!b.empty()) {
      // a := a mod b (b scaled monic via leading inverse)
      u64 inv_lead = powmod(b.back(), p - 2, p);
      while (a.size() >= b.size()) {
        u64 c = a.back() * inv_lead % p;
        size_t sh = a.size() - b.size();
        if (c != 0) {
          for (size_t j = 0; j < b.size(); ++j) a[sh + j] = (a[sh + j] + p * p - c * b[j] % p) % p;
        }
        a.pop_back();
        poly::trim(a);
        if (a.empty()) break;
      }
      std::swap(a, b);
    }
    return a.size() == 1;  // nonzero constant
  }

  // Schoolbook product of two index-encoded elements; used only to build the
  // exp/dlog tables, after which mul() runs on exponents.
  Elem raw_mul(Elem a, Elem b) const {
    std::array<u64, 24> c{};
    std::array<u64, 12> da{}, db{};
    u64 x = a.v, y = b.v;
    for (int i = 0; i < n_; ++i) {
      da[i] = x % p_;
      db[i] = y % p_;
      x /= p_;
      y /= p_;
    }
    for (int i = 0; i < n_; ++i) {
      if (da[i] == 0) continue;
      for (int j = 0; j < n_; ++j) c[i + j] = (c[i + j] + da[i] * db[j]) % p_;
    }
    for (int i = 2 * n_ - 2; i >= n_; --i) {
      u64 lead = c[i];
      if (lead == 0) continue;
      c[i] = 0;
      for (int j = 0; j < n_; ++j) {
        c[i - n_ + j] = (c[i - n_ + j] + p_ * p_ - lead * modulus_[j] % p_) % p_;
      }
    }
    u64 v = 0;
    for (int i = n_ - 1; i >= 0; --i) v = v * p_ + c[i];
    return {v};
  }

  void build_tables() {
    // Smallest-index generator: order test against the prime factors of q-1.
    auto fac = factorize(q_ - 1);
    auto raw_pow = [&](Elem a, u64 e) {
      Elem r = one(), b = a;
      while (e) {
        if (e & 1) r = raw_mul(r, b);
        b = raw_mul(b, b);
        e >>= 1;
      }
      return r;
    };
    Elem g{0};
    for (u64 v = 1; v < q_; ++v) {
      Elem cand{v};
      bool ok = true;
      for (auto [pf, mult] : fac) {
        (void)mult;
        if (raw_pow(cand, (q_ - 1) / pf) == one()) {
          ok = false;
          break;
        }
      }
      if (ok) {
        g = cand;
        break;
      }
    }
    if (g.v == 0 && q_ > 2) fail_math("no generator found (impossible)");
    if (q_ == 2) g = one();
    g_ = g;

    dlog_.assign(q_, 0);
    exp_.assign(q_ - 1, 0);
    // Walk powers of g keeping the digit vector; avoids q decode/encodes.
    Elem x = one();
    u64 filled = 0;
    for (u64 k = 0; k < q_ - 1; ++k) {
      if (k > 0 && x == one()) fail_math("generator order too small (impossible)");
      dlog_[x.v] = static_cast<u32>(k);
      exp_[k] = static_cast<u32>(x.v);
      ++filled;
      x = raw_mul(x, g_);
    }
    if (x != one() || filled != q_ - 1) fail_math("dlog table incomplete (impossible)");
  }
};

// --- element text form -------------------------------------------------
// Polynomial spelling in t: "0", "4", "t", "3t+2", "t^2+6t+1".  parse_elem
// also accepts "idx:<index>" for the raw encoding.

inline std::string to_string(const FieldCtx& F, Elem x) {
  if (x.v == 0) return "0";
  std::string s;
  auto c = F.coeffs(x);
  for (int i = F.n() - 1; i >= 0; --i) {
    if (c[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0) {
      s += std::to_string(c[i]);
    } else {
      if (c[i] != 1) s += std::to_string(c[i]);
      s += "t";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

inline Elem parse_elem(const FieldCtx& F, const std::string& str) {
  std::string s;
  for (char ch : str)
    if (!isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail_invalid("empty element literal");
  if (s.rfind("idx:", 0) == 0) {
    const std::string digits = s.substr(4);
    if (digits.empty()) fail_invalid("bad element literal '" + str + "'");
    char* end = nullptr;
    u64 v = std::strtoull(digits.c_str(), &end, 10);
    if (*end != '\0' || v >= F.q()) fail_invalid("element index out of range in '" + str + "'");
    return {v};
  }
  std::vector<u64> c(F.n(), 0);
  size_t i = 0;
  bool first = true;
  while (i < s.size()) {
    i64 sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      fail_invalid("bad element literal '" + str + "'");
    }
    first = false;
    u64 coef = 1;
    bool saw_digits = false;
    u64 acc = 0;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
      acc = acc * 10 + static_cast<u64>(s[i] - '0');
      saw_digits = true;
      ++i;
    }
    if (saw_digits) coef = acc;
    if (saw_digits && i < s.size() && s[i] == '*') ++i;  // "3*t" form
    u64 deg = 0;
    if (i < s.size() && s[i] == 't') {
      ++i;
      deg = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        u64 d = 0;
        bool saw = false;
        while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
          d = d * 10 + static_cast<u64>(s[i] - '0');
          saw = true;
          ++i;
        }
        if (!saw) fail_invalid("bad exponent in '" + str + "'");
        deg = d;
      }
    } else if (!saw_digits) {
      fail_invalid("bad element literal '" + str + "'");
    }
    if (deg >= static_cast<u64>(F.n()))
      fail_invalid("degree " + std::to_string(deg) + " >= n in '" + str + "'");
    u64 cm = (coef % F.p() * (sign < 0 ? F.p() - 1 : 1)) % F.p();
    c[deg] = (c[deg] + cm) % F.p();
  }
  return F.from_coeffs(c);
}

}  // namespace charbox
