#pragma once
// Multiplicative characters of F_q^* and exact sum accumulation.
//
// A character is indexed by m mod (q-1): chi_m(g^k) = e(mk/(q-1)) for the
// canonical generator g, extended by chi(0) = 0.  All evaluation is integer
// arithmetic on exponents; nothing transcendental enters until a sum is
// converted for display or compared against an analytic bound.
//
// Sums of values of a character of order d <= 4 live in Z[zeta_d] and are
// accumulated as exact integer pairs over the basis {1, zeta_d}:
//   d = 1, 2 : b stays 0,                |a|^2        = a^2
//   d = 3    : zeta^2 = -1 - zeta,       |a + b zeta|^2 = a^2 - ab + b^2
//   d = 4    : zeta = i,                 |a + b i|^2    = a^2 + b^2
// For d > 4 sums fall back to compensated (Kahan) accumulation in long
// double, carrying a certified error bound of 8*eps per term.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <limits>

#include "field.hpp"

namespace charbox {

using boost::multiprecision::cpp_int;

inline constexpr long double kPiL = 3.14159265358979323846264338327950288L;

// i128 -> cpp_int without truncation.
inline cpp_int to_cpp_int(i128 v) {
  bool neg = v < 0;
  u128 a = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
  cpp_int r = cpp_int(static_cast<u64>(a >> 64));
  r <<= 64;
  r += cpp_int(static_cast<u64>(a));
  return neg ? -r : r;
}

struct CharValue {
  bool is_zero = false;
  u64 e = 0;  // chi(x) = exp(2 pi i e / (q-1)) when !is_zero
};

class Character {
 public:
  Character(const FieldCtx& F, u64 m) : F_(&F), m_(m % F.units()) {
    d_ = F.units() / std::gcd(F.units(), m_ == 0 ? F.units() : m_);
  }

  const FieldCtx& field() const { return *F_; }
  u64 m() const { return m_; }
  u64 order() const { return d_; }
  bool trivial() const { return d_ == 1; }

  CharValue eval(Elem x) const {
    if (x.v == 0) return {true, 0};
    return {false, static_cast<u64>(u128(m_) * F_->dlog(x) % F_->units())};
  }

  // Exponent as a power of zeta_d (the value exponent is always a multiple
  // of (q-1)/d).
  u64 root_index(const CharValue& cv) const { return cv.is_zero ? 0 : cv.e / (F_->units() / d_); }

  std::complex<double> value(Elem x) const {
    CharValue cv = eval(x);
    if (cv.is_zero) return {0.0, 0.0};
    long double ang =
        2.0L * kPiL * static_cast<long double>(cv.e) / static_cast<long double>(F_->units());
    return {static_cast<double>(cosl(ang)), static_cast<double>(sinl(ang))};
  }

  // Is chi trivial on the subfield F_{p^s}^* (s | n required)?
  bool restriction_trivial(int s) const {
    if (s < 1 || F_->n() % s != 0)
      fail_invalid("subfield degree s = " + std::to_string(s) + " does not divide n");
    u64 sub_units = checked_pow(F_->p(), static_cast<unsigned>(s)) - 1;
    return m_ % sub_units == 0;
  }

 private:
  const FieldCtx* F_;
  u64 m_;
  u64 d_;
};

// --- exact accumulation over Z[zeta_d], d <= 4 ---------------------------

struct ExactSum {
  u64 d = 1;
  i64 a = 0, b = 0;

  static bool supported(u64 d) { return d >= 1 && d <= 4; }

  void add_root(u64 k) { bump(k, 1); }
  void sub_root(u64 k) { bump(k, -1); }
  void add_root_multi(u64 k, i64 c) { bump(k % d, c); }

  i128 norm2() const {
    i128 A = a, B = b;
    if (d == 3) return A * A - A * B + B * B;
    if (d == 4) return A * A + B * B;
    return A * A;
  }

  std::complex<double> to_complex() const {
    double x = static_cast<double>(a), y = static_cast<double>(b);
    if (d == 3) return {x - 0.5 * y, y * std::sqrt(3.0) / 2.0};
    if (d == 4) return {x, y};
    return {x, 0.0};
  }

  long double abs() const { return sqrtl(static_cast<long double>(norm2())); }

  friend ExactSum operator-(const ExactSum& s, const ExactSum& t) {
    ExactSum r = s;
    r.a -= t.a;
    r.b -= t.b;
    return r;
  }
  // s scaled by an integer.
  ExactSum scaled(i64 c) const {
    ExactSum r = *this;
    r.a *= c;
    r.b *= c;
    return r;
  }

 private:
  void bump(u64 k, i64 s) {
    switch (d) {
      case 1:
        a += s;
        break;
      case 2:
        a += (k == 0 ? s : -s);
        break;
      case 3:
        if (k == 0)
          a += s;
        else if (k == 1)
          b += s;
        else {
          a -= s;
          b -= s;
        }
        break;
      case 4:
        if (k == 0)
          a += s;
        else if (k == 1)
          b += s;
        else if (k == 2)
          a -= s;
        else
          b -= s;
        break;
      default:
        fail_invalid("exact accumulation only for order <= 4");
    }
  }
};

// --- compensated accumulation for d > 4 ----------------------------------

struct Kahan {
  long double s = 0, c = 0;
  void add(long double x) {
    long double y = x - c;
    long double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

struct KahanComplex {
  Kahan re, im;
  u64 terms = 0;
  void add(std::complex<long double> z) {
    re.add(z.real());
    im.add(z.imag());
    ++terms;
  }
  std::complex<long double> value() const { return {re.s, im.s}; }
  // Certified bound on accumulation + per-term evaluation error for unit
  // terms; deliberately generous.
  long double err_bound() const {
    return 8.0L * std::numeric_limits<long double>::epsilon() * static_cast<long double>(terms);
  }
};

// --- combined character-sum accumulator -----------------------------------

struct CharSumAcc {
  u64 d = 1;
  bool exact = false;
  ExactSum ex;
  KahanComplex kc;
  u64 zeros = 0, terms = 0;
  u64 units = 1;  // q-1, for angle reconstruction

  explicit CharSumAcc(const Character& chi)
      : d(chi.order()), exact(ExactSum::supported(chi.order())), units(chi.field().units()) {
    ex.d = d;
  }

  void add(const Character& chi, Elem x) {
    CharValue cv = chi.eval(x);
    ++terms;
    if (cv.is_zero) {
      ++zeros;
      return;
    }
    if (exact) {
      ex.add_root(chi.root_index(cv));
    } else {
      long double ang =
          2.0L * kPiL * static_cast<long double>(cv.e) / static_cast<long double>(units);
      kc.add({cosl(ang), sinl(ang)});
    }
  }

  std::complex<double> approx() const {
    if (exact) {
      auto z = ex.to_complex();
      return z;
    }
    auto z = kc.value();
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
  }

  long double abs() const {
    if (exact) return ex.abs();
    return hypotl(kc.value().real(), kc.value().imag());
  }

  long double err_bound() const { return exact ? 0.0L : kc.err_bound(); }
};

// Exact statement "sum of chi over all of F_q^* is zero", decided by integer
// bookkeeping alone: walking x = g^k, the value exponents are mk mod (q-1);
// the sum vanishes iff d > 1 and every residue class mod d is hit equally
// often (geometric-series cancellation over a full period).
inline bool unit_sum_is_zero_exact(const Character& chi) {
  const FieldCtx& F = chi.field();
  u64 d = chi.order();
  if (d == 1) return false;  // trivial character sums to q-1
  // walking x = g^k, the root index is (m/G)k mod d with G = (q-1)/d
  u64 step = (chi.m() / (F.units() / d)) % d;
  std::vector<u64> hist(d, 0);
  u64 k_mod = 0;
  for (u64 k = 0; k < F.units(); ++k) {
    hist[k_mod] += 1;
    k_mod += step;
    if (k_mod >= d) k_mod -= d;
  }
  for (u64 h : hist)
    if (h != F.units() / d) return false;
  return true;
}

// --- interval moment sums --------------------------------------------------
// M = sum_{u in F_q} | sum_{j=0}^{len-1} chi(u + z0 + j) |^{2r}, the quantity
// bounded by the complete-interval moment inequality.  Exact (cpp_int) when
// d <= 4, else long double with a certified error bound.

struct MomentResult {
  bool exact = false;
  cpp_int lhs;          // valid when exact
  long double approx;   // always filled
  long double err;      // certified bound on |approx - truth| (0 when exact)
  u64 field_size;
  u64 len;
  unsigned r;
};

inline MomentResult moment_sum(const Character& chi, i64 z0, u64 len, unsigned r) {
  const FieldCtx& F = chi.field();
  if (len == 0) fail_invalid("interval length must be >= 1");
  if (r == 0) fail_invalid("moment exponent r must be >= 1");
  MomentResult out;
  out.exact = ExactSum::supported(chi.order());
  out.field_size = F.q();
  out.len = len;
  out.r = r;
  std::vector<Elem> shift(len);
  for (u64 j = 0; j < len; ++j) shift[j] = F.from_int(z0 + static_cast<i64>(j));
  cpp_int total = 0;
  long double total_ld = 0, err = 0;
  for (u64 uv = 0; uv < F.q(); ++uv) {
    Elem u{uv};
    if (out.exact) {
      ExactSum s;
      s.d = chi.order();
      for (u64 j = 0; j < len; ++j) {
        CharValue cv = chi.eval(F.add(u, shift[j]));
        if (!cv.is_zero) s.add_root(chi.root_index(cv));
      }
      cpp_int n2 = to_cpp_int(s.norm2());
      cpp_int pw = 1;
      for (unsigned k = 0; k < r; ++k) pw *= n2;
      total += pw;
    } else {
      KahanComplex s;
      for (u64 j = 0; j < len; ++j) {
        CharValue cv = chi.eval(F.add(u, shift[j]));
        if (cv.is_zero) continue;
        long double ang = 2.0L * kPiL * static_cast<long double>(cv.e) /
                          static_cast<long double>(F.units());
        s.add({cosl(ang), sinl(ang)});
      }
      long double a = hypotl(s.value().real(), s.value().imag());
      long double ea = s.err_bound();
      long double n2 = a * a;
      long double en2 = 2 * a * ea + ea * ea;
      long double pw = powl(n2, static_cast<long double>(r));
      long double epw =
          static_cast<long double>(r) * powl(n2 + en2, static_cast<long double>(r - 1)) * en2 +
          powl(n2, static_cast<long double>(r)) * 1e-18L;
      total_ld += pw;
      err += epw;
    }
  }
  if (out.exact) {
    out.lhs = total;
    out.approx = total.convert_to<long double>();
    out.err = 0;
  } else {
    out.approx = total_ld;
    out.err = err;
  }
  return out;
}

}  // namespace charbox
