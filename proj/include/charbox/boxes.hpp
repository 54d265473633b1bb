#pragma once
// Boxes in F_{p^n} and character sums over them.
//
// A box is B = { sum_i x_i omega_i : N_i + 1 <= x_i <= N_i + H_i } for a
// linearly independent basis (omega_1..omega_n) and side lengths 1 <= H_i <=
// p; |B| = prod H_i as a set because coordinates are distinct mod p.
// Enumeration is an odometer over integer coordinates with incremental field
// additions (one add per step, one subtract per wrap), so a full walk costs
// O(|B|) field additions.
//
// The short-interval amplification pipeline implements the shift-average /
// Hoelder bootstrap:  with r chosen from epsilon (or overridden), delta =
// n/(2r), I = [1, ceil(p^delta)] and B0 the box with coordinates
// [0, floor(p^{-2 delta} H_i)],
//   (shift average)  |S - avg_{y,z} S_{yz}| <= 6 p^{-delta} |B|,
//   (amplified)      |T| <= A^{1-1/r} Bq^{1/(2r)} C^{1/(2r)} + |B||I|,
// where T is the full shifted triple sum, omega(u) counts representations
// u = x y^{-1}, A = sum omega, Bq = sum omega^2, and C is the complete
// interval moment of order 2r.  Every inequality verdict is recorded with
// the exact quantities it was decided from.

#include <complex>
#include <functional>
#include <optional>
#include <unordered_map>

#include "chars.hpp"

namespace charbox {

struct BasisSpec {
  std::vector<Elem> omega;
};

// The n coefficient vectors must be linearly independent over F_p.
inline bool basis_valid(const FieldCtx& F, const BasisSpec& basis) {
  int n = F.n();
  if (static_cast<int>(basis.omega.size()) != n) return false;
  std::vector<std::vector<u64>> M(n);
  for (int i = 0; i < n; ++i) M[i] = F.coeffs(basis.omega[i]);
  u64 p = F.p();
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int piv = -1;
    for (int row = rank; row < n; ++row)
      if (M[row][col] != 0) {
        piv = row;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[rank], M[piv]);
    u64 inv = powmod(M[rank][col], p - 2, p);
    for (int row = rank + 1; row < n; ++row) {
      u64 c = M[row][col] * inv % p;
      if (c)
        for (int j = 0; j < n; ++j) M[row][j] = (M[row][j] + p * p - c * M[rank][j] % p) % p;
    }
    ++rank;
  }
  return rank == n;
}

inline BasisSpec polynomial_basis(const FieldCtx& F) {
  BasisSpec b;
  u64 v = 1;
  for (int i = 0; i < F.n(); ++i) {
    b.omega.push_back({v});
    if (i + 1 < F.n()) v *= F.p();
  }
  return b;
}

struct BoxSpec {
  BasisSpec basis;
  std::vector<i64> N;  // coordinate i runs N_i+1 .. N_i+H_i
  std::vector<u64> H;  // 1 <= H_i <= p
};

inline BoxSpec make_box(const FieldCtx& F, std::vector<u64> H, std::vector<i64> N = {}) {
  BoxSpec b;
  b.basis = polynomial_basis(F);
  b.H = std::move(H);
  b.N = N.empty() ? std::vector<i64>(F.n(), 0) : std::move(N);
  return b;
}

inline void validate_box(const FieldCtx& F, const BoxSpec& box) {
  size_t n = static_cast<size_t>(F.n());
  if (box.H.size() != n || box.N.size() != n || box.basis.omega.size() != n)
    fail_invalid("box arity does not match n = " + std::to_string(F.n()));
  for (u64 h : box.H)
    if (h < 1 || h > F.p()) fail_invalid("side length H must satisfy 1 <= H <= p");
  if (!basis_valid(F, box.basis)) fail_invalid("basis is not linearly independent over F_p");
}

inline u64 box_size(const BoxSpec& box) {
  u128 s = 1;
  for (u64 h : box.H) {
    s *= h;
    if (s > u128(~u64(0))) fail_budget("box size overflows 64 bits");
  }
  return static_cast<u64>(s);
}

// Walks every point of the box in row-major order (last coordinate fastest).
// visit(value, coords) gets the field element and its integer coordinates.
template <class Visit>
void for_each_box_point(const FieldCtx& F, const BoxSpec& box, Visit&& visit,
                        u64 budget = 100000000ull) {
  validate_box(F, box);
  u64 size = box_size(box);
  if (size > budget) {
    fail_budget("box enumeration of " + std::to_string(size) + " points exceeds budget " +
                std::to_string(budget));
  }
  int n = F.n();
  std::vector<i64> x(n);
  std::vector<Elem> back(n);  // (H_i - 1) * omega_i, subtracted on wrap
  Elem cur = F.zero();
  for (int i = 0; i < n; ++i) {
    x[i] = box.N[i] + 1;
    cur = F.add(cur, F.mul_int(box.basis.omega[i], x[i]));
    back[i] = F.mul_int(box.basis.omega[i], static_cast<i64>(box.H[i]) - 1);
  }
  for (u64 it = 0;; ++it) {
    visit(static_cast<const Elem&>(cur), static_cast<const std::vector<i64>&>(x));
    // odometer increment, last coordinate fastest
    int i = n - 1;
    while (i >= 0) {
      if (x[i] < box.N[i] + static_cast<i64>(box.H[i])) {
        ++x[i];
        cur = F.add(cur, box.basis.omega[i]);
        break;
      }
      x[i] = box.N[i] + 1;
      cur = F.sub(cur, back[i]);
      --i;
    }
    if (i < 0) break;
  }
}

inline std::vector<Elem> box_elements(const FieldCtx& F, const BoxSpec& box,
                                      u64 budget = 100000000ull) {
  std::vector<Elem> out;
  out.reserve(box_size(box));
  for_each_box_point(F, box, [&](const Elem& v, const std::vector<i64>&) { out.push_back(v); },
                     budget);
  return out;
}

// --- box character sums ----------------------------------------------------

struct BoxSumResult {
  u64 size = 0, zeros = 0;
  bool exact = false;         // order <= 4: ex is authoritative
  ExactSum ex;
  std::complex<double> sum;   // float view (exact-derived when exact)
  long double abs_val = 0;
  long double err = 0;        // certified accumulation error (0 when exact)
  double ratio = 0;           // |sum| / |B|
};

inline BoxSumResult box_char_sum(const FieldCtx& F, const BoxSpec& box, const Character& chi,
                                 Elem shift = {0}, u64 budget = 100000000ull) {
  CharSumAcc acc(chi);
  for_each_box_point(
      F, box, [&](const Elem& v, const std::vector<i64>&) { acc.add(chi, F.add(v, shift)); },
      budget);
  BoxSumResult r;
  r.size = acc.terms;
  r.zeros = acc.zeros;
  r.exact = acc.exact;
  r.ex = acc.ex;
  r.sum = acc.approx();
  r.abs_val = acc.abs();
  r.err = acc.err_bound();
  r.ratio = r.size ? static_cast<double>(r.abs_val / static_cast<long double>(r.size)) : 0.0;
  return r;
}

// Sum over the rank-k coordinate prefix of the box: coordinates k+1..n are
// absent (no terms), not pinned to offsets.
inline BoxSumResult sublattice_char_sum(const FieldCtx& F, const BoxSpec& box,
                                        const Character& chi, int k,
                                        u64 budget = 100000000ull) {
  validate_box(F, box);
  if (k < 1 || k > F.n()) fail_invalid("prefix rank k must be in [1, n]");
  BoxSpec sub;
  sub.basis.omega.assign(box.basis.omega.begin(), box.basis.omega.begin() + k);
  sub.N.assign(box.N.begin(), box.N.begin() + k);
  sub.H.assign(box.H.begin(), box.H.begin() + k);
  // enumerate directly: the prefix box lives in the same field
  CharSumAcc acc(chi);
  int n = F.n();
  std::vector<i64> x(k);
  std::vector<Elem> back(k);
  Elem cur = F.zero();
  for (int i = 0; i < k; ++i) {
    x[i] = sub.N[i] + 1;
    cur = F.add(cur, F.mul_int(sub.basis.omega[i], x[i]));
    back[i] = F.mul_int(sub.basis.omega[i], static_cast<i64>(sub.H[i]) - 1);
  }
  u128 size = 1;
  for (u64 h : sub.H) size *= h;
  if (size > budget) fail_budget("prefix enumeration exceeds budget");
  (void)n;
  for (;;) {
    acc.add(chi, cur);
    int i = k - 1;
    while (i >= 0) {
      if (x[i] < sub.N[i] + static_cast<i64>(sub.H[i])) {
        ++x[i];
        cur = F.add(cur, sub.basis.omega[i]);
        break;
      }
      x[i] = sub.N[i] + 1;
      cur = F.sub(cur, back[i]);
      --i;
    }
    if (i < 0) break;
  }
  BoxSumResult r;
  r.size = acc.terms;
  r.zeros = acc.zeros;
  r.exact = acc.exact;
  r.ex = acc.ex;
  r.sum = acc.approx();
  r.abs_val = acc.abs();
  r.err = acc.err_bound();
  r.ratio = r.size ? static_cast<double>(r.abs_val / static_cast<long double>(r.size)) : 0.0;
  return r;
}

// --- amplification pipeline --------------------------------------------------

struct BurgessReport {
  u64 p = 0, q = 0;
  int n = 0;
  std::vector<u64> H;
  std::vector<i64> N;
  u64 m = 0, d = 0;
  double epsilon = 0;
  unsigned r = 0;
  bool r_overridden = false;
  double delta = 0;
  u64 I_len = 0;
  std::vector<u64> B0_counts;  // per-coordinate size of the shift box
  u64 B_size = 0, B0_size = 0;
  bool exact = false;

  std::complex<double> S;       // plain box sum
  long double S_abs = 0;
  std::complex<double> T_avg;   // averaged shifted sum
  long double T_abs = 0;        // |full triple sum|

  long double fi_residual = 0;  // |S - T/(|B0||I|)|
  long double fi_bound = 0;     // 6 p^{-delta} |B|
  bool fi_holds = false;
  long double max_shift_residual = 0;  // max_{y,z} |S - S_{yz}|
  long double fi_counting_max = 0;     // max_{y,z} |B symdiff (B+yz)|
  bool fi_counting_holds = false;

  u64 A = 0;        // sum_u omega(u)
  u64 Bq = 0;       // sum_u omega(u)^2
  u64 omega0 = 0;   // omega(0)
  bool a_identity = false;  // A == |B| (|B0|-1)
  bool a_bound = false;     // A <= |B| |B0| and omega0 <= |B0|
  cpp_int C_exact;
  long double C_approx = 0;
  bool C_exact_valid = false;
  long double ti_rhs = 0;
  bool ti_holds = false;
  long double ti_slack = 0;

  bool theorem_verdicts_pass() const {
    return fi_holds && fi_counting_holds && ti_holds && a_identity && a_bound;
  }
};

inline BurgessReport burgess_pipeline(const FieldCtx& F, const BoxSpec& box, const Character& chi,
                                      double epsilon, std::optional<unsigned> r_override = {},
                                      u64 budget = 100000000ull) {
  validate_box(F, box);
  u64 p = F.p();
  int n = F.n();
  u64 Hmax = 0;
  for (u64 h : box.H) Hmax = std::max(Hmax, h);
  if (2 * Hmax * Hmax >= p)
    fail_invalid("short-box hypothesis violated: need 2*max(H)^2 < p");
  if (epsilon <= 0 || epsilon > static_cast<double>(n))
    fail_invalid("epsilon must lie in (0, n]");

  BurgessReport rep;
  rep.p = p;
  rep.q = F.q();
  rep.n = n;
  rep.H = box.H;
  rep.N = box.N;
  rep.m = chi.m();
  rep.d = chi.order();
  rep.epsilon = epsilon;
  if (r_override) {
    if (*r_override < 1 || *r_override > 6)
      fail_invalid("r override must be in [1, 6]");
    rep.r = *r_override;
    rep.r_overridden = true;
  } else {
    long long rr = llround(static_cast<double>(n) / epsilon);
    rep.r = static_cast<unsigned>(std::min<long long>(6, std::max<long long>(1, rr)));
  }
  rep.delta = static_cast<double>(n) / (2.0 * rep.r);
  long double pd = powl(static_cast<long double>(p), static_cast<long double>(rep.delta));
  rep.I_len = static_cast<u64>(ceill(pd));
  long double pm2d = powl(static_cast<long double>(p), -2.0L * static_cast<long double>(rep.delta));

  rep.B0_counts.resize(n);
  bool nonzero_shift = false;
  for (int i = 0; i < n; ++i) {
    u64 bi = static_cast<u64>(floorl(static_cast<long double>(box.H[i]) * pm2d));
    rep.B0_counts[i] = bi + 1;
    if (bi > 0) nonzero_shift = true;
  }
  if (!nonzero_shift)
    fail_invalid("shift box is degenerate ({0} only): no coordinate admits a nonzero shift");

  BoxSpec B0;
  B0.basis = box.basis;
  B0.N.assign(n, -1);
  B0.H = rep.B0_counts;
  rep.B_size = box_size(box);
  rep.B0_size = box_size(B0);

  BoxSumResult S = box_char_sum(F, box, chi, {0}, budget);
  rep.S = S.sum;
  rep.S_abs = S.abs_val;
  rep.exact = S.exact;

  // Triple sum T = sum_{y in B0} sum_{z in I} S_{yz};  per (y, z) also track
  // the worst shifted residual and the exact box/shifted-box symmetric
  // difference (the unconditional counting bound behind the shift average).
  ExactSum T;
  T.d = chi.order();
  KahanComplex T_kahan;
  long double max_resid = 0, count_max = 0;
  u64 cnt = rep.B0_size * rep.I_len;
  std::vector<std::pair<Elem, std::vector<i64>>> b0pts;
  for_each_box_point(F, B0, [&](const Elem& v, const std::vector<i64>& c) {
    b0pts.push_back({v, c});
  }, budget);

  std::vector<Elem> b_elems = box_elements(F, box, budget);

  for (const auto& [ye, yc] : b0pts) {
    for (u64 z = 1; z <= rep.I_len; ++z) {
      Elem shift = F.mul_int(ye, static_cast<i64>(z));
      BoxSumResult Syz = box_char_sum(F, box, chi, shift, budget);
      if (S.exact) {
        T.a += Syz.ex.a;
        T.b += Syz.ex.b;
        ExactSum diff = S.ex - Syz.ex;
        max_resid = std::max(max_resid, diff.abs());
      } else {
        T_kahan.add({static_cast<long double>(Syz.sum.real()),
                     static_cast<long double>(Syz.sum.imag())});
        max_resid = std::max(
            max_resid,
            hypotl(static_cast<long double>(S.sum.real() - Syz.sum.real()),
                   static_cast<long double>(S.sum.imag() - Syz.sum.imag())));
      }
      // exact symmetric difference |B \triangle (B + yz)|
      u128 overlap = 1;
      bool slow = false;
      for (int i = 0; i < n; ++i) {
        u64 s_i = static_cast<u64>(yc[i]) * z;
        if (box.H[i] + s_i > p) slow = true;
        overlap *= box.H[i] > s_i ? box.H[i] - s_i : 0;
      }
      long double symdiff;
      if (!slow) {
        symdiff = 2.0L * (static_cast<long double>(rep.B_size) - static_cast<long double>(overlap));
      } else {
        // wraparound: count honestly via the element set
        std::vector<char> in_b(F.q(), 0);
        for (Elem e : b_elems) in_b[e.v] = 1;
        u64 inter = 0;
        for (Elem e : b_elems)
          if (in_b[F.add(e, shift).v]) ++inter;
        symdiff = 2.0L * static_cast<long double>(rep.B_size - inter);
      }
      count_max = std::max(count_max, symdiff);
    }
  }
  rep.max_shift_residual = max_resid;
  rep.fi_counting_max = count_max;
  rep.fi_bound = 6.0L * powl(static_cast<long double>(p), -static_cast<long double>(rep.delta)) *
                 static_cast<long double>(rep.B_size);

  if (S.exact) {
    rep.T_abs = T.abs();
    auto tz = T.to_complex();
    rep.T_avg = {tz.real() / static_cast<double>(cnt), tz.imag() / static_cast<double>(cnt)};
    // |S - T/cnt| = |S*cnt - T| / cnt, exact numerator
    ExactSum U = S.ex.scaled(static_cast<i64>(cnt)) - T;
    rep.fi_residual = U.abs() / static_cast<long double>(cnt);
  } else {
    auto tz = T_kahan.value();
    rep.T_abs = hypotl(tz.real(), tz.imag());
    rep.T_avg = {static_cast<double>(tz.real() / cnt), static_cast<double>(tz.imag() / cnt)};
    rep.fi_residual = hypotl(static_cast<long double>(S.sum.real()) - tz.real() / cnt,
                             static_cast<long double>(S.sum.imag()) - tz.imag() / cnt);
  }
  rep.fi_holds = rep.fi_residual <= rep.fi_bound;
  rep.fi_counting_holds = rep.fi_counting_max <= rep.fi_bound;

  // representation counts omega(u) = #{(x, y) in B x (B0 \ 0) : u = x y^{-1}}
  std::vector<u32> hist;
  std::unordered_map<u64, u32> sparse;
  bool dense = F.q() <= (u64(1) << 24);
  if (dense) hist.assign(F.q(), 0);
  for (Elem x : b_elems) {
    for (const auto& [ye, yc] : b0pts) {
      if (ye.v == 0) continue;
      Elem u = F.mul(x, F.inv(ye));
      if (dense)
        ++hist[u.v];
      else
        ++sparse[u.v];
    }
  }
  u64 A = 0, Bq = 0, om0 = 0;
  auto fold = [&](u64 uv, u64 c) {
    A += c;
    Bq += c * c;
    if (uv == 0) om0 = c;
  };
  if (dense) {
    for (u64 uv = 0; uv < F.q(); ++uv)
      if (hist[uv]) fold(uv, hist[uv]);
  } else {
    for (auto& [uv, c] : sparse) fold(uv, c);
  }
  rep.A = A;
  rep.Bq = Bq;
  rep.omega0 = om0;
  rep.a_identity = (A == rep.B_size * (rep.B0_size - 1));
  rep.a_bound = (A <= rep.B_size * rep.B0_size) && (om0 <= rep.B0_size);

  MomentResult C = moment_sum(chi, 1, rep.I_len, rep.r);
  rep.C_exact_valid = C.exact;
  if (C.exact) rep.C_exact = C.lhs;
  rep.C_approx = C.approx;

  long double rA = static_cast<long double>(A);
  long double rBq = static_cast<long double>(Bq);
  long double rC = C.approx;
  long double rr = static_cast<long double>(rep.r);
  rep.ti_rhs = powl(rA, 1.0L - 1.0L / rr) * powl(rBq, 1.0L / (2.0L * rr)) *
                   powl(rC, 1.0L / (2.0L * rr)) +
               static_cast<long double>(rep.B_size) * static_cast<long double>(rep.I_len);
  rep.ti_holds = rep.T_abs <= rep.ti_rhs;
  rep.ti_slack = rep.ti_rhs - rep.T_abs;
  return rep;
}

}  // namespace charbox
