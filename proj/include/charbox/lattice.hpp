#pragma once
// The relation lattice of a ratio z and its geometry under a weighted box.
//
// For z in F_{p^n} and a basis omega_1..omega_n, Lambda_z is the rank-2n
// integer lattice of pairs (x, y) in Z^n x Z^n with
//     z * (sum_i x_i omega_i)  =  sum_j y_j omega_j   in F_{p^n},
// i.e. y = x Mz mod p where row i of Mz holds the omega-coordinates of
// z*omega_i.  A Z-basis is the block matrix [[I, Mz], [0, pI]] with
// |det| = p^n.  The weighted sup norm ||(x,y)|| = max_c |v_c| / H_(c)
// (weight H_i on both x_i and y_i) measures vectors against the box
// D = [-H, H]^2n; all norms are exact rationals and every comparison is a
// cross multiplication.
//
// Successive minima are computed greedily: enumerate every lattice point in
// the a-priori ball of radius p/min(H) (which provably contains 2n
// independent vectors, namely the basis rows), sort by (norm, lex), and take
// the first 2n linearly independent vectors, deciding independence by
// fraction-free integer elimination.  The dual lattice is handled through
// p Lambda^* (an integer lattice), whose basis is p B^{-T} computed by exact
// rational inversion; the dual gauge sum_c |u_c| H_(c) is integer-valued on
// p Lambda^*, so the first dual minimum and the transference product are
// exact as well.

#include <boost/multiprecision/cpp_int.hpp>

#include "boxes.hpp"

namespace charbox {

// --- exact nonnegative rationals for norms -----------------------------------

struct Rat {
  i64 num = 0;
  i64 den = 1;

  static Rat make(i64 n, i64 d) {
    if (d <= 0) fail_invalid("rational with nonpositive denominator");
    i64 g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
  }
  friend bool operator<(Rat a, Rat b) { return i128(a.num) * b.den < i128(b.num) * a.den; }
  friend bool operator<=(Rat a, Rat b) { return i128(a.num) * b.den <= i128(b.num) * a.den; }
  friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

struct LatticeInstance {
  u64 p = 0;
  int n = 0;  // lattice dimension is 2n
  Elem z{0};
  BasisSpec basis;
  std::vector<u64> H;                     // weights, H[c mod n] on coordinate c
  std::vector<std::vector<u64>> Mz;       // n x n over F_p, row i = coords of z*omega_i
  std::vector<std::vector<i64>> rows;     // 2n x 2n Z-basis [[I, Mz], [0, pI]]

  u64 weight(int c) const { return H[c % n]; }
  u64 min_weight() const { return *std::min_element(H.begin(), H.end()); }

  // exact weighted sup norm
  Rat norm(const std::vector<i64>& v) const {
    i64 bn = 0, bd = 1;  // best |v_c| / H_c so far
    for (int c = 0; c < 2 * n; ++c) {
      i64 a = v[c] < 0 ? -v[c] : v[c];
      i64 h = static_cast<i64>(weight(c));
      if (i128(a) * bd > i128(bn) * h) {
        bn = a;
        bd = h;
      }
    }
    return Rat::make(bn, bd);
  }

  bool contains(const std::vector<i64>& v) const {
    i64 P = static_cast<i64>(p);
    for (int j = 0; j < n; ++j) {
      i128 acc = 0;
      for (int i = 0; i < n; ++i) acc += i128(v[i]) * static_cast<i64>(Mz[i][j]);
      acc -= v[n + j];
      i64 r = static_cast<i64>(acc % P);
      if (r != 0) return false;
    }
    return true;
  }
};

// Invert the change-of-basis matrix mod p and assemble Mz.
inline LatticeInstance build_lambda_z(const FieldCtx& F, const BasisSpec& basis, Elem z,
                                      std::vector<u64> H) {
  if (!basis_valid(F, basis)) fail_invalid("basis is not linearly independent over F_p");
  if (H.size() != static_cast<size_t>(F.n())) fail_invalid("weight arity does not match n");
  for (u64 h : H)
    if (h < 1 || h > F.p()) fail_invalid("weights must satisfy 1 <= H <= p");
  if (2 * F.n() > 12) fail_invalid("lattice dimension 2n must be <= 12");

  u64 p = F.p();
  int n = F.n();
  // W columns are the omega coordinate vectors; solve W c = coeffs(z w_i).
  std::vector<std::vector<u64>> aug(n, std::vector<u64>(2 * n, 0));
  for (int j = 0; j < n; ++j) {
    auto cf = F.coeffs(basis.omega[j]);
    for (int i = 0; i < n; ++i) aug[i][j] = cf[i];
  }
  for (int i = 0; i < n; ++i) aug[i][n + i] = 1;
  // Gauss-Jordan over F_p
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (aug[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) fail_invalid("basis matrix is singular (should be unreachable)");
    std::swap(aug[col], aug[piv]);
    u64 inv = powmod(aug[col][col], p - 2, p);
    for (int c = 0; c < 2 * n; ++c) aug[col][c] = aug[col][c] * inv % p;
    for (int r = 0; r < n; ++r) {
      if (r == col || aug[r][col] == 0) continue;
      u64 f = aug[r][col];
      for (int c = 0; c < 2 * n; ++c)
        aug[r][c] = (aug[r][c] % p + p - f * aug[col][c] % p) % p;
    }
  }

  LatticeInstance L;
  L.p = p;
  L.n = n;
  L.z = z;
  L.basis = basis;
  L.H = std::move(H);
  L.Mz.assign(n, std::vector<u64>(n, 0));
  for (int i = 0; i < n; ++i) {
    auto cf = F.coeffs(F.mul(z, basis.omega[i]));  // polynomial coords of z*omega_i
    for (int j = 0; j < n; ++j) {
      u64 acc = 0;
      for (int k = 0; k < n; ++k) acc = (acc + aug[j][n + k] * cf[k]) % p;
      L.Mz[i][j] = acc;
    }
  }
  L.rows.assign(2 * n, std::vector<i64>(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    L.rows[i][i] = 1;
    for (int j = 0; j < n; ++j) L.rows[i][n + j] = static_cast<i64>(L.Mz[i][j]);
  }
  for (int j = 0; j < n; ++j) L.rows[n + j][n + j] = static_cast<i64>(p);
  return L;
}

// --- exact integer linear algebra -------------------------------------------

// |det| by fraction-free (Bareiss) elimination.
inline cpp_int det_abs(const std::vector<std::vector<i64>>& A) {
  size_t n = A.size();
  std::vector<std::vector<cpp_int>> M(n, std::vector<cpp_int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
  cpp_int prev = 1;
  bool neg = false;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k] == 0) {
      size_t s = k + 1;
      while (s < n && M[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(M[k], M[s]);
      neg = !neg;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
    prev = M[k][k];
  }
  cpp_int d = M[n - 1][n - 1];
  (void)neg;
  return d < 0 ? -d : d;
}

// Incremental independence tester over Q via fraction-free elimination.
class IntEchelon {
 public:
  explicit IntEchelon(int dim) : dim_(dim) {}

  // true (and absorbs v) iff v is independent of the rows added so far
  bool try_add(const std::vector<i64>& v) {
    std::vector<cpp_int> r(v.begin(), v.end());
    for (const auto& [lc, row] : rows_) {
      if (r[lc] == 0) continue;
      cpp_int a = row[lc], b = r[lc];
      for (int c = 0; c < dim_; ++c) r[c] = r[c] * a - row[c] * b;
    }
    int lead = -1;
    for (int c = 0; c < dim_; ++c)
      if (r[c] != 0) {
        lead = c;
        break;
      }
    if (lead < 0) return false;
    cpp_int content = 0;  // divide out the gcd to keep later eliminations small
    for (const cpp_int& x : r) content = boost::multiprecision::gcd(content, x < 0 ? cpp_int(-x) : x);
    if (content > 1)
      for (cpp_int& x : r) x /= content;
    rows_.emplace_back(lead, std::move(r));
    std::sort(rows_.begin(), rows_.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return true;
  }

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  int dim_;
  std::vector<std::pair<int, std::vector<cpp_int>>> rows_;
};

// --- bounded enumeration of integer vectors in a mod-p row space --------------

struct ModpSpan {
  u64 p = 0;
  int dim = 0;
  std::vector<std::vector<u64>> rows;  // RREF with unit pivots
  std::vector<int> pivots;
};

inline ModpSpan rref_span(std::vector<std::vector<u64>> rows, u64 p, int dim) {
  ModpSpan S;
  S.p = p;
  S.dim = dim;
  int rank = 0;
  for (int col = 0; col < dim; ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col] % p != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    u64 inv = powmod(rows[rank][col] % p, p - 2, p);
    for (int c = 0; c < dim; ++c) rows[rank][c] = rows[rank][c] % p * inv % p;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank) continue;
      u64 f = rows[r][col] % p;
      if (f)
        for (int c = 0; c < dim; ++c)
          rows[r][c] = (rows[r][c] % p + p - f * rows[rank][c] % p) % p;
    }
    S.pivots.push_back(col);
    ++rank;
  }
  rows.resize(rank);
  S.rows = std::move(rows);
  return S;
}

inline ModpSpan lattice_span(const LatticeInstance& L) {
  std::vector<std::vector<u64>> rows(L.n, std::vector<u64>(2 * L.n, 0));
  for (int i = 0; i < L.n; ++i) {
    rows[i][i] = 1;
    for (int j = 0; j < L.n; ++j) rows[i][L.n + j] = L.Mz[i][j];
  }
  return rref_span(std::move(rows), L.p, 2 * L.n);
}

// Visit every integer vector w with |w_c| <= X_c and w mod p in the span
// (the zero vector included).  Returns the number of vectors visited; throws
// on budget exhaustion.
template <class Visit>
u64 enumerate_span_box(const ModpSpan& S, const std::vector<i64>& X, u64 budget, Visit&& visit) {
  int dim = S.dim;
  i64 P = static_cast<i64>(S.p);
  std::vector<char> is_pivot(dim, 0);
  for (int c : S.pivots) is_pivot[c] = 1;
  std::vector<int> nonpiv;
  for (int c = 0; c < dim; ++c)
    if (!is_pivot[c]) nonpiv.push_back(c);
  int k = static_cast<int>(S.pivots.size());
  std::vector<i64> w(dim, 0);
  std::vector<u64> res(nonpiv.size(), 0);
  u64 visited = 0, nodes = 0;

  auto lifts = [&](auto&& self, size_t idx) -> void {
    if (idx == nonpiv.size()) {
      ++visited;
      visit(static_cast<const std::vector<i64>&>(w));
      return;
    }
    int c = nonpiv[idx];
    i64 r = static_cast<i64>(res[idx]);
    i64 start = r - P * ((r + X[c]) / P);  // smallest lift >= -X_c
    for (i64 v = start; v <= X[c]; v += P) {
      if (++nodes > budget) fail_budget("lattice enumeration exceeded budget");
      w[c] = v;
      self(self, idx + 1);
    }
  };
  auto pivots_rec = [&](auto&& self, int j) -> void {
    if (j == k) {
      for (size_t t = 0; t < nonpiv.size(); ++t) {
        u64 acc = 0;
        for (int jj = 0; jj < k; ++jj) {
          i64 pv = w[S.pivots[jj]] % P;
          if (pv < 0) pv += P;
          acc = (acc + static_cast<u64>(pv) * S.rows[jj][nonpiv[t]]) % S.p;
        }
        res[t] = acc;
      }
      lifts(lifts, 0);
      return;
    }
    int c = S.pivots[j];
    for (i64 v = -X[c]; v <= X[c]; ++v) {
      if (++nodes > budget) fail_budget("lattice enumeration exceeded budget");
      w[c] = v;
      self(self, j + 1);
    }
  };
  pivots_rec(pivots_rec, 0);
  return visited;
}

// --- successive minima ---------------------------------------------------------

struct MinimaResult {
  std::vector<Rat> lambda;                  // 2n values, nondecreasing
  std::vector<std::vector<i64>> witness;    // achieving vectors
  u64 candidates = 0;                       // lattice points examined
  cpp_int det;                              // |det| of the basis (= p^n)
};

inline MinimaResult successive_minima(const LatticeInstance& L, u64 budget = 50000000ull) {
  int dim = 2 * L.n;
  u64 hmin = L.min_weight();
  // a-priori radius p / hmin contains 2n independent vectors (the basis rows)
  std::vector<i64> X(dim);
  for (int c = 0; c < dim; ++c) X[c] = static_cast<i64>(L.p * L.weight(c) / hmin);
  ModpSpan S = lattice_span(L);

  std::vector<std::pair<Rat, std::vector<i64>>> pts;
  u64 seen = enumerate_span_box(S, X, budget, [&](const std::vector<i64>& w) {
    bool zero = true;
    for (i64 v : w)
      if (v) {
        zero = false;
        break;
      }
    if (!zero) pts.push_back({L.norm(w), w});
  });

  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.first < b.first) return true;
    if (b.first < a.first) return false;
    return a.second < b.second;
  });

  MinimaResult R;
  R.candidates = seen;
  R.det = det_abs(L.rows);
  IntEchelon ech(dim);
  for (const auto& [nrm, vec] : pts) {
    if (ech.rank() == dim) break;
    if (ech.try_add(vec)) {
      R.lambda.push_back(nrm);
      R.witness.push_back(vec);
    }
  }
  if (static_cast<int>(R.lambda.size()) != dim)
    fail_math("successive minima search did not reach full rank (radius too small)");
  return R;
}

// |Lambda ∩ scale*D|, zero vector included.
inline u64 count_points(const LatticeInstance& L, Rat scale, u64 budget = 50000000ull) {
  if (scale.num < 0) fail_invalid("scale must be nonnegative");
  int dim = 2 * L.n;
  std::vector<i64> X(dim);
  for (int c = 0; c < dim; ++c)
    X[c] = static_cast<i64>(i128(scale.num) * static_cast<i64>(L.weight(c)) / scale.den);
  ModpSpan S = lattice_span(L);
  u64 cnt = 0;
  enumerate_span_box(S, X, budget, [&](const std::vector<i64>& w) {
    // bounds floor(scale*H_c) already imply |w_c|/H_c <= scale
    (void)w;
    ++cnt;
  });
  return cnt;
}

// prod_j max(1, lambda_j^{-1}): the point-count comparison product.
inline double lce_product(const MinimaResult& R) {
  double prod = 1;
  for (const Rat& l : R.lambda)
    if (l.num < l.den) prod *= static_cast<double>(l.den) / static_cast<double>(l.num);
  return prod;
}

// --- Minkowski sandwich ---------------------------------------------------------

struct MinkowskiReport {
  bool lower_ok = false, upper_ok = false;
  double scaled_product = 0;  // prod lambda * vol(D) / p^n  in [2^2n/(2n)!, 2^2n]
};

inline MinkowskiReport minkowski_check(const LatticeInstance& L, const MinimaResult& R) {
  int dim = 2 * L.n;
  cpp_int num = 1, den = 1, vol = 1;
  for (const Rat& l : R.lambda) {
    num *= l.num;
    den *= l.den;
  }
  for (int c = 0; c < dim; ++c) vol *= 2 * static_cast<i64>(L.weight(c));
  cpp_int covol = 1;
  for (int i = 0; i < L.n; ++i) covol *= L.p;
  cpp_int twoN = cpp_int(1) << dim;
  cpp_int fact = 1;
  for (int i = 2; i <= dim; ++i) fact *= i;
  MinkowskiReport M;
  // 2^2n p^n den <= (2n)! num vol   and   num vol <= 2^2n p^n den
  M.lower_ok = twoN * covol * den <= fact * num * vol;
  M.upper_ok = num * vol <= twoN * covol * den;
  M.scaled_product = (num * vol).convert_to<double>() / (covol * den).convert_to<double>();
  return M;
}

// lambda_1 >= 1 / (second largest weight), valid for ratios outside F_p.
inline bool lambda1_floor_holds(const FieldCtx& F, const LatticeInstance& L,
                                const MinimaResult& R) {
  if (F.subfield_degree(L.z) == 1)
    fail_invalid("first-minimum floor applies only to ratios outside the prime field");
  std::vector<u64> hs = L.H;
  std::sort(hs.begin(), hs.end());
  u64 h2 = hs[hs.size() >= 2 ? hs.size() - 2 : 0];  // second largest
  const Rat& l1 = R.lambda[0];
  return i128(l1.num) * static_cast<i64>(h2) >= i128(l1.den);
}

// --- dual lattice ----------------------------------------------------------------

namespace detail {

struct Frac {
  cpp_int num, den;  // den > 0
  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    cpp_int g = boost::multiprecision::gcd(num < 0 ? cpp_int(-num) : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

}  // namespace detail

// p * inverse(A)^T for an integer matrix A; fails if the result is not
// integral (for lattice bases here it always is: p A^{-T} has integer entries
// whenever p Z^dim ⊆ rowspace-lattice of A and |det A| is a power of p).
inline std::vector<std::vector<i64>> scaled_inverse_transpose(
    const std::vector<std::vector<i64>>& A, u64 p) {
  using detail::Frac;
  int n = static_cast<int>(A.size());
  std::vector<std::vector<Frac>> M(n, std::vector<Frac>(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M[i][j] = {cpp_int(A[i][j]), 1};
    for (int j = 0; j < n; ++j) M[i][n + j] = {cpp_int(i == j ? 1 : 0), 1};
  }
  auto sub_scaled = [&](Frac& a, const Frac& b, const Frac& f) {
    // a -= b * f
    a.num = a.num * b.den * f.den - b.num * f.num * a.den;
    a.den = a.den * b.den * f.den;
    a.reduce();
  };
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (M[r][col].num != 0) {
        piv = r;
        break;
      }
    if (piv < 0) fail_invalid("matrix is singular");
    std::swap(M[col], M[piv]);
    Frac d = M[col][col];
    for (int c = 0; c < 2 * n; ++c) {
      M[col][c].num *= d.den;
      M[col][c].den *= d.num < 0 ? -d.num : d.num;
      if (d.num < 0) M[col][c].num = -M[col][c].num;
      M[col][c].reduce();
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || M[r][col].num == 0) continue;
      Frac f = M[r][col];
      for (int c = 0; c < 2 * n; ++c) sub_scaled(M[r][c], M[col][c], f);
    }
  }
  std::vector<std::vector<i64>> W(n, std::vector<i64>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // W = p * (A^{-1})^T : entry (i, j) = p * inv[j][i]
      Frac f = M[j][n + i];
      cpp_int v = f.num * static_cast<i64>(p);
      if (v % f.den != 0) fail_math("scaled inverse is not integral");
      cpp_int e = v / f.den;
      if (e > std::numeric_limits<i64>::max() || e < std::numeric_limits<i64>::min())
        fail_budget("dual basis entry overflows 64 bits");
      W[i][j] = e.convert_to<i64>();
    }
  return W;
}

struct DualReport {
  std::vector<std::vector<i64>> W;  // basis of p Lambda^*
  u64 gauge_min = 0;                // min over nonzero w of sum |w_c| H_c
  Rat lambda1_star;                 // gauge_min / p
  std::vector<i64> witness;
  bool wb_identity = false;         // W B^T == p I exactly
  bool double_dual_ok = false;      // p W^{-T} == B exactly
  bool apriori_ok = false;          // hmin <= gauge_min <= p * hmin
  u64 candidates = 0;
};

inline DualReport dual_first_minimum(const LatticeInstance& L, u64 budget = 50000000ull) {
  int dim = 2 * L.n;
  DualReport D;
  D.W = scaled_inverse_transpose(L.rows, L.p);

  // W B^T = p I, checked in exact integer arithmetic
  D.wb_identity = true;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      i128 acc = 0;
      for (int k = 0; k < dim; ++k) acc += i128(D.W[i][k]) * L.rows[j][k];
      if (acc != (i == j ? i128(L.p) : i128(0))) D.wb_identity = false;
    }
  // double dual returns the original basis exactly
  auto B2 = scaled_inverse_transpose(D.W, L.p);
  D.double_dual_ok = (B2 == L.rows);

  // first dual minimum: minimize the integer gauge sum_c |w_c| H_c over
  // nonzero w in p Lambda^*;  a priori hmin <= G <= p hmin.
  u64 hmin = L.min_weight();
  std::vector<std::vector<u64>> wrows(dim, std::vector<u64>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      i64 v = D.W[i][j] % static_cast<i64>(L.p);
      if (v < 0) v += static_cast<i64>(L.p);
      wrows[i][j] = static_cast<u64>(v);
    }
  ModpSpan S = rref_span(std::move(wrows), L.p, dim);
  std::vector<i64> X(dim);
  for (int c = 0; c < dim; ++c) X[c] = static_cast<i64>(L.p * hmin / L.weight(c));
  u64 best = ~u64(0);
  std::vector<i64> bw;
  D.candidates = enumerate_span_box(S, X, budget, [&](const std::vector<i64>& w) {
    u64 g = 0;
    bool zero = true;
    for (int c = 0; c < dim; ++c) {
      u64 a = static_cast<u64>(w[c] < 0 ? -w[c] : w[c]);
      if (a) zero = false;
      g += a * L.weight(c);
    }
    if (zero) return;
    if (g < best || (g == best && w < bw)) {
      best = g;
      bw = w;
    }
  });
  if (best == ~u64(0)) fail_math("dual search found no nonzero vector (impossible)");
  D.gauge_min = best;
  D.lambda1_star = Rat::make(static_cast<i64>(best), static_cast<i64>(L.p));
  D.witness = bw;
  D.apriori_ok = best >= hmin && best <= L.p * hmin;
  return D;
}

// lambda_1(dual) * lambda_2n(primal) >= 1, compared exactly.
inline bool transference_holds(const MinimaResult& R, const DualReport& D) {
  const Rat& l = R.lambda.back();
  return i128(D.lambda1_star.num) * l.num >= i128(D.lambda1_star.den) * l.den;
}

}  // namespace charbox
