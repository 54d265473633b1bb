#pragma once
// Multiplicative energy of a box and the ratio-set counting chain.
//
// E(B) counts quadruples (a,b,c,d) in B^4 with ab = cd.  Splitting off zero
// products and grading the rest by the ratio z = a/d gives the exact identity
//     E(B) = sum_{z in Z'} g(z)^2  +  [0 in B] (2|B| - 1)^2,
// where g(z) = #{(x,y) in B*^2 : y = z x} and Z' is the ratio set of B*.
// With f = g + [0 in B] and f0 the analogous count for the symmetric
// difference box B0 = {sum c_i omega_i : |c_i| <= H_i} (so f(z) <= f0(z) by
// translation), the chain
//     E <= 2|B|^2 + sum_{Z'} f^2 <= 3|B|^2 + sum_{Z} f0^2 = 3|B|^2 + L1 + L2
// holds exactly, L1/L2 splitting the f0 mass by whether z lies outside or
// inside the prime field.  Everything here is integer counting; the only
// floating point is the final ratio of E against |B|^2 (ln p)^n.
//
// The dyadic census ties the same ratio counts to lattice geometry: for each
// z in Z outside the prime field it computes the successive minima of the
// relation lattice, checks f0(z) = |Lambda_z ∩ D| point for point, and bins z
// by the dyadic size of the first minimum.

#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include "lattice.hpp"

namespace charbox {

struct EnergyOptions {
  u64 pair_budget = 200000000;  // max ordered ratio pairs enumerated exactly
  u64 support_cap = 10000000;   // max distinct ratios/products tracked
  bool allow_sampling = false;  // above pair_budget: sample instead of failing
  u64 seed = 1;                 // RNG seed for the sampled path
};

// E(A) by direct product histogram over all ordered pairs; the independent
// cross-check route.  Requires |A|^2 <= pair_budget.
inline u64 energy_bruteforce(const FieldCtx& F, const std::vector<Elem>& A,
                             const EnergyOptions& opt = {}) {
  u64 m = A.size();
  if (m * m > opt.pair_budget) fail_budget("pair count exceeds budget for direct energy");
  u64 total = 0;
  if (F.q() <= (u64(1) << 24)) {
    std::vector<u32> hist(F.q(), 0);
    for (u64 i = 0; i < m; ++i)
      for (u64 j = 0; j < m; ++j) ++hist[F.mul(A[i], A[j]).v];
    for (u64 i = 0; i < m; ++i)
      for (u64 j = 0; j < m; ++j) {
        u32& c = hist[F.mul(A[i], A[j]).v];
        if (c) {
          total += u64(c) * c;
          c = 0;
        }
      }
  } else {
    std::unordered_map<u64, u64> hist;
    hist.reserve(std::min(m * m, opt.support_cap));
    for (u64 i = 0; i < m; ++i)
      for (u64 j = 0; j < m; ++j) {
        ++hist[F.mul(A[i], A[j]).v];
        if (hist.size() > opt.support_cap) fail_budget("product support exceeds cap");
      }
    for (const auto& [u, c] : hist) total += c * c;
  }
  return total;
}

struct EnergyReport {
  u64 p = 0, q = 0;
  int n = 0;
  std::vector<u64> H;
  std::vector<i64> N;
  u64 B_size = 0, B0_size = 0;
  bool zero_in_B = false;
  bool wrapped = false;  // some 2H_i + 1 > p: B0 covers whole coordinate lines

  u64 E = 0;  // via the ratio identity
  std::vector<std::pair<u64, u64>> f_profile;   // z index -> g(z), sorted by z
  std::vector<std::pair<u64, u64>> f0_profile;  // z index -> f0(z) - 1, sorted by z
  u64 Zprime_size = 0, Z_size = 0, Zprime_minus_Z = 0;
  u64 sum_f_sq = 0;   // over Z' with f = g + [0 in B]
  u64 sum_f0_sq = 0;  // over Z
  u64 L1 = 0, L2 = 0;

  bool verdicts_evaluated = false;
  bool en_holds = false;     // E <= 2|B|^2 + sum_f_sq
  bool fz_holds = false;     // sum_f_sq <= sum_f0_sq + |Z' \ Z|
  bool f_le_f0 = false;      // pointwise on Z'
  bool chain_holds = false;  // E <= 3|B|^2 + L1 + L2
  bool kl_hypothesis = false;  // 2 max(H)^2 < p
  double kl_ratio = 0;         // E / (|B|^2 (ln p)^n)
  double l1_ratio = 0;         // L1 / |B|^2
  double l2_ratio = 0;         // L2 / (|B|^2 (ln p)^n)

  bool sampled = false;
  u64 seed = 0;
  u64 pairs_enumerated = 0;
};

namespace detail {

// histogram of ratios y/x over ordered pairs of nonzero elements
inline std::vector<std::pair<u64, u64>> ratio_profile(const FieldCtx& F,
                                                      const std::vector<Elem>& star,
                                                      const EnergyOptions& opt, bool& sampled,
                                                      u64& pairs_used) {
  u64 m = star.size();
  std::vector<u64> dl(m);
  for (u64 i = 0; i < m; ++i) dl[i] = F.dlog(star[i]);
  u64 units = F.units();

  bool dense = F.q() <= (u64(1) << 24);
  std::vector<u32> hist;
  std::unordered_map<u64, u64> map;
  if (dense)
    hist.assign(F.q(), 0);
  else
    map.reserve(std::min(m * m, opt.support_cap));

  auto bump = [&](u64 zi) {
    if (dense)
      ++hist[zi];
    else {
      ++map[zi];
      if (map.size() > opt.support_cap) fail_budget("ratio support exceeds cap");
    }
  };

  if (m * m <= opt.pair_budget) {
    for (u64 i = 0; i < m; ++i)
      for (u64 j = 0; j < m; ++j) bump(F.exp((dl[j] + units - dl[i]) % units).v);
    pairs_used += m * m;
  } else if (opt.allow_sampling) {
    sampled = true;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<u64> pick(0, m - 1);
    for (u64 t = 0; t < opt.pair_budget; ++t)
      bump(F.exp((dl[pick(rng)] + units - dl[pick(rng)]) % units).v);
    pairs_used += opt.pair_budget;
  } else {
    fail_budget("ratio pair count exceeds budget (enable sampling to estimate)");
  }

  std::vector<std::pair<u64, u64>> prof;
  if (dense) {
    for (u64 z = 0; z < F.q(); ++z)
      if (hist[z]) prof.push_back({z, hist[z]});
  } else {
    prof.assign(map.begin(), map.end());
    std::sort(prof.begin(), prof.end());
  }
  return prof;
}

}  // namespace detail

// The symmetric difference box of a box with side lengths H: coordinates run
// over |c_i| <= H_i (truncated to a full line when 2H_i + 1 > p).
inline BoxSpec difference_box(const FieldCtx& F, const BoxSpec& box) {
  BoxSpec b0;
  b0.basis = box.basis;
  for (size_t i = 0; i < box.H.size(); ++i) {
    u64 side = std::min(2 * box.H[i] + 1, F.p());
    b0.H.push_back(side);
    b0.N.push_back(side == F.p() ? -1 : -static_cast<i64>(box.H[i]) - 1);
  }
  return b0;
}

inline EnergyReport energy_via_ratios(const FieldCtx& F, const BoxSpec& box,
                                      const EnergyOptions& opt = {}) {
  validate_box(F, box);
  EnergyReport R;
  R.p = F.p();
  R.q = F.q();
  R.n = F.n();
  R.H = box.H;
  R.N = box.N;
  R.seed = opt.seed;

  auto elems = box_elements(F, box, opt.pair_budget);
  R.B_size = elems.size();
  std::vector<Elem> star;
  for (Elem x : elems)
    if (x.v != 0)
      star.push_back(x);
    else
      R.zero_in_B = true;

  BoxSpec b0 = difference_box(F, box);
  for (size_t i = 0; i < box.H.size(); ++i)
    if (2 * box.H[i] + 1 > F.p()) R.wrapped = true;
  auto elems0 = box_elements(F, b0, opt.pair_budget);
  R.B0_size = elems0.size();
  std::vector<Elem> star0;
  for (Elem x : elems0)
    if (x.v != 0) star0.push_back(x);

  R.f_profile = detail::ratio_profile(F, star, opt, R.sampled, R.pairs_enumerated);
  R.f0_profile = detail::ratio_profile(F, star0, opt, R.sampled, R.pairs_enumerated);
  R.Zprime_size = R.f_profile.size();
  R.Z_size = R.f0_profile.size();

  u64 bump = R.zero_in_B ? 1 : 0;
  for (const auto& [z, g] : R.f_profile) {
    R.E += g * g;
    u64 f = g + bump;
    R.sum_f_sq += f * f;
  }
  if (R.zero_in_B) R.E += (2 * R.B_size - 1) * (2 * R.B_size - 1);

  // f0(z) = nonzero-pair count + 1 (the (0,0) pair divides by every z)
  for (const auto& [z, h] : R.f0_profile) {
    u64 f0 = h + 1;
    R.sum_f0_sq += f0 * f0;
    if (F.subfield_degree(Elem{z}) == 1)
      R.L2 += f0 * f0;
    else
      R.L1 += f0 * f0;
  }

  // |Z' \ Z| and pointwise f <= f0 by merging the two sorted profiles
  {
    size_t i = 0, j = 0;
    bool ple = true;
    while (i < R.f_profile.size()) {
      while (j < R.f0_profile.size() && R.f0_profile[j].first < R.f_profile[i].first) ++j;
      if (j == R.f0_profile.size() || R.f0_profile[j].first != R.f_profile[i].first) {
        ++R.Zprime_minus_Z;
        if (R.f_profile[i].second + bump > 1) ple = false;  // f0 >= 1 always
      } else if (R.f_profile[i].second + bump > R.f0_profile[j].second + 1) {
        ple = false;
      }
      ++i;
    }
    R.f_le_f0 = ple;
  }

  if (!R.sampled) {
    R.verdicts_evaluated = true;
    u64 B2 = R.B_size * R.B_size;
    R.en_holds = R.E <= 2 * B2 + R.sum_f_sq;
    R.fz_holds = R.sum_f_sq <= R.sum_f0_sq + R.Zprime_minus_Z;
    R.chain_holds = R.E <= 3 * B2 + R.L1 + R.L2;
  } else {
    R.f_le_f0 = false;  // not meaningful on sampled profiles
  }

  u64 hmax = *std::max_element(box.H.begin(), box.H.end());
  R.kl_hypothesis = 2 * hmax * hmax < F.p();
  double lp = std::log(static_cast<double>(F.p()));
  double lpn = std::pow(lp, F.n());
  double B2d = static_cast<double>(R.B_size) * static_cast<double>(R.B_size);
  R.kl_ratio = static_cast<double>(R.E) / (B2d * lpn);
  R.l1_ratio = static_cast<double>(R.L1) / B2d;
  R.l2_ratio = static_cast<double>(R.L2) / (B2d * lpn);
  return R;
}

struct KlVerdict {
  EnergyReport rep;
  bool pass = false;  // all exact counting steps verified
};

inline KlVerdict kl_verdict(const FieldCtx& F, const BoxSpec& box, const EnergyOptions& opt = {}) {
  KlVerdict V;
  V.rep = energy_via_ratios(F, box, opt);
  V.pass = V.rep.verdicts_evaluated && V.rep.en_holds && V.rep.fz_holds && V.rep.f_le_f0 &&
           V.rep.chain_holds;
  return V;
}

// --- dyadic census of ratios by first-minimum size ------------------------------

struct CensusRow {
  int j = 0;           // dyadic class: 2^{j-1} <= lambda_1 H_second < 2^j
  u64 class_size = 0;  // number of ratios in the class
  u64 sum_f0_sq = 0;
  double max_lce = 0;  // largest prod max(1, 1/lambda_i) in the class
};

struct CensusReport {
  std::vector<CensusRow> rows;
  std::map<int, u64> by_s;  // s(z) = #{i : lambda_i <= 1} -> count
  u64 z_outside = 0;        // |Z \ F_p|
  u64 L1 = 0;
  bool floor_all = true;     // lambda_1 H_second >= 1 for every such z
  bool f0_match_all = true;  // f0(z) == |Lambda_z ∩ D| for every such z
};

inline CensusReport dyadic_census(const FieldCtx& F, const BoxSpec& box,
                                  const EnergyOptions& opt = {}, u64 lattice_budget = 50000000) {
  validate_box(F, box);
  for (u64 h : box.H)
    if (2 * h + 1 > F.p())
      fail_invalid("census requires 2H+1 <= p so difference coordinates do not wrap");

  BoxSpec b0 = difference_box(F, box);
  auto elems0 = box_elements(F, b0, opt.pair_budget);
  std::vector<Elem> star0;
  for (Elem x : elems0)
    if (x.v != 0) star0.push_back(x);
  bool sampled = false;
  u64 pairs = 0;
  auto prof = detail::ratio_profile(F, star0, opt, sampled, pairs);
  if (sampled) fail_budget("census requires exact ratio profiles");

  std::vector<u64> hs = box.H;
  std::sort(hs.begin(), hs.end());
  u64 h2 = hs[hs.size() >= 2 ? hs.size() - 2 : 0];

  CensusReport C;
  std::map<int, CensusRow> rows;
  for (const auto& [zi, h] : prof) {
    Elem z{zi};
    if (F.subfield_degree(z) == 1) continue;
    ++C.z_outside;
    u64 f0 = h + 1;
    C.L1 += f0 * f0;

    auto L = build_lambda_z(F, box.basis, z, box.H);
    auto R = successive_minima(L, lattice_budget);
    const Rat& l1 = R.lambda[0];
    // lambda_1 * H_second, exact: floor check and dyadic exponent
    i128 numh = i128(l1.num) * static_cast<i64>(h2);
    if (numh < l1.den) C.floor_all = false;
    int j = 1;
    while (numh >= i128(l1.den) * (i128(1) << j)) ++j;  // 2^{j-1} <= l1 h2 < 2^j
    int s = 0;
    for (const Rat& l : R.lambda)
      if (l.num <= l.den) ++s;
    ++C.by_s[s];

    u64 pts = count_points(L, Rat::make(1, 1), lattice_budget);
    if (pts != f0) C.f0_match_all = false;

    CensusRow& row = rows[j];
    row.j = j;
    ++row.class_size;
    row.sum_f0_sq += f0 * f0;
    row.max_lce = std::max(row.max_lce, lce_product(R));
  }
  for (auto& [j, row] : rows) C.rows.push_back(row);
  return C;
}

}  // namespace charbox
