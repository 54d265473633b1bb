// Relation-lattice geometry: construction, successive minima, point counts,
// Minkowski sandwich, dual lattice, transference.  The oracles here avoid the
// library's span-enumeration engine entirely: points are found by scanning a
// full coordinate box and testing the defining congruences y = x Mz mod p
// directly, minima are recovered from rank jumps of sublevel sets using a
// stand-alone fraction-free elimination, and the dual gauge minimum is found
// by a divisibility filter over a box.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "charbox/lattice.hpp"

using namespace charbox;

namespace {

// rank over Q of integer rows, by fraction-free forward elimination
int rank_rows(std::vector<std::vector<cpp_int>> M) {
  if (M.empty()) return 0;
  int rows = static_cast<int>(M.size()), cols = static_cast<int>(M[0].size()), rk = 0;
  for (int c = 0; c < cols && rk < rows; ++c) {
    int piv = -1;
    for (int r = rk; r < rows; ++r)
      if (M[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[rk], M[piv]);
    for (int r = rk + 1; r < rows; ++r) {
      if (M[r][c] == 0) continue;
      cpp_int a = M[rk][c], b = M[r][c];
      for (int cc = 0; cc < cols; ++cc) M[r][cc] = M[r][cc] * a - M[rk][cc] * b;
    }
    ++rk;
  }
  return rk;
}

// all lattice vectors with |v_c| <= X_c, by scanning the whole box and
// checking the congruences coordinate-wise (no span machinery)
std::vector<std::vector<i64>> direct_points(const LatticeInstance& L, const std::vector<i64>& X) {
  int dim = 2 * L.n;
  i64 P = static_cast<i64>(L.p);
  std::vector<std::vector<i64>> out;
  std::vector<i64> v(dim);
  auto rec = [&](auto&& self, int c) -> void {
    if (c == dim) {
      for (int j = 0; j < L.n; ++j) {
        i64 acc = 0;
        for (int i = 0; i < L.n; ++i) acc += v[i] * static_cast<i64>(L.Mz[i][j]);
        acc -= v[L.n + j];
        if (((acc % P) + P) % P != 0) return;
      }
      out.push_back(v);
      return;
    }
    for (i64 t = -X[c]; t <= X[c]; ++t) {
      v[c] = t;
      self(self, c + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// lambda_j = min { t : rank of { v in Lambda : ||v|| <= t } >= j }
std::vector<Rat> minima_oracle(const LatticeInstance& L) {
  int dim = 2 * L.n;
  u64 hmin = L.min_weight();
  std::vector<i64> X(dim);
  for (int c = 0; c < dim; ++c) X[c] = static_cast<i64>(L.p * L.weight(c) / hmin);
  auto pts = direct_points(L, X);

  std::vector<std::pair<Rat, std::vector<i64>>> nz;
  for (auto& v : pts)
    if (std::any_of(v.begin(), v.end(), [](i64 x) { return x != 0; })) nz.push_back({L.norm(v), v});
  std::sort(nz.begin(), nz.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Rat> lambda;
  std::vector<std::vector<cpp_int>> acc;
  size_t i = 0;
  int rk = 0;
  while (i < nz.size() && rk < dim) {
    size_t j = i;
    while (j < nz.size() && nz[j].first == nz[i].first) ++j;  // close the norm class
    for (size_t k = i; k < j; ++k)
      acc.emplace_back(nz[k].second.begin(), nz[k].second.end());
    int nrk = rank_rows(acc);
    for (int t = rk; t < nrk; ++t) lambda.push_back(nz[i].first);
    rk = nrk;
    i = j;
  }
  REQUIRE(rk == dim);
  return lambda;
}

// gauge minimum of p Lambda^* by direct divisibility scan
u64 dual_gauge_oracle(const LatticeInstance& L) {
  int dim = 2 * L.n;
  i64 P = static_cast<i64>(L.p);
  u64 hmin = L.min_weight();
  std::vector<i64> X(dim);
  for (int c = 0; c < dim; ++c) X[c] = static_cast<i64>(L.p * hmin / L.weight(c));
  u64 best = ~u64(0);
  std::vector<i64> w(dim);
  auto rec = [&](auto&& self, int c) -> void {
    if (c == dim) {
      // w in p Lambda^*  iff  <w, row_i> ≡ 0 mod p for the n rows (e_i | Mz_i)
      for (int i = 0; i < L.n; ++i) {
        i64 acc = w[i];
        for (int j = 0; j < L.n; ++j) acc += static_cast<i64>(L.Mz[i][j]) * w[L.n + j];
        if (((acc % P) + P) % P != 0) return;
      }
      u64 g = 0;
      bool zero = true;
      for (int cc = 0; cc < dim; ++cc) {
        u64 a = static_cast<u64>(w[cc] < 0 ? -w[cc] : w[cc]);
        if (a) zero = false;
        g += a * L.weight(cc);
      }
      if (!zero) best = std::min(best, g);
      return;
    }
    for (i64 t = -X[c]; t <= X[c]; ++t) {
      w[c] = t;
      self(self, c + 1);
    }
  };
  rec(rec, 0);
  return best;
}

bool expect(bool cond, const std::string& what) {
  if (!cond) FAIL_CHECK(what);
  return cond;
}

}  // namespace

TEST_CASE("exact rational norms reduce and compare correctly") {
  Rat a = Rat::make(2, 4);
  CHECK(a.num == 1);
  CHECK(a.den == 2);
  CHECK(Rat::make(-6, 4).num == -3);
  CHECK(Rat::make(0, 5).num == 0);
  CHECK(Rat::make(1, 3) < Rat::make(1, 2));
  CHECK(Rat::make(7, 2) < Rat::make(15, 4));
  CHECK(Rat::make(4, 1) == Rat::make(8, 2));
  CHECK_THROWS_AS(Rat::make(1, 0), Error);
  CHECK(Rat::make(3, 4).value() == Catch::Approx(0.75));
}

TEST_CASE("relation matrix for z = t over the 49-element field") {
  auto F = FieldCtx::make(7, 2);
  auto basis = polynomial_basis(F);
  Elem z = F.from_coeffs({0, 1});  // t;  modulus is t^2 + 1, so t * t = -1
  auto L = build_lambda_z(F, basis, z, {1, 1});

  CHECK(L.Mz == std::vector<std::vector<u64>>{{0, 1}, {6, 0}});
  CHECK(L.rows[0] == std::vector<i64>{1, 0, 0, 1});
  CHECK(L.rows[1] == std::vector<i64>{0, 1, 6, 0});
  CHECK(L.rows[2] == std::vector<i64>{0, 0, 7, 0});
  CHECK(L.rows[3] == std::vector<i64>{0, 0, 0, 7});
  CHECK(det_abs(L.rows) == 49);

  // membership: y1 = -x2, y2 = x1 mod 7
  CHECK(L.contains({1, 0, 0, 1}));
  CHECK(L.contains({0, 1, -1, 0}));
  CHECK(L.contains({0, 1, 6, 0}));
  CHECK_FALSE(L.contains({1, 0, 1, 0}));
  CHECK_FALSE(L.contains({0, 1, 1, 0}));
}

TEST_CASE("minima anchor: z = t, unit weights, lambda = (1,1,4,4)") {
  auto F = FieldCtx::make(7, 2);
  auto L = build_lambda_z(F, polynomial_basis(F), F.from_coeffs({0, 1}), {1, 1});
  auto R = successive_minima(L);

  REQUIRE(R.lambda.size() == 4);
  CHECK(R.lambda[0] == Rat::make(1, 1));
  CHECK(R.lambda[1] == Rat::make(1, 1));
  CHECK(R.lambda[2] == Rat::make(4, 1));
  CHECK(R.lambda[3] == Rat::make(4, 1));
  CHECK(R.det == 49);

  // witnesses lie in the lattice, achieve their norms, and are independent
  std::vector<std::vector<cpp_int>> wit;
  for (size_t j = 0; j < 4; ++j) {
    CHECK(L.contains(R.witness[j]));
    CHECK(L.norm(R.witness[j]) == R.lambda[j]);
    wit.emplace_back(R.witness[j].begin(), R.witness[j].end());
  }
  CHECK(rank_rows(wit) == 4);

  // the unit ball holds 9 lattice points: all (x1,x2) in {-1,0,1}^2 lift
  CHECK(count_points(L, Rat::make(1, 1)) == 9);
  // scale 0 leaves only the origin
  CHECK(count_points(L, Rat::make(0, 1)) == 1);

  auto M = minkowski_check(L, R);
  CHECK(M.lower_ok);
  CHECK(M.upper_ok);
  // prod lambda = 16, vol(D) = 16, p^n = 49
  CHECK(M.scaled_product == Catch::Approx(256.0 / 49.0));

  CHECK(F.subfield_degree(L.z) == 2);
  CHECK(lambda1_floor_holds(F, L, R));
}

TEST_CASE("doubling the weights exactly halves every minimum") {
  auto F = FieldCtx::make(7, 2);
  Elem z = F.from_coeffs({0, 1});
  auto L1 = build_lambda_z(F, polynomial_basis(F), z, {1, 1});
  auto L2 = build_lambda_z(F, polynomial_basis(F), z, {2, 2});
  auto L3 = build_lambda_z(F, polynomial_basis(F), z, {3, 3});
  auto R1 = successive_minima(L1), R2 = successive_minima(L2), R3 = successive_minima(L3);
  for (int j = 0; j < 4; ++j) {
    CHECK(R2.lambda[j] == Rat::make(R1.lambda[j].num, 2 * R1.lambda[j].den));
    CHECK(R3.lambda[j] == Rat::make(R1.lambda[j].num, 3 * R1.lambda[j].den));
  }
}

TEST_CASE("z = 0 gives the product lattice Z^n x pZ^n") {
  auto F = FieldCtx::make(7, 2);
  auto L = build_lambda_z(F, polynomial_basis(F), F.zero(), {1, 1});
  auto R = successive_minima(L);
  CHECK(R.lambda[0] == Rat::make(1, 1));
  CHECK(R.lambda[1] == Rat::make(1, 1));
  CHECK(R.lambda[2] == Rat::make(7, 1));
  CHECK(R.lambda[3] == Rat::make(7, 1));
  CHECK(count_points(L, Rat::make(1, 1)) == 9);  // x free in {-1,0,1}^2, y = 0
  CHECK(R.det == 49);
}

TEST_CASE("greedy minima agree with the rank-jump oracle") {
  struct Grid {
    u64 p;
    int n;
    std::vector<u64> zs;  // element indices
    std::vector<std::vector<u64>> Hs;
  };
  std::vector<Grid> grids;
  {
    Grid g{7, 2, {}, {{1, 1}, {2, 2}, {1, 3}}};
    for (u64 i = 0; i < 49; ++i) g.zs.push_back(i);
    grids.push_back(g);
  }
  grids.push_back({11, 2, {0, 1, 2, 10, 11, 12, 13, 23, 37, 60, 100, 119, 120}, {{1, 1}, {1, 3}}});

  for (const auto& g : grids) {
    auto F = FieldCtx::make(g.p, g.n);
    auto basis = polynomial_basis(F);
    for (u64 zi : g.zs) {
      for (const auto& H : g.Hs) {
        auto L = build_lambda_z(F, basis, F.from_int(zi), H);
        auto R = successive_minima(L);
        auto oracle = minima_oracle(L);
        REQUIRE(R.lambda.size() == oracle.size());
        for (size_t j = 0; j < oracle.size(); ++j)
          expect(R.lambda[j] == oracle[j],
                 "minima mismatch p=" + std::to_string(g.p) + " z=" + std::to_string(zi));
        // witnesses: membership, norm, independence
        std::vector<std::vector<cpp_int>> wit;
        for (size_t j = 0; j < R.witness.size(); ++j) {
          expect(L.contains(R.witness[j]), "witness outside lattice");
          expect(L.norm(R.witness[j]) == R.lambda[j], "witness norm mismatch");
          wit.emplace_back(R.witness[j].begin(), R.witness[j].end());
        }
        expect(rank_rows(wit) == 2 * g.n, "witnesses not independent");
        // a-priori radius really contains all minima
        expect(R.lambda.back() <= Rat::make(static_cast<i64>(g.p), static_cast<i64>(L.min_weight())),
               "last minimum above a-priori radius");
        // determinant
        cpp_int pn = 1;
        for (int i = 0; i < g.n; ++i) pn *= g.p;
        expect(R.det == pn, "determinant is not p^n");
        // Minkowski sandwich
        auto M = minkowski_check(L, R);
        expect(M.lower_ok && M.upper_ok, "Minkowski sandwich failed");
      }
    }
  }
}

TEST_CASE("point counts match direct enumeration across scales") {
  auto F = FieldCtx::make(7, 2);
  auto basis = polynomial_basis(F);
  std::vector<Rat> scales = {Rat::make(1, 2), Rat::make(1, 1), Rat::make(2, 1), Rat::make(7, 2)};
  for (u64 zi : {u64(0), u64(1), u64(7), u64(8), u64(12), u64(30), u64(48)}) {
    for (std::vector<u64> H : {std::vector<u64>{1, 1}, std::vector<u64>{2, 3}}) {
      auto L = build_lambda_z(F, basis, F.from_int(zi), H);
      for (Rat s : scales) {
        std::vector<i64> X(4);
        for (int c = 0; c < 4; ++c)
          X[c] = static_cast<i64>(i128(s.num) * static_cast<i64>(L.weight(c)) / s.den);
        u64 direct = direct_points(L, X).size();
        expect(count_points(L, s) == direct, "count mismatch z=" + std::to_string(zi));
      }
    }
  }
}

TEST_CASE("first-minimum floor holds for every ratio outside the prime field") {
  auto F = FieldCtx::make(7, 2);
  auto basis = polynomial_basis(F);
  for (u64 zi = 0; zi < 49; ++zi) {
    Elem z = F.from_int(zi);
    for (std::vector<u64> H : {std::vector<u64>{1, 1}, std::vector<u64>{2, 2},
                               std::vector<u64>{1, 3}, std::vector<u64>{3, 2}}) {
      auto L = build_lambda_z(F, basis, z, H);
      auto R = successive_minima(L);
      if (F.subfield_degree(z) == 1) {
        CHECK_THROWS_AS(lambda1_floor_holds(F, L, R), Error);
      } else {
        expect(lambda1_floor_holds(F, L, R), "floor failed z=" + std::to_string(zi));
      }
    }
  }
}

TEST_CASE("dual basis identities, gauge minimum, transference") {
  auto F7 = FieldCtx::make(7, 2);
  auto basis7 = polynomial_basis(F7);

  SECTION("anchor: z = t, unit weights") {
    auto L = build_lambda_z(F7, basis7, F7.from_coeffs({0, 1}), {1, 1});
    auto D = dual_first_minimum(L);
    CHECK(D.wb_identity);
    CHECK(D.double_dual_ok);
    CHECK(D.apriori_ok);
    CHECK(D.gauge_min == 2);
    CHECK(D.lambda1_star == Rat::make(2, 7));
    // witness pairs to a multiple of p against every primal basis row
    for (const auto& row : L.rows) {
      i64 dot = 0;
      for (int c = 0; c < 4; ++c) dot += D.witness[c] * row[c];
      CHECK(dot % 7 == 0);
    }
    auto R = successive_minima(L);
    CHECK(transference_holds(R, D));  // (2/7) * 4 = 8/7 >= 1
  }

  SECTION("grid against the divisibility oracle") {
    for (u64 zi = 0; zi < 49; ++zi) {
      for (std::vector<u64> H : {std::vector<u64>{1, 1}, std::vector<u64>{1, 3}}) {
        auto L = build_lambda_z(F7, basis7, F7.from_int(zi), H);
        auto D = dual_first_minimum(L);
        expect(D.wb_identity, "W B^T != p I at z=" + std::to_string(zi));
        expect(D.double_dual_ok, "double dual mismatch");
        expect(D.apriori_ok, "dual gauge outside a-priori range");
        expect(D.gauge_min == dual_gauge_oracle(L), "dual gauge oracle mismatch");
        auto R = successive_minima(L);
        expect(transference_holds(R, D), "transference product below 1");
      }
    }
    auto F11 = FieldCtx::make(11, 2);
    auto basis11 = polynomial_basis(F11);
    for (u64 zi : {u64(11), u64(12), u64(25), u64(100)}) {
      auto L = build_lambda_z(F11, basis11, F11.from_int(zi), {1, 1});
      auto D = dual_first_minimum(L);
      expect(D.gauge_min == dual_gauge_oracle(L), "dual gauge oracle mismatch (p=11)");
      expect(transference_holds(successive_minima(L), D), "transference failed (p=11)");
    }
  }
}

TEST_CASE("dimension-six instance over the 27-element field") {
  auto F = FieldCtx::make(3, 3);
  auto basis = polynomial_basis(F);
  for (u64 zi : {u64(3), u64(4), u64(10), u64(26)}) {
    auto L = build_lambda_z(F, basis, F.from_int(zi), {1, 1, 1});
    auto R = successive_minima(L);
    auto oracle = minima_oracle(L);
    REQUIRE(R.lambda.size() == 6);
    for (size_t j = 0; j < 6; ++j) expect(R.lambda[j] == oracle[j], "n=3 minima mismatch");
    cpp_int d = det_abs(L.rows);
    CHECK(d == 27);
    auto M = minkowski_check(L, R);
    CHECK(M.lower_ok);
    CHECK(M.upper_ok);
    auto D = dual_first_minimum(L);
    CHECK(D.wb_identity);
    CHECK(D.double_dual_ok);
    CHECK(D.gauge_min == dual_gauge_oracle(L));
    CHECK(transference_holds(R, D));
  }
}

TEST_CASE("a basis other than the polynomial one gives consistent counts") {
  auto F = FieldCtx::make(7, 2);
  BasisSpec alt{{F.from_coeffs({1, 1}), F.from_coeffs({0, 1})}};  // (1 + t, t)
  REQUIRE(basis_valid(F, alt));
  Elem z = F.from_coeffs({0, 1});
  auto L = build_lambda_z(F, alt, z, {1, 1});
  CHECK(det_abs(L.rows) == 49);
  auto R = successive_minima(L);
  auto oracle = minima_oracle(L);
  for (size_t j = 0; j < 4; ++j) CHECK(R.lambda[j] == oracle[j]);
  std::vector<i64> X = {1, 1, 1, 1};
  CHECK(count_points(L, Rat::make(1, 1)) == direct_points(L, X).size());
  // change of basis changes the relation matrix
  auto Lpoly = build_lambda_z(F, polynomial_basis(F), z, {1, 1});
  CHECK(L.Mz != Lpoly.Mz);
}

TEST_CASE("invalid lattice inputs are rejected") {
  auto F = FieldCtx::make(7, 2);
  auto basis = polynomial_basis(F);
  Elem z = F.from_coeffs({0, 1});

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return Errc::math_violation;  // placeholder: "did not throw"
  };

  CHECK(kind_of([&] { build_lambda_z(F, basis, z, {1}); }) == Errc::invalid_input);
  CHECK(kind_of([&] { build_lambda_z(F, basis, z, {1, 0}); }) == Errc::invalid_input);
  CHECK(kind_of([&] { build_lambda_z(F, basis, z, {1, 8}); }) == Errc::invalid_input);
  BasisSpec dep{{F.from_coeffs({1, 1}), F.from_coeffs({2, 2})}};
  CHECK(kind_of([&] { build_lambda_z(F, dep, z, {1, 1}); }) == Errc::invalid_input);

  auto L = build_lambda_z(F, basis, z, {1, 1});
  CHECK(kind_of([&] { count_points(L, Rat::make(-1, 1)); }) == Errc::invalid_input);
  CHECK(kind_of([&] { successive_minima(L, 10); }) == Errc::budget_exceeded);
}
